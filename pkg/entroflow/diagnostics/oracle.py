"""
Точные значения для ℝⁿ и тора.

Гауссово ядро H = (4πt)^{−n/2} e^{−|x|²/4t} даёт замкнутые формулы
для всех энтропий; они сверяются с радиальной квадратурой.
"""
import itertools
import logging
import math
from typing import Dict, Optional, Sequence, Tuple

import numpy as np
from scipy import integrate, optimize

from core.exceptions import (
    FlowError, InvalidDimensionError, RemainderConstraintError,
    UnsupportedTopologyError
)
from entropy.bounds import b_const
from manifold.models import DiscreteManifold

from .models import EUCLIDEAN_FAMILY, EntropyTrace

logger = logging.getLogger(__name__)

RADIAL_CUTOFF: float = 12.0
QUADRATURE_EPSABS: float = 1e-14
QUADRATURE_EPSREL: float = 1e-13
RATE_STEP: float = 1e-4


def _check_oracle_arguments(n: int, a: float) -> None:
    if n < 1:
        raise InvalidDimensionError(f'Размерность ℝⁿ должна быть ≥ 1: {n}')
    if a < 0:
        raise RemainderConstraintError(
            f'Для ℝⁿ допускается только a ≥ 0, получено a = {a}'
        )


def euclidean_oracle(
        n: int, a: float, t_grid: Sequence[float]
) -> EntropyTrace:
    """Трасса гауссова ядра на ℝⁿ по замкнутым формулам."""
    _check_oracle_arguments(n, a)
    times = np.asarray(t_grid, dtype=float)
    if times.size == 0 or not np.all(times > 0):
        raise FlowError('Моменты времени оракула должны быть положительными')
    entropy = 0.5 * n * np.log(4.0 * math.pi * times) + 0.5 * n
    omega = n / (8.0 * times) + a
    rate = -32.0 * a ** 2 * times / (n + 8.0 * a * times)
    zeros = np.zeros_like(times)
    columns = {
        't': times,
        'mass': np.ones_like(times),
        'W': zeros.copy(),
        'Y0': np.full_like(times, -b_const(n)),
        'Ya': entropy + 0.5 * n * np.log(omega) - 4.0 * a * times,
        'omega': omega,
        'dissipation': -rate,
        'ni_dissipation': zeros.copy(),
        'rigidity_gap': zeros.copy(),
        'Ya_rate': rate,
        'W_rate': zeros.copy(),
    }
    return EntropyTrace(columns, {
        'scenario': EUCLIDEAN_FAMILY,
        'family': EUCLIDEAN_FAMILY,
        'topology': EUCLIDEAN_FAMILY,
        'dimension': n,
        'a': a,
        'dt': 0.0,
        'mesh_size': 0.0,
    })


def _radial(integrand, n: int) -> float:
    """∫₀^∞ integrand(s)·S_{n−1}π^{−n/2}e^{−s²}s^{n−1} ds."""
    sphere = 2.0 * math.pi ** (0.5 * n) / math.gamma(0.5 * n)

    def weighted(s: float) -> float:
        return integrand(s) * sphere * math.pi ** (-0.5 * n) * math.exp(
            -s * s) * s ** (n - 1)

    value, _ = integrate.quad(
        weighted, 0.0, RADIAL_CUTOFF,
        epsabs=QUADRATURE_EPSABS, epsrel=QUADRATURE_EPSREL, limit=200,
    )
    return value


def euclidean_quadrature(n: int, a: float, t: float) -> Dict[str, float]:
    """
    Те же величины квадратурой по s = |x|/√(4t):
    H dx = S_{n−1}π^{−n/2}e^{−s²}s^{n−1}ds, −log H = (n/2)log 4πt + s²,
    |∇√H|² = H s²/(4t), f = s², τ|∇f|² = s².
    """
    _check_oracle_arguments(n, a)
    log_scale = 0.5 * n * math.log(4.0 * math.pi * t)
    mass = _radial(lambda s: 1.0, n)
    entropy = _radial(lambda s: log_scale + s * s, n)
    dirichlet = _radial(lambda s: s * s / (4.0 * t), n)
    w_value = _radial(lambda s: 2.0 * s * s - n, n)
    omega = dirichlet + a
    return {
        'mass': mass,
        'entropy': entropy,
        'dirichlet': dirichlet,
        'omega': omega,
        'W': w_value,
        'Y0': entropy + 0.5 * n * math.log(dirichlet),
        'Ya': entropy + 0.5 * n * math.log(omega) - 4.0 * a * t,
    }


def quadrature_rate(
        n: int, a: float, t: float, delta: float = RATE_STEP
) -> float:
    """dY_a/dt центральной разностью квадратурных значений."""
    forward = euclidean_quadrature(n, a, t + delta)['Ya']
    backward = euclidean_quadrature(n, a, t - delta)['Ya']
    return (forward - backward) / (2.0 * delta)


def golden_h_min(omega: float, d: float) -> Tuple[float, float]:
    """Минимум h(s) = sω − (d/2)log s золотым сечением по log s."""
    def h(log_s: float) -> float:
        return math.exp(log_s) * omega - 0.5 * d * log_s

    result = optimize.minimize_scalar(
        h, bracket=(0.0, 1.0), method='golden', options={'xtol': 1e-12}
    )
    return math.exp(result.x), float(result.fun)


def _image_count(manifold: DiscreteManifold, t: float) -> int:
    if not manifold.is_grid:
        raise UnsupportedTopologyError(
            f'Сумма по образам определена только для тора, '
            f'а не для {manifold.topology}'
        )
    shortest = min(manifold.side_lengths)
    return max(1, int(math.ceil(math.sqrt(4.0 * t * 40.0) / shortest)) + 1)


def _displacements(
        manifold: DiscreteManifold, source: int, images: int
):
    """Смещения x − x₀ − kL для всех образов источника."""
    lengths = np.asarray(manifold.side_lengths)
    base = manifold.positions - manifold.positions[source]
    shifts = range(-images, images + 1)
    for combo in itertools.product(shifts, repeat=manifold.dimension):
        yield base - np.asarray(combo) * lengths


def image_sum_kernel(
        manifold: DiscreteManifold,
        source: int,
        t: float,
        images: Optional[int] = None,
) -> np.ndarray:
    """Ядро плоского тора как периодизация евклидова гауссиана."""
    images = _image_count(manifold, t) if images is None else images
    n = manifold.dimension
    values = np.zeros(manifold.vertex_count)
    for offset in _displacements(manifold, source, images):
        values += np.exp(-np.sum(offset ** 2, axis=1) / (4.0 * t))
    return values / (4.0 * math.pi * t) ** (0.5 * n)


def torus_oracle_y0(
        manifold: DiscreteManifold, source: int, t: float
) -> float:
    """
    Y₀ непрерывного ядра тора: сумма по образам с точным градиентом,
    интегралы по узлам сетки.
    """
    images = _image_count(manifold, t)
    n = manifold.dimension
    density = np.zeros(manifold.vertex_count)
    grad = np.zeros((manifold.vertex_count, n))
    for offset in _displacements(manifold, source, images):
        gaussian = np.exp(-np.sum(offset ** 2, axis=1) / (4.0 * t))
        density += gaussian
        grad += gaussian[:, None] * (-offset / (2.0 * t))
    scale = (4.0 * math.pi * t) ** (-0.5 * n)
    density *= scale
    grad *= scale
    weights = manifold.mu_weights
    positive = density > 0
    entropy = -float(np.dot(
        np.where(positive, density * np.log(
            np.where(positive, density, 1.0)), 0.0),
        weights,
    ))
    dirichlet = float(np.dot(
        np.divide(np.sum(grad ** 2, axis=1), 4.0 * density,
                  out=np.zeros_like(density), where=positive),
        weights,
    ))
    logger.debug('Образов %d, масса %.12g', images,
                 float(np.dot(density, weights)))
    return entropy + 0.5 * n * math.log(dirichlet)


def oracle_self_check(n: int, a: float, t: float) -> float:
    """Наибольшее расхождение замкнутых формул и квадратуры."""
    closed = euclidean_oracle(n, a, [t])
    numeric = euclidean_quadrature(n, a, t)
    return max(
        abs(float(closed.column(name)[0]) - numeric[name])
        for name in ('W', 'Y0', 'Ya', 'omega')
    )
