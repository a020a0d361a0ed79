import logging
import math

import numpy as np

from core.conf import entroflow_setting
from core.exceptions import FlowError, KernelTruncationError
from manifold.models import DiscreteManifold, ScalarField
from operators.models import LaplacianOperator, SpectralData

from .models import HeatState, KernelSpec

logger = logging.getLogger(__name__)

ROW_CHUNK: int = 1024


def weyl_count(manifold: DiscreteManifold, eigenvalue: float) -> float:
    """Число собственных значений ниже λ по асимптотике Вейля."""
    n = manifold.dimension
    ball = math.pi ** (n / 2) / math.gamma(n / 2 + 1)
    return ball * manifold.volume() * eigenvalue ** (n / 2) / (
        2 * math.pi) ** n


def required_modes(manifold: DiscreteManifold, t: float, k: int) -> int:
    """Оценка k, при котором e^{−λ_k t}·k не превышает допуск усечения."""
    log_tol = -math.log(entroflow_setting('TRUNCATION_TOL'))
    estimate = float(k + 1)
    for _ in range(50):
        eigenvalue = (math.log(estimate) + log_tol) / t
        updated = max(weyl_count(manifold, eigenvalue), k + 1.0)
        if abs(updated - estimate) < 0.5:
            break
        estimate = updated
    return min(int(math.ceil(estimate)), manifold.vertex_count)


def truncation_bound(spectrum: SpectralData, k: int, t: float) -> float:
    """Оценка хвоста e^{−λ_{k−1} t}·k; для полного спектра ноль."""
    if spectrum.is_complete and k == spectrum.size:
        return 0.0
    return math.exp(-float(spectrum.eigenvalues[k - 1]) * t) * k


def kernel_row(
        spectrum: SpectralData, source: int, t: float, k: int
) -> np.ndarray:
    """
    Ненормированное H(x₀, ·, t) = Σ e^{−λᵢt} φᵢ(x₀) φᵢ(·).
    Каждое значение считается одинаково для (x₀, y) и (y, x₀).
    """
    fields = spectrum.eigenfields[:, :k]
    decay = np.exp(-spectrum.eigenvalues[:k] * t)
    pivot = fields[source]
    values = np.empty(fields.shape[0])
    for start in range(0, fields.shape[0], ROW_CHUNK):
        chunk = fields[start:start + ROW_CHUNK]
        values[start:start + ROW_CHUNK] = np.sum(
            (chunk * pivot) * decay, axis=1
        )
    return values


def heat_kernel(
        manifold: DiscreteManifold,
        op: LaplacianOperator,
        spec: KernelSpec,
        t: float,
        spectrum: SpectralData,
) -> HeatState:
    """Спектральное тепловое ядро из вершины spec.source_vertex."""
    if not t > 0:
        raise FlowError(f'Момент времени должен быть положительным: {t}')
    if op.manifold_id != manifold.manifold_id:
        raise FlowError('Оператор построен для другого многообразия')
    if spec.measure != op.measure or spectrum.measure != op.measure:
        raise FlowError(
            f'Меры ядра ({spec.measure}), спектра ({spectrum.measure}) '
            f'и оператора ({op.measure}) не совпадают'
        )
    k = spec.eigenpairs_used
    if k > spectrum.size:
        raise KernelTruncationError(
            f'Доступно {spectrum.size} собственных пар', required_k=k
        )
    bound = truncation_bound(spectrum, k, t)
    if bound > entroflow_setting('TRUNCATION_TOL'):
        raise KernelTruncationError(
            f'Хвост спектра при t = {t:.6g} оценивается в {bound:.3e}',
            required_k=required_modes(manifold, t, k),
        )
    values = kernel_row(spectrum, spec.source_vertex, t, k)
    negative = values < 0
    if negative.any():
        logger.debug('Ядро при t = %.6g: обрезано %d значений до %.3e',
                     t, int(negative.sum()), -values[negative].min())
        values[negative] = 0.0
    values /= np.dot(values, op.weights)
    return HeatState(ScalarField(values, op.manifold), float(t), op.measure)
