import logging
import math
from typing import Optional

import numpy as np
from scipy.special import xlogy

from core.conf import entroflow_setting
from core.exceptions import (
    InvalidDimensionError, InvalidDiscretizationError, NonPositiveOmegaError,
    NormalizationError
)
from flow.models import HeatState, PotentialField
from flow.variables import sqrt_state
from manifold.measures import integrate_values
from manifold.models import NU, ScalarField
from operators.models import LaplacianOperator

from .models import EntropyParams, EntropyValue

logger = logging.getLogger(__name__)


def check_normalization(u: ScalarField, measure: str) -> float:
    """Проверяет ∫u² = 1 и возвращает интеграл."""
    mass = integrate_values(u.values ** 2, u.manifold, measure)
    if abs(mass - 1.0) > entroflow_setting('NORMALIZATION_TOL'):
        raise NormalizationError(
            f'∫u² по мере {measure} равен {mass:.12g}, ожидается 1'
        )
    return mass


def dirichlet_energy(
        u: ScalarField, op: LaplacianOperator, measure: str
) -> float:
    """∫|∇u|² как квадратичная форма u·S·u оператора потока."""
    if not u.belongs_to(op.manifold):
        raise InvalidDiscretizationError(
            'Поле и оператор заданы на разных многообразиях'
        )
    if measure != op.measure:
        raise ValueError(
            f'Энергия по мере {measure} требует оператора по той же мере, '
            f'а оператор задан по {op.measure}'
        )
    return op.quadratic_form(u.values)


def log_density_term(u: ScalarField, measure: str) -> float:
    """−∫u² log u², с соглашением 0·log 0 = 0."""
    density = u.values ** 2
    return -integrate_values(xlogy(density, density), u.manifold, measure)


def omega(
        u: ScalarField,
        params: EntropyParams,
        op: LaplacianOperator,
        time: Optional[float] = None,
) -> float:
    """ω = ∫|∇u|² + a; неположительное значение недопустимо."""
    check_normalization(u, params.measure)
    value = dirichlet_energy(u, op, params.measure) + params.a
    if not value > 0:
        raise NonPositiveOmegaError(value, time)
    return value


def ni_entropy(
        f: PotentialField,
        tau: float,
        state: HeatState,
        d: float,
        op: LaplacianOperator,
) -> EntropyValue:
    """
    W(f, τ) = ∫(τ|∇f|² + f − d)ũ.
    Слагаемое τ|∇f|²ũ считается как 4τ|∇u|², u = √ũ.
    """
    if f.tau != tau or f.dimension != d:
        raise ValueError(
            f'f построена для τ = {f.tau}, d = {f.dimension}, '
            f'а запрошено τ = {tau}, d = {d}'
        )
    measure = state.measure
    weights = state.manifold.weights(measure)
    u = sqrt_state(state)
    energy = dirichlet_energy(u, op, measure)
    masked_density = np.where(f.mask, state.values, 0.0)
    potential = float(np.dot(f.values * masked_density, weights))
    linear = -d * float(np.dot(masked_density, weights))
    fisher = 4.0 * tau * energy
    return EntropyValue(
        value=fisher + potential + linear,
        components={
            'dirichlet': fisher,
            'log_density': potential,
            'linear': linear,
        },
    )


def ni_entropy_rewrite(
        u: ScalarField,
        tau: float,
        params: EntropyParams,
        op: LaplacianOperator,
) -> float:
    """−∫u²log u² + 4τω − 4aτ − (d/2)log(4πτ) − d."""
    d = params.d
    return (
        log_density_term(u, params.measure)
        + 4.0 * tau * omega(u, params, op)
        - 4.0 * params.a * tau
        - 0.5 * d * math.log(4.0 * math.pi * tau)
        - d
    )


def log_entropy_y0(
        u: ScalarField,
        op: LaplacianOperator,
        d: Optional[float] = None,
        measure: Optional[str] = None,
) -> float:
    """Y₀ = −∫u²log u² + (d/2)log ∫|∇u|²."""
    measure = measure or op.measure
    d = u.manifold.dimension if d is None else d
    check_normalization(u, measure)
    energy = dirichlet_energy(u, op, measure)
    if not energy > 0:
        raise NonPositiveOmegaError(energy)
    return log_density_term(u, measure) + 0.5 * d * math.log(energy)


def log_entropy_ya(
        u: ScalarField, params: EntropyParams, op: LaplacianOperator
) -> float:
    """Y_a = −∫u²log u² + (d/2)log ω."""
    value = omega(u, params, op)
    return log_density_term(u, params.measure) + (
        0.5 * params.d * math.log(value)
    )


def _adjusted(
        u: ScalarField,
        params: EntropyParams,
        t: float,
        op: LaplacianOperator,
) -> EntropyValue:
    value = omega(u, params, op, time=t)
    entropy = log_density_term(u, params.measure)
    logarithm = 0.5 * params.d * math.log(value)
    linear = -4.0 * params.a * t
    return EntropyValue(
        value=entropy + logarithm + linear,
        omega=value,
        components={
            'log_density': entropy,
            'dirichlet': logarithm,
            'linear': linear,
        },
    )


def adjusted_ya(
        u: ScalarField,
        params: EntropyParams,
        t: float,
        op: LaplacianOperator,
) -> EntropyValue:
    """Y_a(u, t) = Y_a(u) − 4at."""
    return _adjusted(u, params, t, op)


def weighted_ha(
        u: ScalarField,
        params: EntropyParams,
        t: float,
        op: LaplacianOperator,
) -> EntropyValue:
    """H_a(u, t) = −∫u²log u² dν + (m/2)log(∫|∇u|²dν + a) − 4at."""
    if u.manifold.be_dimension is None:
        raise InvalidDimensionError(
            'Для H_a нужна размерность Бакри-Эмери m'
        )
    if params.measure != NU:
        raise ValueError('H_a считается по мере ν')
    return _adjusted(u, params, t, op)
