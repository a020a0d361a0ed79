import math
from typing import Dict, Tuple, Union

import numpy as np

from core.exceptions import NonPositiveOmegaError
from flow.models import HeatState
from flow.variables import compute_f, sqrt_state
from manifold.measures import integrate_values
from manifold.models import ScalarField
from operators.calculus import gradient_sq
from operators.models import LaplacianOperator

from .functionals import dirichlet_energy, log_density_term, omega
from .models import EntropyParams


def _log_sobolev_constant(d: float) -> float:
    return -0.5 * d * math.log(math.pi) - 0.5 * d * (
        1.0 + math.log(0.5 * d)
    )


def b_const(n: float) -> float:
    """b(n) = −(n/2)log π − (n/2)(1 + log(n/2))."""
    return _log_sobolev_constant(n)


def c_const(m: float) -> float:
    """Та же константа для размерности Бакри-Эмери m."""
    return _log_sobolev_constant(m)


def h_min(omega_value: float, d: float) -> Tuple[float, float]:
    """
    Минимум h(s) = sω − (d/2)log s на s > 0.
    Возвращает (s*, h(s*)) с s* = d/(2ω).
    """
    if not omega_value > 0:
        raise NonPositiveOmegaError(omega_value)
    s_star = d / (2.0 * omega_value)
    value = 0.5 * d * math.log(omega_value) + 0.5 * d * (
        1.0 - math.log(0.5 * d)
    )
    return s_star, value


def optimal_tau(omega_value: float, d: float) -> float:
    """τ = d/(8ω), при котором оценка снизу обращается в равенство."""
    if not omega_value > 0:
        raise NonPositiveOmegaError(omega_value)
    return d / (8.0 * omega_value)


def entropy_lower_bound(
        u: ScalarField,
        params: EntropyParams,
        tau: float,
        op: LaplacianOperator,
) -> float:
    """−∫u²log u² + (d/2)log ω − 4aτ + b(d)."""
    value = omega(u, params, op)
    return (
        log_density_term(u, params.measure)
        + 0.5 * params.d * math.log(value)
        - 4.0 * params.a * tau
        + _log_sobolev_constant(params.d)
    )


def optimal_entropy(
        u: ScalarField, params: EntropyParams, op: LaplacianOperator
) -> float:
    """−∫u²log u² + (d/2)log ω − da/(2ω) + b(d): значение W при τ = d/(8ω)."""
    value = omega(u, params, op)
    return (
        log_density_term(u, params.measure)
        + 0.5 * params.d * math.log(value)
        - params.d * params.a / (2.0 * value)
        + _log_sobolev_constant(params.d)
    )


def finiteness_relations(
        state: HeatState, tau: float, d: float, op: LaplacianOperator
) -> Dict[str, Union[float, bool]]:
    """
    Сравнение двух записей конечных величин:
    −∫u²log u² и ∫f ũ + (d/2)log(4πτ), ∫|∇u|² и ¼∫|∇f|²ũ.
    """
    measure = state.measure
    u = sqrt_state(state)
    f = compute_f(state, tau, d)
    density = np.where(f.mask, state.values, 0.0)
    entropy_direct = log_density_term(u, measure)
    entropy_via_f = integrate_values(
        f.values * density, state.manifold, measure
    ) + 0.5 * d * math.log(4.0 * math.pi * tau)
    dirichlet_direct = dirichlet_energy(u, op, measure)
    dirichlet_via_f = 0.25 * integrate_values(
        gradient_sq(f, op).values * density, state.manifold, measure
    )
    return {
        'entropy_direct': entropy_direct,
        'entropy_via_f': entropy_via_f,
        'dirichlet_direct': dirichlet_direct,
        'dirichlet_via_f': dirichlet_via_f,
        'finite': all(
            math.isfinite(value) for value in (
                entropy_direct, entropy_via_f,
                dirichlet_direct, dirichlet_via_f,
            )
        ),
    }
