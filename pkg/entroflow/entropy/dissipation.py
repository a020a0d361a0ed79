import logging
import math

import numpy as np

from core.exceptions import InvalidDimensionError
from flow.models import HeatState, PotentialField
from flow.variables import compute_f, sqrt_state
from manifold.measures import integrate_values
from manifold.models import NU, ScalarField
from operators.calculus import gradient, hessian
from operators.curvature import bakry_emery_form, weight_derivatives
from operators.models import LaplacianOperator

from .functionals import omega
from .models import Dissipation, EntropyParams, WeightedDissipation

logger = logging.getLogger(__name__)


def _deviation_sq(hess: np.ndarray, scale: float) -> np.ndarray:
    """|A − scale·g|² для поля матриц A формы (N, n, n)."""
    metric = np.eye(hess.shape[1])[None, :, :]
    return np.sum((hess - scale * metric) ** 2, axis=(1, 2))


def _masked_density(state: HeatState, f: PotentialField) -> np.ndarray:
    return np.where(f.mask, state.values, 0.0)


def adjusted_integrand_f_form(
        hess_f: np.ndarray,
        grad_f: np.ndarray,
        density: np.ndarray,
        omega: float,
        d: float,
        ricci_factor: float,
) -> np.ndarray:
    """(|f̄_ij − (4ω/d)g_ij|² + Ric(∇f̄, ∇f̄))·ũ в вершинах."""
    ricci = ricci_factor * np.sum(grad_f ** 2, axis=1)
    return (_deviation_sq(hess_f, 4.0 * omega / d) + ricci) * density


def adjusted_integrand_u_form(
        u: np.ndarray,
        grad_u: np.ndarray,
        hess_u: np.ndarray,
        omega: float,
        d: float,
        ricci_factor: float,
) -> np.ndarray:
    """
    (|−2∇²u/u + 2∇u⊗∇u/u² − (4ω/d)g|² + 4Ric(∇u/u, ∇u/u))·u².
    В вершинах с u = 0 значение равно нулю.
    """
    positive = u > 0
    safe = np.where(positive, u, 1.0)
    tensor = (
        -2.0 * hess_u / safe[:, None, None]
        + 2.0 * np.einsum('vi,vj->vij', grad_u, grad_u)
        / (safe ** 2)[:, None, None]
    )
    ricci = 4.0 * ricci_factor * np.sum(grad_u ** 2, axis=1)
    values = _deviation_sq(tensor, 4.0 * omega / d) * u ** 2 + ricci
    return np.where(positive, values, 0.0)


def ni_dissipation(
        state: HeatState,
        f: PotentialField,
        tau: float,
        op: LaplacianOperator,
) -> float:
    """∫2τ(|Hess f − g/2τ|² + Ric(∇f, ∇f))ũ: скорость убывания W."""
    manifold = state.manifold
    grad_f = gradient(f, op)
    hess_f = hessian(f, op)
    ricci = manifold.curvature.ricci_factor(manifold.dimension) * np.sum(
        grad_f ** 2, axis=1
    )
    integrand = 2.0 * tau * (
        _deviation_sq(hess_f.values, 0.5 / tau) + ricci
    ) * _masked_density(state, f)
    return integrate_values(integrand, manifold, state.measure)


def adjusted_dissipation(
        u: ScalarField,
        params: EntropyParams,
        op: LaplacianOperator,
        t: float = 1.0,
) -> Dissipation:
    """
    (d/4ω)∫[|−2∇²u/u + 2∇u⊗∇u/u² − (4ω/d)g|² + 4Ric(∇u/u, ∇u/u)]u²
    в u-форме и через f̄ = compute_f(ũ, t, d).
    """
    manifold = u.manifold
    value = omega(u, params, op, time=t)
    prefactor = params.d / (4.0 * value)
    ricci_factor = manifold.curvature.ricci_factor(manifold.dimension)

    state = HeatState.from_values(u.values ** 2, manifold, t, params.measure)
    f = compute_f(state, t, params.d)
    f_form = prefactor * integrate_values(
        adjusted_integrand_f_form(
            hessian(f, op).values, gradient(f, op),
            _masked_density(state, f), value, params.d, ricci_factor,
        ),
        manifold, params.measure,
    )
    u_form = prefactor * integrate_values(
        adjusted_integrand_u_form(
            u.values, gradient(u, op), hessian(u, op).values,
            value, params.d, ricci_factor,
        ),
        manifold, params.measure,
    )
    logger.debug('t = %.6g: диссипация %.12g (u-форма %.12g)',
                 t, f_form, u_form)
    return Dissipation(u_form=u_form, f_form=f_form)


def weighted_dissipation(
        state: HeatState,
        params: EntropyParams,
        op: LaplacianOperator,
        tau: float,
) -> WeightedDissipation:
    """
    Правая часть для dW_m/dt с членом Ric_{m,n}(L) и сносом ∇h·∇f,
    а также диссипация H_a в ω-форме (u- и f̄-варианты).
    """
    manifold = state.manifold
    m = manifold.be_dimension
    if m is None or params.d != m:
        raise InvalidDimensionError(
            f'Для взвешенной диссипации нужно d = m, получено '
            f'd = {params.d}, m = {m}'
        )
    if params.measure != NU or state.measure != NU:
        raise ValueError('Взвешенная диссипация считается по мере ν')
    gap = m - manifold.dimension
    grad_h, hess_h = weight_derivatives(op)

    f = compute_f(state, tau, m)
    grad_f = gradient(f, op)
    hess_f = hessian(f, op)
    density = _masked_density(state, f)
    ricci_f = bakry_emery_form(manifold, grad_f, hess_h, grad_h).values
    drift_f = np.sum(grad_h * grad_f, axis=1)

    tensor_part = integrate_values(
        2.0 * tau * (_deviation_sq(hess_f.values, 0.5 / tau) + ricci_f)
        * density,
        manifold, NU,
    )
    drift_part = integrate_values(
        (drift_f + gap / (2.0 * tau)) ** 2 * density, manifold, NU
    )
    rhs = -tensor_part - 2.0 * tau / gap * drift_part

    u = sqrt_state(state)
    value = omega(u, params, op, time=state.time)
    prefactor = m / (4.0 * value)
    coupling = math.sqrt(m / (4.0 * value * gap))
    offset = math.sqrt(4.0 * value * gap / m)

    f_form = prefactor * integrate_values(
        (_deviation_sq(hess_f.values, 4.0 * value / m) + ricci_f) * density,
        manifold, NU,
    ) + integrate_values(
        (coupling * drift_f + offset) ** 2 * density, manifold, NU
    )

    grad_u = gradient(u, op)
    hess_u = hessian(u, op).values
    u_tensor = adjusted_integrand_u_form(
        u.values, grad_u, hess_u, value, m, 0.0
    )
    ricci_u = bakry_emery_form(manifold, 2.0 * grad_u, hess_h, grad_h).values
    drift_u = np.sum(grad_h * grad_u, axis=1)
    u_form = prefactor * integrate_values(
        u_tensor + ricci_u, manifold, NU
    ) + integrate_values(
        (2.0 * coupling * drift_u - offset * u.values) ** 2, manifold, NU
    )
    return WeightedDissipation(
        w_rate=rhs,
        adjusted=Dissipation(u_form=u_form, f_form=f_form),
    )
