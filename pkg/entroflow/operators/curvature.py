from typing import Tuple

import numpy as np

from core.exceptions import InvalidDimensionError
from manifold.models import DiscreteManifold, ScalarField

from .calculus import gradient, hessian
from .models import HessianData, LaplacianOperator


def _dimension_gap(manifold: DiscreteManifold) -> float:
    if manifold.be_dimension is None:
        raise InvalidDimensionError(
            'Не задана размерность Бакри-Эмери m'
        )
    gap = manifold.be_dimension - manifold.dimension
    if not gap > 0:
        raise InvalidDimensionError(
            f'Нужно m > n, получено m = {manifold.be_dimension}, '
            f'n = {manifold.dimension}'
        )
    return gap


def ricci_form(manifold: DiscreteManifold, v_sq: ScalarField) -> ScalarField:
    """Ric(v, v) = (n−1)K|v|² по заданным значениям |v|²."""
    factor = manifold.curvature.ricci_factor(manifold.dimension)
    return ScalarField(factor * v_sq.values, manifold)


def weight_derivatives(
        op: LaplacianOperator
) -> Tuple[np.ndarray, HessianData]:
    """∇h и Hess(h) весовой функции на сетке."""
    manifold = op.manifold
    if not manifold.is_weighted:
        raise InvalidDimensionError(
            'Многообразие без весовой функции h'
        )
    h = ScalarField(manifold.weight_field, manifold)
    return gradient(h, op), hessian(h, op)


def bakry_emery_form(
        manifold: DiscreteManifold,
        grad_f: np.ndarray,
        hess_h: HessianData,
        grad_h: np.ndarray,
) -> ScalarField:
    """
    Ric_{m,n}(L)(∇f, ∇f) =
    (n−1)K|∇f|² + ∇f·Hess(h)·∇f − (∇h·∇f)²/(m−n).
    """
    gap = _dimension_gap(manifold)
    factor = manifold.curvature.ricci_factor(manifold.dimension)
    ricci = factor * np.sum(grad_f ** 2, axis=1)
    hess_term = np.einsum('vi,vij,vj->v', grad_f, hess_h.values, grad_f)
    drift = np.sum(grad_h * grad_f, axis=1) ** 2 / gap
    return ScalarField(ricci + hess_term - drift, manifold)


def bakry_emery_lower_bound(
        manifold: DiscreteManifold,
        grad_h: np.ndarray,
        hess_h: HessianData,
) -> float:
    """Наименьшее собственное значение Ric_{m,n}(L) по всем вершинам."""
    gap = _dimension_gap(manifold)
    factor = manifold.curvature.ricci_factor(manifold.dimension)
    tensor = (
        factor * np.eye(manifold.dimension)[None, :, :]
        + hess_h.values
        - np.einsum('vi,vj->vij', grad_h, grad_h) / gap
    )
    return float(np.linalg.eigvalsh(tensor).min())
