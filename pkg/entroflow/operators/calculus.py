import numpy as np

from core.exceptions import (
    InvalidDiscretizationError, UnsupportedTopologyError
)
from manifold.builders import triangle_areas
from manifold.models import DiscreteManifold, ScalarField

from .models import HessianData, LaplacianOperator


def _checked_manifold(
        field: ScalarField, op: LaplacianOperator
) -> DiscreteManifold:
    if not field.belongs_to(op.manifold):
        raise InvalidDiscretizationError(
            'Поле и оператор заданы на разных многообразиях'
        )
    return op.manifold


def _shift(grid: np.ndarray, axis: int, offset: int) -> np.ndarray:
    """Значение в соседнем узле u[i + offset] вдоль оси."""
    return np.roll(grid, -offset, axis=axis)


def _torus_gradient(values: np.ndarray,
                    manifold: DiscreteManifold) -> np.ndarray:
    grid = values.reshape(manifold.resolution)
    components = [
        (_shift(grid, axis, 1) - _shift(grid, axis, -1)) / (2.0 * step)
        for axis, step in enumerate(manifold.spacing)
    ]
    return np.stack([c.ravel() for c in components], axis=1)


def _triangle_gradients(
        values: np.ndarray, manifold: DiscreteManifold
) -> np.ndarray:
    """Градиенты кусочно-линейной интерполяции на гранях."""
    positions = manifold.positions
    faces = manifold.triangles
    p0, p1, p2 = (positions[faces[:, corner]] for corner in range(3))
    normals = np.cross(p1 - p0, p2 - p0)
    double_area = np.linalg.norm(normals, axis=1, keepdims=True)
    unit = normals / double_area
    gradient = (
        values[faces[:, 0], None] * np.cross(unit, p2 - p1)
        + values[faces[:, 1], None] * np.cross(unit, p0 - p2)
        + values[faces[:, 2], None] * np.cross(unit, p1 - p0)
    )
    return gradient / double_area


def _vertex_average(
        face_values: np.ndarray, manifold: DiscreteManifold
) -> np.ndarray:
    """Среднее по смежным граням с весами площадей A/3."""
    faces = manifold.triangles
    shares = triangle_areas(manifold.positions, faces) / 3.0
    columns = face_values.reshape(faces.shape[0], -1)
    averaged = np.stack([
        np.bincount(
            faces.ravel(),
            weights=np.repeat(shares * column, 3),
            minlength=manifold.vertex_count,
        )
        for column in columns.T
    ], axis=1)
    averaged /= manifold.mu_weights[:, None]
    return averaged.reshape((manifold.vertex_count,) + face_values.shape[1:])


def gradient(field: ScalarField, op: LaplacianOperator) -> np.ndarray:
    """Вектор градиента в каждой вершине, форма (N, n) или (N, 3)."""
    manifold = _checked_manifold(field, op)
    if manifold.is_grid:
        return _torus_gradient(field.values, manifold)
    return _vertex_average(
        _triangle_gradients(field.values, manifold), manifold
    )


def gradient_sq(field: ScalarField, op: LaplacianOperator) -> ScalarField:
    """
    |∇u|² в вершинах.
    На торе центральные разности, на сфере среднее |∇u|² по граням.
    """
    manifold = _checked_manifold(field, op)
    if manifold.is_grid:
        squared = np.sum(_torus_gradient(field.values, manifold) ** 2,
                         axis=1)
    else:
        face_gradients = _triangle_gradients(field.values, manifold)
        squared = _vertex_average(
            np.sum(face_gradients ** 2, axis=1), manifold
        )
    return ScalarField(squared, manifold)


def hessian(field: ScalarField, op: LaplacianOperator) -> HessianData:
    """Центральные вторые разности; смешанные по симметричному кресту."""
    manifold = _checked_manifold(field, op)
    if not manifold.is_grid:
        raise UnsupportedTopologyError(
            f'Гессиан поддерживается только на сетке тора, '
            f'а не на {manifold.topology}'
        )
    grid = field.values.reshape(manifold.resolution)
    spacing = manifold.spacing
    dimension = manifold.dimension
    result = np.empty((manifold.vertex_count, dimension, dimension))
    for first in range(dimension):
        step = spacing[first]
        result[:, first, first] = ((
            _shift(grid, first, 1) - 2.0 * grid + _shift(grid, first, -1)
        ) / step ** 2).ravel()
        for second in range(first + 1, dimension):
            plus = _shift(grid, first, 1)
            minus = _shift(grid, first, -1)
            mixed = ((
                _shift(plus, second, 1) - _shift(plus, second, -1)
                - _shift(minus, second, 1) + _shift(minus, second, -1)
            ) / (4.0 * step * spacing[second])).ravel()
            result[:, first, second] = mixed
            result[:, second, first] = mixed
    return HessianData(result)
