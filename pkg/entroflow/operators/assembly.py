import logging
from typing import List

import numpy as np
from scipy import sparse

from core.conf import entroflow_setting
from core.exceptions import AssemblyError, MissingWeightError
from manifold.builders import triangle_areas
from manifold.models import MU, NU, DiscreteManifold

from .models import LaplacianOperator

logger = logging.getLogger(__name__)


def _vertex_factors(manifold: DiscreteManifold, measure: str) -> np.ndarray:
    """e^{-h} в вершинах; для меры μ единицы."""
    if measure == NU:
        return np.exp(-manifold.weight_field)
    return np.ones(manifold.vertex_count)


class _EdgeCollector:
    """Накопитель вкладов c·(e_i − e_j)(e_i − e_j)ᵀ."""

    def __init__(self) -> None:
        self.rows: List[np.ndarray] = []
        self.cols: List[np.ndarray] = []
        self.data: List[np.ndarray] = []

    def add(self, first: np.ndarray, second: np.ndarray,
            coefficient: np.ndarray) -> None:
        self.rows.extend([first, second, first, second])
        self.cols.extend([first, second, second, first])
        self.data.extend(
            [coefficient, coefficient, -coefficient, -coefficient]
        )

    def matrix(self, size: int) -> sparse.csr_matrix:
        return sparse.coo_matrix(
            (np.concatenate(self.data),
             (np.concatenate(self.rows), np.concatenate(self.cols))),
            shape=(size, size),
        ).tocsr()


def _torus_stiffness(
        manifold: DiscreteManifold, factors: np.ndarray
) -> sparse.csr_matrix:
    """Периодические разности в потоковой форме с весом e^{-h} на ребре."""
    index = np.arange(manifold.vertex_count).reshape(manifold.resolution)
    cell_volume = float(np.prod(manifold.spacing))
    collector = _EdgeCollector()
    for axis, step in enumerate(manifold.spacing):
        first = index.ravel()
        second = np.roll(index, -1, axis=axis).ravel()
        edge_factor = 0.5 * (factors[first] + factors[second])
        collector.add(first, second, cell_volume / step ** 2 * edge_factor)
    return collector.matrix(manifold.vertex_count)


def _sphere_stiffness(
        manifold: DiscreteManifold, factors: np.ndarray
) -> sparse.csr_matrix:
    """Котангенсные веса: ребру (i, j) даётся ½·cot угла напротив."""
    positions = manifold.positions
    faces = manifold.triangles
    areas = triangle_areas(positions, faces)
    degenerate = np.flatnonzero(areas < entroflow_setting('DEGENERATE_AREA'))
    if degenerate.size:
        bad = int(degenerate[0])
        raise AssemblyError(
            f'Вырожденный треугольник {bad} с вершинами '
            f'{faces[bad].tolist()}: площадь {areas[bad]:.3e}'
        )
    collector = _EdgeCollector()
    for corner in range(3):
        apex = faces[:, corner]
        first = faces[:, (corner + 1) % 3]
        second = faces[:, (corner + 2) % 3]
        to_first = positions[first] - positions[apex]
        to_second = positions[second] - positions[apex]
        cotangent = np.einsum('ij,ij->i', to_first, to_second) / (2 * areas)
        edge_factor = 0.5 * (factors[first] + factors[second])
        collector.add(first, second, 0.5 * cotangent * edge_factor)
    return collector.matrix(manifold.vertex_count)


def assemble_laplacian(
        manifold: DiscreteManifold, measure: str = MU
) -> LaplacianOperator:
    """
    Собирает S для Δ (мера μ) или дрейфового L = Δ − ∇h·∇ (мера ν).
    Знак: u·S·u ≥ 0.
    """
    if measure == NU and not manifold.is_weighted:
        raise MissingWeightError(
            'Оператор по мере ν требует весовой функции h'
        )
    factors = _vertex_factors(manifold, measure)
    if manifold.is_grid:
        stiffness = _torus_stiffness(manifold, factors)
    else:
        stiffness = _sphere_stiffness(manifold, factors)
    logger.debug('Собран оператор %s (%s): %d ненулевых',
                 manifold.topology, measure, stiffness.nnz)
    return LaplacianOperator(
        stiffness=stiffness, manifold=manifold, measure=measure
    )
