import logging
from dataclasses import replace
from typing import Sequence, Tuple
from uuid import uuid4

import numpy as np

from core.exceptions import InvalidDimensionError, InvalidDiscretizationError

from .models import (
    CONSTANT_SECTIONAL, FLAT_TORUS, SPHERE, WEIGHTED_DERIVED,
    CurvatureModel, DiscreteManifold, ScalarField
)

logger = logging.getLogger(__name__)

MIN_RESOLUTION: int = 4
MAX_TORUS_DIMENSION: int = 3
MAX_SUBDIVISION_LEVEL: int = 8

GOLDEN_RATIO: float = (1.0 + np.sqrt(5.0)) / 2.0

ICOSAHEDRON_VERTICES = np.array([
    (-1.0, GOLDEN_RATIO, 0.0),
    (1.0, GOLDEN_RATIO, 0.0),
    (-1.0, -GOLDEN_RATIO, 0.0),
    (1.0, -GOLDEN_RATIO, 0.0),
    (0.0, -1.0, GOLDEN_RATIO),
    (0.0, 1.0, GOLDEN_RATIO),
    (0.0, -1.0, -GOLDEN_RATIO),
    (0.0, 1.0, -GOLDEN_RATIO),
    (GOLDEN_RATIO, 0.0, -1.0),
    (GOLDEN_RATIO, 0.0, 1.0),
    (-GOLDEN_RATIO, 0.0, -1.0),
    (-GOLDEN_RATIO, 0.0, 1.0),
])

ICOSAHEDRON_FACES = np.array([
    (0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11),
    (1, 5, 9), (5, 11, 4), (11, 10, 2), (10, 7, 6), (7, 1, 8),
    (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8), (3, 8, 9),
    (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1),
])


def build_flat_torus(
        resolution_per_axis: Sequence[int], side_lengths: Sequence[float]
) -> DiscreteManifold:
    """
    Плоский тор на равномерной периодической сетке.
    Координаты вершин хранятся в периодической карте [0, L).
    """
    resolution = tuple(int(res) for res in resolution_per_axis)
    lengths = tuple(float(length) for length in side_lengths)
    if len(resolution) != len(lengths):
        raise InvalidDiscretizationError(
            'Число разрешений и длин сторон тора должно совпадать: '
            f'{len(resolution)} != {len(lengths)}'
        )
    if not 1 <= len(resolution) <= MAX_TORUS_DIMENSION:
        raise InvalidDiscretizationError(
            f'Размерность тора должна быть от 1 до {MAX_TORUS_DIMENSION}, '
            f'получено {len(resolution)}'
        )
    if min(resolution) < MIN_RESOLUTION:
        raise InvalidDiscretizationError(
            f'Разрешение по каждой оси должно быть не меньше '
            f'{MIN_RESOLUTION}, получено {list(resolution)}'
        )
    if min(lengths) <= 0 or not np.all(np.isfinite(lengths)):
        raise InvalidDiscretizationError(
            f'Длины сторон тора должны быть положительными: {list(lengths)}'
        )

    axes = [
        np.arange(res) * (length / res)
        for res, length in zip(resolution, lengths)
    ]
    grids = np.meshgrid(*axes, indexing='ij')
    positions = np.stack([grid.ravel() for grid in grids], axis=1)
    cell_volume = float(np.prod([
        length / res for res, length in zip(resolution, lengths)
    ]))
    mu_weights = np.full(positions.shape[0], cell_volume)
    logger.debug('Тор %s, L = %s: %d вершин', resolution, lengths,
                 positions.shape[0])
    return DiscreteManifold(
        dimension=len(resolution),
        topology=FLAT_TORUS,
        positions=positions,
        mu_weights=mu_weights,
        nu_weights=mu_weights,
        curvature=CurvatureModel(kind=CONSTANT_SECTIONAL, sectional=0.0),
        resolution=resolution,
        side_lengths=lengths,
    )


def _subdivide(
        vertices: np.ndarray, faces: np.ndarray
) -> Tuple[np.ndarray, np.ndarray]:
    """Делит каждый треугольник на четыре, середины рёбер на сферу."""
    edges = np.sort(faces[:, [0, 1, 1, 2, 2, 0]].reshape(-1, 2), axis=1)
    unique_edges, inverse = np.unique(edges, axis=0, return_inverse=True)
    midpoints = vertices[unique_edges].mean(axis=1)
    midpoints /= np.linalg.norm(midpoints, axis=1, keepdims=True)
    middle = inverse.reshape(-1, 3) + vertices.shape[0]
    a, b, c = faces.T
    ab, bc, ca = middle.T
    new_faces = np.vstack([
        np.column_stack([a, ab, ca]),
        np.column_stack([b, bc, ab]),
        np.column_stack([c, ca, bc]),
        np.column_stack([ab, bc, ca]),
    ])
    return np.vstack([vertices, midpoints]), new_faces


def triangle_areas(positions: np.ndarray, faces: np.ndarray) -> np.ndarray:
    """Площади плоских треугольников."""
    first = positions[faces[:, 1]] - positions[faces[:, 0]]
    second = positions[faces[:, 2]] - positions[faces[:, 0]]
    return 0.5 * np.linalg.norm(np.cross(first, second), axis=1)


def build_sphere(subdivision_level: int, radius: float) -> DiscreteManifold:
    """
    Сфера радиуса r из подразбитого икосаэдра.
    Вес вершины равен трети площадей смежных треугольников.
    """
    level = int(subdivision_level)
    if not 1 <= level <= MAX_SUBDIVISION_LEVEL:
        raise InvalidDiscretizationError(
            f'Уровень подразбиения должен быть от 1 до '
            f'{MAX_SUBDIVISION_LEVEL}, получено {level}'
        )
    if not radius > 0:
        raise InvalidDiscretizationError(
            f'Радиус сферы должен быть положительным: {radius}'
        )
    vertices = ICOSAHEDRON_VERTICES / np.linalg.norm(
        ICOSAHEDRON_VERTICES, axis=1, keepdims=True
    )
    faces = ICOSAHEDRON_FACES.copy()
    for _ in range(level):
        vertices, faces = _subdivide(vertices, faces)
    positions = vertices * float(radius)
    areas = triangle_areas(positions, faces)
    mu_weights = np.bincount(
        faces.ravel(),
        weights=np.repeat(areas / 3.0, 3),
        minlength=positions.shape[0],
    )
    logger.debug('Сфера уровня %d, r = %s: %d вершин, %d граней',
                 level, radius, positions.shape[0], faces.shape[0])
    return DiscreteManifold(
        dimension=2,
        topology=SPHERE,
        positions=positions,
        mu_weights=mu_weights,
        nu_weights=mu_weights,
        curvature=CurvatureModel(
            kind=CONSTANT_SECTIONAL, sectional=1.0 / float(radius) ** 2
        ),
        triangles=faces,
        radius=float(radius),
    )


def attach_weight(
        manifold: DiscreteManifold, h: ScalarField, m: float
) -> DiscreteManifold:
    """
    Пространство с мерой dν = e^{-h}dμ и размерностью Бакри-Эмери m.
    Новое многообразие получает свой идентификатор: поля основы
    к нему не относятся.
    """
    if not m > manifold.dimension:
        raise InvalidDimensionError(
            f'Размерность Бакри-Эмери m = {m} должна быть больше '
            f'n = {manifold.dimension}'
        )
    values = np.asarray(h.values, dtype=float)
    if values.shape != (manifold.vertex_count,):
        raise InvalidDiscretizationError(
            'Весовая функция h не согласована с числом вершин'
        )
    if not np.all(np.isfinite(values)):
        raise InvalidDiscretizationError(
            'Весовая функция h должна быть конечной во всех вершинах'
        )
    return replace(
        manifold,
        manifold_id=uuid4().hex,
        weight_field=values.copy(),
        nu_weights=np.exp(-values) * manifold.mu_weights,
        be_dimension=float(m),
        curvature=CurvatureModel(
            kind=WEIGHTED_DERIVED, sectional=manifold.curvature.sectional
        ),
    )
