from dataclasses import dataclass, field
from typing import Optional, Tuple
from uuid import uuid4

import numpy as np

FLAT_TORUS = 'flat_torus'
SPHERE = 'sphere'
EUCLIDEAN_ORACLE = 'euclidean_oracle'
TOPOLOGIES = (FLAT_TORUS, SPHERE, EUCLIDEAN_ORACLE)

MU = 'mu'
NU = 'nu'
MEASURES = (MU, NU)

CONSTANT_SECTIONAL = 'constant_sectional'
WEIGHTED_DERIVED = 'weighted_derived'


@dataclass(frozen=True)
class CurvatureModel:
    """
    Модель кривизны.
    Для weighted_derived сохраняется секционная кривизна основы,
    гессиан h считает модуль операторов.
    """
    kind: str = CONSTANT_SECTIONAL
    sectional: float = 0.0

    def ricci_factor(self, dimension: int) -> float:
        """Множитель (n−1)K в Ric(v, v) = (n−1)K|v|²."""
        return (dimension - 1) * self.sectional


@dataclass(frozen=True, eq=False)
class DiscreteManifold:
    """Дискретное модельное многообразие с лумпированной мерой."""
    dimension: int
    topology: str
    positions: np.ndarray
    mu_weights: np.ndarray
    nu_weights: np.ndarray
    curvature: CurvatureModel
    weight_field: Optional[np.ndarray] = None
    be_dimension: Optional[float] = None
    resolution: Tuple[int, ...] = ()
    side_lengths: Tuple[float, ...] = ()
    triangles: Optional[np.ndarray] = None
    radius: Optional[float] = None
    manifold_id: str = field(default_factory=lambda: uuid4().hex)

    @property
    def vertex_count(self) -> int:
        return int(self.mu_weights.shape[0])

    @property
    def is_grid(self) -> bool:
        return self.topology == FLAT_TORUS

    @property
    def is_weighted(self) -> bool:
        return self.weight_field is not None

    @property
    def spacing(self) -> Tuple[float, ...]:
        """Шаги сетки тора по осям."""
        return tuple(
            length / res
            for length, res in zip(self.side_lengths, self.resolution)
        )

    @property
    def mesh_size(self) -> float:
        """Характерный шаг Δx: наибольший шаг сетки или средняя длина ребра."""
        if self.is_grid:
            return max(self.spacing)
        faces = self.triangles
        edges = self.positions[faces[:, [1, 2, 0]]] - self.positions[faces]
        return float(np.linalg.norm(edges, axis=2).mean())

    def weights(self, measure: str = MU) -> np.ndarray:
        """Веса меры; ν на невзвешенном многообразии совпадает с μ."""
        if measure == NU:
            return self.nu_weights
        return self.mu_weights

    def volume(self, measure: str = MU) -> float:
        return float(self.weights(measure).sum())


@dataclass(frozen=True, eq=False)
class ScalarField:
    """Значения в вершинах, привязанные к многообразию."""
    values: np.ndarray
    manifold: DiscreteManifold

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=float)
        if values.shape != (self.manifold.vertex_count,):
            raise ValueError(
                f'Поле длины {values.shape} не подходит многообразию '
                f'с {self.manifold.vertex_count} вершинами'
            )
        object.__setattr__(self, 'values', values)

    @property
    def manifold_id(self) -> str:
        return self.manifold.manifold_id

    @classmethod
    def constant(
            cls, manifold: DiscreteManifold, value: float
    ) -> 'ScalarField':
        return cls(np.full(manifold.vertex_count, float(value)), manifold)

    def belongs_to(self, manifold: DiscreteManifold) -> bool:
        return self.manifold_id == manifold.manifold_id
