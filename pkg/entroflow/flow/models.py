from dataclasses import dataclass
from typing import Optional

import numpy as np

from core.exceptions import InvalidDiscretizationError
from manifold.measures import integrate
from manifold.models import MU, DiscreteManifold, ScalarField

IMPLICIT_EULER = 'implicit_euler'
CRANK_NICOLSON = 'crank_nicolson'
SCHEMES = (IMPLICIT_EULER, CRANK_NICOLSON)


@dataclass(frozen=True, eq=False)
class HeatState:
    """Плотность ũ = u² в момент t и её масса."""
    u_tilde: ScalarField
    time: float
    measure: str = MU
    mass: float = float('nan')
    mass_drift: float = 0.0
    clamped: float = 0.0

    def __post_init__(self) -> None:
        if np.isnan(self.mass):
            object.__setattr__(
                self, 'mass', integrate(self.u_tilde, self.measure)
            )

    @property
    def manifold(self) -> DiscreteManifold:
        return self.u_tilde.manifold

    @property
    def values(self) -> np.ndarray:
        return self.u_tilde.values

    @classmethod
    def from_values(
            cls, values: np.ndarray, manifold: DiscreteManifold,
            time: float, measure: str = MU
    ) -> 'HeatState':
        return cls(ScalarField(values, manifold), float(time), measure)


@dataclass(frozen=True)
class KernelSpec:
    """Источник ядра и число используемых собственных пар."""
    source_vertex: int
    eigenpairs_used: int
    measure: str = MU

    def __post_init__(self) -> None:
        if self.eigenpairs_used < 1:
            raise InvalidDiscretizationError(
                f'Ядру нужна хотя бы одна пара, получено '
                f'{self.eigenpairs_used}'
            )


@dataclass(frozen=True, eq=False)
class PotentialField(ScalarField):
    """
    f = −log ũ − (d/2)log τ − (d/2)log 4π.
    mask отмечает вершины выше порога плотности.
    """
    mask: Optional[np.ndarray] = None
    tau: float = 1.0
    dimension: float = 1.0

    def __post_init__(self) -> None:
        super().__post_init__()
        if self.mask is None:
            object.__setattr__(
                self, 'mask', np.ones(self.manifold.vertex_count, bool)
            )

    @property
    def masked_count(self) -> int:
        return int((~self.mask).sum())
