import math
from dataclasses import dataclass, field, replace
from typing import Any, Dict, Iterator, List, Optional, Tuple

import numpy as np

from core.exceptions import MissingColumnError
from flow.models import IMPLICIT_EULER

TORUS_KERNEL = 'torus_kernel'
SPHERE_KERNEL = 'sphere_kernel'
WEIGHTED_TORUS = 'weighted_torus'
EUCLIDEAN_FAMILY = 'euclidean_oracle'
CUSTOM = 'custom'
FAMILIES = (
    TORUS_KERNEL, SPHERE_KERNEL, WEIGHTED_TORUS, EUCLIDEAN_FAMILY, CUSTOM
)

SPECTRAL = 'spectral'

# Энтропии, для которых в трассу пишется производная <name>_rate.
RATE_COLUMNS = ('W', 'Y0', 'Ya', 'Ha')

COLUMNS = (
    't', 'mass', 'W', 'Y0', 'Ya', 'Ha', 'omega',
    'dissipation', 'ni_dissipation', 'weighted_rhs',
    'weighted_dissipation', 'rigidity_gap',
    'W_rate', 'Y0_rate', 'Ya_rate', 'Ha_rate',
)


@dataclass(frozen=True)
class Scenario:
    """Параметры одного прогона: геометрия, поток и окно по времени."""
    name: str
    family: str
    topology: str
    a: float = 0.5
    resolution: Tuple[int, ...] = (64, 64)
    side_lengths: Tuple[float, ...] = (2 * math.pi, 2 * math.pi)
    level: int = 4
    radius: float = 1.0
    dimension: int = 2
    m: Optional[float] = None
    amplitude: float = 0.0
    dt: float = 0.01
    t_start: float = 0.05
    t_end: float = 2.0
    samples: int = 40
    k: int = 512
    source: int = 0
    scheme: str = IMPLICIT_EULER
    tol_scale: float = 1.0
    seed: Optional[int] = None

    @property
    def is_weighted(self) -> bool:
        return self.m is not None

    def time_grid(self) -> np.ndarray:
        return np.linspace(self.t_start, self.t_end, self.samples)

    def with_values(self, **changes: Any) -> 'Scenario':
        return replace(self, **changes)


@dataclass(frozen=True, eq=False)
class EntropyTrace:
    """Столбцы значений по моментам времени и метаданные сценария."""
    columns: Dict[str, np.ndarray]
    metadata: Dict[str, Any] = field(default_factory=dict)

    def __len__(self) -> int:
        return int(self.columns['t'].shape[0])

    @property
    def names(self) -> List[str]:
        known = [name for name in COLUMNS if name in self.columns]
        return known + sorted(set(self.columns) - set(known))

    @property
    def times(self) -> np.ndarray:
        return self.column('t')

    @property
    def spacing(self) -> float:
        return float(self.metadata.get('mesh_size', 0.0))

    def has(self, name: str) -> bool:
        return name in self.columns

    def column(self, name: str) -> np.ndarray:
        if name not in self.columns:
            raise MissingColumnError(
                f'В трассе нет столбца {name}; есть: {", ".join(self.names)}'
            )
        return self.columns[name]

    def rows(self) -> Iterator[List[float]]:
        names = self.names
        for index in range(len(self)):
            yield [float(self.columns[name][index]) for name in names]

    def subsample(self, step: int) -> 'EntropyTrace':
        return EntropyTrace(
            {name: values[::step] for name, values in self.columns.items()},
            dict(self.metadata),
        )


@dataclass(frozen=True)
class Verdict:
    """Итог проверки: имя, результат, худшее нарушение и допуск."""
    name: str
    passed: bool
    worst: float
    tolerance: float

    @property
    def status(self) -> str:
        return 'PASS' if self.passed else 'FAIL'

    def as_line(self) -> str:
        return (f'{self.name} {self.status} '
                f'{self.worst:.6e} {self.tolerance:.6e}')
