from dataclasses import dataclass, field
from functools import cached_property
from typing import Tuple

import numpy as np
from scipy import sparse

from manifold.models import MU, DiscreteManifold


@dataclass(frozen=True, eq=False)
class LaplacianOperator:
    """
    Разреженная симметричная матрица жёсткости S.
    Квадратичная форма u·S·u приближает ∫|∇u|² по выбранной мере.
    """
    stiffness: sparse.csr_matrix
    manifold: DiscreteManifold
    measure: str = MU

    @property
    def manifold_id(self) -> str:
        return self.manifold.manifold_id

    @property
    def weights(self) -> np.ndarray:
        return self.manifold.weights(self.measure)

    @cached_property
    def edges(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Рёбра i < j и проводимости c_ij = −S_ij."""
        upper = sparse.triu(self.stiffness, k=1).tocoo()
        return upper.row, upper.col, -upper.data

    def bilinear_form(self, first: np.ndarray, second: np.ndarray) -> float:
        """
        v·S·w = Σ c_ij(v_i − v_j)(w_i − w_j) по рёбрам.
        Совпадает с матричной записью при нулевых суммах строк S.
        """
        head, tail, conductance = self.edges
        return float(np.dot(
            conductance,
            (first[head] - first[tail]) * (second[head] - second[tail]),
        ))

    def quadratic_form(self, values: np.ndarray) -> float:
        return self.bilinear_form(values, values)


@dataclass(frozen=True, eq=False)
class SpectralData:
    """Нижняя часть спектра: собственные значения по возрастанию."""
    eigenvalues: np.ndarray
    eigenfields: np.ndarray
    first_nonzero: float
    measure: str = MU
    residuals: np.ndarray = field(default_factory=lambda: np.zeros(0))

    @property
    def size(self) -> int:
        return int(self.eigenvalues.shape[0])

    @property
    def is_complete(self) -> bool:
        return self.size == self.eigenfields.shape[0]

    def multiplicity(self, rtol: float = 1e-6) -> int:
        """Кратность первого ненулевого собственного значения."""
        close = np.abs(self.eigenvalues - self.first_nonzero) <= (
            rtol * self.first_nonzero
        )
        return int(close.sum())


@dataclass(frozen=True, eq=False)
class HessianData:
    """Симметричные матрицы n×n вторых производных в вершинах сетки."""
    values: np.ndarray

    @property
    def shape(self) -> Tuple[int, ...]:
        return self.values.shape

    def trace(self) -> np.ndarray:
        return np.trace(self.values, axis1=1, axis2=2)

    def is_symmetric(self) -> bool:
        return bool(
            np.array_equal(self.values, np.swapaxes(self.values, 1, 2))
        )
