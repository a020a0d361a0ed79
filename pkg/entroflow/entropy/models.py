from dataclasses import dataclass, field
from typing import Dict, Optional

from core.exceptions import RemainderConstraintError
from manifold.models import MU


@dataclass(frozen=True)
class EntropyParams:
    """Константа a, размерность d, мера и первое ненулевое λ (или κ)."""
    a: float
    d: float
    measure: str = MU
    first_nonzero: float = float('inf')

    def __post_init__(self) -> None:
        if not self.a > -self.first_nonzero:
            raise RemainderConstraintError(
                f'Нарушено условие a > −λ: a = {self.a:.6g}, '
                f'λ = {self.first_nonzero:.6g}'
            )


@dataclass(frozen=True)
class EntropyValue:
    """
    Значение энтропии и слагаемые формулы.
    omega = ∫|∇u|² + a задаётся только для энтропий с константой a.
    """
    value: float
    omega: Optional[float] = None
    components: Dict[str, float] = field(default_factory=dict)


@dataclass(frozen=True)
class Dissipation:
    """Диссипация в двух алгебраических формах."""
    u_form: float
    f_form: float

    @property
    def value(self) -> float:
        return self.f_form

    @property
    def discrepancy(self) -> float:
        return abs(self.u_form - self.f_form)


@dataclass(frozen=True)
class WeightedDissipation:
    """Правая часть тождества для W_m и оценка для H_a."""
    w_rate: float
    adjusted: Dissipation
