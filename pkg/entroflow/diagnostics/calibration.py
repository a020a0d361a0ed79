import logging
from dataclasses import asdict, dataclass
from typing import Any, Dict, Optional, Tuple

from core.conf import entroflow_setting
from core.exceptions import (
    InvalidDiscretizationError, UnsupportedTopologyError
)
from manifold.models import FLAT_TORUS

from .models import EntropyTrace, Scenario, Verdict
from .traces import run_trace
from .verifiers import identity_residual, model_scale, model_violations

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Calibration:
    """
    Константа C семейства и невязки тождества для dW/dt
    на паре разрешений: грубом и рабочем.
    """
    family: str
    constant: float
    coarse_resolution: Tuple[int, ...]
    fine_resolution: Tuple[int, ...]
    coarse_residual: float
    fine_residual: float
    coarse_model: float
    fine_model: float

    @property
    def decrease(self) -> float:
        """Во сколько раз невязка уменьшилась при измельчении."""
        if self.fine_residual == 0:
            return float('inf')
        return self.coarse_residual / self.fine_residual

    def verdict(self) -> Verdict:
        factor = entroflow_setting('REFINEMENT_FACTOR')
        ratio = (self.fine_residual / self.coarse_residual
                 if self.coarse_residual > 0 else 0.0)
        return Verdict('refinement', ratio <= 1.0 / factor, ratio,
                       1.0 / factor)

    def as_dict(self) -> Dict[str, Any]:
        values = asdict(self)
        values['coarse_resolution'] = list(self.coarse_resolution)
        values['fine_resolution'] = list(self.fine_resolution)
        return values

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'Calibration':
        values = dict(data)
        values['coarse_resolution'] = tuple(values['coarse_resolution'])
        values['fine_resolution'] = tuple(values['fine_resolution'])
        return cls(**values)


def refinement_pair(scenario: Scenario) -> Tuple[Scenario, Scenario]:
    """Грубый сценарий с вдвое меньшим разрешением и исходный."""
    if scenario.topology != FLAT_TORUS:
        raise UnsupportedTopologyError(
            f'Калибровка по паре разрешений доступна только на торе, '
            f'получено {scenario.topology}'
        )
    floor = entroflow_setting('MIN_RESOLUTION')
    coarse = tuple(max(size // 2, floor) for size in scenario.resolution)
    if coarse == tuple(scenario.resolution):
        raise InvalidDiscretizationError(
            f'Разрешение {scenario.resolution} уже минимально, '
            f'грубой сетки для калибровки нет'
        )
    return scenario.with_values(resolution=coarse), scenario


def _observed_constant(trace: EntropyTrace) -> float:
    violations = model_violations(trace)
    return max(violations.values()) / model_scale(trace)


def calibrate(
        scenario: Scenario, fine_trace: Optional[EntropyTrace] = None
) -> Calibration:
    """
    C = запас·max(нарушение / (Δx² + dt)) по грубой и рабочей трассам.
    Рабочую трассу можно передать готовой.
    """
    coarse_scenario, fine_scenario = refinement_pair(scenario)
    coarse = run_trace(coarse_scenario)
    fine = fine_trace if fine_trace is not None else run_trace(fine_scenario)
    margin = entroflow_setting('CALIBRATION_MARGIN')
    observed = max(_observed_constant(coarse), _observed_constant(fine))
    calibration = Calibration(
        family=scenario.family,
        constant=margin * observed,
        coarse_resolution=coarse_scenario.resolution,
        fine_resolution=fine_scenario.resolution,
        coarse_residual=identity_residual(coarse),
        fine_residual=identity_residual(fine),
        coarse_model=model_scale(coarse),
        fine_model=model_scale(fine),
    )
    logger.info('Калибровка %s: C = %.3e, невязка %.3e -> %.3e '
                '(в %.2f раза)', calibration.family, calibration.constant,
                calibration.coarse_residual, calibration.fine_residual,
                calibration.decrease)
    return calibration
