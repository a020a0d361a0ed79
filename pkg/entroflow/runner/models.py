from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional

from diagnostics.models import Scenario


@dataclass(frozen=True)
class ScenarioConfig:
    """Проверенная конфигурация: сценарий, зерно и каталог вывода."""
    scenario: Scenario
    raw: Dict[str, Any] = field(default_factory=dict)
    out: Optional[str] = None

    @property
    def name(self) -> str:
        return self.scenario.name

    def echo(self) -> Dict[str, Any]:
        """Итоговые значения всех полей сценария."""
        values = asdict(self.scenario)
        values['resolution'] = list(values['resolution'])
        values['side_lengths'] = list(values['side_lengths'])
        return values


@dataclass
class RunManifest:
    """
    Сведения о прогоне: конфигурация, λ, допуски, калибровка C,
    файлы и статус.
    """
    config: Dict[str, Any]
    first_nonzero: Optional[float] = None
    tolerances: Dict[str, float] = field(default_factory=dict)
    files: List[str] = field(default_factory=list)
    exit_status: int = 0
    metadata: Dict[str, Any] = field(default_factory=dict)
    verdicts: List[str] = field(default_factory=list)
    error: Optional[str] = None
    calibration: Optional[Dict[str, Any]] = None

    def as_dict(self) -> Dict[str, Any]:
        return asdict(self)
