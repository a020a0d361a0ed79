from typing import Dict, List

from core.exceptions import ScenarioConfigError
from diagnostics.models import (
    CUSTOM, EUCLIDEAN_FAMILY, SPHERE_KERNEL, TORUS_KERNEL, WEIGHTED_TORUS,
    Scenario
)
from manifold.models import EUCLIDEAN_ORACLE, FLAT_TORUS, SPHERE

# Сценарии по умолчанию; конфигурация переопределяет отдельные поля.
REGISTRY: Dict[str, Scenario] = {
    TORUS_KERNEL: Scenario(
        name=TORUS_KERNEL,
        family=TORUS_KERNEL,
        topology=FLAT_TORUS,
    ),
    SPHERE_KERNEL: Scenario(
        name=SPHERE_KERNEL,
        family=SPHERE_KERNEL,
        topology=SPHERE,
        level=4,
        radius=1.0,
        t_start=0.1,
    ),
    WEIGHTED_TORUS: Scenario(
        name=WEIGHTED_TORUS,
        family=WEIGHTED_TORUS,
        topology=FLAT_TORUS,
        m=4.0,
        amplitude=0.3,
        t_start=0.1,
    ),
    EUCLIDEAN_FAMILY: Scenario(
        name=EUCLIDEAN_FAMILY,
        family=EUCLIDEAN_FAMILY,
        topology=EUCLIDEAN_ORACLE,
        a=0.25,
        dt=0.0,
        t_start=0.05,
        t_end=10.0,
    ),
    CUSTOM: Scenario(
        name=CUSTOM,
        family=CUSTOM,
        topology=FLAT_TORUS,
    ),
}


def get_scenario(kind: str) -> Scenario:
    """Сценарий по умолчанию для семейства."""
    try:
        return REGISTRY[kind]
    except KeyError:
        raise ScenarioConfigError(
            f'Неизвестный сценарий {kind!r}; доступны: '
            f'{", ".join(sorted(REGISTRY))}'
        ) from None


def batch_scenarios() -> List[Scenario]:
    """Сценарии для запуска run --all."""
    return [
        scenario for kind, scenario in REGISTRY.items() if kind != CUSTOM
    ]
