import logging

import numpy as np

from .models import MU, NU, DiscreteManifold, ScalarField

logger = logging.getLogger(__name__)


def integrate(field: ScalarField, measure: str = MU) -> float:
    """
    Интеграл Σ values[i]·weight[i] по выбранной мере.
    Мера ν на невзвешенном многообразии заменяется на μ.
    """
    manifold = field.manifold
    if measure == NU and not manifold.is_weighted:
        logger.debug('Мера ν без весовой функции: интегрирование по μ')
    return float(np.dot(field.values, manifold.weights(measure)))


def integrate_values(
        values: np.ndarray, manifold: DiscreteManifold, measure: str = MU
) -> float:
    """Интеграл массива значений в вершинах."""
    return integrate(ScalarField(values, manifold), measure)
