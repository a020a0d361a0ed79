import logging
import math
from typing import Optional

import numpy as np

from core.conf import entroflow_setting
from core.exceptions import DegenerateDensityError
from manifold.models import ScalarField

from .models import HeatState, PotentialField

logger = logging.getLogger(__name__)


def sqrt_state(state: HeatState) -> ScalarField:
    """u = √ũ; отрицательные значения уже обрезаны шагом."""
    return ScalarField(np.sqrt(np.maximum(state.values, 0.0)),
                       state.manifold)


def compute_f(
        state: HeatState,
        tau: float,
        d: float,
        floor_factor: Optional[float] = None,
        masked_limit: Optional[float] = None,
) -> PotentialField:
    """
    f = −log ũ − (d/2)log τ − (d/2)log 4π.
    Вершины с ũ не выше floor_factor·max ũ маскируются, f в них
    считается по пороговому значению плотности.
    """
    if floor_factor is None:
        floor_factor = entroflow_setting('DENSITY_FLOOR')
    if masked_limit is None:
        masked_limit = entroflow_setting('MASKED_LIMIT')
    values = state.values
    weights = state.manifold.weights(state.measure)
    peak = float(values.max())
    if not peak > 0:
        raise DegenerateDensityError(
            'Плотность тождественно равна нулю', masked_fraction=1.0
        )
    floor = floor_factor * peak
    mask = values > floor
    total = float(np.dot(values, weights))
    masked_fraction = float(np.dot(values[~mask], weights[~mask])) / total
    if masked_fraction > masked_limit:
        raise DegenerateDensityError(
            f'Ниже порога плотности {floor:.3e} лежит доля массы '
            f'{masked_fraction:.3e} > {masked_limit}',
            masked_fraction=masked_fraction,
        )
    if not mask.all():
        logger.info('t = %.6g: замаскировано %d вершин, масса %.3e',
                    state.time, int((~mask).sum()), masked_fraction)
    shift = 0.5 * d * (math.log(tau) + math.log(4.0 * math.pi))
    f = -np.log(np.maximum(values, floor)) - shift
    return PotentialField(
        values=f,
        manifold=state.manifold,
        mask=mask,
        tau=float(tau),
        dimension=float(d),
    )
