import logging
from typing import Optional

import numpy as np

from core.conf import entroflow_setting
from flow.models import HeatState
from flow.variables import compute_f
from manifold.measures import integrate_values
from operators.calculus import hessian
from operators.models import LaplacianOperator

from .models import EntropyTrace, Verdict

logger = logging.getLogger(__name__)


def rigidity_gap(state: HeatState, t: float, op: LaplacianOperator) -> float:
    """∫|Hess f − g/2t|²ũ с f = compute_f(ũ, t, n)."""
    manifold = state.manifold
    f = compute_f(state, t, manifold.dimension)
    hess = hessian(f, op).values
    metric = np.eye(manifold.dimension)[None, :, :]
    deviation = np.sum((hess - metric / (2.0 * t)) ** 2, axis=(1, 2))
    density = np.where(f.mask, state.values, 0.0)
    return integrate_values(deviation * density, manifold, state.measure)


def classify_rigidity(
        trace: EntropyTrace,
        threshold: Optional[float] = None,
        euclidean: bool = True,
) -> Verdict:
    """
    Классификация по разрыву жёсткости на всём окне.
    euclidean=True ожидает разрыв ниже порога (проверка rigidity),
    euclidean=False ожидает компактную модель с разрывом не ниже порога
    (проверка non_euclidean).
    """
    if threshold is None:
        threshold = entroflow_setting('RIGIDITY_THRESHOLD')
    gap = trace.column('rigidity_gap')
    if not np.all(np.isfinite(gap)):
        name = 'rigidity' if euclidean else 'non_euclidean'
        return Verdict(name, False, float('inf'), threshold)
    peak = float(np.max(gap)) if gap.size else 0.0
    euclidean_like = peak < threshold
    logger.info('Разрыв жёсткости: максимум %.3e, порог %.1e, %s',
                peak, threshold,
                'евклидов случай' if euclidean_like else 'не евклидов случай')
    if euclidean:
        return Verdict('rigidity', euclidean_like, peak, threshold)
    shortfall = threshold - peak if euclidean_like else 0.0
    return Verdict('non_euclidean', not euclidean_like, shortfall, 0.0)
