import logging
from typing import Dict, List, Optional

import numpy as np

from core.conf import entroflow_setting
from core.exceptions import MissingColumnError

from .models import EUCLIDEAN_FAMILY, EntropyTrace, Verdict
from .rigidity import classify_rigidity

logger = logging.getLogger(__name__)

CONSTANT_TOL: float = 1e-12


def _times_increasing(trace: EntropyTrace) -> bool:
    return bool(np.all(np.diff(trace.times) > 0))


def _worst(values: np.ndarray) -> float:
    if values.size == 0:
        return 0.0
    if not np.all(np.isfinite(values)):
        return float('inf')
    return max(float(values.max()), 0.0)


def time_derivative(trace: EntropyTrace, column: str) -> np.ndarray:
    """
    d(column)/dt: точный столбец <column>_rate, если он есть,
    иначе центральные разности с односторонними на концах.
    """
    rate_column = f'{column}_rate'
    if trace.has(rate_column):
        return trace.column(rate_column)
    values = trace.column(column)
    if len(trace) < 2:
        return np.zeros_like(values)
    edge_order = 2 if len(trace) > 2 else 1
    return np.gradient(values, trace.times, edge_order=edge_order)


def tolerance_constant(trace: EntropyTrace) -> float:
    """
    Константа C модели допуска: откалиброванная для трассы,
    иначе значение семейства из настроек.
    """
    metadata = trace.metadata
    if metadata.get('tol_constant') is not None:
        return float(metadata['tol_constant'])
    constants = entroflow_setting('TOLERANCE_CONSTANTS')
    return float(constants.get(metadata.get('family'), constants['custom']))


def model_scale(trace: EntropyTrace) -> float:
    """Δx² + dt трассы."""
    return trace.spacing ** 2 + float(trace.metadata.get('dt', 0.0))


def tolerance_model(trace: EntropyTrace) -> float:
    """scale·C·(Δx² + dt)."""
    scale = float(trace.metadata.get('tol_scale', 1.0))
    model = scale * tolerance_constant(trace) * model_scale(trace)
    return max(model, entroflow_setting('ORACLE_TOL'))


def verify_mass(trace: EntropyTrace) -> Verdict:
    tolerance = entroflow_setting('MASS_TOL')
    worst = _worst(np.abs(trace.column('mass') - 1.0))
    return Verdict('mass', worst <= tolerance, worst, tolerance)


def verify_monotone(
        trace: EntropyTrace,
        column: str,
        tol: float,
        name: Optional[str] = None,
) -> Verdict:
    """Каждая разность соседних значений не больше +tol."""
    name = name or f'monotone_{column}'
    values = trace.column(column)
    if not _times_increasing(trace):
        logger.warning('%s: моменты времени не возрастают', name)
        return Verdict(name, False, float('inf'), tol)
    worst = _worst(np.diff(values))
    return Verdict(name, worst <= tol, worst, tol)


def verify_dissipation(
        trace: EntropyTrace, tol_model: Optional[float] = None
) -> Verdict:
    """−dY_a/dt ≥ dissipation − tol во всех строках, dissipation ≥ 0."""
    tol = tolerance_model(trace) if tol_model is None else tol_model
    if trace.has('Ha'):
        entropy, dissipation = 'Ha', 'weighted_dissipation'
    else:
        entropy, dissipation = 'Ya', 'dissipation'
    values = trace.column(dissipation)
    if not _times_increasing(trace):
        return Verdict('dissipation', False, float('inf'), tol)
    decrease = -time_derivative(trace, entropy)
    worst = max(_worst(values - decrease), _worst(-values))
    return Verdict('dissipation', worst <= tol, worst, tol)


def verify_identity(
        trace: EntropyTrace,
        column: str,
        rate_column: str,
        tol: float,
        name: str,
        sign: float = -1.0,
) -> Verdict:
    """|d(column)/dt − sign·rate_column| ≤ tol во всех строках."""
    rates = trace.column(rate_column)
    if not _times_increasing(trace):
        return Verdict(name, False, float('inf'), tol)
    residual = np.abs(time_derivative(trace, column) - sign * rates)
    worst = _worst(residual)
    return Verdict(name, worst <= tol, worst, tol)


def _row_step(trace: EntropyTrace) -> float:
    steps = np.diff(trace.times)
    return float(steps.max()) if steps.size else 0.0


def _bakry_emery_bound(trace: EntropyTrace) -> float:
    return float(trace.metadata.get('bakry_emery_bound', float('-inf')))


def _weighted_monotone(trace: EntropyTrace) -> bool:
    return _bakry_emery_bound(trace) >= 0


def model_violations(trace: EntropyTrace) -> Dict[str, float]:
    """
    Худшие нарушения проверок с допуском модели C·(Δx² + dt):
    тождества для dW/dt, неравенства для Y_a (H_a) и роста W и Y₀.
    """
    if trace.has('weighted_rhs'):
        worst = {'weighted_w_identity': verify_identity(
            trace, 'W', 'weighted_rhs', 0.0, 'weighted_w_identity',
            sign=1.0,
        ).worst}
        if _weighted_monotone(trace):
            worst['dissipation'] = verify_dissipation(trace, 0.0).worst
            worst['W_growth'] = _worst(time_derivative(trace, 'W'))
        return worst
    if trace.has('ni_dissipation'):
        return {
            'w_identity': verify_identity(
                trace, 'W', 'ni_dissipation', 0.0, 'w_identity'
            ).worst,
            'dissipation': verify_dissipation(trace, 0.0).worst,
            'W_growth': _worst(time_derivative(trace, 'W')),
            'Y0_growth': _worst(time_derivative(trace, 'Y0')),
        }
    raise MissingColumnError(
        'Калибровке нужна трасса сетки со столбцом ni_dissipation '
        'или weighted_rhs'
    )


def identity_residual(trace: EntropyTrace) -> float:
    """Худшая невязка тождества для dW/dt."""
    violations = model_violations(trace)
    if 'weighted_w_identity' in violations:
        return violations['weighted_w_identity']
    return violations['w_identity']


def verify_trace(
        trace: EntropyTrace, tol_model: Optional[float] = None
) -> List[Verdict]:
    """
    Набор проверок, применимых к семейству сценария.
    На сетке приращения W и Y₀ ограничены допуском модели на шаг строки.
    """
    tol = tolerance_model(trace) if tol_model is None else tol_model
    monotone = entroflow_setting('MONOTONE_TOL')
    row_tol = max(monotone, tol * _row_step(trace))
    verdicts = [verify_mass(trace)]

    if trace.metadata.get('family') == EUCLIDEAN_FAMILY:
        verdicts += [
            verify_monotone(trace, 'Y0', CONSTANT_TOL),
            verify_monotone(trace, 'Ya', monotone),
            verify_dissipation(trace, tol),
            verify_identity(trace, 'W', 'ni_dissipation', tol, 'w_identity'),
            classify_rigidity(trace),
        ]
    elif trace.has('weighted_rhs'):
        verdicts.append(verify_identity(
            trace, 'W', 'weighted_rhs', tol, 'weighted_w_identity', sign=1.0
        ))
        if _weighted_monotone(trace):
            verdicts += [
                verify_monotone(trace, 'W', row_tol),
                verify_monotone(trace, 'Ha', monotone),
                verify_dissipation(trace, tol),
            ]
        else:
            logger.info('Ric_{m,n} ≥ %.3e < 0: проверки монотонности '
                        'и неравенства для H_a не применимы',
                        _bakry_emery_bound(trace))
    elif trace.has('dissipation'):
        verdicts += [
            verify_monotone(trace, 'W', row_tol),
            verify_monotone(trace, 'Y0', row_tol),
            verify_monotone(trace, 'Ya', monotone),
            verify_dissipation(trace, tol),
            verify_identity(trace, 'W', 'ni_dissipation', tol, 'w_identity'),
            classify_rigidity(trace, euclidean=False),
        ]
    else:
        verdicts += [
            verify_monotone(trace, 'W', row_tol),
            verify_monotone(trace, 'Ya', monotone),
        ]
    for verdict in verdicts:
        log = logger.info if verdict.passed else logger.warning
        log('%s', verdict.as_line())
    return verdicts
