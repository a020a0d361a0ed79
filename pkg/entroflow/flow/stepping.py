import logging
from functools import lru_cache
from typing import Tuple

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import SuperLU, splu

from core.conf import entroflow_setting
from core.exceptions import FlowError
from manifold.models import ScalarField
from operators.models import LaplacianOperator

from .models import CRANK_NICOLSON, IMPLICIT_EULER, SCHEMES, HeatState

logger = logging.getLogger(__name__)

# Остаток интервала ниже этой доли считается ошибкой округления.
TIME_EPS: float = 1e-12

THETA = {
    IMPLICIT_EULER: 1.0,
    CRANK_NICOLSON: 0.5,
}


@lru_cache(maxsize=32)
def _factorized(
        op: LaplacianOperator, dt: float, scheme: str
) -> Tuple[SuperLU, sparse.csc_matrix, sparse.csr_matrix]:
    """LU-разложение (M + θ·dt·S) и правая матрица M − (1−θ)·dt·S."""
    theta = THETA[scheme]
    mass = sparse.diags(op.weights)
    lhs = (mass + theta * dt * op.stiffness).tocsc()
    rhs = (mass - (1.0 - theta) * dt * op.stiffness).tocsr()
    return splu(lhs), lhs, rhs


def _clamp(values: np.ndarray) -> float:
    """Обнуляет отрицательные значения, возвращает величину обрезки."""
    negative = values < 0
    if not negative.any():
        return 0.0
    magnitude = float(-values[negative].min())
    values[negative] = 0.0
    return magnitude


def _check_compatible(state: HeatState, op: LaplacianOperator) -> None:
    if not state.u_tilde.belongs_to(op.manifold):
        raise FlowError('Состояние и оператор заданы на разных многообразиях')
    if state.measure != op.measure:
        raise FlowError(
            f'Мера состояния {state.measure} не совпадает с мерой '
            f'оператора {op.measure}'
        )


def heat_velocity(state: HeatState, op: LaplacianOperator) -> np.ndarray:
    """∂ũ/∂t = −M⁻¹Sũ полудискретного потока."""
    _check_compatible(state, op)
    return -(op.stiffness @ state.values) / op.weights


def step(
        state: HeatState,
        dt: float,
        op: LaplacianOperator,
        scheme: str = IMPLICIT_EULER,
) -> HeatState:
    """
    Один шаг неявной схемы для ∂ũ/∂t = −M⁻¹Sũ.
    После решения масса нормируется к единице.
    """
    if scheme not in SCHEMES:
        raise FlowError(f'Неизвестная схема {scheme}; доступны {SCHEMES}')
    if not 0 < dt <= entroflow_setting('DT_MAX'):
        raise FlowError(
            f'Шаг dt = {dt} вне (0, {entroflow_setting("DT_MAX")}]'
        )
    _check_compatible(state, op)
    solver, lhs, rhs_matrix = _factorized(op, float(dt), scheme)
    rhs = rhs_matrix @ state.values
    solution = solver.solve(rhs)
    residual = float(
        np.linalg.norm(lhs @ solution - rhs)
        / max(np.linalg.norm(rhs), np.finfo(float).tiny)
    )
    if residual > entroflow_setting('SOLVER_RESIDUAL_TOL'):
        raise FlowError('Линейная система шага решена неточно', residual)

    clamped = _clamp(solution)
    if clamped > 1e-12 * solution.max():
        logger.warning('t = %.6g: обрезано отрицательных значений до %.3e',
                       state.time + dt, clamped)
    mass = float(np.dot(solution, op.weights))
    drift = mass - state.mass
    logger.debug('t = %.6g: поправка массы %.3e', state.time + dt, drift)
    solution /= mass
    return HeatState(
        u_tilde=ScalarField(solution, op.manifold),
        time=state.time + dt,
        measure=state.measure,
        mass_drift=drift,
        clamped=clamped,
    )


def evolve(
        state: HeatState,
        until: float,
        dt: float,
        op: LaplacianOperator,
        scheme: str = IMPLICIT_EULER,
) -> HeatState:
    """Равные шаги не длиннее dt до момента until."""
    span = until - state.time
    if span <= TIME_EPS * max(1.0, abs(until)):
        return state
    count = max(int(np.ceil(span / dt - 1e-9)), 1)
    sub_step = span / count
    for _ in range(count):
        state = step(state, sub_step, op, scheme)
    return state
