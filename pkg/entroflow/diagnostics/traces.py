import logging
import math
from dataclasses import dataclass
from typing import Dict, Tuple

import numpy as np

from core.conf import entroflow_setting
from core.exceptions import KernelTruncationError, UnsupportedTopologyError
from entropy.dissipation import (
    adjusted_dissipation, ni_dissipation, weighted_dissipation
)
from entropy.functionals import (
    adjusted_ya, log_entropy_y0, ni_entropy, weighted_ha
)
from entropy.models import EntropyParams
from flow.kernels import heat_kernel
from flow.models import HeatState, KernelSpec
from flow.stepping import evolve, heat_velocity
from flow.variables import compute_f, sqrt_state
from manifold.builders import attach_weight, build_flat_torus, build_sphere
from manifold.models import (
    EUCLIDEAN_ORACLE, FLAT_TORUS, MU, NU, SPHERE, DiscreteManifold,
    ScalarField
)
from operators.assembly import assemble_laplacian
from operators.curvature import bakry_emery_lower_bound, weight_derivatives
from operators.models import LaplacianOperator, SpectralData
from operators.spectrum import low_spectrum

from .models import RATE_COLUMNS, SPECTRAL, EntropyTrace, Scenario
from .oracle import euclidean_oracle, oracle_self_check
from .rigidity import rigidity_gap

logger = logging.getLogger(__name__)


def weight_function(
        manifold: DiscreteManifold, amplitude: float
) -> ScalarField:
    """h = amplitude·cos(2πx/L) по первой оси тора."""
    length = manifold.side_lengths[0]
    coords = manifold.positions[:, 0]
    return ScalarField(
        amplitude * np.cos(2.0 * math.pi * coords / length), manifold
    )


def build_manifold(scenario: Scenario) -> DiscreteManifold:
    if scenario.topology == FLAT_TORUS:
        manifold = build_flat_torus(
            scenario.resolution, scenario.side_lengths
        )
    elif scenario.topology == SPHERE:
        manifold = build_sphere(scenario.level, scenario.radius)
    else:
        raise UnsupportedTopologyError(
            f'Неизвестная топология сетки: {scenario.topology}'
        )
    if scenario.is_weighted:
        if not manifold.is_grid:
            raise UnsupportedTopologyError(
                'Весовая функция поддерживается только на торе'
            )
        manifold = attach_weight(
            manifold, weight_function(manifold, scenario.amplitude),
            scenario.m,
        )
    return manifold


@dataclass(frozen=True, eq=False)
class _TraceContext:
    scenario: Scenario
    manifold: DiscreteManifold
    op: LaplacianOperator
    params: EntropyParams

    @property
    def measure(self) -> str:
        return self.params.measure

    @property
    def d(self) -> float:
        return self.params.d


def _kernel_state(
        context: _TraceContext, spectrum: SpectralData, t: float
) -> Tuple[HeatState, SpectralData]:
    """Ядро в момент t; при нехватке мод берётся полный спектр."""
    manifold = context.manifold
    spec = KernelSpec(
        context.scenario.source, spectrum.size, context.measure
    )
    try:
        return heat_kernel(manifold, context.op, spec, t, spectrum), spectrum
    except KernelTruncationError as error:
        size = manifold.vertex_count
        if spectrum.is_complete or size > entroflow_setting(
                'DENSE_SPECTRUM_LIMIT'):
            raise
        logger.warning('%s; пересчитываю полный спектр из %d пар',
                       error, size)
        full = low_spectrum(context.op, size, seed=context.scenario.seed)
        spec = KernelSpec(context.scenario.source, size, context.measure)
        return heat_kernel(manifold, context.op, spec, t, full), full


def _entropies(context: _TraceContext, state: HeatState, t: float
               ) -> Dict[str, float]:
    """W, Y₀ и Y_a (или H_a) состояния в момент t."""
    op = context.op
    d = context.d
    u = sqrt_state(state)
    f = compute_f(state, t, d)
    values = {
        'W': ni_entropy(f, t, state, d, op).value,
        'Y0': log_entropy_y0(u, op, d, context.measure),
    }
    if context.scenario.is_weighted:
        value = weighted_ha(u, context.params, t, op)
        values['Ha'] = value.value
    else:
        value = adjusted_ya(u, context.params, t, op)
        values['Ya'] = value.value
    values['omega'] = value.omega
    return values


def _shifted(state: HeatState, velocity: np.ndarray,
             shift: float) -> HeatState:
    """Состояние ũ + shift·∂ũ/∂t в момент t + shift с массой 1."""
    values = np.maximum(state.values + shift * velocity, 0.0)
    values /= np.dot(values, state.manifold.weights(state.measure))
    return HeatState.from_values(values, state.manifold,
                                 state.time + shift, state.measure)


def _entropy_rates(context: _TraceContext, state: HeatState, t: float
                   ) -> Dict[str, float]:
    """
    Производные энтропий вдоль полудискретного потока ∂ũ/∂t = −M⁻¹Sũ:
    центральная разность по состояниям в t ± δ, δ = RATE_STEP·t.
    """
    delta = entroflow_setting('RATE_STEP') * t
    velocity = heat_velocity(state, context.op)
    ahead = _entropies(context, _shifted(state, velocity, delta), t + delta)
    behind = _entropies(context, _shifted(state, velocity, -delta),
                        t - delta)
    return {
        f'{name}_rate': (ahead[name] - behind[name]) / (2.0 * delta)
        for name in RATE_COLUMNS if name in ahead
    }


def _row(context: _TraceContext, state: HeatState, t: float
         ) -> Dict[str, float]:
    op = context.op
    row = {'t': t, 'mass': state.mass}
    row.update(_entropies(context, state, t))
    row.update(_entropy_rates(context, state, t))
    if not context.manifold.is_grid:
        return row
    f = compute_f(state, t, context.d)
    if context.scenario.is_weighted:
        weighted = weighted_dissipation(state, context.params, op, t)
        row['weighted_rhs'] = weighted.w_rate
        row['weighted_dissipation'] = weighted.adjusted.value
    else:
        row['ni_dissipation'] = ni_dissipation(state, f, t, op)
        row['dissipation'] = adjusted_dissipation(
            sqrt_state(state), context.params, op, t).value
    row['rigidity_gap'] = rigidity_gap(state, t, op)
    return row


def _oracle_trace(scenario: Scenario) -> EntropyTrace:
    grid = scenario.time_grid()
    trace = euclidean_oracle(scenario.dimension, scenario.a, grid)
    for t in (grid[0], grid[-1]):
        mismatch = oracle_self_check(scenario.dimension, scenario.a, t)
        if mismatch > entroflow_setting('ORACLE_TOL'):
            logger.warning('Оракул при t = %.6g расходится с квадратурой '
                           'на %.3e', t, mismatch)
    trace.metadata.update(scenario=scenario.name,
                          family=scenario.family,
                          tol_scale=scenario.tol_scale)
    return trace


def run_trace(scenario: Scenario) -> EntropyTrace:
    """
    Ядро из источника в t_start, затем шаги потока до t_end
    с вычислением энтропий в каждый момент выборки.
    """
    if scenario.topology == EUCLIDEAN_ORACLE:
        return _oracle_trace(scenario)

    manifold = build_manifold(scenario)
    measure = NU if scenario.is_weighted else MU
    op = assemble_laplacian(manifold, measure)
    spectrum = low_spectrum(
        op, min(scenario.k, manifold.vertex_count), seed=scenario.seed
    )
    d = scenario.m if scenario.is_weighted else manifold.dimension
    params = EntropyParams(scenario.a, d, measure, spectrum.first_nonzero)
    context = _TraceContext(scenario, manifold, op, params)

    metadata = {
        'scenario': scenario.name,
        'family': scenario.family,
        'topology': scenario.topology,
        'dimension': manifold.dimension,
        'a': scenario.a,
        'm': scenario.m,
        'dt': scenario.dt,
        'scheme': scenario.scheme,
        'mesh_size': manifold.mesh_size,
        'vertices': manifold.vertex_count,
        'first_nonzero': spectrum.first_nonzero,
        'tol_scale': scenario.tol_scale,
    }
    if scenario.is_weighted:
        grad_h, hess_h = weight_derivatives(op)
        bound = bakry_emery_lower_bound(manifold, grad_h, hess_h)
        metadata['bakry_emery_bound'] = bound
        if bound < 0:
            logger.info('%s: Ric_{m,n} ≥ %.3e, условие неотрицательности '
                        'не выполнено', scenario.name, bound)

    times = scenario.time_grid()
    state, spectrum = _kernel_state(context, spectrum, float(times[0]))
    rows = []
    for t in times:
        t = float(t)
        if scenario.scheme == SPECTRAL:
            state, spectrum = _kernel_state(context, spectrum, t)
        elif t > state.time:
            state = evolve(state, t, scenario.dt, op, scenario.scheme)
        rows.append(_row(context, state, t))
        logger.debug('%s: t = %.6g, W = %.12g', scenario.name, t,
                     rows[-1]['W'])
    metadata['eigenpairs'] = spectrum.size
    columns = {
        name: np.array([row[name] for row in rows]) for name in rows[0]
    }
    logger.info('%s: трасса из %d строк', scenario.name, len(rows))
    return EntropyTrace(columns, metadata)
