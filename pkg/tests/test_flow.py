import io
import math

import numpy as np
import pytest

from core.exceptions import (
    DegenerateDensityError, FlowError, InvalidDiscretizationError,
    KernelTruncationError
)
from flow.dumps import dump_state
from flow.kernels import heat_kernel, kernel_row
from flow.models import CRANK_NICOLSON, IMPLICIT_EULER, HeatState, KernelSpec
from flow.stepping import evolve, heat_velocity, step
from flow.variables import compute_f, sqrt_state
from manifold.models import MU, NU
from operators.spectrum import low_spectrum


@pytest.fixture
def uniform_state(torus):
    return HeatState.from_values(
        np.full(torus.vertex_count, 1.0 / torus.volume()), torus, 0.0
    )


@pytest.mark.parametrize("scheme", [IMPLICIT_EULER, CRANK_NICOLSON])
def test_step_conserves_mass(kernel_state, torus_op, scheme):
    state = kernel_state
    for _ in range(5):
        state = step(state, 0.01, torus_op, scheme)
        assert abs(state.mass_drift) <= 1e-12, (
            "Убедитесь, что шаг неявной схемы сохраняет массу."
        )
        assert state.mass == pytest.approx(1.0, abs=1e-14)
    assert state.time == pytest.approx(kernel_state.time + 0.05)


def test_uniform_state_is_fixed_point(uniform_state, torus_op):
    result = step(uniform_state, 0.05, torus_op)
    np.testing.assert_allclose(
        result.values, uniform_state.values, rtol=1e-12
    )
    assert result.clamped == 0.0


@pytest.mark.parametrize("dt", [0.0, 0.5])
def test_step_rejects_bad_dt(uniform_state, torus_op, dt):
    with pytest.raises(FlowError):
        step(uniform_state, dt, torus_op)


def test_step_rejects_foreign_operator(uniform_state, sphere_op):
    with pytest.raises(FlowError):
        step(uniform_state, 0.01, sphere_op)


def test_step_rejects_unknown_scheme(uniform_state, torus_op):
    with pytest.raises(FlowError):
        step(uniform_state, 0.01, torus_op, "explicit")


def test_step_rejects_foreign_measure(flat_weighted_torus, flat_weighted_op):
    state = HeatState.from_values(
        np.full(flat_weighted_torus.vertex_count,
                1.0 / flat_weighted_torus.volume()),
        flat_weighted_torus, 0.0, MU,
    )
    with pytest.raises(FlowError):
        step(state, 0.01, flat_weighted_op)


def test_evolve_reaches_target_time(kernel_state, torus_op):
    state = evolve(kernel_state, 0.6, 0.03, torus_op)
    assert state.time == pytest.approx(0.6)
    assert evolve(state, 0.6, 0.03, torus_op) is state, (
        "Убедитесь, что evolve не делает шагов, если момент уже достигнут."
    )


def test_kernel_mass_and_symmetry(torus_spectrum, kernel_state):
    assert kernel_state.mass == pytest.approx(1.0, abs=1e-12)
    assert np.all(kernel_state.values >= 0)
    k = torus_spectrum.size
    first = kernel_row(torus_spectrum, 0, 0.5, k)
    second = kernel_row(torus_spectrum, 37, 0.5, k)
    assert first[37] == pytest.approx(second[0], rel=1e-12), (
        "Убедитесь, что H(x, y, t) = H(y, x, t)."
    )


def test_kernel_matches_time_stepping(torus, torus_op, torus_spectrum,
                                      kernel_state):
    spec = KernelSpec(0, torus_spectrum.size, MU)
    target = heat_kernel(torus, torus_op, spec, 1.0, torus_spectrum)
    stepped = evolve(kernel_state, 1.0, 0.005, torus_op, CRANK_NICOLSON)
    assert np.abs(stepped.values - target.values).max() < 1e-4, (
        "Убедитесь, что спектральное ядро и шаги Кранка-Николсон согласованы."
    )


def test_kernel_truncation(torus, torus_op):
    small = low_spectrum(torus_op, 8)
    spec = KernelSpec(0, small.size, MU)
    with pytest.raises(KernelTruncationError) as error:
        heat_kernel(torus, torus_op, spec, 0.01, small)
    assert error.value.required_k > small.size
    with pytest.raises(KernelTruncationError):
        heat_kernel(torus, torus_op, KernelSpec(0, 20, MU), 1.0, small)


def test_kernel_checks_arguments(torus, torus_op, torus_spectrum, sphere):
    spec = KernelSpec(0, torus_spectrum.size, MU)
    with pytest.raises(FlowError):
        heat_kernel(torus, torus_op, spec, 0.0, torus_spectrum)
    with pytest.raises(FlowError):
        heat_kernel(sphere, torus_op, spec, 0.5, torus_spectrum)
    with pytest.raises(FlowError):
        heat_kernel(torus, torus_op, KernelSpec(0, 10, NU), 0.5,
                    torus_spectrum)
    with pytest.raises(InvalidDiscretizationError):
        KernelSpec(0, 0)


def test_compute_f_of_uniform_state(uniform_state, torus):
    f = compute_f(uniform_state, 1.0, 2)
    expected = math.log(torus.volume()) - math.log(4.0 * math.pi)
    np.testing.assert_allclose(f.values, expected, rtol=1e-12)
    assert f.masked_count == 0
    assert (f.tau, f.dimension) == (1.0, 2.0)


def test_compute_f_masks_low_density(torus):
    values = np.zeros(torus.vertex_count)
    values[:10] = 1.0
    state = HeatState.from_values(values / values.sum() / torus.mu_weights[0],
                                  torus, 0.5)
    f = compute_f(state, 0.5, 2)
    assert f.masked_count == torus.vertex_count - 10, (
        "Убедитесь, что вершины без массы маскируются."
    )
    assert np.all(np.isfinite(f.values))


def test_compute_f_rejects_degenerate_density(torus):
    values = np.where(np.arange(torus.vertex_count) % 2, 1.0, 0.4)
    state = HeatState.from_values(values, torus, 0.5)
    with pytest.raises(DegenerateDensityError) as error:
        compute_f(state, 0.5, 2, floor_factor=0.5)
    assert error.value.masked_fraction == pytest.approx(0.4 / 1.4)
    with pytest.raises(DegenerateDensityError):
        compute_f(HeatState.from_values(np.zeros(torus.vertex_count),
                                        torus, 0.5), 0.5, 2)


def test_sqrt_state(kernel_state):
    u = sqrt_state(kernel_state)
    np.testing.assert_allclose(u.values ** 2, kernel_state.values)


def test_dump_state(kernel_state):
    stream = io.StringIO()
    assert dump_state(kernel_state, stream) == kernel_state.values.size
    index, value = stream.getvalue().splitlines()[0].split(",")
    assert (int(index), float(value)) == (0, kernel_state.values[0])


def test_implicit_euler_keeps_maximum_principle(kernel_state, torus_op):
    state = kernel_state
    for _ in range(10):
        following = step(state, 0.05, torus_op, IMPLICIT_EULER)
        slack = 1e-14 * state.values.max()
        assert following.values.min() >= state.values.min() - slack, (
            "Убедитесь, что минимум не убывает за шаг неявного Эйлера."
        )
        assert following.values.max() <= state.values.max() + slack, (
            "Убедитесь, что максимум не растёт за шаг неявного Эйлера."
        )
        assert following.clamped == 0.0
        state = following


@pytest.mark.parametrize("scheme, expected_ratio", [
    (IMPLICIT_EULER, 1.6),
    (CRANK_NICOLSON, 3.0),
])
def test_scheme_convergence_order(torus, torus_op, torus_spectrum,
                                  kernel_state, scheme, expected_ratio):
    spec = KernelSpec(0, torus_spectrum.size, MU)
    target = heat_kernel(torus, torus_op, spec, 1.0, torus_spectrum)
    errors = [
        np.abs(evolve(kernel_state, 1.0, dt, torus_op, scheme).values
               - target.values).max()
        for dt in (0.05, 0.025)
    ]
    assert errors[0] / errors[1] > expected_ratio, (
        f"Убедитесь, что при вдвое меньшем шаге ошибка {scheme} "
        f"уменьшается соответственно порядку схемы."
    )


def test_heat_velocity_conserves_mass(kernel_state, torus_op, torus):
    velocity = heat_velocity(kernel_state, torus_op)
    assert abs(np.dot(velocity, torus.weights(MU))) < 1e-10, (
        "Убедитесь, что скорость потока не меняет массу."
    )


def test_heat_velocity_rejects_foreign_operator(kernel_state, sphere_op):
    with pytest.raises(FlowError):
        heat_velocity(kernel_state, sphere_op)
