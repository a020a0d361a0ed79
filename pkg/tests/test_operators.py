import io
import math
from dataclasses import replace

import numpy as np
import pytest
from django.test import override_settings

from conftest import TWO_PI, entroflow_values
from core.exceptions import (
    AssemblyError, MissingWeightError, SpectralError, UnsupportedTopologyError
)
from manifold.builders import build_flat_torus
from manifold.models import NU, ScalarField
from operators.assembly import assemble_laplacian
from operators.calculus import gradient, gradient_sq, hessian
from operators.curvature import (
    bakry_emery_lower_bound, ricci_form, weight_derivatives
)
from operators.dumps import dump_operator, dump_spectrum
from operators.spectrum import fourier_spectrum, low_spectrum


@pytest.mark.parametrize("name", ["torus_op", "sphere_op", "weighted_op"])
def test_stiffness_is_symmetric_and_annihilates_constants(request, name):
    op = request.getfixturevalue(name)
    stiffness = op.stiffness
    assert abs(stiffness - stiffness.T).max() < 1e-12, (
        "Убедитесь, что матрица жёсткости симметрична."
    )
    ones = np.ones(stiffness.shape[0])
    assert np.abs(stiffness @ ones).max() < 1e-10, (
        "Убедитесь, что константы лежат в ядре оператора."
    )
    values = np.random.default_rng(0).standard_normal(stiffness.shape[0])
    assert op.quadratic_form(values) >= 0, (
        "Убедитесь, что оператор задан со знаком u·S·u ≥ 0."
    )


def test_drift_operator_requires_weight(torus):
    with pytest.raises(MissingWeightError):
        assemble_laplacian(torus, NU)


def test_degenerate_triangle_is_named(sphere):
    positions = sphere.positions.copy()
    first, second = sphere.triangles[0, :2]
    positions[second] = positions[first]
    broken = replace(sphere, positions=positions)
    with pytest.raises(AssemblyError, match="треугольник 0"):
        assemble_laplacian(broken)


def test_torus_spectrum(torus_spectrum, torus):
    values = torus_spectrum.eigenvalues
    assert abs(values[0]) < 1e-10, "Убедитесь, что λ₀ = 0."
    step = TWO_PI / 24
    expected = 4.0 / step ** 2 * math.sin(step / 2) ** 2
    assert torus_spectrum.first_nonzero == pytest.approx(expected, rel=1e-9)
    assert torus_spectrum.multiplicity(1e-6) == 4, (
        "Убедитесь, что первое ненулевое значение тора четырёхкратно."
    )
    fields = torus_spectrum.eigenfields[:, :10]
    gram = fields.T @ (fields * torus.mu_weights[:, None])
    np.testing.assert_allclose(gram, np.eye(10), atol=1e-8)
    constant = torus_spectrum.eigenfields[:, 0]
    assert np.ptp(constant) < 1e-8 * np.abs(constant).max(), (
        "Убедитесь, что собственная функция λ₀ постоянна."
    )


def test_sphere_spectrum(sphere_spectrum):
    assert sphere_spectrum.first_nonzero == pytest.approx(2.0, rel=0.02), (
        "Убедитесь, что первое ненулевое значение единичной сферы близко к 2."
    )
    assert sphere_spectrum.multiplicity(1e-6) == 3
    assert sphere_spectrum.residuals.max() < 1e-8


def test_shift_invert_path_matches_dense():
    manifold = build_flat_torus((16, 16), (TWO_PI, TWO_PI))
    op = assemble_laplacian(manifold)
    dense = low_spectrum(op, manifold.vertex_count)
    with override_settings(ENTROFLOW=entroflow_values(
            DENSE_SPECTRUM_LIMIT=100)):
        sparse_first = low_spectrum(op, 8, seed=7)
        sparse_second = low_spectrum(op, 8, seed=7)
        with pytest.raises(SpectralError):
            low_spectrum(op, 65)
    distances = np.abs(
        sparse_first.eigenvalues[:, None] - dense.eigenvalues[None, :]
    ).min(axis=1)
    assert distances.max() < 1e-8, (
        "Убедитесь, что сдвиг с обращением находит собственные значения "
        "плотной задачи."
    )
    assert sparse_first.first_nonzero == pytest.approx(
        dense.first_nonzero, rel=1e-10
    )
    assert np.array_equal(
        sparse_first.eigenvalues, sparse_second.eigenvalues
    ), "Убедитесь, что при одном зерне спектр воспроизводится побитно."


@pytest.mark.parametrize("k", [1, 10_000])
def test_low_spectrum_rejects_bad_k(torus_op, k):
    with pytest.raises(SpectralError):
        low_spectrum(torus_op, k)


def test_fourier_spectrum(torus, sphere):
    spectrum = fourier_spectrum(torus, 9)
    assert spectrum.first_nonzero == pytest.approx(1.0), (
        "Убедитесь, что на 2π-торе первое значение Фурье равно 1."
    )
    np.testing.assert_allclose(spectrum.eigenvalues[1:5], 1.0)
    np.testing.assert_allclose(spectrum.eigenvalues[5:9], 2.0)
    fields = spectrum.eigenfields
    gram = fields.T @ (fields * torus.mu_weights[:, None])
    np.testing.assert_allclose(gram, np.eye(9), atol=1e-12)
    with pytest.raises(UnsupportedTopologyError):
        fourier_spectrum(sphere, 4)


def test_torus_gradient_sq_matches_energy(fine_torus, fine_torus_op):
    u = ScalarField(np.cos(fine_torus.positions[:, 0]), fine_torus)
    integral = float(np.dot(gradient_sq(u, fine_torus_op).values,
                            fine_torus.mu_weights))
    energy = fine_torus_op.quadratic_form(u.values)
    assert integral == pytest.approx(energy, rel=2e-2)
    assert energy == pytest.approx(2 * math.pi ** 2, rel=1e-2)


def test_sphere_gradient_sq_is_exact_for_linear_elements(sphere, sphere_op):
    u = ScalarField(sphere.positions[:, 2], sphere)
    integral = float(np.dot(gradient_sq(u, sphere_op).values,
                            sphere.mu_weights))
    assert integral == pytest.approx(
        sphere_op.quadratic_form(u.values), rel=1e-10
    ), "Убедитесь, что на сфере ∫|∇u|² совпадает с u·S·u."
    assert gradient(u, sphere_op).shape == (sphere.vertex_count, 3)


def test_torus_hessian(fine_torus, fine_torus_op):
    x = fine_torus.positions[:, 0]
    data = hessian(ScalarField(np.cos(x), fine_torus), fine_torus_op)
    assert data.shape == (fine_torus.vertex_count, 2, 2)
    assert data.is_symmetric()
    np.testing.assert_allclose(data.values[:, 0, 0], -np.cos(x), atol=1e-2)
    np.testing.assert_allclose(data.values[:, 1, 1], 0.0, atol=1e-12)
    np.testing.assert_allclose(data.trace(), data.values[:, 0, 0])


def test_hessian_is_grid_only(sphere, sphere_op):
    with pytest.raises(UnsupportedTopologyError):
        hessian(ScalarField.constant(sphere, 1.0), sphere_op)


def test_ricci_form(sphere, torus):
    ones = ScalarField.constant(sphere, 1.0)
    np.testing.assert_allclose(ricci_form(sphere, ones).values, 1.0)
    np.testing.assert_allclose(
        ricci_form(torus, ScalarField.constant(torus, 1.0)).values, 0.0
    )


def test_bakry_emery_lower_bound(weighted_torus, weighted_op):
    grad_h, hess_h = weight_derivatives(weighted_op)
    bound = bakry_emery_lower_bound(weighted_torus, grad_h, hess_h)
    step = weighted_torus.spacing[0]
    expected = -0.3 * (2.0 - 2.0 * math.cos(step)) / step ** 2
    assert bound == pytest.approx(expected, rel=1e-6), (
        "Убедитесь, что для h = 0.3cos x наименьшее значение Ric_{m,n} "
        "достигается при x = 0."
    )


def test_flat_weight_has_zero_bakry_emery_bound(
        flat_weighted_torus, flat_weighted_op
):
    grad_h, hess_h = weight_derivatives(flat_weighted_op)
    assert bakry_emery_lower_bound(
        flat_weighted_torus, grad_h, hess_h
    ) == pytest.approx(0.0, abs=1e-14)


def test_dumps(torus_op, torus_spectrum):
    stream = io.StringIO()
    count = dump_operator(torus_op, stream)
    assert count == len(stream.getvalue().splitlines()) == (
        torus_op.stiffness.nnz
    )
    stream = io.StringIO()
    assert dump_spectrum(torus_spectrum, stream) == torus_spectrum.size
    index, value = stream.getvalue().splitlines()[1].split(",")
    assert int(index) == 1
    assert float(value) == torus_spectrum.eigenvalues[1]


def test_bilinear_form_is_bitwise_symmetric(weighted_op):
    assert (weighted_op.stiffness != weighted_op.stiffness.T).nnz == 0, (
        "Убедитесь, что матрица жёсткости симметрична поэлементно."
    )
    rng = np.random.default_rng(5)
    size = weighted_op.stiffness.shape[0]
    first, second = rng.standard_normal(size), rng.standard_normal(size)
    assert (weighted_op.bilinear_form(first, second)
            == weighted_op.bilinear_form(second, first)), (
        "Убедитесь, что v·S·w и w·S·v совпадают побитово."
    )
    assert weighted_op.bilinear_form(first, second) == pytest.approx(
        float(first @ (weighted_op.stiffness @ second)), rel=1e-12
    )
    assert weighted_op.quadratic_form(np.full(size, 2.5)) == 0.0, (
        "Убедитесь, что форма константы равна нулю точно."
    )


def _energy_mismatch(size):
    manifold = build_flat_torus((size, size), (TWO_PI, TWO_PI))
    op = assemble_laplacian(manifold)
    x, y = manifold.positions[:, 0], manifold.positions[:, 1]
    u = ScalarField(np.cos(x) + np.sin(2.0 * y), manifold)
    energy = op.quadratic_form(u.values)
    integral = float(np.dot(gradient_sq(u, op).values, manifold.mu_weights))
    return abs(energy - integral) / max(1.0, energy)


def test_quadratic_form_converges_to_gradient_integral():
    coarse, fine = _energy_mismatch(32), _energy_mismatch(64)
    assert fine > 0
    assert coarse / fine >= 3.0, (
        "Убедитесь, что расхождение u·S·u и ∫|∇u|² уменьшается "
        "не меньше чем втрое при измельчении сетки."
    )
