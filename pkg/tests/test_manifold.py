import io
import math

import numpy as np
import pytest

from conftest import TWO_PI
from core.exceptions import InvalidDimensionError, InvalidDiscretizationError
from manifold.builders import attach_weight, build_flat_torus, build_sphere
from manifold.dumps import dump_manifold
from manifold.measures import integrate, integrate_values
from manifold.models import MU, NU, ScalarField


@pytest.mark.parametrize("resolution, lengths", [
    ((8, 8), (TWO_PI, TWO_PI)),
    ((6, 10), (1.0, 3.0)),
    ((5, 5, 5), (2.0, 2.0, 2.0)),
])
def test_torus_volume_is_exact(resolution, lengths):
    manifold = build_flat_torus(resolution, lengths)
    assert manifold.vertex_count == int(np.prod(resolution)), (
        "Убедитесь, что у тора по одной вершине на каждый узел сетки."
    )
    assert integrate(ScalarField.constant(manifold, 1.0)) == pytest.approx(
        float(np.prod(lengths)), rel=1e-12
    ), "Убедитесь, что объём тора по мере μ равен произведению длин сторон."


@pytest.mark.parametrize("resolution, lengths", [
    ((3, 8), (1.0, 1.0)),
    ((8, 8), (1.0,)),
    ((4, 4, 4, 4), (1.0, 1.0, 1.0, 1.0)),
    ((8, 8), (1.0, -1.0)),
])
def test_torus_rejects_bad_discretization(resolution, lengths):
    with pytest.raises(InvalidDiscretizationError):
        build_flat_torus(resolution, lengths)


def test_sphere_area_converges():
    errors = [
        abs(build_sphere(level, 1.0).volume() - 4.0 * math.pi)
        for level in (2, 3, 4)
    ]
    assert errors[1] <= 0.35 * errors[0] and errors[2] <= 0.35 * errors[1], (
        "Убедитесь, что ошибка площади сферы убывает при подразбиении "
        f"не медленнее чем в 0.35 раза: {errors}"
    )


def test_sphere_coarse_area(sphere):
    assert sphere.volume() == pytest.approx(4.0 * math.pi, rel=0.08), (
        "Убедитесь, что веса вершин сферы равны трети площадей граней."
    )
    assert build_sphere(2, 2.0).volume() == pytest.approx(
        16.0 * math.pi, rel=0.08
    ), "Убедитесь, что площадь сферы масштабируется как r²."


@pytest.mark.parametrize("level, radius", [(0, 1.0), (9, 1.0), (2, 0.0)])
def test_sphere_rejects_bad_discretization(level, radius):
    with pytest.raises(InvalidDiscretizationError):
        build_sphere(level, radius)


def test_sphere_curvature(sphere):
    assert sphere.curvature.ricci_factor(2) == pytest.approx(1.0), (
        "Убедитесь, что на единичной сфере (n−1)K = 1."
    )
    assert build_sphere(1, 2.0).curvature.sectional == pytest.approx(0.25)


def test_attach_weight(torus):
    h = ScalarField(np.linspace(0.0, 1.0, torus.vertex_count), torus)
    weighted = attach_weight(torus, h, 3.0)
    assert weighted.manifold_id != torus.manifold_id, (
        "Убедитесь, что многообразие с весом получает свой идентификатор."
    )
    assert not ScalarField.constant(torus, 1.0).belongs_to(weighted), (
        "Убедитесь, что поле исходного тора не принадлежит тору с весом."
    )
    assert integrate(
        ScalarField.constant(weighted, 1.0), NU
    ) == pytest.approx(
        float(np.sum(np.exp(-h.values) * torus.weights(MU))), rel=1e-12
    ), "Убедитесь, что ∫1 dν считается с весом e^{−h}."
    np.testing.assert_allclose(
        weighted.weights(NU), np.exp(-h.values) * torus.weights(MU)
    )
    assert weighted.be_dimension == 3.0
    assert torus.weights(NU) is torus.weights(MU), (
        "Убедитесь, что без весовой функции мера ν совпадает с μ."
    )


@pytest.mark.parametrize("m", [2.0, 1.0])
def test_attach_weight_requires_dimension_above_n(torus, m):
    with pytest.raises(InvalidDimensionError):
        attach_weight(torus, ScalarField.constant(torus, 0.0), m)


def test_scalar_field_checks_length(torus):
    with pytest.raises(ValueError):
        ScalarField(np.zeros(torus.vertex_count + 1), torus)


def test_integrate_values_by_measure(weighted_torus):
    ones = np.ones(weighted_torus.vertex_count)
    assert integrate_values(ones, weighted_torus, NU) == pytest.approx(
        float(weighted_torus.nu_weights.sum())
    )
    assert integrate_values(ones, weighted_torus, MU) == pytest.approx(
        TWO_PI ** 2
    )


def test_dump_manifold(weighted_torus):
    stream = io.StringIO()
    count = dump_manifold(weighted_torus, stream)
    lines = stream.getvalue().splitlines()
    assert count == len(lines) == weighted_torus.vertex_count
    first = lines[1].split(",")
    assert len(first) == 1 + weighted_torus.dimension + 2, (
        "Убедитесь, что строка снимка содержит индекс, координаты, μ и ν."
    )
    assert float(first[-1]) == pytest.approx(weighted_torus.nu_weights[1])
