import pytest

from manifold.models import MU, NU
from operators.assembly import assemble_laplacian
from operators.spectrum import low_spectrum

SPHERE_MODES = 16


@pytest.fixture(scope="session")
def torus_op(torus):
    return assemble_laplacian(torus, MU)


@pytest.fixture(scope="session")
def torus_spectrum(torus, torus_op):
    """Полный спектр тора 24×24: ядро точно при любом t."""
    return low_spectrum(torus_op, torus.vertex_count)


@pytest.fixture(scope="session")
def fine_torus_op(fine_torus):
    return assemble_laplacian(fine_torus, MU)


@pytest.fixture(scope="session")
def sphere_op(sphere):
    return assemble_laplacian(sphere, MU)


@pytest.fixture(scope="session")
def sphere_spectrum(sphere_op):
    return low_spectrum(sphere_op, SPHERE_MODES)


@pytest.fixture(scope="session")
def weighted_op(weighted_torus):
    return assemble_laplacian(weighted_torus, NU)


@pytest.fixture(scope="session")
def weighted_spectrum(weighted_torus, weighted_op):
    return low_spectrum(weighted_op, weighted_torus.vertex_count)


@pytest.fixture(scope="session")
def flat_weighted_op(flat_weighted_torus):
    return assemble_laplacian(flat_weighted_torus, NU)
