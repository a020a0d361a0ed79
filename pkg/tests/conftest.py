from typing import Iterable

import pytest
from django.conf import settings
from django.test import override_settings


class SafeImportFromContextManager:
    def __init__(
            self,
            import_path: str,
            import_names: Iterable[str],
            import_of: str = "",
    ):
        self._import_path: str = import_path
        self._import_names: Iterable[str] = import_names
        self._import_of = f"{import_of} " if import_of else ""

    def __enter__(self):
        pass

    def __exit__(self, exc_type, exc_value, traceback):
        if exc_type is ImportError:
            disp_imp_names = "`, ".join(self._import_names)
            raise AssertionError(
                f"Убедитесь, что в файле `{self._import_path}` нет ошибок. "
                f"При импорте из него {self._import_of}"
                f"`{disp_imp_names}` возникла ошибка:\n"
                f"{exc_type.__name__}: {exc_value}"
            )


with SafeImportFromContextManager(
        "core/exceptions.py", ["EntroflowError"], import_of="исключений"
):
    from core.exceptions import EntroflowError  # noqa:F401

with SafeImportFromContextManager(
        "manifold/builders.py", ["build_flat_torus", "build_sphere"],
        import_of="построителей",
):
    from manifold.builders import build_flat_torus, build_sphere  # noqa:F401

pytest_plugins = [
    "fixtures.manifolds",
    "fixtures.spectra",
    "fixtures.traces",
]

TWO_PI = 6.283185307179586


@pytest.fixture(autouse=True)
def isolated_output(tmp_path, monkeypatch):
    """Артефакты каждого теста пишутся во временный каталог."""
    monkeypatch.delenv("ENTROFLOW_OUT", raising=False)
    values = {**settings.ENTROFLOW, "OUTPUT_DIR": str(tmp_path / "runs")}
    with override_settings(ENTROFLOW=values):
        yield


def entroflow_values(**changes) -> dict:
    """Копия ENTROFLOW с изменёнными ключами для override_settings."""
    return {**settings.ENTROFLOW, **changes}
