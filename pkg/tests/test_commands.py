import csv
import json
from io import StringIO

import pytest
from django.core.management import call_command
from django.core.management.base import CommandError

SMALL_TORUS = [
    "--set", "geometry.resolution=24,24",
    "--set", "k=576",
    "--set", "t_start=0.5",
    "--set", "t_end=1.0",
    "--set", "sample_count=3",
    "--set", "scheme=spectral",
]


def run(*args):
    """Вывод команды и код завершения."""
    stdout = StringIO()
    try:
        call_command(*args, stdout=stdout, stderr=StringIO())
    except CommandError as error:
        return stdout.getvalue(), error.returncode, str(error)
    return stdout.getvalue(), 0, ""


def verdict_statuses(output):
    statuses = {}
    for line in output.splitlines():
        parts = line.split()
        if len(parts) == 4 and parts[1] in ("PASS", "FAIL"):
            statuses[parts[0]] = parts[1]
    return statuses


def test_oracle_run_writes_listed_artifacts(tmp_path):
    output, code, _ = run("run", "euclidean_oracle", "--out", str(tmp_path))
    assert code == 0, output
    directory = tmp_path / "euclidean_oracle"
    manifest = json.loads((directory / "manifest.json").read_text())
    assert sorted(manifest["files"]) == sorted(
        path.name for path in directory.iterdir()
    ), "Убедитесь, что манифест перечисляет все записанные файлы."
    assert manifest["exit_status"] == 0
    assert manifest["error"] is None
    assert {"trace.csv", "verdicts.txt", "Y0.svg"} <= set(manifest["files"])
    assert set(verdict_statuses(output).values()) == {"PASS"}


def test_run_then_verify(tmp_path):
    output, code, _ = run("run", "torus_kernel", "--out", str(tmp_path),
                          *SMALL_TORUS)
    assert code in (0, 2), output
    trace = tmp_path / "torus_kernel" / "trace.csv"
    output, _, _ = run("verify", str(trace))
    statuses = verdict_statuses(output)
    for name in ("mass", "monotone_W", "monotone_Ya", "dissipation",
                 "w_identity"):
        assert statuses[name] == "PASS", (
            f"Убедитесь, что повторная проверка трассы проходит {name}."
        )


def test_verify_fails_on_reversed_rows(tmp_path):
    run("run", "euclidean_oracle", "--out", str(tmp_path))
    trace = tmp_path / "euclidean_oracle" / "trace.csv"
    with open(trace, newline="") as stream:
        header, *rows = list(csv.reader(stream))
    with open(trace, "w", newline="") as stream:
        csv.writer(stream).writerows([header] + rows[::-1])
    output, code, _ = run("verify", str(trace))
    assert code == 2, (
        "Убедитесь, что трасса с обратным порядком строк даёт код 2."
    )
    assert "FAIL" in output


def test_remainder_constraint_exits_with_error(tmp_path):
    output, code, message = run(
        "run", "torus_kernel", "--out", str(tmp_path), *SMALL_TORUS,
        "--set", "a=-5",
    )
    assert code == 1
    assert "a > −λ" in message, (
        "Убедитесь, что сообщение называет нарушенное условие a > −λ."
    )
    manifest = json.loads(
        (tmp_path / "torus_kernel" / "manifest.json").read_text()
    )
    assert manifest["exit_status"] == 1
    assert "a > −λ" in manifest["error"]


def test_run_requires_scenario():
    _, code, _ = run("run")
    assert code == 1


def test_sphere_spectrum():
    output, code, _ = run("spectrum", "sphere_kernel", "--count", "8")
    assert code == 0
    lines = dict(
        line.split(maxsplit=1) for line in output.splitlines()
    )
    assert float(lines["first_nonzero"]) == pytest.approx(2.0, rel=1e-2), (
        "Убедитесь, что λ₁ единичной сферы близко к 2."
    )
    assert lines["multiplicity"] == "3"
    assert float(lines["0"]) == pytest.approx(0.0, abs=1e-8)


def test_spectrum_dump(tmp_path):
    output, code, _ = run(
        "spectrum", "torus_kernel", "--set", "geometry.resolution=12,12",
        "--count", "144", "--dump", str(tmp_path),
    )
    assert code == 0
    names = {path.name for path in tmp_path.iterdir()}
    assert {"manifold.csv", "operator.csv", "spectrum.csv",
            "state.csv"} <= names


def test_oracle_command():
    output, code, _ = run("oracle", "--a", "0.25", "--samples", "10")
    assert code == 0, output
    rows = list(csv.reader(StringIO(output)))
    assert rows[0][:3] == ["t", "mass", "W"]
    assert len([row for row in rows if len(row) > 1]) == 11
    assert verdict_statuses(output)["quadrature"] == "PASS"


def test_oracle_command_rejects_negative_a():
    _, code, message = run("oracle", "--a", "-1")
    assert code == 1
    assert "a ≥ 0" in message


def test_runs_are_reproducible(tmp_path):
    for name in ("first", "second"):
        run("run", "torus_kernel", "--out", str(tmp_path / name),
            "--seed", "7", *SMALL_TORUS)
    first, second = (
        (tmp_path / name / "torus_kernel" / "trace.csv").read_bytes()
        for name in ("first", "second")
    )
    assert first == second, (
        "Убедитесь, что при одном зерне трассы совпадают побайтно."
    )


def test_plot_command(tmp_path):
    run("run", "euclidean_oracle", "--out", str(tmp_path))
    trace = tmp_path / "euclidean_oracle" / "trace.csv"
    target = tmp_path / "charts"
    output, code, _ = run("plot", str(trace), "--columns", "Ya", "omega",
                          "--out", str(target))
    assert code == 0
    assert sorted(path.name for path in target.iterdir()) == [
        "Ya.svg", "omega.svg"
    ]
    assert str(target / "Ya.svg") in output
    _, code, _ = run("plot", str(trace), "--columns", "Ha")
    assert code == 1
