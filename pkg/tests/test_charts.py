import numpy as np
import pytest
from bs4 import BeautifulSoup

from diagnostics.models import EntropyTrace
from runner.charts import chart_columns, render_chart

from fixtures.traces import ORACLE_TIMES

EUCLIDEAN_Y0 = 2.1447298858494


@pytest.fixture
def y0_chart(euclidean_trace):
    return BeautifulSoup(render_chart(euclidean_trace, "Y0"), "html.parser")


def polyline_points(soup):
    polyline = soup.find("polyline", class_="trace")
    assert polyline is not None, "Убедитесь, что на графике есть ломаная."
    return [
        tuple(float(value) for value in pair.split(","))
        for pair in polyline["points"].split()
    ]


def test_constant_column_is_a_horizontal_line(y0_chart):
    points = polyline_points(y0_chart)
    assert len(points) == ORACLE_TIMES.size
    assert len({y for _, y in points}) == 1, (
        "Убедитесь, что постоянная Y₀ рисуется горизонтальной линией."
    )
    xs = [x for x, _ in points]
    assert xs == sorted(xs)
    svg = y0_chart.find("svg")
    assert float(svg["data-y-min"]) < EUCLIDEAN_Y0 < float(svg["data-y-max"])
    assert svg["data-column"] == "Y0"


def test_chart_layout(y0_chart):
    svg = y0_chart.find("svg")
    assert (svg["width"], svg["height"]) == ("960", "540")
    assert "Y0(t)" in y0_chart.find("title").text
    assert y0_chart.find("text", class_="x-label").text == "t"
    assert y0_chart.find("text", class_="y-label").text == "Y0", (
        "Убедитесь, что оси графика подписаны."
    )
    assert len(y0_chart.select("g.x-ticks text")) == 5


def test_non_finite_values_are_skipped():
    trace = EntropyTrace({
        "t": np.array([0.1, 0.2, 0.3]),
        "W": np.array([1.0, np.nan, 0.5]),
    })
    soup = BeautifulSoup(render_chart(trace, "W"), "html.parser")
    assert len(polyline_points(soup)) == 2


def test_chart_columns(euclidean_trace, weighted_trace):
    assert chart_columns(euclidean_trace) == ["W", "Y0", "Ya"]
    assert chart_columns(weighted_trace) == ["W", "Y0", "Ha"]
