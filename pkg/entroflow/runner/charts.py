from typing import Any, Dict, List, Sequence, Tuple

import numpy as np
from django.template.loader import render_to_string

from core.conf import entroflow_setting
from diagnostics.models import EntropyTrace

CHART_TEMPLATE = 'runner/chart.svg'
MARGINS = {'left': 90, 'right': 30, 'top': 30, 'bottom': 60}
TICK_COUNT = 5
TICK_LENGTH = 6
ENTROPY_COLUMNS = ('W', 'Y0', 'Ya', 'Ha')


def _value_range(values: np.ndarray) -> Tuple[float, float]:
    """Диапазон оси; постоянный столбец расширяется симметрично."""
    low, high = float(values.min()), float(values.max())
    if high > low:
        return low, high
    pad = max(abs(low) * 1e-3, 1e-12)
    return low - pad, high + pad


def _ticks(low: float, high: float, start: float, stop: float
           ) -> List[Tuple[float, str]]:
    """Равномерные деления: (координата на холсте, подпись)."""
    ticks = []
    for index in range(TICK_COUNT):
        share = index / (TICK_COUNT - 1)
        ticks.append((start + share * (stop - start),
                      f'{low + share * (high - low):.4g}'))
    return ticks


def chart_context(
        times: Sequence[float], values: Sequence[float], column: str,
        title: str = '',
) -> Dict[str, Any]:
    """Координаты ломаной и подписи осей для шаблона."""
    width, height = entroflow_setting('CHART_SIZE')
    left = MARGINS['left']
    right = width - MARGINS['right']
    top = MARGINS['top']
    bottom = height - MARGINS['bottom']
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    finite = np.isfinite(times) & np.isfinite(values)
    times, values = times[finite], values[finite]
    if not times.size:
        times = values = np.zeros(1)

    t_low, t_high = _value_range(times)
    y_low, y_high = _value_range(values)
    xs = left + (times - t_low) / (t_high - t_low) * (right - left)
    ys = top + (y_high - values) / (y_high - y_low) * (bottom - top)
    points = ' '.join(f'{x:.2f},{y:.2f}' for x, y in zip(xs, ys))
    return {
        'width': width,
        'height': height,
        'left': left,
        'right': right,
        'top': top,
        'bottom': bottom,
        'column': column,
        'title': title or column,
        'points': points,
        'y_min': repr(y_low),
        'y_max': repr(y_high),
        'x_label': 't',
        'x_label_x': (left + right) / 2,
        'x_label_y': height - 15,
        'y_label_x': 25,
        'y_label_y': (top + bottom) / 2,
        'x_ticks': [
            {'position': f'{position:.2f}', 'label': label,
             'end': bottom + TICK_LENGTH, 'label_at': bottom + 22}
            for position, label in _ticks(t_low, t_high, left, right)
        ],
        'y_ticks': [
            {'position': f'{position:.2f}', 'label': label,
             'end': left - TICK_LENGTH, 'label_at': left - 10}
            for position, label in _ticks(y_low, y_high, bottom, top)
        ],
    }


def render_chart(trace: EntropyTrace, column: str) -> str:
    """SVG-график столбца трассы по времени."""
    scenario = trace.metadata.get('scenario')
    title = f'{scenario}: {column}(t)' if scenario else f'{column}(t)'
    return render_to_string(
        CHART_TEMPLATE,
        chart_context(trace.times, trace.column(column), column, title),
    )


def chart_columns(trace: EntropyTrace) -> List[str]:
    """Столбцы энтропий, для которых строятся графики."""
    return [name for name in ENTROPY_COLUMNS if trace.has(name)]

