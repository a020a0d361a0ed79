import csv
from typing import TextIO

from .models import HeatState


def dump_state(state: HeatState, stream: TextIO) -> int:
    """Снимок ũ по вершинам: строки (index, u_tilde)."""
    writer = csv.writer(stream, lineterminator='\n')
    for index, value in enumerate(state.values):
        writer.writerow([index, repr(float(value))])
    return state.manifold.vertex_count
