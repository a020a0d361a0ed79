import csv
from typing import TextIO

from .models import NU, DiscreteManifold


def dump_manifold(manifold: DiscreteManifold, stream: TextIO) -> int:
    """Строки (index, coords…, mu, nu); возвращает число строк."""
    writer = csv.writer(stream, lineterminator='\n')
    nu_weights = manifold.weights(NU)
    for index, (coords, mu, nu) in enumerate(
            zip(manifold.positions, manifold.mu_weights, nu_weights)
    ):
        writer.writerow(
            [index, *(repr(float(x)) for x in coords),
             repr(float(mu)), repr(float(nu))]
        )
    return manifold.vertex_count
