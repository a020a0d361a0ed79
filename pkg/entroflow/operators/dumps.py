import csv
from typing import TextIO

from .models import LaplacianOperator, SpectralData


def dump_operator(op: LaplacianOperator, stream: TextIO) -> int:
    """Тройки (row, col, value) матрицы жёсткости."""
    writer = csv.writer(stream, lineterminator='\n')
    triplets = op.stiffness.tocoo()
    for row, col, value in zip(triplets.row, triplets.col, triplets.data):
        writer.writerow([int(row), int(col), repr(float(value))])
    return int(triplets.nnz)


def dump_spectrum(spectrum: SpectralData, stream: TextIO) -> int:
    """Строки (index, eigenvalue)."""
    writer = csv.writer(stream, lineterminator='\n')
    for index, value in enumerate(spectrum.eigenvalues):
        writer.writerow([index, repr(float(value))])
    return spectrum.size
