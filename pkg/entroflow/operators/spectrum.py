import itertools
import logging
from functools import reduce
from typing import List, Optional, Tuple

import numpy as np
from scipy import linalg, sparse
from scipy.sparse.linalg import ArpackNoConvergence, eigsh

from core.conf import entroflow_setting
from core.exceptions import SpectralError, UnsupportedTopologyError
from manifold.models import MU, DiscreteManifold

from .models import LaplacianOperator, SpectralData

logger = logging.getLogger(__name__)


def _symmetrized(op: LaplacianOperator) -> Tuple[sparse.csr_matrix,
                                                  np.ndarray]:
    """A = M^{-1/2} S M^{-1/2} и M^{-1/2} для обобщённой задачи S φ = λ M φ."""
    inv_sqrt = 1.0 / np.sqrt(op.weights)
    scaling = sparse.diags(inv_sqrt)
    return (scaling @ op.stiffness @ scaling).tocsr(), inv_sqrt


def _residuals(
        matrix: sparse.csr_matrix, values: np.ndarray, vectors: np.ndarray
) -> np.ndarray:
    return np.linalg.norm(matrix @ vectors - vectors * values, axis=0)


def _rayleigh_ritz(
        matrix: sparse.csr_matrix, vectors: np.ndarray
) -> Tuple[np.ndarray, np.ndarray]:
    """Переортонормировка найденного подпространства."""
    basis, _ = np.linalg.qr(vectors)
    projected = basis.T @ (matrix @ basis)
    projected = 0.5 * (projected + projected.T)
    values, rotation = np.linalg.eigh(projected)
    return values, basis @ rotation


def _fix_signs(vectors: np.ndarray) -> np.ndarray:
    """Первая заметно ненулевая компонента каждого вектора положительна."""
    magnitudes = np.abs(vectors)
    significant = magnitudes > 1e-10 * magnitudes.max(axis=0)
    first = significant.argmax(axis=0)
    signs = np.sign(vectors[first, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    return vectors * signs


def _first_nonzero(eigenvalues: np.ndarray) -> float:
    threshold = max(
        10.0 * abs(float(eigenvalues[0])),
        entroflow_setting('FIRST_NONZERO_FLOOR'),
    )
    nonzero = eigenvalues[eigenvalues > threshold]
    if not nonzero.size:
        raise SpectralError(
            f'Среди {eigenvalues.size} собственных значений нет '
            f'превышающих {threshold:.3e}'
        )
    return float(nonzero[0])


def _dense_pairs(
        matrix: sparse.csr_matrix, k: int
) -> Tuple[np.ndarray, np.ndarray]:
    size = matrix.shape[0]
    dense = matrix.toarray()
    if k >= size:
        return linalg.eigh(dense)
    return linalg.eigh(dense, subset_by_index=[0, k - 1])


def _shift_invert_pairs(
        matrix: sparse.csr_matrix, k: int, seed: int
) -> Tuple[np.ndarray, np.ndarray]:
    start = np.random.default_rng(seed).standard_normal(matrix.shape[0])
    try:
        values, vectors = eigsh(
            matrix,
            k=k,
            sigma=entroflow_setting('SPECTRAL_SHIFT'),
            which='LM',
            v0=start,
            maxiter=entroflow_setting('EIGSH_MAXITER'),
        )
    except ArpackNoConvergence as error:
        residuals = _residuals(
            matrix, error.eigenvalues, error.eigenvectors
        ) if len(error.eigenvalues) else [np.inf]
        raise SpectralError(
            f'Итерации со сдвигом и обращением не сошлись: найдено '
            f'{len(error.eigenvalues)} из {k} пар',
            residuals,
        ) from error
    return _rayleigh_ritz(matrix, vectors)


def low_spectrum(
        op: LaplacianOperator, k: int, seed: Optional[int] = None
) -> SpectralData:
    """
    k наименьших собственных пар задачи S φ = λ M φ.
    Малые многообразия решаются плотно, большие сдвигом и обращением
    с фиксированным начальным вектором.
    """
    size = op.manifold.vertex_count
    if k < 2:
        raise SpectralError(f'Нужно k >= 2, получено {k}')
    if k > size:
        raise SpectralError(
            f'Запрошено {k} собственных пар при {size} вершинах'
        )
    matrix, inv_sqrt = _symmetrized(op)
    if size <= entroflow_setting('DENSE_SPECTRUM_LIMIT'):
        logger.info('Плотный спектр: %d из %d пар', k, size)
        values, vectors = _dense_pairs(matrix, k)
    else:
        if 4 * k > size:
            raise SpectralError(
                f'Для {size} вершин допустимо k <= {size // 4}, '
                f'получено {k}'
            )
        logger.info('Спектр сдвигом и обращением: %d пар', k)
        values, vectors = _shift_invert_pairs(
            matrix, k, entroflow_setting('SEED') if seed is None else seed
        )
    order = np.argsort(values, kind='stable')
    values = values[order]
    vectors = _fix_signs(vectors[:, order])
    residuals = _residuals(matrix, values, vectors)
    logger.info('Максимальная невязка спектра %.3e', residuals.max())
    return SpectralData(
        eigenvalues=values,
        eigenfields=vectors * inv_sqrt[:, None],
        first_nonzero=_first_nonzero(values),
        measure=op.measure,
        residuals=residuals,
    )


def _axis_modes(count: int, length: float) -> List[Tuple[float, np.ndarray]]:
    """Моды cos/sin одной оси ниже частоты Найквиста."""
    coords = np.arange(count) * (length / count)
    modes = [(0.0, np.full(count, 1.0 / np.sqrt(length)))]
    for wave in range(1, (count + 1) // 2):
        frequency = 2.0 * np.pi * wave / length
        amplitude = np.sqrt(2.0 / length)
        modes.append((frequency ** 2, amplitude * np.cos(frequency * coords)))
        modes.append((frequency ** 2, amplitude * np.sin(frequency * coords)))
    return modes


def fourier_spectrum(manifold: DiscreteManifold, k: int) -> SpectralData:
    """
    Собственные пары непрерывного плоского тора на узлах сетки.
    На равномерной сетке они ортонормированы по лумпированной мере точно.
    """
    if not manifold.is_grid:
        raise UnsupportedTopologyError(
            'Спектр Фурье определён только для плоского тора'
        )
    axis_modes = [
        _axis_modes(count, length)
        for count, length in zip(manifold.resolution, manifold.side_lengths)
    ]
    combos = sorted(
        itertools.product(*(range(len(modes)) for modes in axis_modes)),
        key=lambda combo: (
            sum(axis_modes[axis][index][0]
                for axis, index in enumerate(combo)),
            combo,
        ),
    )
    if k > len(combos):
        raise SpectralError(
            f'Доступно {len(combos)} мод Фурье ниже частоты Найквиста, '
            f'запрошено {k}'
        )
    eigenvalues = []
    fields = []
    for combo in combos[:k]:
        eigenvalues.append(sum(
            axis_modes[axis][index][0] for axis, index in enumerate(combo)
        ))
        vectors = [
            axis_modes[axis][index][1] for axis, index in enumerate(combo)
        ]
        fields.append(reduce(np.multiply.outer, vectors).ravel())
    values = np.array(eigenvalues)
    return SpectralData(
        eigenvalues=values,
        eigenfields=np.column_stack(fields),
        first_nonzero=_first_nonzero(values),
        measure=MU,
    )
