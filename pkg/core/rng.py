# smmimo_sim/core/rng.py
"""
Counter-based random streams.

Every stream is a numpy Philox generator keyed by (seed, stream tag);
the 256-bit counter carries the entity indices (row, trial, UT, epoch)
in its upper words, so a draw depends only on its key and indices and
never on generation order or thread count.
"""

from enum import IntEnum

import numpy as np

_TWO_POW_64 = 1 << 64
_INV_TWO_POW_53 = 1.0 / (1 << 53)


class Stream(IntEnum):
    """Stream tags; one per independent random quantity."""
    CHANNEL = 1
    PN_LAYOUT = 2
    ANTENNA_LAYOUT = 3
    UT_LAYOUT = 4
    RANGE_NOISE = 5
    TRAFFIC = 6


def _key(seed: int, tag: int) -> int:
    return (int(tag) << 64) | (int(seed) & (_TWO_POW_64 - 1))


def _counter(*indices: int) -> int:
    # word 0 is the block counter inside the stream; indices fill words 1..3
    counter = 0
    for position, index in enumerate(indices[:3], start=1):
        counter |= int(index) << (64 * position)
    return counter


def bit_generator(seed: int, tag: int, *indices: int) -> np.random.Philox:
    """Philox bit generator for (seed, tag) positioned at the given indices."""
    return np.random.Philox(key=_key(seed, tag), counter=_counter(*indices))


def stream(seed: int, tag: int, *indices: int) -> np.random.Generator:
    """
    numpy Generator on a counter-based stream.

    Example:
        >>> a = stream(7, Stream.UT_LAYOUT).uniform(size=3)
        >>> b = stream(7, Stream.UT_LAYOUT).uniform(size=3)
        >>> bool((a == b).all())
        True
    """
    return np.random.Generator(bit_generator(seed, tag, *indices))


def complex_gaussian_row(seed: int, tag: int, row: int, trial_index: int, cols: int) -> np.ndarray:
    """
    One row of circularly-symmetric complex Gaussian entries, unit variance.

    Entry k consumes raw words 2k and 2k+1 of the row stream, so it is
    independent of the row length. Box-Muller form: |h|^2 = -ln(u1) is
    exactly Exp(1).
    """
    raw = bit_generator(seed, tag, row, trial_index).random_raw(2 * cols)
    u1 = ((raw[0::2] >> np.uint64(11)).astype(np.float64) + 1.0) * _INV_TWO_POW_53
    u2 = (raw[1::2] >> np.uint64(11)).astype(np.float64) * _INV_TWO_POW_53
    return np.sqrt(-np.log(u1)) * np.exp(2j * np.pi * u2)


def complex_gaussian_matrix(seed: int, trial_index: int, rows: int, cols: int,
                            tag: int = Stream.CHANNEL) -> np.ndarray:
    """rows x cols matrix whose entry (m, k) depends only on (seed, trial_index, m, k)."""
    matrix = np.empty((rows, cols), dtype=np.complex128)
    for m in range(rows):
        matrix[m] = complex_gaussian_row(seed, tag, m, trial_index, cols)
    return matrix
