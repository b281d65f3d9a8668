"""Small shared linear-algebra conventions."""

import numpy as np


def magnitude_order(values):
    """Indices sorting values by descending magnitude, positives first on ties."""
    values = np.asarray(values)
    return np.lexsort((-np.sign(values), -np.abs(values)))


def fix_eigvec_signs(vectors):
    """Flip eigenvector columns so each largest-magnitude entry is positive.

    Makes eigendecompositions deterministic across solver backends.
    Operates in place and returns the array.
    """
    for j in range(vectors.shape[1]):
        col = vectors[:, j]
        i = int(np.argmax(np.abs(col)))
        if col[i] < 0:
            vectors[:, j] = -col
    return vectors
