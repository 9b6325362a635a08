"""Small exact linear-algebra kernel over ``fractions.Fraction``.

Matrices are numpy object arrays so that ``@`` keeps working; floats pass
through unchanged, which lets the same helpers serve the sampling mode.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational

import numpy as np


def frac(value) -> Fraction:
    """Coerce ints, Fractions and ``"p/q"`` strings to a Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, np.integer)):
        return Fraction(int(value))
    if isinstance(value, Rational):
        return Fraction(value.numerator, value.denominator)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot convert {value!r} to an exact rational")


def frac_array(rows) -> np.ndarray:
    arr = np.array(rows, dtype=object)
    out = np.empty(arr.shape, dtype=object)
    for idx, v in np.ndenumerate(arr):
        out[idx] = frac(v)
    return out


def eye(n: int, exact: bool = True) -> np.ndarray:
    if not exact:
        return np.eye(n)
    out = np.empty((n, n), dtype=object)
    out[...] = Fraction(0)
    for i in range(n):
        out[i, i] = Fraction(1)
    return out


def zeros(shape, exact: bool = True) -> np.ndarray:
    if not exact:
        return np.zeros(shape)
    out = np.empty(shape, dtype=object)
    out[...] = Fraction(0)
    return out


def is_exact(arr: np.ndarray) -> bool:
    return arr.dtype == object


def _row_reduce(mat: np.ndarray) -> tuple[np.ndarray, list[int]]:
    m = mat.copy()
    rows, cols = m.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        pivot = next((i for i in range(r, rows) if m[i, c] != 0), None)
        if pivot is None:
            continue
        if pivot != r:
            m[[r, pivot]] = m[[pivot, r]]
        m[r] = m[r] / m[r, c]
        for i in range(rows):
            if i != r and m[i, c] != 0:
                m[i] = m[i] - m[i, c] * m[r]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return m, pivots


def rank(mat: np.ndarray) -> int:
    if mat.size == 0:
        return 0
    return len(_row_reduce(frac_array(mat))[1])


def inverse(mat: np.ndarray) -> np.ndarray:
    """Exact inverse by Gauss-Jordan; raises ZeroDivisionError if singular."""
    n = mat.shape[0]
    aug = np.concatenate([frac_array(mat), eye(n)], axis=1)
    red, pivots = _row_reduce(aug)
    if pivots[:n] != list(range(n)):
        raise ZeroDivisionError("matrix is singular")
    return red[:, n:]


def det(mat: np.ndarray) -> Fraction:
    m = frac_array(mat)
    n = m.shape[0]
    sign = Fraction(1)
    result = Fraction(1)
    for c in range(n):
        pivot = next((i for i in range(c, n) if m[i, c] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != c:
            m[[c, pivot]] = m[[pivot, c]]
            sign = -sign
        result *= m[c, c]
        for i in range(c + 1, n):
            if m[i, c] != 0:
                m[i] = m[i] - (m[i, c] / m[c, c]) * m[c]
    return sign * result


def in_span(vectors: list[np.ndarray], target: np.ndarray) -> bool:
    """Exact span membership of ``target`` in the span of ``vectors``."""
    if not vectors:
        return all(v == 0 for v in np.ravel(target))
    base = np.array([np.ravel(v) for v in vectors], dtype=object)
    ext = np.vstack([base, np.ravel(target)[None, :]])
    return rank(base) == rank(ext)


def fmt(value) -> str:
    """Render a rational as ``"p/q"`` (``"p"`` for integers)."""
    if isinstance(value, Fraction):
        return str(value)
    return repr(value)
