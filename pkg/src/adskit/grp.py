"""Elements of SO_0(q,2) and the explicit subgroup constructors.

Group elements are ``(q+2) x (q+2)`` matrices over exact rationals (``mode =
"exact"``) or floats (``mode = "float"``) preserving ``eta``.

Coordinates of the bulk and the boundary live on the abelian group generated
by the ``T_mu``::

    n_x = exp(-sum_mu x_mu T_mu),       ntilde_x = exp(sum_mu x^mu C_mu),
    a_y = exp(log(y) D),

with ``x^mu = eta_mumu x_mu``.  With these signs ``T_mu`` acts on the
boundary as ``d/dx_mu``.

Both exponentials terminate after the quadratic term.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import liealg
from ._exact import eye, frac, frac_array, inverse, is_exact, zeros

FLOAT_TOL = 1e-10


class GroupElement:
    """Immutable matrix in SO(q,2); ``g @ h`` is the group product."""

    __slots__ = ("q", "entries", "mode")

    def __init__(self, q: int, entries, mode: str | None = None, check: bool = True):
        arr = np.asarray(entries, dtype=object)
        if mode is None:
            mode = "float" if any(isinstance(v, float) for v in arr.ravel()) else "exact"
        if mode == "exact":
            arr = frac_array(arr)
        elif mode == "float":
            arr = np.array(arr, dtype=float)
        else:
            raise ValueError(f"unknown mode {mode!r}")
        if arr.shape != (q + 2, q + 2):
            raise ValueError(f"expected a {q + 2}x{q + 2} matrix")
        arr.setflags(write=False)
        self.q = q
        self.entries = arr
        self.mode = mode
        if check:
            res = is_in_group(self)
            if not res:
                raise ValueError(f"not an element of SO(q,2): {res.reason}")

    @classmethod
    def _trusted(cls, q: int, entries: np.ndarray) -> GroupElement:
        return cls(q, entries, "exact" if is_exact(entries) else "float", check=False)

    @classmethod
    def identity(cls, q: int, exact: bool = True) -> GroupElement:
        return cls._trusted(q, eye(q + 2, exact))

    @property
    def exact(self) -> bool:
        return self.mode == "exact"

    def __matmul__(self, other):
        if isinstance(other, GroupElement):
            if other.q != self.q:
                raise ValueError("dimension mismatch")
            return GroupElement._trusted(self.q, _mixed_product(self.entries, other.entries))
        return _mixed_product(self.entries, np.asarray(other))

    def inverse(self) -> GroupElement:
        """``g^-1 = eta g^T eta``, exact for elements of the group."""
        eta = _eta_diag(self.q)
        if not self.exact:
            eta = np.array(eta, dtype=float)
        inv = self.entries.T * eta[:, None] * eta[None, :]
        return GroupElement._trusted(self.q, inv)

    def to_float(self) -> GroupElement:
        return GroupElement._trusted(self.q, np.array(self.entries, dtype=float))

    def __getitem__(self, idx):
        return self.entries[idx]

    def __eq__(self, other) -> bool:
        if not isinstance(other, GroupElement):
            return NotImplemented
        return self.q == other.q and bool(np.all(self.entries == other.entries))

    def __hash__(self):
        return hash((self.q, tuple(self.entries.ravel())))

    def allclose(self, other: GroupElement, tol: float = FLOAT_TOL) -> bool:
        return bool(
            np.allclose(
                np.array(self.entries, dtype=float), np.array(other.entries, dtype=float), atol=tol
            )
        )

    def __repr__(self) -> str:
        rows = "; ".join(" ".join(str(v) for v in row) for row in self.entries)
        return f"GroupElement(q={self.q}, mode={self.mode}, [{rows}])"


def _mixed_product(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if is_exact(a) and is_exact(b):
        return a @ b
    return np.array(a, dtype=float) @ np.array(b, dtype=float)


def _eta_diag(q: int) -> np.ndarray:
    return np.array([Fraction(s) for s in liealg.metric(q).diagonal], dtype=object)


@dataclass(frozen=True)
class Membership:
    ok: bool
    reason: str = ""
    sign: int = 1

    def __bool__(self) -> bool:
        return self.ok


def _zero(v, exact: bool) -> bool:
    return v == 0 if exact else abs(v) <= FLOAT_TOL


def _all_zero(arr: np.ndarray, exact: bool) -> bool:
    if exact:
        return bool(np.all(arr == 0))
    return bool(np.all(np.abs(np.array(arr, dtype=float)) <= FLOAT_TOL))


def _preserves_eta(g: GroupElement) -> bool:
    eta = liealg.metric(g.q).matrix()
    if g.exact:
        return bool(np.all(g.entries.T @ eta @ g.entries == eta))
    e = np.array(eta, dtype=float)
    return bool(np.allclose(g.entries.T @ e @ g.entries, e, atol=FLOAT_TOL))


def is_in_group(g: GroupElement) -> Membership:
    """``g^T eta g = eta`` and ``det g = +1``."""
    if not _preserves_eta(g):
        return Membership(False, "g^T eta g != eta")
    d = _determinant(g)
    if not _zero(d - 1, g.exact):
        return Membership(False, f"determinant {d} != 1")
    return Membership(True)


def _determinant(g: GroupElement):
    if g.exact:
        from ._exact import det

        return det(g.entries)
    return float(np.linalg.det(g.entries))


def _block_check(g: GroupElement, lo: int) -> tuple[bool, str, int]:
    """Check ``g = g' (+) sigma I`` with ``g'`` acting on indices ``< lo``."""
    e = g.entries
    n = g.q + 2
    if not _all_zero(e[:lo, lo:], g.exact) or not _all_zero(e[lo:, :lo], g.exact):
        return False, f"off-diagonal blocks beyond index {lo} are non-zero", 1
    corner = e[lo:, lo:]
    first = corner[0, 0]
    if not (_zero(first - 1, g.exact) or _zero(first + 1, g.exact)):
        return False, "trailing block is not +-identity", 1
    sign = 1 if _zero(first - 1, g.exact) else -1
    ident = eye(n - lo, g.exact) * sign
    if not _all_zero(corner - ident, g.exact):
        return False, "trailing block is not +-identity", 1
    return True, "", sign


def is_in_H(g: GroupElement) -> Membership:
    """``g = h' (+) (+-1)`` with ``h'`` in SO(q,1); ``sign`` records the corner."""
    if not _preserves_eta(g):
        return Membership(False, "does not preserve eta")
    ok, reason, sign = _block_check(g, g.q + 1)
    if not ok:
        return Membership(False, reason)
    return Membership(True, "" if sign == 1 else "corner entry is -1", sign)


def is_in_M(g: GroupElement) -> Membership:
    """``g = m' (+) sigma I_2`` with ``m'`` in O(q-1,1)."""
    if not _preserves_eta(g):
        return Membership(False, "does not preserve eta")
    ok, reason, sign = _block_check(g, g.q)
    if not ok:
        return Membership(False, reason)
    return Membership(True, "" if sign == 1 else "trailing block is -I", sign)


def _u_plus(q: int) -> np.ndarray:
    v = zeros(q + 2)
    v[q] = v[q + 1] = Fraction(1)
    return v


def _u_minus(q: int) -> np.ndarray:
    v = zeros(q + 2)
    v[q] = Fraction(1)
    v[q + 1] = Fraction(-1)
    return v


def _inner(q: int, u: np.ndarray, v: np.ndarray):
    return sum(s * a * b for s, a, b in zip(liealg.metric(q).diagonal, u, v))


@dataclass(frozen=True)
class UnipotentSplit:
    """``r = m u`` with ``u`` unipotent (N or Ntilde) and ``m`` in M."""

    ok: bool
    reason: str = ""
    m: GroupElement | None = None
    u: GroupElement | None = None
    params: tuple | None = None
    sign: int = 1

    def __bool__(self) -> bool:
        return self.ok


def _split_unipotent(r: GroupElement, kind: str) -> UnipotentSplit:
    q = r.q
    make = make_n if kind == "N" else make_ntilde
    # N fixes u_-, Ntilde fixes u_+; M fixes both up to the trailing sign
    fixed, probe = (_u_minus(q), _u_plus(q)) if kind == "N" else (_u_plus(q), _u_minus(q))
    if not r.exact:
        fixed = np.array(fixed, dtype=float)
        probe = np.array(probe, dtype=float)
    w = r.inverse() @ probe
    scale = _inner(q, fixed, w) / _inner(q, fixed, probe)
    if not (_zero(scale - 1, r.exact) or _zero(scale + 1, r.exact)):
        return UnipotentSplit(False, "residual does not preserve the fixed null line")
    sign = 1 if _zero(scale - 1, r.exact) else -1
    # (u_{-c} probe)_mu is linear in c: read the slope from u_{e_mu}
    params = []
    for mu in range(q):
        unit = [0] * q
        unit[mu] = 1
        slope = -(make(unit).entries @ _u_as(probe, r.exact))[mu]
        params.append(w[mu] * sign / slope)
    if r.exact:
        params = [frac(p) for p in params]
    else:
        params = [float(p) for p in params]
    u = make(params, exact=r.exact)
    m = r @ u.inverse()
    check = is_in_M(m)
    if not check:
        return UnipotentSplit(False, f"residual / {kind} part is not in M: {check.reason}")
    return UnipotentSplit(True, check.reason, m, u, tuple(params), check.sign)


def _u_as(v: np.ndarray, exact: bool) -> np.ndarray:
    return v if exact else np.array(v, dtype=float)


def is_in_MN(r: GroupElement) -> UnipotentSplit:
    """Test ``r = m n`` and return the split."""
    return _split_unipotent(r, "N")


def is_in_MNtilde(r: GroupElement) -> UnipotentSplit:
    """Test ``r = m ntilde`` and return the split."""
    return _split_unipotent(r, "Ntilde")


# ---------------------------------------------------------------------------
# constructors


def _coerce_vec(q: int, x, exact: bool) -> list:
    x = list(x)
    if len(x) != q:
        raise ValueError(f"expected {q} parameters, got {len(x)}")
    if exact:
        return [frac(v) for v in x]
    return [float(v) for v in x]


def _nilpotent_exp(q: int, gens: list[liealg.AlgebraElement], coeffs: list, exact: bool):
    n = q + 2
    Z = zeros((n, n), exact)
    for c, gen in zip(coeffs, gens):
        if c:
            Z = Z + (gen.entries if exact else np.array(gen.entries, dtype=float)) * c
    out = eye(n, exact) + Z + (Z @ Z) / 2
    return GroupElement._trusted(q, out if exact else np.array(out, dtype=float))


def _infer_q(x) -> int:
    q = len(list(x))
    if q < 1:
        raise ValueError("need at least one coordinate")
    return q


def _is_exact_input(values) -> bool:
    return not any(isinstance(v, float) for v in values)


def make_n(x: Sequence, exact: bool | None = None) -> GroupElement:
    """``n_x = exp(-sum_mu x_mu T_mu)``."""
    x = list(x)
    q = _infer_q(x)
    exact = _is_exact_input(x) if exact is None else exact
    xs = _coerce_vec(q, x, exact)
    return _nilpotent_exp(q, [liealg.T(q, m) for m in range(q)], [-v for v in xs], exact)


def make_ntilde(x: Sequence, exact: bool | None = None) -> GroupElement:
    """``ntilde_x = exp(sum_mu x^mu C_mu)`` with ``x^mu = eta_mumu x_mu``."""
    x = list(x)
    q = _infer_q(x)
    exact = _is_exact_input(x) if exact is None else exact
    xs = _coerce_vec(q, x, exact)
    eta = liealg.metric(q).diagonal
    return _nilpotent_exp(
        q, [liealg.C(q, m) for m in range(q)], [eta[m] * v for m, v in enumerate(xs)], exact
    )


def _dilatation_block(q: int, c, s, exact: bool) -> GroupElement:
    m = eye(q + 2, exact)
    m[q, q] = m[q + 1, q + 1] = c
    m[q, q + 1] = m[q + 1, q] = s
    return GroupElement._trusted(q, m)


def make_dilatation(q: int, y) -> GroupElement:
    """``a_y = exp(log(y) D)``: trailing block ``[[c, -s], [-s, c]]``,
    ``c = (y + 1/y)/2``, ``s = (y - 1/y)/2``."""
    exact = not isinstance(y, float)
    y = frac(y) if exact else float(y)
    if y <= 0:
        raise ValueError(f"dilatation parameter must be positive, got {y}")
    c = (y + 1 / y) / 2
    s = (y - 1 / y) / 2
    return _dilatation_block(q, c, -s, exact)


def dilatation_cosh_form(q: int, y) -> GroupElement:
    """The ``[[cosh s, sinh s], [sinh s, cosh s]]`` matrix with ``y = e^s``.

    Equal to ``make_dilatation(q, 1/y)``.
    """
    exact = not isinstance(y, float)
    y = frac(y) if exact else float(y)
    if y <= 0:
        raise ValueError(f"dilatation parameter must be positive, got {y}")
    return _dilatation_block(q, (y + 1 / y) / 2, (y - 1 / y) / 2, exact)


def translation_sqrt2(x: Sequence[float]) -> GroupElement:
    """The explicit special-conformal matrix with ``(t, s) = x / sqrt(2)``.

    Floating point because of the ``sqrt(2)``.  It equals
    ``make_n(x^mu / sqrt(2))`` (raised index ``x^mu = eta_mumu x_mu``), an
    element of N rather than Ntilde.
    """
    x = [float(v) for v in x]
    q = len(x)
    t = x[0] / math.sqrt(2)
    s = np.array(x[1:]) / math.sqrt(2)
    s2 = float(s @ s)
    n = q + 2
    m = np.eye(n)
    m[0, q] = m[0, q + 1] = t
    m[1:q, q] = s
    m[1:q, q + 1] = s
    m[q, 0] = t
    m[q + 1, 0] = -t
    m[q, 1:q] = -s
    m[q + 1, 1:q] = s
    m[q, q] = 1 + t * t / 2 - s2 / 2
    m[q, q + 1] = t * t / 2 - s2 / 2
    m[q + 1, q] = s2 / 2 - t * t / 2
    m[q + 1, q + 1] = 1 + s2 / 2 - t * t / 2
    return GroupElement(q, m, "float")


def _cayley(q: int, S: liealg.AlgebraElement, size: int) -> GroupElement:
    """``(I - S)(I + S)^-1`` on the leading ``size`` indices, identity elsewhere."""
    n = q + 2
    ent = S.entries
    if not np.all(ent[size:, :] == 0) or not np.all(ent[:, size:] == 0):
        raise ValueError(f"generator must be supported on indices 0..{size - 1}")
    I = eye(n)
    return GroupElement._trusted(q, (I - ent) @ inverse(I + ent))


def make_h_cayley(S: liealg.AlgebraElement) -> GroupElement:
    """Cayley transform of an element of the H subalgebra (indices 0..q)."""
    return _cayley(S.q, S, S.q + 1)


def make_m_cayley(S: liealg.AlgebraElement) -> GroupElement:
    """Cayley transform of an element of the M subalgebra (indices 0..q-1)."""
    return _cayley(S.q, S, S.q)


def _small_rational(rng: random.Random, span: int = 3, den: int = 4) -> Fraction:
    return Fraction(rng.randint(-span * den, span * den), rng.randint(1, den))


def random_algebra_element(q: int, rng: random.Random, name: str) -> liealg.AlgebraElement:
    out = liealg.AlgebraElement.zero(q)
    for gen in liealg.subalgebra_basis(q, name):
        out = out + Fraction(rng.randint(-4, 4), rng.randint(1, 4)) * gen
    return out


def random_cayley(q: int, rng: random.Random, name: str) -> GroupElement:
    """Random Cayley element of H or M; resamples when ``I + S`` is singular."""
    make = make_h_cayley if name == "H" else make_m_cayley
    while True:
        S = random_algebra_element(q, rng, name)
        try:
            return make(S)
        except ZeroDivisionError:
            continue


def random_vector(q: int, rng: random.Random) -> list[Fraction]:
    return [_small_rational(rng) for _ in range(q)]


def random_positive(rng: random.Random) -> Fraction:
    return Fraction(rng.randint(1, 12), rng.randint(1, 6))


def random_element(q: int, seed: int, word_length: int = 3) -> GroupElement:
    """Seeded product of ``word_length`` random ``n``, ``ntilde``, ``a``, ``h`` factors.

    Words landing outside either open cell (a measure-zero event) are redrawn
    from the same generator, so the result stays deterministic in ``seed``.
    """
    if word_length < 0:
        raise ValueError("word length must be non-negative")
    rng = random.Random(seed)
    while True:
        g = GroupElement.identity(q)
        for _ in range(word_length):
            g = (
                g
                @ make_n(random_vector(q, rng))
                @ make_ntilde(random_vector(q, rng))
                @ make_dilatation(q, random_positive(rng))
                @ random_cayley(q, rng, "H")
            )
        if in_open_cells(g):
            return g


def in_open_cells(g: GroupElement) -> bool:
    """Whether ``g`` lies in both the Sekiguchi and the Bruhat cell."""
    q = g.q
    e = g.entries
    sek = e[q, q + 1] + e[q + 1, q + 1]
    bru = e[q, q] + e[q, q + 1] + e[q + 1, q] + e[q + 1, q + 1]
    return not (_zero(sek, g.exact) or _zero(bru, g.exact))


def one_parameter(X: liealg.AlgebraElement, t: float) -> GroupElement:
    """``exp(t X)`` in float mode."""
    from scipy.linalg import expm

    return GroupElement(X.q, expm(t * np.array(X.entries, dtype=float)), "float", check=False)
