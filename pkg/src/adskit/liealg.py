"""Exact matrix model of so(q,2).

The generators are ``(X_AB)_CD = EPSILON * (eta_AC delta_BD - eta_BC delta_AD)``
with ``EPSILON = -1``; that is the only sign for which the matrix commutator
reproduces the structure constants

    [X_AB, X_CD] = eta_AC X_BD + eta_BD X_AC - eta_AD X_BC - eta_BC X_AD.

Index ``q`` and ``q+1`` are the two special directions; the translation,
special conformal and dilatation generators are

    T_mu = X_{mu,q} + X_{mu,q+1},  C_mu = X_{mu,q} - X_{mu,q+1},  D = X_{q,q+1}.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import Iterator

import numpy as np

from ._exact import frac, frac_array, in_span, rank, zeros

EPSILON = -1

SUBALGEBRAS = ("K", "Q", "A", "M", "N", "Ntilde", "A0", "M0", "N0", "Ntilde0", "H")


class InvalidDimension(ValueError):
    pass


def _check_q(q: int, minimum: int = 1) -> None:
    if not isinstance(q, (int, np.integer)) or isinstance(q, bool) or q < minimum:
        raise InvalidDimension(f"q must be an integer >= {minimum}, got {q!r}")


@dataclass(frozen=True)
class MetricTensor:
    q: int
    diagonal: tuple[int, ...]

    @property
    def dim(self) -> int:
        return self.q + 2

    def matrix(self) -> np.ndarray:
        m = zeros((self.dim, self.dim))
        for i, s in enumerate(self.diagonal):
            m[i, i] = Fraction(s)
        return m

    def __getitem__(self, idx) -> int:
        a, b = idx
        return self.diagonal[a] if a == b else 0


@lru_cache(maxsize=None)
def metric(q: int) -> MetricTensor:
    _check_q(q)
    return MetricTensor(q, (-1,) + (1,) * q + (-1,))


def basis_indices(q: int) -> list[tuple[int, int]]:
    """Canonical basis labels ``(A, B)`` with ``A < B``."""
    return list(combinations(range(q + 2), 2))


@dataclass(frozen=True, eq=False)
class AlgebraElement:
    q: int
    entries: np.ndarray = field(repr=False)

    def __post_init__(self):
        ent = frac_array(self.entries)
        n = self.q + 2
        if ent.shape != (n, n):
            raise ValueError(f"expected a {n}x{n} matrix")
        eta = metric(self.q).matrix()
        if np.any(ent.T @ eta + eta @ ent != 0):
            raise ValueError("matrix does not satisfy X^T eta + eta X = 0")
        ent.setflags(write=False)
        object.__setattr__(self, "entries", ent)

    @classmethod
    def _trusted(cls, q: int, entries: np.ndarray) -> AlgebraElement:
        obj = cls.__new__(cls)
        entries.setflags(write=False)
        object.__setattr__(obj, "q", q)
        object.__setattr__(obj, "entries", entries)
        return obj

    @classmethod
    def zero(cls, q: int) -> AlgebraElement:
        return cls._trusted(q, zeros((q + 2, q + 2)))

    def _same(self, other: AlgebraElement) -> None:
        if not isinstance(other, AlgebraElement):
            raise TypeError("expected an AlgebraElement")
        if other.q != self.q:
            raise ValueError(f"dimension mismatch: q={self.q} vs q={other.q}")

    def __add__(self, other: AlgebraElement) -> AlgebraElement:
        self._same(other)
        return AlgebraElement._trusted(self.q, self.entries + other.entries)

    def __sub__(self, other: AlgebraElement) -> AlgebraElement:
        self._same(other)
        return AlgebraElement._trusted(self.q, self.entries - other.entries)

    def __neg__(self) -> AlgebraElement:
        return AlgebraElement._trusted(self.q, -self.entries)

    def __mul__(self, c) -> AlgebraElement:
        return AlgebraElement._trusted(self.q, self.entries * frac(c))

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, AlgebraElement):
            return NotImplemented
        return self.q == other.q and bool(np.all(self.entries == other.entries))

    def __hash__(self):
        return hash((self.q, tuple(self.entries.ravel())))

    def is_zero(self) -> bool:
        return bool(np.all(self.entries == 0))

    def __str__(self) -> str:
        return "\n".join(" ".join(f"{str(v):>5}" for v in row) for row in self.entries)


@lru_cache(maxsize=None)
def _generator_cached(q: int, A: int, B: int) -> AlgebraElement:
    eta = metric(q)
    n = q + 2
    m = zeros((n, n))
    for c in range(n):
        for d in range(n):
            m[c, d] = Fraction(EPSILON * (eta[A, c] * (B == d) - eta[B, c] * (A == d)))
    return AlgebraElement._trusted(q, m)


def generator(q: int, A: int, B: int | None = None) -> AlgebraElement:
    """Basis element ``X_AB``; ``generator(q, B, A) == -generator(q, A, B)``.

    ``A`` may also be passed as an ``(A, B)`` pair.
    """
    if B is None:
        A, B = A
    _check_q(q)
    n = q + 2
    if not (0 <= A < n and 0 <= B < n):
        raise IndexError(f"basis index ({A}, {B}) out of range for q={q}")
    if A == B:
        return AlgebraElement.zero(q)
    if A > B:
        return -_generator_cached(q, B, A)
    return _generator_cached(q, A, B)


def T(q: int, mu: int) -> AlgebraElement:
    _check_mu(q, mu)
    return generator(q, mu, q) + generator(q, mu, q + 1)


def C(q: int, mu: int) -> AlgebraElement:
    _check_mu(q, mu)
    return generator(q, mu, q) - generator(q, mu, q + 1)


def D(q: int) -> AlgebraElement:
    return generator(q, q, q + 1)


def _check_mu(q: int, mu: int) -> None:
    if not 0 <= mu < q:
        raise IndexError(f"Minkowski index {mu} out of range for q={q}")


def bracket(X: AlgebraElement, Y: AlgebraElement) -> AlgebraElement:
    X._same(Y)
    return AlgebraElement._trusted(X.q, X.entries @ Y.entries - Y.entries @ X.entries)


def structure_rhs(q: int, A: int, B: int, C_: int, D_: int) -> AlgebraElement:
    """Right-hand side of the so(q,2) commutation relations for basis labels."""
    eta = metric(q)
    out = AlgebraElement.zero(q)
    for coef, (i, j) in (
        (eta[A, C_], (B, D_)),
        (eta[B, D_], (A, C_)),
        (-eta[A, D_], (B, C_)),
        (-eta[B, C_], (A, D_)),
    ):
        if coef:
            out = out + coef * generator(q, i, j)
    return out


def expand_in_basis(X: AlgebraElement) -> dict[tuple[int, int], Fraction]:
    """Coordinates of ``X`` in the basis ``X_AB`` (A < B); zero entries dropped."""
    eta = metric(X.q)
    out = {}
    for A, B in basis_indices(X.q):
        # only X_AB touches entry (A, B), where it equals EPSILON * eta_AA
        c = X.entries[A, B] / Fraction(EPSILON * eta[A, A])
        if c:
            out[(A, B)] = c
    return out


def from_coordinates(q: int, coords: dict[tuple[int, int], object]) -> AlgebraElement:
    out = AlgebraElement.zero(q)
    for (A, B), c in coords.items():
        out = out + frac(c) * generator(q, A, B)
    return out


def subalgebra_basis(q: int, name: str) -> list[AlgebraElement]:
    """Generators of the named subalgebra, in catalogue order."""
    _check_q(q, 2)
    if name not in SUBALGEBRAS:
        raise ValueError(f"unknown subalgebra {name!r}; expected one of {SUBALGEBRAS}")
    g = lambda a, b: generator(q, a, b)  # noqa: E731
    last = q + 1
    if name == "K":
        return [g(a, b) for a, b in combinations(range(1, q + 1), 2)] + [g(0, last)]
    if name == "Q":
        return [g(a, 0) for a in range(1, q + 1)] + [g(a, last) for a in range(1, q + 1)]
    if name == "A":
        return [D(q)]
    if name == "M":
        return [g(a, b) for a, b in combinations(range(q), 2)]
    if name == "N":
        return [T(q, mu) for mu in range(q)]
    if name == "Ntilde":
        return [C(q, mu) for mu in range(q)]
    if name == "H":
        return [g(a, b) for a, b in combinations(range(q + 1), 2)]
    # minimal parabolic pieces
    if name == "A0":
        return [D(q), g(0, q - 1)]
    if name == "M0":
        if q < 3:
            raise InvalidDimension("M0 is trivial for q < 3")
        return [g(a, b) for a, b in combinations(range(1, q - 1), 2)]
    if name == "N0":
        return [T(q, mu) for mu in range(q)] + [
            g(a, 0) + g(a, q - 1) for a in range(1, q - 1)
        ]
    # Ntilde0
    return [C(q, mu) for mu in range(q)] + [g(a, 0) - g(a, q - 1) for a in range(1, q - 1)]


def subalgebra_dimension(q: int, name: str) -> int:
    """Expected dimension of each catalogued subalgebra."""
    dims = {
        "K": q * (q - 1) // 2 + 1,
        "Q": 2 * q,
        "A": 1,
        "M": q * (q - 1) // 2,
        "N": q,
        "Ntilde": q,
        "H": q * (q + 1) // 2,
        "A0": 2,
        "M0": (q - 2) * (q - 3) // 2,
        "N0": 2 * q - 2,
        "Ntilde0": 2 * q - 2,
    }
    return dims[name]


def span_rank(elements: list[AlgebraElement]) -> int:
    if not elements:
        return 0
    return rank(np.array([e.entries.ravel() for e in elements], dtype=object))


def in_span_of(elements: list[AlgebraElement], X: AlgebraElement) -> bool:
    return in_span([e.entries for e in elements], X.entries)


@dataclass(frozen=True)
class ClosureCheck:
    ok: bool
    failure: tuple[int, int] | None = None

    def __bool__(self) -> bool:
        return self.ok


def bracket_closed(elements: list[AlgebraElement]) -> ClosureCheck:
    """Whether every pairwise bracket lies in the span; reports the first failing pair."""
    for i, j in combinations(range(len(elements)), 2):
        if not in_span_of(elements, bracket(elements[i], elements[j])):
            return ClosureCheck(False, (i, j))
    return ClosureCheck(True)


# ---------------------------------------------------------------------------
# weights


@dataclass(frozen=True)
class FormalDelta:
    """The formal conformal weight ``scale*Delta + offset``."""

    offset: Fraction = Fraction(0)
    scale: Fraction = Fraction(1)

    def reflect(self, q: int) -> FormalDelta:
        return FormalDelta(q - self.offset, -self.scale)

    def __str__(self) -> str:
        s = "Delta" if self.scale == 1 else "-Delta" if self.scale == -1 else f"{self.scale}*Delta"
        if self.offset:
            return f"{self.offset} + {s}" if self.scale > 0 else f"{self.offset} {s.replace('-', '- ', 1)}"
        return s


DELTA = FormalDelta()


@dataclass(frozen=True)
class WeightLabel:
    q: int
    lam: tuple[Fraction, ...]
    delta: Fraction | FormalDelta = DELTA

    def __post_init__(self):
        object.__setattr__(self, "lam", tuple(frac(v) for v in self.lam))
        if not isinstance(self.delta, FormalDelta):
            object.__setattr__(self, "delta", frac(self.delta))

    @classmethod
    def scalar(cls, q: int, delta=DELTA) -> WeightLabel:
        return cls(q, (0,) * (q // 2), delta)

    @classmethod
    def symmetric_tensor(cls, q: int, ell: int, delta=DELTA) -> WeightLabel:
        if q // 2 == 0:
            raise InvalidDimension("no spin labels for q < 2")
        return cls(q, (0,) * (q // 2 - 1) + (ell,), delta)

    @property
    def is_scalar(self) -> bool:
        return all(v == 0 for v in self.lam)

    @property
    def symmetric_rank(self) -> int | None:
        """``ell`` when the label is ``(0, ..., 0, ell)`` with integer ``ell >= 0``."""
        if not self.lam or any(v != 0 for v in self.lam[:-1]):
            return None
        ell = self.lam[-1]
        return int(ell) if ell.denominator == 1 and ell >= 0 else None


@dataclass(frozen=True)
class WeightCheck:
    ok: bool
    reason: str = ""

    def __bool__(self) -> bool:
        return self.ok


def validate_weight(w: WeightLabel) -> WeightCheck:
    q = w.q
    if q < 1:
        return WeightCheck(False, f"q must be >= 1, got {q}")
    lam = w.lam
    if len(lam) != q // 2:
        return WeightCheck(False, f"lambda must have {q // 2} entries for q={q}, got {len(lam)}")
    if any((2 * v).denominator != 1 for v in lam):
        return WeightCheck(False, "entries must be integers or half-integers")
    if lam and len({v.denominator for v in lam}) > 1:
        return WeightCheck(False, "entries must be all integer or all half-integer")
    if lam:
        if q % 2 == 0:
            if abs(lam[0]) > (lam[1] if len(lam) > 1 else abs(lam[0])):
                return WeightCheck(False, "ordering |lambda_1| <= lambda_2 violated")
            rest = lam[1:]
        else:
            if lam[0] < 0:
                return WeightCheck(False, "q odd requires 0 <= lambda_1")
            rest = lam
        for i in range(len(rest) - 1):
            if rest[i] > rest[i + 1]:
                return WeightCheck(False, f"ordering violated at position {i + 1 + (q % 2 == 0)}")
    return WeightCheck(True)


def mirror_weight(w: WeightLabel) -> WeightLabel:
    """The partially equivalent label ``[lambda~, q - Delta]``."""
    check = validate_weight(w)
    if not check:
        raise ValueError(f"invalid weight: {check.reason}")
    lam = w.lam
    if w.q % 2 == 0 and lam:
        lam = (-lam[0],) + lam[1:]
    if isinstance(w.delta, FormalDelta):
        delta = w.delta.reflect(w.q)
    else:
        delta = w.q - w.delta
    return WeightLabel(w.q, lam, delta)


# ---------------------------------------------------------------------------
# Casimir


@dataclass(frozen=True)
class CasimirElement:
    q: int
    terms: tuple[tuple[Fraction, tuple[int, int], tuple[int, int]], ...]

    def __iter__(self) -> Iterator[tuple[Fraction, tuple[int, int], tuple[int, int]]]:
        return iter(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def realize(self, realize_fn, compose, add, zero):
        """Generic realization ``sum c * rho(X) rho(Y)`` for any representation."""
        out = zero
        for c, ab, cd in self.terms:
            out = add(out, c * compose(realize_fn(ab), realize_fn(cd)))
        return out


def casimir2_element(q: int) -> CasimirElement:
    """``C2 = 1/2 eta^AC eta^BD X_AB X_CD`` collected on ordered basis labels.

    With a diagonal metric only ``C = A, D = B`` (and the swapped pair) survive,
    giving ``sum_{A<B} eta_AA eta_BB X_AB^2``.
    """
    _check_q(q, 2)
    eta = metric(q)
    return CasimirElement(
        q,
        tuple(
            (Fraction(eta[A, A] * eta[B, B]), (A, B), (A, B)) for A, B in basis_indices(q)
        ),
    )


def matrix_casimir(q: int) -> np.ndarray:
    """The Casimir in the defining representation."""
    n = q + 2
    out = zeros((n, n))
    for c, ab, cd in casimir2_element(q):
        out = out + c * (generator(q, *ab).entries @ generator(q, *cd).entries)
    return out
