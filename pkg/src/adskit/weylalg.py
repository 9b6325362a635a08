"""Polynomial-coefficient differential operators.

The variable set for rank parameter ``q`` is ``x0..x{q-1}, y, z0..z{q-1}``
(``z`` are the cone coordinates) followed by the formal conformal weight
``Delta``, which may appear in coefficients but is never differentiated.

Operators are kept in normal order (coefficients to the left of
derivatives), so equality of operators is equality of their term maps.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import comb
from numbers import Rational
from typing import Mapping

from ._exact import frac

Exps = tuple[int, ...]


@dataclass(frozen=True)
class Space:
    """Variable layout for a given ``q``."""

    q: int

    @property
    def nvars(self) -> int:
        return 2 * self.q + 2

    @property
    def ndiff(self) -> int:
        return 2 * self.q + 1

    def xi(self, mu: int) -> int:
        if not 0 <= mu < self.q:
            raise IndexError(mu)
        return mu

    @property
    def yi(self) -> int:
        return self.q

    def zi(self, mu: int) -> int:
        if not 0 <= mu < self.q:
            raise IndexError(mu)
        return self.q + 1 + mu

    @property
    def deltai(self) -> int:
        return 2 * self.q + 1

    @cached_property
    def names(self) -> tuple[str, ...]:
        return (
            tuple(f"x{m}" for m in range(self.q))
            + ("y",)
            + tuple(f"z{m}" for m in range(self.q))
            + ("Delta",)
        )

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise KeyError(f"unknown variable {name!r} for q={self.q}") from None

    # Poly shortcuts
    def var(self, i: int) -> Poly:
        e = [0] * self.nvars
        e[i] = 1
        return Poly(self, {tuple(e): Fraction(1)})

    def x(self, mu: int) -> Poly:
        return self.var(self.xi(mu))

    @property
    def y(self) -> Poly:
        return self.var(self.yi)

    def z(self, mu: int) -> Poly:
        return self.var(self.zi(mu))

    @property
    def delta(self) -> Poly:
        return self.var(self.deltai)

    def const(self, c) -> Poly:
        return Poly.constant(self, c)

    def zero_exps(self) -> Exps:
        return (0,) * self.nvars


def _add_exps(a: Exps, b: Exps) -> Exps:
    return tuple(i + j for i, j in zip(a, b))


class Poly:
    """Sparse multivariate polynomial with Fraction coefficients."""

    __slots__ = ("space", "terms")

    def __init__(self, space: Space, terms: Mapping[Exps, Fraction] | None = None):
        self.space = space
        self.terms: dict[Exps, Fraction] = {}
        if terms:
            for e, c in terms.items():
                if len(e) != space.nvars:
                    raise ValueError("exponent length does not match the variable space")
                c = frac(c)
                if c:
                    self.terms[tuple(e)] = c

    @classmethod
    def constant(cls, space: Space, c) -> Poly:
        return cls(space, {space.zero_exps(): frac(c)})

    @classmethod
    def _raw(cls, space: Space, terms: dict[Exps, Fraction]) -> Poly:
        p = cls.__new__(cls)
        p.space = space
        p.terms = {e: c for e, c in terms.items() if c}
        return p

    def _coerce(self, other) -> Poly:
        if isinstance(other, Poly):
            if other.space != self.space:
                raise ValueError("polynomials live in different variable spaces")
            return other
        if not isinstance(other, (Rational, str)):
            raise TypeError(f"cannot combine a polynomial with {type(other).__name__}")
        return Poly.constant(self.space, other)

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other) -> bool:
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __add__(self, other) -> Poly:
        if not isinstance(other, (Poly, Rational, str)):
            return NotImplemented
        other = self._coerce(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, 0) + c
        return Poly._raw(self.space, out)

    __radd__ = __add__

    def __neg__(self) -> Poly:
        return Poly._raw(self.space, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other) -> Poly:
        if not isinstance(other, (Poly, Rational, str)):
            return NotImplemented
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> Poly:
        return self._coerce(other) - self

    def __mul__(self, other) -> Poly:
        if not isinstance(other, Poly):
            if not isinstance(other, (Rational, str)):
                return NotImplemented
            c = frac(other)
            return Poly._raw(self.space, {e: v * c for e, v in self.terms.items()})
        other = self._coerce(other)
        out: dict[Exps, Fraction] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = _add_exps(e1, e2)
                out[e] = out.get(e, 0) + c1 * c2
        return Poly._raw(self.space, out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> Poly:
        if k < 0:
            raise ValueError("negative powers are not polynomials")
        result = Poly.constant(self.space, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def diff(self, i: int, k: int = 1) -> Poly:
        out: dict[Exps, Fraction] = {}
        for e, c in self.terms.items():
            if e[i] < k:
                continue
            fall = 1
            for j in range(k):
                fall *= e[i] - j
            ne = e[:i] + (e[i] - k,) + e[i + 1 :]
            out[ne] = out.get(ne, 0) + c * fall
        return Poly._raw(self.space, out)

    def degree(self, i: int) -> int:
        return max((e[i] for e in self.terms), default=-1)

    def min_degree(self, i: int) -> int:
        return min((e[i] for e in self.terms), default=-1)

    def coefficient(self, i: int, k: int) -> Poly:
        """Coefficient of ``var_i**k`` (as a polynomial free of ``var_i``)."""
        out = {}
        for e, c in self.terms.items():
            if e[i] == k:
                out[e[:i] + (0,) + e[i + 1 :]] = c
        return Poly._raw(self.space, out)

    def divide_by_var(self, i: int, k: int = 1) -> Poly:
        """Exact division by ``var_i**k``; raises ValueError if not divisible."""
        out = {}
        for e, c in self.terms.items():
            if e[i] < k:
                raise ValueError(f"{self} is not divisible by {self.space.names[i]}^{k}")
            out[e[:i] + (e[i] - k,) + e[i + 1 :]] = c
        return Poly._raw(self.space, out)

    def substitute(self, i: int, value) -> Poly:
        """Replace variable ``i`` by a polynomial (or number)."""
        value = self._coerce(value)
        powers = {0: Poly.constant(self.space, 1)}
        out = Poly(self.space)
        for e, c in self.terms.items():
            k = e[i]
            if k not in powers:
                powers[k] = value ** k
            rest = Poly._raw(self.space, {e[:i] + (0,) + e[i + 1 :]: c})
            out = out + rest * powers[k]
        return out

    def evaluate(self, point: Mapping[int, object]):
        """Evaluate at ``{var_index: value}``; unspecified variables must not occur."""
        total = 0
        for e, c in self.terms.items():
            term = c
            for i, k in enumerate(e):
                if k:
                    if i not in point:
                        raise KeyError(f"no value for {self.space.names[i]}")
                    term = term * point[i] ** k
            total = total + term
        return total

    def variables(self) -> set[int]:
        return {i for e in self.terms for i, k in enumerate(e) if k}

    def __call__(self, **values):
        return self.evaluate({self.space.index(k): v for k, v in values.items()})

    def _monomial(self, e: Exps) -> str:
        parts = []
        for name, k in zip(self.space.names, e):
            if k == 1:
                parts.append(name)
            elif k > 1:
                parts.append(f"{name}^{k}")
        return "*".join(parts)

    def sorted_terms(self) -> list[tuple[Exps, Fraction]]:
        # total degree descending, then lexicographic on exponents
        return sorted(self.terms.items(), key=lambda t: (-sum(t[0]), tuple(-k for k in t[0])))

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        out = []
        for e, c in self.sorted_terms():
            mono = self._monomial(e)
            if not mono:
                body = str(abs(c))
            elif abs(c) == 1:
                body = mono
            else:
                body = f"{abs(c)}*{mono}"
            sign = "-" if c < 0 else "+"
            out.append((sign, body))
        first_sign, first = out[0]
        s = ("-" if first_sign == "-" else "") + first
        for sign, body in out[1:]:
            s += f" {sign} {body}"
        return s

    def __repr__(self) -> str:
        return f"Poly({self})"


class DiffOp:
    """Normal-ordered operator ``sum_alpha p_alpha(x, y, z, Delta) d^alpha``."""

    __slots__ = ("space", "terms")

    def __init__(self, space: Space, terms: Mapping[Exps, Poly] | None = None):
        self.space = space
        self.terms: dict[Exps, Poly] = {}
        if terms:
            for a, p in terms.items():
                if len(a) != space.ndiff:
                    raise ValueError("derivative multi-index has wrong length")
                if not isinstance(p, Poly):
                    p = Poly.constant(space, p)
                if p:
                    self.terms[tuple(a)] = p

    @classmethod
    def _raw(cls, space: Space, terms: dict[Exps, Poly]) -> DiffOp:
        op = cls.__new__(cls)
        op.space = space
        op.terms = {a: p for a, p in terms.items() if p}
        return op

    @classmethod
    def identity(cls, space: Space) -> DiffOp:
        return cls.multiplication(Poly.constant(space, 1))

    @classmethod
    def zero(cls, space: Space) -> DiffOp:
        return cls(space)

    @classmethod
    def multiplication(cls, p: Poly) -> DiffOp:
        return cls._raw(p.space, {(0,) * p.space.ndiff: p})

    @classmethod
    def partial(cls, space: Space, i: int, k: int = 1) -> DiffOp:
        if not 0 <= i < space.ndiff:
            raise IndexError(f"variable {i} cannot be differentiated")
        a = [0] * space.ndiff
        a[i] = k
        return cls._raw(space, {tuple(a): Poly.constant(space, 1)})

    def _coerce(self, other) -> DiffOp:
        if isinstance(other, DiffOp):
            if other.space != self.space:
                raise ValueError("operators live in different variable spaces")
            return other
        if isinstance(other, Poly):
            return DiffOp.multiplication(other)
        return DiffOp.multiplication(Poly.constant(self.space, other))

    def __eq__(self, other) -> bool:
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other) -> DiffOp:
        other = self._coerce(other)
        out = dict(self.terms)
        for a, p in other.terms.items():
            out[a] = out[a] + p if a in out else p
        return DiffOp._raw(self.space, out)

    __radd__ = __add__

    def __neg__(self) -> DiffOp:
        return DiffOp._raw(self.space, {a: -p for a, p in self.terms.items()})

    def __sub__(self, other) -> DiffOp:
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> DiffOp:
        return self._coerce(other) - self

    def __mul__(self, c) -> DiffOp:
        """Left multiplication by a scalar or polynomial."""
        if isinstance(c, DiffOp):
            raise TypeError("use @ to compose operators")
        return DiffOp._raw(self.space, {a: c * p for a, p in self.terms.items()})

    __rmul__ = __mul__

    def __matmul__(self, other) -> DiffOp:
        return op_compose(self, self._coerce(other))

    def apply(self, f: Poly) -> Poly:
        return apply_to_poly(self, f)

    def order(self) -> int:
        return max((sum(a) for a in self.terms), default=-1)

    def derivative_part(self) -> DiffOp:
        zero = (0,) * self.space.ndiff
        return DiffOp._raw(self.space, {a: p for a, p in self.terms.items() if a != zero})

    def constant_part(self) -> Poly:
        return self.terms.get((0,) * self.space.ndiff, Poly(self.space))

    def map_coefficients(self, fn) -> DiffOp:
        return DiffOp._raw(self.space, {a: fn(p) for a, p in self.terms.items()})

    def _deriv_str(self, a: Exps) -> str:
        parts = []
        for name, k in zip(self.space.names, a):
            if k == 1:
                parts.append(f"d_{name}")
            elif k > 1:
                parts.append(f"d_{name}^{k}")
        return "*".join(parts)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        keys = sorted(self.terms, key=lambda a: (-sum(a), tuple(-k for k in a)))
        chunks = []
        for a in keys:
            d = self._deriv_str(a)
            coef = str(self.terms[a])
            if not d:
                chunks.append(f"({coef})")
            elif coef == "1":
                chunks.append(d)
            else:
                chunks.append(f"({coef})*{d}")
        return " + ".join(chunks)

    def __repr__(self) -> str:
        return f"DiffOp({self})"


# ---------------------------------------------------------------------------
# module-level operations


def poly_add(f: Poly, g: Poly) -> Poly:
    return f + g


def poly_mul(f: Poly, g: Poly) -> Poly:
    return f * g


def poly_scale(f: Poly, c) -> Poly:
    return f * frac(c)


def substitute(f: Poly, var: int, value) -> Poly:
    return f.substitute(var, value)


def evaluate(f: Poly, point: Mapping[int, object]):
    return f.evaluate(point)


def apply_to_poly(op: DiffOp, f: Poly) -> Poly:
    out = Poly(op.space)
    for a, p in op.terms.items():
        g = f
        for i, k in enumerate(a):
            if k:
                g = g.diff(i, k)
                if not g:
                    break
        if g:
            out = out + p * g
    return out


def _multi_binomials(a: Exps):
    """Yield (gamma, prod_i C(a_i, gamma_i)) for all gamma <= a."""
    items = [(0,)] * 0
    result = [((), 1)]
    for k in a:
        result = [(g + (j,), c * comb(k, j)) for g, c in result for j in range(k + 1)]
    del items
    return result


def op_compose(P: DiffOp, Q: DiffOp) -> DiffOp:
    """Normal-ordered product via the Leibniz rule."""
    if P.space != Q.space:
        raise ValueError("operators live in different variable spaces")
    out: dict[Exps, Poly] = {}
    for a, p in P.terms.items():
        splits = _multi_binomials(a)
        for b, qc in Q.terms.items():
            for gamma, c in splits:
                dq = qc
                for i, k in enumerate(gamma):
                    if k:
                        dq = dq.diff(i, k)
                        if not dq:
                            break
                if not dq:
                    continue
                rest = tuple(ai - gi + bi for ai, gi, bi in zip(a, gamma, b))
                term = p * dq * c
                out[rest] = out[rest] + term if rest in out else term
    return DiffOp._raw(P.space, out)


def op_commutator(P: DiffOp, Q: DiffOp) -> DiffOp:
    return op_compose(P, Q) - op_compose(Q, P)


# ---------------------------------------------------------------------------
# cone ideal z0^2 - z1^2 - ... - z_{q-1}^2


def _cone_square(space: Space) -> Poly:
    out = Poly(space)
    for a in range(1, space.q):
        out = out + space.z(a) * space.z(a)
    return out


def cone_form(space: Space) -> Poly:
    """The quadratic form ``z^2 = z0^2 - z1^2 - ... - z_{q-1}^2``."""
    return space.z(0) * space.z(0) - _cone_square(space)


def reduce_mod_cone(f: Poly) -> Poly:
    """Normal form modulo ``z^2``: every ``z0^2`` is rewritten to ``sum_a z_a^2``."""
    space = f.space
    i0 = space.zi(0)
    if f.degree(i0) < 2:
        return f
    s = _cone_square(space)
    powers = {0: Poly.constant(space, 1)}
    out = Poly(space)
    for e, c in f.terms.items():
        k = e[i0]
        half, odd = divmod(k, 2)
        if half not in powers:
            powers[half] = s ** half
        base = Poly._raw(space, {e[:i0] + (odd,) + e[i0 + 1 :]: c})
        out = out + base * powers[half]
    return out


def reduce_op_mod_cone(op: DiffOp) -> DiffOp:
    """Reduce every coefficient of ``op`` modulo the cone ideal."""
    return op.map_coefficients(reduce_mod_cone)
