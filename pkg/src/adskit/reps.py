"""Boundary and bulk realizations of so(q,2) by differential operators.

Generators are built from the dictionary

    T_mu = d_mu
    D    = -sum x_mu d_mu - Delta                (bulk: -sum x_mu d_mu - y d_y)
    X_0a = x_0 d_a + x_a d_0 + sigma_0a
    X_ab = -x_a d_b + x_b d_a + sigma_ab
    C_mu = -2 eta_mumu x_mu D + x^2 d_mu - 2 sum_nu x^nu sigma_munu
                                             (bulk: + s*y^2 d_mu - 2 y Gamma_mu)

and every other basis element follows by linearity from
``X_{mu,q} = (T_mu + C_mu)/2``, ``X_{mu,q+1} = (T_mu - C_mu)/2``,
``X_{q,q+1} = D``.  ``s`` is ``radial_sign``: ``-1`` is the form generated by
the finite bulk action, ``+1`` the alternative with ``x^2 + y^2``.

Spin parts: ``scalar`` (sigma = 0), ``cone`` (sigma acting on the null vector
``z``) and ``matrix`` (built from user Gammas).

``convention="literal"`` keeps the spin terms exactly as in the dictionary
above, with ``sigma = [Gamma_mu, Gamma_nu]/4`` and ``-2 y Gamma_mu``.  Those
terms do not close under brackets.  The default ``"consistent"`` form uses
``-2 sum_nu x_nu sigma_munu`` (lower index), ``sigma = -[Gamma_mu, Gamma_nu]/4``
and ``-y Gamma_mu``.  That form closes for the cone backend, and for the matrix
backend with ``radial_sign=+1``.  Scalar realizations are the same in both.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import product
from typing import Callable, Sequence

import numpy as np

from . import liealg
from ._exact import frac, frac_array
from .decomp import BulkPoint, NotInCell, act_on_bulk, bruhat_factorize, point
from .grp import GroupElement, make_n, one_parameter
from .liealg import FormalDelta, WeightLabel, validate_weight
from .weylalg import DiffOp, Poly, Space, apply_to_poly, op_compose, reduce_mod_cone

BACKENDS = ("scalar", "cone", "matrix")
CONVENTIONS = ("consistent", "literal")

# sign relating d/dt of the finite actions along exp(tX) to the realized X
ACTION_SIGN = 1


class RealizationError(ValueError):
    pass


class GammaCompatibilityError(RealizationError):
    def __init__(self, message: str, indices: tuple):
        super().__init__(message)
        self.indices = indices


def falling_factorial(p: Poly, k: int) -> Poly:
    """``p (p - 1) ... (p - k + 1)``."""
    out = Poly.constant(p.space, 1)
    for j in range(k):
        out = out * (p - j)
    return out


def delta_poly(space: Space, delta) -> Poly:
    if isinstance(delta, FormalDelta):
        return space.delta * delta.scale + delta.offset
    return space.const(delta)


# ---------------------------------------------------------------------------
# matrix-valued operators


class MatrixOp:
    """Square matrix of DiffOps acting on vector-valued polynomials."""

    __slots__ = ("space", "rows")

    def __init__(self, space: Space, rows):
        self.space = space
        self.rows = tuple(tuple(r) for r in rows)

    @property
    def dim(self) -> int:
        return len(self.rows)

    @classmethod
    def scalar(cls, op: DiffOp, dim: int) -> MatrixOp:
        z = DiffOp.zero(op.space)
        return cls(op.space, [[op if i == j else z for j in range(dim)] for i in range(dim)])

    @classmethod
    def constant(cls, space: Space, mat: np.ndarray) -> MatrixOp:
        return cls(
            space,
            [[DiffOp.multiplication(space.const(v)) for v in row] for row in frac_array(mat)],
        )

    def __add__(self, other: MatrixOp) -> MatrixOp:
        return MatrixOp(
            self.space, [[a + b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)]
        )

    def __neg__(self) -> MatrixOp:
        return MatrixOp(self.space, [[-a for a in r] for r in self.rows])

    def __sub__(self, other: MatrixOp) -> MatrixOp:
        return self + (-other)

    def __mul__(self, c) -> MatrixOp:
        return MatrixOp(self.space, [[c * a for a in r] for r in self.rows])

    __rmul__ = __mul__

    def __matmul__(self, other: MatrixOp) -> MatrixOp:
        n = self.dim
        out = []
        for i in range(n):
            row = []
            for j in range(n):
                acc = DiffOp.zero(self.space)
                for k in range(n):
                    if self.rows[i][k].terms and other.rows[k][j].terms:
                        acc = acc + op_compose(self.rows[i][k], other.rows[k][j])
                row.append(acc)
            out.append(row)
        return MatrixOp(self.space, out)

    def __eq__(self, other) -> bool:
        if not isinstance(other, MatrixOp):
            return NotImplemented
        return self.rows == other.rows

    def __hash__(self):
        return hash(self.rows)

    def is_zero(self) -> bool:
        return all(a.is_zero() for r in self.rows for a in r)

    def map_entries(self, fn) -> MatrixOp:
        return MatrixOp(self.space, [[fn(a) for a in r] for r in self.rows])

    def apply(self, fs: Sequence[Poly]) -> list[Poly]:
        return [
            sum((apply_to_poly(a, f) for a, f in zip(r, fs)), Poly(self.space)) for r in self.rows
        ]

    def __str__(self) -> str:
        return "\n".join(f"[{i},{j}] {a}" for i, r in enumerate(self.rows) for j, a in enumerate(r) if a.terms)


def _compose(P, Q):
    if isinstance(P, MatrixOp):
        return P @ Q
    return op_compose(P, Q)


def commutator(P, Q):
    return _compose(P, Q) - _compose(Q, P)


def _is_zero(op) -> bool:
    return op.is_zero()


# ---------------------------------------------------------------------------
# Gamma matrices


@dataclass(frozen=True)
class GammaCheck:
    ok: bool
    reason: str = ""
    indices: tuple = ()

    def __bool__(self) -> bool:
        return self.ok


def sigma_from_gamma(gammas: Sequence[np.ndarray]) -> dict[tuple[int, int], np.ndarray]:
    g = [frac_array(m) for m in gammas]
    q = len(g)
    return {(m, n): (g[m] @ g[n] - g[n] @ g[m]) / 4 for m in range(q) for n in range(q)}


def validate_gammas(q: int, gammas: Sequence[np.ndarray]) -> GammaCheck:
    """Check ``[sigma_munu, Gamma_rho] = eta_nurho Gamma_mu - eta_murho Gamma_nu``."""
    if len(gammas) != q:
        return GammaCheck(False, f"expected {q} Gamma matrices, got {len(gammas)}")
    g = [frac_array(m) for m in gammas]
    dim = g[0].shape
    if len(dim) != 2 or dim[0] != dim[1] or any(m.shape != dim for m in g):
        return GammaCheck(False, "Gamma matrices must be square and of equal size")
    eta = liealg.metric(q)
    sig = sigma_from_gamma(g)
    for m, n, r in product(range(q), repeat=3):
        lhs = sig[m, n] @ g[r] - g[r] @ sig[m, n]
        rhs = eta[n, r] * g[m] - eta[m, r] * g[n]
        if np.any(lhs != rhs):
            return GammaCheck(False, f"[sigma_{m}{n}, Gamma_{r}] relation fails", (m, n, r))
    return GammaCheck(True)


def clifford_gammas(q: int) -> list[np.ndarray]:
    """Real matrices with ``{Gamma_mu, Gamma_nu} = 2 eta_munu`` for q = 2, 3, 4."""
    e = np.array([[0, -1], [1, 0]], dtype=object)
    z = np.array([[1, 0], [0, -1]], dtype=object)
    x = np.array([[0, 1], [1, 0]], dtype=object)
    i2 = np.eye(2, dtype=int).astype(object)
    if q == 2:
        mats = [e, z]
    elif q == 3:
        mats = [e, z, x]
    elif q == 4:
        # e^2 = -1, the other three square to +1 and all anticommute
        mats = [np.kron(e, i2), np.kron(z, i2), np.kron(x, z), np.kron(x, x)]
    else:
        raise RealizationError("built-in Gamma matrices are provided for q = 2, 3, 4 only")
    return [frac_array(m) for m in mats]


# ---------------------------------------------------------------------------
# realizations


def _basis_label(q: int, idx) -> tuple[str, tuple]:
    """Normalize an index to ``("X", (A, B))``, ``("T", mu)``, ``("C", mu)`` or ``("D", ())``."""
    if isinstance(idx, str):
        name = idx.strip()
        if name == "D":
            return "D", ()
        if name[:1] in "TC" and name[1:].isdigit():
            mu = int(name[1:])
            if not 0 <= mu < q:
                raise IndexError(f"{name} out of range for q={q}")
            return name[0], mu
        if name[:1] == "X" and name[1:].replace(",", "").isdigit():
            body = name[1:]
            a, b = body.split(",") if "," in body else (body[0], body[1:])
            return "X", (int(a), int(b))
        raise ValueError(f"unknown generator name {idx!r}")
    a, b = idx
    if not (0 <= a < q + 2 and 0 <= b < q + 2):
        raise IndexError(f"basis index {idx} out of range for q={q}")
    return "X", (a, b)


@dataclass
class Realization:
    """A realization of so(q,2) by (matrix-valued) differential operators."""

    q: int
    kind: str
    weight: WeightLabel | None = None
    backend: str = "scalar"
    gammas: tuple | None = None
    radial_sign: int = -1
    convention: str = "consistent"
    _cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if self.q < 2:
            raise RealizationError("realizations need q >= 2")
        if self.kind not in ("boundary", "bulk"):
            raise RealizationError(f"unknown realization kind {self.kind!r}")
        if self.backend not in BACKENDS:
            raise RealizationError(f"unknown backend {self.backend!r}")
        if self.radial_sign not in (1, -1):
            raise RealizationError("radial_sign must be +1 or -1")
        if self.convention not in CONVENTIONS:
            raise RealizationError(f"unknown convention {self.convention!r}")
        if self.kind == "boundary":
            if self.weight is None:
                self.weight = WeightLabel.scalar(self.q)
            check = validate_weight(self.weight)
            if not check:
                raise RealizationError(f"invalid weight: {check.reason}")
            if self.weight.q != self.q:
                raise RealizationError("weight and realization disagree on q")
            if self.backend == "matrix":
                raise RealizationError("the matrix backend is available for bulk realizations")
            if self.backend == "scalar" and not self.weight.is_scalar:
                raise RealizationError("scalar backend needs lambda = 0")
            if self.backend == "cone":
                if self.weight.symmetric_rank is None:
                    raise RealizationError("cone backend needs lambda = (0, ..., 0, ell)")
                if self.q < 3:
                    raise RealizationError("cone backend needs q >= 3")
        if self.backend == "cone" and self.q < 3:
            raise RealizationError("cone backend needs q >= 3")
        if self.backend == "matrix":
            if self.gammas is None:
                raise RealizationError("matrix backend needs Gamma matrices")
            self.gammas = tuple(frac_array(m) for m in self.gammas)
            check = validate_gammas(self.q, self.gammas)
            if not check:
                raise GammaCompatibilityError(check.reason, check.indices)
        elif self.gammas is not None:
            raise RealizationError("Gamma matrices are only used by the matrix backend")

    @cached_property
    def space(self) -> Space:
        return Space(self.q)

    @property
    def eta(self):
        return liealg.metric(self.q)

    @property
    def dim(self) -> int:
        return self.gammas[0].shape[0] if self.backend == "matrix" else 1

    # building blocks -----------------------------------------------------

    def _d(self, i: int) -> DiffOp:
        return DiffOp.partial(self.space, i)

    def _mult(self, p: Poly) -> DiffOp:
        return DiffOp.multiplication(p)

    def _lift(self, op: DiffOp):
        return MatrixOp.scalar(op, self.dim) if self.backend == "matrix" else op

    def _zero(self):
        return self._lift(DiffOp.zero(self.space))

    def _sigma(self, mu: int, nu: int):
        sp = self.space
        if mu == nu or self.backend == "scalar":
            return self._zero()
        if self.backend == "matrix":
            sign = 1 if self.convention == "literal" else -1
            return MatrixOp.constant(sp, sign * sigma_from_gamma(self.gammas)[mu, nu])
        if mu > nu:
            return -self._sigma(nu, mu)
        z, dz = sp.z, lambda a: self._d(sp.zi(a))
        if mu == 0:
            return z(0) * dz(nu) + z(nu) * dz(0)
        return -(z(mu) * dz(nu)) + z(nu) * dz(mu)

    def _lorentz(self, a: int, b: int):
        sp = self.space
        x = sp.x
        if a == 0:
            orbital = x(0) * self._d(b) + x(b) * self._d(0)
        else:
            orbital = -(x(a) * self._d(b)) + x(b) * self._d(a)
        return self._lift(orbital) + self._sigma(a, b)

    def _dilatation(self) -> DiffOp:
        sp = self.space
        op = DiffOp.zero(sp)
        for mu in range(self.q):
            op = op - sp.x(mu) * self._d(mu)
        if self.kind == "boundary":
            return op - delta_poly(sp, self.weight.delta)
        return op - sp.y * self._d(sp.yi)

    def _x_square(self) -> Poly:
        """Lorentzian square ``x_0^2 - x_1^2 - ... - x_{q-1}^2``."""
        sp = self.space
        return sum((-self.eta[m, m] * sp.x(m) * sp.x(m) for m in range(self.q)), Poly(sp))

    def _special(self, mu: int):
        sp = self.space
        eta = self.eta
        radial = self._x_square()
        if self.kind == "bulk":
            radial = radial + self.radial_sign * sp.y * sp.y
        scalar = (-2 * eta[mu, mu] * sp.x(mu)) * self._dilatation() + radial * self._d(mu)
        out = self._lift(scalar)
        literal = self.convention == "literal"
        if self.backend != "scalar":
            for nu in range(self.q):
                if nu != mu:
                    xnu = eta[nu, nu] * sp.x(nu) if literal else sp.x(nu)
                    out = out - self._times(2 * xnu, self._sigma(mu, nu))
        if self.kind == "bulk" and self.backend == "matrix":
            gam = MatrixOp.constant(sp, self.gammas[mu])
            out = out - self._times((2 if literal else 1) * sp.y, gam)
        return out

    def _times(self, p: Poly, op):
        """Left multiplication of a (matrix) operator by a polynomial."""
        if isinstance(op, MatrixOp):
            return op.map_entries(lambda a: p * a)
        return p * op

    # public ---------------------------------------------------------------

    def named(self, idx):
        """Realized operator for ``T0``, ``C1``, ``D``, ``X01`` or a pair ``(A, B)``."""
        kind, arg = _basis_label(self.q, idx)
        key = (kind, arg)
        if key in self._cache:
            return self._cache[key]
        if kind == "T":
            op = self._lift(self._d(arg))
        elif kind == "C":
            op = self._special(arg)
        elif kind == "D":
            op = self._lift(self._dilatation())
        else:
            op = self._basis(*arg)
        self._cache[key] = op
        return op

    def _basis(self, A: int, B: int):
        q = self.q
        if A == B:
            return self._zero()
        if A > B:
            return -self._basis(B, A)
        if B < q:
            return self._lorentz(A, B)
        if A == q:
            return self.named("D")
        T, C = self.named(f"T{A}"), self.named(f"C{A}")
        half = Fraction(1, 2)
        return half * (T + C) if B == q else half * (T - C)

    def realize(self, X: liealg.AlgebraElement):
        out = self._zero()
        for ab, c in liealg.expand_in_basis(X).items():
            out = out + c * self.named(ab)
        return out

    def generators(self) -> dict[tuple[int, int], object]:
        return {ab: self.named(ab) for ab in liealg.basis_indices(self.q)}

    def normalize(self, op):
        """Reduce coefficients modulo the cone ideal for the cone backend."""
        if self.backend != "cone":
            return op
        return op.map_coefficients(reduce_mod_cone)

    def bracket_sign(self) -> BracketReport:
        return bracket_table(self)

    def casimir(self):
        return casimir_operator(self)


def boundary_generator(q: int, w: WeightLabel | None, idx, backend: str = "scalar") -> DiffOp:
    return Realization(q, "boundary", w, backend).named(idx)


def bulk_generator(
    q: int,
    idx,
    backend: str = "scalar",
    gammas=None,
    radial_sign: int = -1,
):
    return Realization(q, "bulk", None, backend, gammas, radial_sign).named(idx)


# ---------------------------------------------------------------------------
# bracket tables


@dataclass(frozen=True)
class BracketReport:
    ok: bool
    sign: int | None
    checked: int
    failure: tuple | None = None

    def __bool__(self) -> bool:
        return self.ok


def bracket_table(r: Realization, pairs=None) -> BracketReport:
    """Compare ``[rho X, rho Y]`` with ``rho [X, Y]`` on all ordered basis pairs.

    The sign ``eps'`` with ``rho([X, Y]) = eps' [rho X, rho Y]`` is measured on
    the first pair with a non-zero bracket and must be the same for all pairs.
    """
    q = r.q
    basis = liealg.basis_indices(q)
    if pairs is None:
        pairs = [(a, b) for a in basis for b in basis]
    sign = None
    for ab, cd in pairs:
        lhs = r.normalize(r.realize(liealg.bracket(liealg.generator(q, *ab), liealg.generator(q, *cd))))
        rhs = r.normalize(commutator(r.named(ab), r.named(cd)))
        if lhs.is_zero() and rhs.is_zero():
            continue
        if sign is None:
            if lhs == rhs:
                sign = 1
            elif lhs == -rhs:
                sign = -1
            else:
                return BracketReport(False, None, 0, (ab, cd))
        elif lhs != sign * rhs:
            return BracketReport(False, sign, 0, (ab, cd))
    return BracketReport(True, sign, len(pairs))


def preserves_cone_ideal(r: Realization, tests: Sequence[Poly]) -> tuple[bool, tuple | None]:
    """``reduce(X(z^2 f)) = 0`` for every generator and test polynomial."""
    from .weylalg import cone_form

    if r.backend != "cone":
        raise RealizationError("ideal preservation only applies to the cone backend")
    z2 = cone_form(r.space)
    for ab, op in r.generators().items():
        for f in tests:
            if reduce_mod_cone(apply_to_poly(op, z2 * f)):
                return False, (ab, str(f))
    return True, None


# ---------------------------------------------------------------------------
# contraction


class ContractionError(ValueError):
    pass


def contraction_to_boundary(P, delta=liealg.DELTA):
    """Act on ``y^Delta phi(x)``, divide by ``y^Delta`` and set ``y = 0``.

    A term ``p(x, y) d_y^k d_x^beta`` becomes ``(Delta)_k (p / y^k)|_{y=0} d_x^beta``;
    ``p`` not divisible by ``y^k`` has no such limit and raises ContractionError.
    """
    if isinstance(P, MatrixOp):
        return P.map_entries(lambda a: contraction_to_boundary(a, delta))
    sp = P.space
    yi = sp.yi
    dl = delta_poly(sp, delta)
    out = DiffOp.zero(sp)
    for alpha, coef in P.terms.items():
        k = alpha[yi]
        try:
            reduced = coef.divide_by_var(yi, k)
        except ValueError:
            raise ContractionError(
                f"coefficient {coef} of d_y^{k} is not divisible by y^{k}"
            ) from None
        reduced = reduced.substitute(yi, 0)
        if not reduced:
            continue
        rest = alpha[:yi] + (0,) + alpha[yi + 1 :]
        out = out + DiffOp(sp, {rest: reduced * falling_factorial(dl, k)})
    return out


# ---------------------------------------------------------------------------
# Casimir


def casimir_operator(r: Realization):
    cas = liealg.casimir2_element(r.q)
    out = r._zero()
    for c, ab, cd in cas:
        out = out + c * _compose(r.named(ab), r.named(cd))
    return r.normalize(out)


class CasimirError(RuntimeError):
    pass


def _split_delta(f: Poly) -> dict[tuple, Poly]:
    """Group ``f`` by its non-Delta exponent: ``f = sum_e m_e * c_e(Delta)``."""
    sp = f.space
    di = sp.deltai
    out: dict[tuple, dict] = {}
    for e, c in f.terms.items():
        key = e[:di] + (0,)
        de = (0,) * di + (e[di],)
        out.setdefault(key, {})[de] = c
    return {k: Poly(sp, v) for k, v in out.items()}


def eigenvalue_on(op, f: Poly, cone: bool = False) -> Poly:
    """The ``chi(Delta)`` with ``op f = chi f`` (modulo the cone ideal if asked)."""
    norm = reduce_mod_cone if cone else (lambda p: p)
    f = norm(f)
    if not f:
        raise CasimirError("test field vanishes")
    image = norm(apply_to_poly(op, f))
    fparts = _split_delta(f)
    iparts = _split_delta(image)
    key = next(iter(sorted(fparts)))
    base = fparts[key]
    if any(e[-1] for e in base.terms):
        raise CasimirError("test fields must not depend on Delta")
    chi = iparts.get(key, Poly(f.space)) * (1 / base.terms[(0,) * f.space.nvars])
    if image != chi * f:
        raise CasimirError(f"not an eigenfunction: {f}")
    return chi


def casimir_test_fields(r: Realization, max_x_degree: int = 2) -> list[Poly]:
    """x-monomials up to the given degree times reduced z-monomials of degree ell."""
    sp = r.space
    q = r.q
    xmons = [Poly.constant(sp, 1)]
    for deg in range(1, max_x_degree + 1):
        for combo in _multisets(range(q), deg):
            m = Poly.constant(sp, 1)
            for i in combo:
                m = m * sp.x(i)
            xmons.append(m)
    zmons = [Poly.constant(sp, 1)]
    if r.backend == "cone":
        ell = r.weight.symmetric_rank
        zmons = []
        for combo in _multisets(range(q), ell):
            if combo.count(0) > 1:
                continue
            m = Poly.constant(sp, 1)
            for i in combo:
                m = m * sp.z(i)
            zmons.append(m)
    return [a * b for a in xmons for b in zmons]


def _multisets(items, k):
    from itertools import combinations_with_replacement

    return list(combinations_with_replacement(list(items), k))


def casimir_eigenvalue(w: WeightLabel, backend: str = "scalar", max_x_degree: int = 2) -> Poly:
    """``chi_2(lambda, Delta)`` as a polynomial in Delta.

    Scalar: the Casimir must be a pure multiplication operator.  Cone: the
    eigenvalue must be the same on every degree-``ell`` test field after cone
    reduction.
    """
    r = Realization(w.q, "boundary", w, backend)
    op = casimir_operator(r)
    if backend == "scalar":
        if op.derivative_part().terms:
            raise CasimirError(f"Casimir has derivative terms: {op.derivative_part()}")
        return op.constant_part()
    values = {eigenvalue_on(op, f, cone=True) for f in casimir_test_fields(r, max_x_degree)}
    if len(values) != 1:
        raise CasimirError(f"Casimir is not constant on the test fields: {values}")
    return values.pop()


def reflect_delta(p: Poly, q: int) -> Poly:
    """``p(Delta) -> p(q - Delta)``."""
    sp = p.space
    return p.substitute(sp.deltai, sp.const(q) - sp.delta)


# ---------------------------------------------------------------------------
# fields carrying a formal y^Delta factor


@dataclass(frozen=True)
class TaggedField:
    """``y^(Delta + shift) * body``; ``tagged=False`` means an ordinary polynomial."""

    body: Poly
    shift: int = 0
    tagged: bool = True

    def normalized(self) -> TaggedField:
        body, shift = self.body, self.shift
        if not body:
            return TaggedField(body, 0, self.tagged)
        yi = body.space.yi
        k = body.min_degree(yi)
        if k > 0:
            body = body.divide_by_var(yi, k)
            shift += k
        return TaggedField(body, shift, self.tagged)

    def __eq__(self, other) -> bool:
        if not isinstance(other, TaggedField):
            return NotImplemented
        a, b = self.normalized(), other.normalized()
        return (a.body, a.shift, a.tagged) == (b.body, b.shift, b.tagged) or (
            not a.body and not b.body
        )

    def __hash__(self):
        n = self.normalized()
        return hash((n.body, n.shift, n.tagged))

    def __str__(self) -> str:
        if not self.tagged:
            return str(self.body)
        s = "y^Delta" if self.shift == 0 else f"y^(Delta{self.shift:+d})"
        return f"{s} * ({self.body})"


def apply_tagged(op: DiffOp, F: TaggedField) -> TaggedField:
    """Apply ``op`` using ``d_y (y^(Delta+s) f) = y^(Delta+s) ((Delta+s)/y f + d_y f)``."""
    if not F.tagged:
        return TaggedField(apply_to_poly(op, F.body), 0, False)
    sp = F.body.space
    yi = sp.yi
    exponent = sp.delta + F.shift
    kmax = max((a[yi] for a in op.terms), default=0)
    # result = y^(Delta + shift - kmax) * acc
    acc = Poly(sp)
    for alpha, coef in op.terms.items():
        k = alpha[yi]
        rest = DiffOp(sp, {alpha[:yi] + (0,) + alpha[yi + 1 :]: Poly.constant(sp, 1)})
        g = apply_to_poly(rest, F.body)
        for j in range(k + 1):
            term = g.diff(yi, k - j) * falling_factorial(exponent, j) * math.comb(k, j)
            acc = acc + coef * term * sp.y ** (kmax - j)
    return TaggedField(acc, F.shift - kmax).normalized()


@dataclass(frozen=True)
class Profile:
    boundary: Poly
    order: str
    shift: int


def asymptotic_profile(F: TaggedField) -> Profile:
    """Leading ``y -> 0`` behaviour ``F ~ y^order * boundary(x)``."""
    if not F.body:
        raise ValueError("the zero field has no asymptotic profile")
    n = F.normalized()
    yi = n.body.space.yi
    k = n.body.min_degree(yi)
    lead = n.body.coefficient(yi, k)
    total = n.shift + k
    if n.tagged:
        order = "Delta" if total == 0 else f"Delta{total:+d}"
    else:
        order = str(total)
    return Profile(lead, order, total)


def bulk_casimir_on_power(q: int, radial_sign: int = -1) -> tuple[Poly, TaggedField]:
    """Apply the scalar bulk Casimir to ``y^Delta``; returns (leading value, full image)."""
    r = Realization(q, "bulk", radial_sign=radial_sign)
    op = casimir_operator(r)
    sp = r.space
    image = apply_tagged(op, TaggedField(Poly.constant(sp, 1)))
    prof = asymptotic_profile(image)
    return prof.boundary, image


# ---------------------------------------------------------------------------
# finite group actions


class UndefinedAtPoint(NotInCell):
    """The factorization needed at an evaluation point does not exist."""


def _power(base, delta):
    if isinstance(delta, int) or (isinstance(delta, Fraction) and delta.denominator == 1):
        if isinstance(base, float):
            return base ** int(delta)
        return frac(base) ** int(delta)
    return math.exp(float(delta) * math.log(float(base)))


def boundary_action(g: GroupElement, delta, f: Poly) -> Callable:
    """``x -> y^-Delta f(x')`` with ``g^-1 n_x = n_x' a_y'' m ntilde`` and ``y = 1/y''``.

    Exact for rational points and integer Delta; floats otherwise.
    """
    sp = f.space
    q = g.q
    ginv = g.inverse()

    def evaluate(x):
        exact = g.exact and not any(isinstance(v, float) for v in x)
        xs = [frac(v) for v in x] if exact else [float(v) for v in x]
        k = ginv @ make_n(xs, exact=exact) if exact else ginv.to_float() @ make_n(xs, exact=False)
        try:
            fac = bruhat_factorize(k)
        except NotInCell as err:
            raise UndefinedAtPoint("bruhat", f"point {tuple(x)} is outside the cell of g^-1 n_x") from err
        value = f.evaluate({sp.xi(m): v for m, v in enumerate(fac.point.x)})
        return _power(fac.point.y, delta) * value

    evaluate.q = q
    return evaluate


def bulk_action(g: GroupElement, F: Poly) -> Callable:
    """``(x, y) -> F(x', y')`` with ``g^-1 n_x a_y = n_x' a_y' h^-1``."""
    sp = F.space
    ginv = g.inverse()

    def evaluate(x, y):
        p = point(x, y)
        gi = ginv if p.exact else ginv.to_float()
        try:
            image, _ = act_on_bulk(gi, p)
        except NotInCell as err:
            raise UndefinedAtPoint("sekiguchi", f"point {p.coords()} is outside the cell") from err
        vals = {sp.xi(m): v for m, v in enumerate(image.x)}
        vals[sp.yi] = image.y
        return F.evaluate(vals)

    return evaluate


def compose_boundary(g: GroupElement, delta, inner: Callable) -> Callable:
    """Boundary action of ``g`` on an arbitrary function of x (for homomorphism checks)."""
    ginv = g.inverse()

    def evaluate(x):
        exact = g.exact and not any(isinstance(v, float) for v in x)
        xs = [frac(v) for v in x] if exact else [float(v) for v in x]
        k = ginv @ make_n(xs, exact=exact) if exact else ginv.to_float() @ make_n(xs, exact=False)
        try:
            fac = bruhat_factorize(k)
        except NotInCell as err:
            raise UndefinedAtPoint("bruhat", f"point {tuple(x)} is outside the cell") from err
        return _power(fac.point.y, delta) * inner(fac.point.x)

    return evaluate


def compose_bulk(g: GroupElement, inner: Callable) -> Callable:
    ginv = g.inverse()

    def evaluate(x, y):
        p = point(x, y)
        gi = ginv if p.exact else ginv.to_float()
        try:
            image, _ = act_on_bulk(gi, p)
        except NotInCell as err:
            raise UndefinedAtPoint("sekiguchi", f"point {p.coords()} is outside the cell") from err
        return inner(image.x, image.y)

    return evaluate


def infinitesimal_consistency(
    kind: str,
    idx,
    f: Poly,
    points: Sequence,
    delta=2,
    step: float = 1e-4,
    radial_sign: int = -1,
) -> float:
    """Max |central difference of the finite action - realized generator| over points.

    ``points`` are x-tuples (boundary) or (x, y) pairs (bulk).
    """
    q = f.space.q
    kname, arg = _basis_label(q, idx)
    if kname == "X":
        X = liealg.generator(q, *arg)
    elif kname == "T":
        X = liealg.T(q, arg)
    elif kname == "C":
        X = liealg.C(q, arg)
    else:
        X = liealg.D(q)
    gp, gm = one_parameter(X, step), one_parameter(X, -step)
    sp = f.space
    if kind == "boundary":
        w = WeightLabel.scalar(q, delta)
        op = Realization(q, "boundary", w).realize(X)
        plus, minus = boundary_action(gp, float(delta), f), boundary_action(gm, float(delta), f)
    else:
        op = Realization(q, "bulk", radial_sign=radial_sign).realize(X)
        plus, minus = bulk_action(gp, f), bulk_action(gm, f)
    image = apply_to_poly(op, f)
    worst = 0.0
    for pt in points:
        if kind == "boundary":
            xs = [float(v) for v in pt]
            fd = (plus(xs) - minus(xs)) / (2 * step)
            vals = {sp.xi(m): v for m, v in enumerate(xs)}
        else:
            xs, y = [float(v) for v in pt[0]], float(pt[1])
            fd = (plus(xs, y) - minus(xs, y)) / (2 * step)
            vals = {sp.xi(m): v for m, v in enumerate(xs)}
            vals[sp.yi] = y
        exact = float(image.evaluate(vals)) * ACTION_SIGN if image else 0.0
        worst = max(worst, abs(fd - exact))
    return worst
