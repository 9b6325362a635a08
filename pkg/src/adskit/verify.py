"""Invariant suites behind ``adskit verify``.

Each suite returns a :class:`SuiteResult`; a failing suite carries the first
counterexample found, with enough data (q, seed, indices) to reproduce it.
"""

from __future__ import annotations

import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations_with_replacement

from . import decomp, grp, liealg, reps
from .liealg import WeightLabel, mirror_weight

SUITES = ("casimir", "charts", "reps", "structure", "subalgebras")


@dataclass
class SuiteResult:
    name: str
    passed: bool = True
    checked: int = 0
    failed: int = 0
    counterexample: dict | None = None
    details: dict = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)

    def check(self, ok: bool, **where) -> bool:
        self.checked += 1
        if not ok:
            self.failed += 1
            self.passed = False
            if self.counterexample is None:
                self.counterexample = where
        return ok

    def to_json(self) -> dict:
        out = {
            "name": self.name,
            "status": "pass" if self.passed else "fail",
            "counts": {"checked": self.checked, "failed": self.failed},
            "details": self.details,
            "notes": self.notes,
        }
        if self.counterexample is not None:
            out["counterexample"] = self.counterexample
        return out


def suite_structure(q: int, seed: int) -> SuiteResult:
    res = SuiteResult("structure")
    basis = liealg.basis_indices(q)
    for ab in basis:
        X = liealg.generator(q, *ab)
        for cd in basis:
            lhs = liealg.bracket(X, liealg.generator(q, *cd))
            res.check(lhs == liealg.structure_rhs(q, *ab, *cd), q=q, indices=[list(ab), list(cd)])
    D = liealg.D(q)
    for mu in range(q):
        res.check(liealg.bracket(D, liealg.T(q, mu)) == liealg.T(q, mu), q=q, check="[D,T]", mu=mu)
        res.check(liealg.bracket(D, liealg.C(q, mu)) == -liealg.C(q, mu), q=q, check="[D,C]", mu=mu)
    res.details["pairs"] = len(basis) ** 2
    res.details["epsilon"] = liealg.EPSILON
    return res


def suite_subalgebras(q: int, seed: int) -> SuiteResult:
    """Dimensions, closure and the algebra-level decompositions.

    The Cartan complement Q is not a subalgebra; it is tested through
    ``[K, Q] in Q`` and ``[Q, Q] in K`` instead of closure.
    """
    res = SuiteResult("subalgebras")
    dims = {}
    for name in liealg.SUBALGEBRAS:
        try:
            basis = liealg.subalgebra_basis(q, name)
        except liealg.InvalidDimension:
            res.notes.append(f"{name} is not defined for q={q}")
            continue
        dims[name] = len(basis)
        expected = liealg.subalgebra_dimension(q, name)
        res.check(liealg.span_rank(basis) == expected, q=q, subalgebra=name, check="dimension")
        if name == "Q":
            closure = liealg.bracket_closed(basis)
            if not closure:
                i, j = closure.failure
                res.notes.append(
                    f"Q is not bracket-closed (pair {i},{j}); checked as the Cartan complement of K"
                )
            continue
        closure = liealg.bracket_closed(basis)
        res.check(bool(closure), q=q, subalgebra=name, pair=closure.failure)
    K = liealg.subalgebra_basis(q, "K")
    Q = liealg.subalgebra_basis(q, "Q")
    for k in K:
        for x in Q:
            res.check(liealg.in_span_of(Q, liealg.bracket(k, x)), q=q, check="[K,Q] in Q")
    for x in Q:
        for x2 in Q:
            res.check(liealg.in_span_of(K, liealg.bracket(x, x2)), q=q, check="[Q,Q] in K")
    full = len(liealg.basis_indices(q))
    for parts in (("H", "A", "N"), ("H", "A", "Ntilde"), ("K", "Q"), ("N", "M", "A", "Ntilde")):
        gens = [g for p in parts for g in liealg.subalgebra_basis(q, p)]
        res.check(liealg.span_rank(gens) == full, q=q, decomposition="+".join(parts))
    nt = liealg.subalgebra_basis(q, "Ntilde")
    res.check(all(liealg.bracket(a, b).is_zero() for a in nt for b in nt), q=q, check="Ntilde abelian")
    res.details["dimensions"] = dims
    return res


def suite_charts(q: int, seed: int, samples: int = 20) -> SuiteResult:
    res = SuiteResult("charts")
    rng = random.Random(seed)
    for i in range(samples):
        s = rng.randrange(2**31)
        r = random.Random(s)
        x = grp.random_vector(q, r)
        y = grp.random_positive(r)
        h = grp.random_cayley(q, r, "H")
        m = grp.random_cayley(q, r, "M")
        c = grp.random_vector(q, r)
        g = grp.make_n(x) @ grp.make_dilatation(q, y) @ h
        f = decomp.sekiguchi_factorize(g)
        res.check(
            f.point.x == tuple(x) and f.point.y == y and f.h == h, q=q, seed=s, check="sekiguchi"
        )
        res.check(
            decomp.closed_form_sekiguchi(g) == decomp.chart_to_closed_form(f.point),
            q=q,
            seed=s,
            check="closed-form sekiguchi chart",
        )
        g2 = grp.make_n(x) @ grp.make_dilatation(q, y) @ m @ grp.make_ntilde(c)
        b = decomp.bruhat_factorize(g2)
        res.check(
            b.point.x == tuple(x) and b.point.y == y and b.m == m and b.ntilde_params == tuple(c),
            q=q,
            seed=s,
            check="bruhat",
        )
        na = grp.make_n(x) @ grp.make_dilatation(q, y)
        res.check(
            decomp.sekiguchi_coords(na).coords() == decomp.bruhat_factorize(na).point.coords(),
            q=q,
            seed=s,
            check="chart agreement",
        )
        p = decomp.point(grp.random_vector(q, r), grp.random_positive(r))
        xi = decomp.embed_hyperboloid(p)
        res.check(decomp.eta_norm(xi) == -1, q=q, seed=s, check="hyperboloid norm")
        gr = grp.random_element(q, s, 2)
        image, sign = decomp.act_on_bulk(gr, p)
        res.check(
            bool((decomp.embed_hyperboloid(image) * sign == gr @ xi).all()),
            q=q,
            seed=s,
            check="embedding equivariance",
        )
    for name, g, fn in _violators(q):
        try:
            fn(g)
            res.check(False, q=q, check="not-in-cell", element=name)
        except decomp.NotInCell:
            res.check(True)
    res.details["samples"] = samples
    res.details["hyperboloid_norm"] = -1
    res.notes.append("base point e_{q+1} has eta-norm -1; the hyperboloid is often written with +1")
    return res


def _violators(q: int):
    import numpy as np

    n = q + 2
    rot = np.eye(n, dtype=int).astype(object)
    rot[0, 0] = rot[q + 1, q + 1] = 0
    rot[0, q + 1], rot[q + 1, 0] = -1, 1
    refl = np.diag([-1] + [1] * q + [-1]).astype(object)
    return [
        ("quarter-turn in the (0, q+1) plane", grp.GroupElement(q, rot), decomp.sekiguchi_factorize),
        ("diag(-1, 1, ..., 1, -1)", grp.GroupElement(q, refl), decomp.bruhat_factorize),
    ]


def _realizations(q: int):
    out = [
        ("boundary/scalar", reps.Realization(q, "boundary")),
        ("bulk/scalar", reps.Realization(q, "bulk")),
    ]
    if q >= 3:
        out.append(
            ("boundary/cone", reps.Realization(q, "boundary", WeightLabel.symmetric_tensor(q, 1), "cone"))
        )
    return out


def suite_reps(q: int, seed: int) -> SuiteResult:
    res = SuiteResult("reps")
    basis = liealg.basis_indices(q)
    pairs = list(combinations_with_replacement(basis, 2))
    signs = {}
    for label, r in _realizations(q):
        report = reps.bracket_table(r, pairs)
        res.check(bool(report), q=q, realization=label, pair=report.failure)
        signs[label] = report.sign
    res.details["bracket_signs"] = signs
    bulk = reps.Realization(q, "bulk")
    boundary = reps.Realization(q, "boundary")
    for ab in basis:
        res.check(
            reps.contraction_to_boundary(bulk.named(ab)) == boundary.named(ab),
            q=q,
            check="contraction",
            index=list(ab),
        )
    return res


def suite_casimir(q: int, seed: int) -> SuiteResult:
    res = SuiteResult("casimir")
    chi = reps.casimir_eigenvalue(WeightLabel.scalar(q))
    res.details["chi2_scalar"] = str(chi)
    res.check(reps.reflect_delta(chi, q) == chi, q=q, check="chi(Delta) = chi(q - Delta)")
    if q >= 3:
        w = WeightLabel.symmetric_tensor(q, 1)
        chi1 = reps.casimir_eigenvalue(w, "cone", max_x_degree=1)
        chim = reps.casimir_eigenvalue(mirror_weight(w), "cone", max_x_degree=1)
        res.details["chi2_cone_ell1"] = str(chi1)
        res.check(reps.reflect_delta(chi1, q) == chim, q=q, check="cone mirror symmetry")
    r = reps.Realization(q, "bulk")
    K = reps.casimir_operator(r)
    for ab, op in r.generators().items():
        res.check(reps.commutator(K, op).is_zero(), q=q, check="bulk Casimir", index=list(ab))
    lead, _ = reps.bulk_casimir_on_power(q)
    res.details["bulk_casimir_on_y_Delta"] = str(lead)
    res.check(lead == chi, q=q, check="bulk Casimir on y^Delta matches chi2")
    return res


RUNNERS = {
    "casimir": suite_casimir,
    "charts": suite_charts,
    "reps": suite_reps,
    "structure": suite_structure,
    "subalgebras": suite_subalgebras,
}


def _guarded(name: str, q: int, seed: int) -> SuiteResult:
    try:
        res = RUNNERS[name](q, seed)
        if res.counterexample is not None:
            res.counterexample = {"q": q, "seed": seed, **res.counterexample}
        return res
    except Exception as err:  # a crash is a failed suite, not a crashed report
        res = SuiteResult(name, passed=False, failed=1)
        res.counterexample = {"q": q, "seed": seed, "error": f"{type(err).__name__}: {err}"}
        return res


def run_suites(q: int, names, seed: int) -> list[SuiteResult]:
    names = sorted(set(names))
    with ThreadPoolExecutor(max_workers=len(names)) as pool:
        futures = {n: pool.submit(_guarded, n, q, seed) for n in names}
        return [futures[n].result() for n in names]
