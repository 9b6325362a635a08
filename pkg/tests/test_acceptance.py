"""Acceptance criteria 1-11, each printing one PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -s`` to see the lines.
"""

import random
from fractions import Fraction

import numpy as np
import pytest

from adskit import decomp, grp, liealg, reps
from adskit.decomp import NotInCell
from adskit.liealg import WeightLabel, mirror_weight
from adskit.reps import Realization
from adskit.weylalg import Poly, Space


def report(number, title, failures, detail=""):
    status = "PASS" if not failures else "FAIL"
    line = f"[criterion {number:2d}] {status}  {title}"
    if detail:
        line += f"  ({detail})"
    if failures:
        line += f"  first failure: {failures[0]}"
    print(line)
    assert not failures, f"{len(failures)} failure(s), first: {failures[0]}"


def test_01_structure_constants():
    failures, count = [], 0
    for q in range(2, 7):
        basis = liealg.basis_indices(q)
        gens = {ab: liealg.generator(q, *ab) for ab in basis}
        for ab in basis:
            for cd in basis:
                count += 1
                if liealg.bracket(gens[ab], gens[cd]) != liealg.structure_rhs(q, *ab, *cd):
                    failures.append((q, ab, cd))
    report(1, "structure constants, q=2..6, exact", failures, f"{count} pairs")


def test_02_subalgebra_catalogue():
    failures = []
    for q in range(2, 7):
        full = len(liealg.basis_indices(q))
        for name in liealg.SUBALGEBRAS:
            if name == "M0" and q < 3:
                continue  # only defined from q = 3 on
            basis = liealg.subalgebra_basis(q, name)
            dim = liealg.subalgebra_dimension(q, name)
            if len(basis) != dim or liealg.span_rank(basis) != dim:
                failures.append((q, name, "dimension"))
            closure = liealg.bracket_closed(basis)
            if not closure:
                failures.append((q, name, "not bracket-closed", closure.failure))
        han = [g for p in ("H", "A", "N") for g in liealg.subalgebra_basis(q, p)]
        if liealg.span_rank(han) != full:
            failures.append((q, "H+A+N does not span"))
    # Q is the non-compact Cartan complement of K: [Q, Q] lies in K, so the
    # literal closure requirement cannot hold for it (see the decisions ledger)
    report(2, "11 catalogued subalgebras closed with stated dims; H+A+N spans", failures)


def _sekiguchi_sample(q, seed):
    r = random.Random(seed)
    x, y = grp.random_vector(q, r), grp.random_positive(r)
    h = grp.random_cayley(q, r, "H")
    return x, y, h


def test_03_sekiguchi_roundtrip():
    failures = []
    for q in range(2, 6):
        for seed in range(200):
            x, y, h = _sekiguchi_sample(q, seed)
            g = grp.make_n(x) @ grp.make_dilatation(q, y) @ h
            f = decomp.sekiguchi_factorize(g)
            if (f.point.x, f.point.y, f.h) != (tuple(x), y, h):
                failures.append((q, seed, "roundtrip"))
            if decomp.closed_form_sekiguchi(g) != decomp.chart_to_closed_form(f.point):
                failures.append((q, seed, "closed form"))
    report(3, "Sekiguchi roundtrip, 200 seeds x q=2..5, closed form after index fix", failures)


def test_04_bruhat_roundtrip():
    failures = []
    for q in range(2, 6):
        for seed in range(200):
            r = random.Random(10_000 + seed)
            x, y = grp.random_vector(q, r), grp.random_positive(r)
            m, c = grp.random_cayley(q, r, "M"), grp.random_vector(q, r)
            a, nt = grp.make_dilatation(q, y), grp.make_ntilde(c)
            g = grp.make_n(x) @ a @ m @ nt
            f = decomp.bruhat_factorize(g)
            if (f.point.x, f.point.y, f.m, f.ntilde) != (tuple(x), y, m, nt):
                failures.append((q, seed, "roundtrip"))
            na = grp.make_n(x) @ a
            if decomp.sekiguchi_coords(na).coords() != decomp.bruhat_coords(na)[0].coords():
                failures.append((q, seed, "chart agreement"))
    report(4, "Bruhat roundtrip of all four factors, chart agreement on N A", failures)


def _violators(q):
    n = q + 2
    rot = np.eye(n, dtype=int).astype(object)
    rot[0, 0] = rot[q + 1, q + 1] = 0
    rot[0, q + 1], rot[q + 1, 0] = -1, 1
    refl = np.diag([-1] + [1] * q + [-1]).astype(object)
    return [
        ("sekiguchi", grp.GroupElement(q, rot)),
        ("bruhat", grp.GroupElement(q, refl)),
        ("bruhat", grp.GroupElement(q, rot @ refl @ rot.T)),
    ]


def test_05_cell_failure_detection():
    failures = []
    for q in range(2, 6):
        for chart, g in _violators(q):
            fn = decomp.sekiguchi_factorize if chart == "sekiguchi" else decomp.bruhat_factorize
            try:
                out = fn(g)
                failures.append((q, chart, "numeric answer", out.point))
            except NotInCell as err:
                if err.chart != chart:
                    failures.append((q, chart, "wrong chart tag"))
        sp = Space(q)
        rot = _violators(q)[0][1]
        try:
            reps.bulk_action(rot, sp.y)([0] * q, 1)
            failures.append((q, "bulk action at out-of-cell point"))
        except reps.UndefinedAtPoint:
            pass
        try:
            reps.boundary_action(_violators(q)[1][1], 2, Poly.constant(sp, 1))([0] * q)
            failures.append((q, "boundary action at out-of-cell point"))
        except reps.UndefinedAtPoint:
            pass
    report(5, "out-of-cell elements give the typed not-in-cell outcome", failures)


def test_06_realization_bracket_tables():
    failures, signs = [], set()
    for q in range(2, 5):
        realizations = [("boundary/scalar", Realization(q, "boundary")), ("bulk/scalar", Realization(q, "bulk"))]
        if q >= 3:  # the cone backend needs a nontrivial M, q >= 3
            for ell in (1, 2):
                w = WeightLabel.symmetric_tensor(q, ell)
                realizations.append((f"boundary/cone ell={ell}", Realization(q, "boundary", w, "cone")))
        for label, r in realizations:
            rep = reps.bracket_table(r)
            if not rep:
                failures.append((q, label, rep.failure))
            signs.add(rep.sign)
            if r.backend == "cone":
                sp = r.space
                tests = [Poly.constant(sp, 1), sp.x(0) * sp.z(1), sp.z(0) * sp.z(q - 1) + sp.x(1) ** 2]
                ok, where = reps.preserves_cone_ideal(r, tests)
                if not ok:
                    failures.append((q, label, "cone ideal", where))
    if len(signs) != 1:
        failures.append(("global sign not unique", signs))
    report(6, "realization bracket tables, q=2..4", failures, f"measured sign eps'={signs}")


def test_07_contraction():
    failures = []
    for q in range(2, 6):
        bulk, boundary = Realization(q, "bulk"), Realization(q, "boundary")
        for ab in liealg.basis_indices(q):
            if reps.contraction_to_boundary(bulk.named(ab)) != boundary.named(ab):
                failures.append((q, ab))
    report(7, "y d_y -> Delta, y -> 0 maps each bulk generator to its boundary one", failures)


def test_08_casimir():
    failures, values = [], {}
    for q in range(2, 6):
        sp = Space(q)
        op = reps.casimir_operator(Realization(q, "boundary"))
        if op.derivative_part().terms:
            failures.append((q, "scalar Casimir has derivative terms"))
        chi = op.constant_part()
        values[q] = str(chi)
        if reps.reflect_delta(chi, q) != chi:
            failures.append((q, "scalar mirror symmetry"))
        if q >= 3:
            for ell in (1, 2):
                w = WeightLabel.symmetric_tensor(q, ell)
                chi_w = reps.casimir_eigenvalue(w, "cone", max_x_degree=1)
                chi_m = reps.casimir_eigenvalue(mirror_weight(w), "cone", max_x_degree=1)
                if reps.reflect_delta(chi_w, q) != chi_m:
                    failures.append((q, ell, "cone mirror symmetry"))
        if q <= 4:
            r = Realization(q, "bulk")
            K = reps.casimir_operator(r)
            for ab, gen in r.generators().items():
                if not reps.commutator(K, gen).is_zero():
                    failures.append((q, ab, "bulk Casimir does not commute"))
    report(8, "Casimir constant, mirror-symmetric; bulk Casimir central", failures, f"chi2(q=4) = {values[4]}")


def _quadratic(idx, q):
    kind, arg = reps._basis_label(q, idx)
    return kind == "C" or (kind == "X" and max(arg) >= q and min(arg) < q)


def test_09_finite_infinitesimal():
    failures, worst = [], 0.0
    for q in (2, 3):
        rng = random.Random(q)
        sp = Space(q)
        f = sp.x(0) ** 2 + 2 * sp.x(1) * sp.x(q - 1) - sp.x(1) + 1
        F = sp.y * sp.x(0) + sp.y**2 * sp.x(q - 1) + sp.y
        bpts = [[rng.uniform(-1, 1) for _ in range(q)] for _ in range(10)]
        kpts = [([rng.uniform(-1, 1) for _ in range(q)], rng.uniform(0.5, 2)) for _ in range(10)]
        names = [f"T{m}" for m in range(q)] + [f"C{m}" for m in range(q)] + ["D"] + liealg.basis_indices(q)
        for idx in names:
            tol = 1e-5 if _quadratic(idx, q) else 1e-6
            for kind, field, pts in (("boundary", f, bpts), ("bulk", F, kpts)):
                dev = reps.infinitesimal_consistency(kind, idx, field, pts, delta=2, step=1e-4)
                worst = max(worst, dev)
                if dev >= tol:
                    failures.append((q, kind, idx, dev))
    report(9, "finite differences of the actions match the generators", failures, f"max deviation {worst:.1e}")


def test_10_homomorphism():
    failures, checked = [], 0
    for q in range(2, 5):
        sp = Space(q)
        f = sp.x(0) ** 2 - sp.x(q - 1) + 3
        F = sp.y * sp.x(0) + sp.y**2
        rng = random.Random(100 + q)
        pairs = 0
        seed = 0
        while pairs < 20:
            seed += 1
            g1, g2 = grp.random_element(q, 1000 * q + seed, 1), grp.random_element(q, 5000 * q + seed, 1)
            x = grp.random_vector(q, rng)
            y = grp.random_positive(rng)
            try:
                b_lhs = reps.compose_boundary(g1, 2, reps.boundary_action(g2, 2, f))(x)
                b_rhs = reps.boundary_action(g1 @ g2, 2, f)(x)
                k_lhs = reps.compose_bulk(g1, reps.bulk_action(g2, F))(x, y)
                k_rhs = reps.bulk_action(g1 @ g2, F)(x, y)
            except NotInCell:
                continue  # a point outside a cell is not a test case
            pairs += 1
            checked += 1
            if b_lhs != b_rhs:
                failures.append((q, seed, "boundary"))
            if k_lhs != k_rhs:
                failures.append((q, seed, "bulk"))
            if not all(isinstance(v, Fraction) for v in (b_lhs, k_lhs)):
                failures.append((q, seed, "not exact"))
    report(10, "act(g1, act(g2, f)) = act(g1 g2, f), exact, 20 pairs x q=2..4", failures, f"{checked} pairs")


def test_11_hyperboloid():
    failures = []
    rng = random.Random(11)
    for i in range(100):
        q = 2 + i % 3
        p = decomp.point(grp.random_vector(q, rng), grp.random_positive(rng))
        xi = decomp.embed_hyperboloid(p)
        if decomp.eta_norm(xi) != -1:
            failures.append((i, "norm"))
        g = grp.random_element(q, i, 2)
        image, sign = decomp.act_on_bulk(g, p)
        if list(decomp.embed_hyperboloid(image) * sign) != list(g @ xi):
            failures.append((i, "equivariance"))
    report(
        11,
        "hyperboloid norm and equivariance, 100 points",
        failures,
        "norm is -1 here; the +1 normalization differs by sign",
    )
