"""Sekiguchi (``g = n_x a_y h``) and Bruhat (``g = n_x a_y m ntilde``) factorizations.

Both charts read ``(x, y)`` off a single column or a null vector of ``g``:

* Sekiguchi: ``g e_{q+1} = +-n_x a_y e_{q+1}``, so with
  ``den = g[q, q+1] + g[q+1, q+1]`` one gets ``y = 1/|den|`` and
  ``x_mu = eta_mumu g[mu, q+1] / den``.
* Bruhat: ``g u_+ = +-y^{-1} n_x u_+`` for the null vector ``u_+ = e_q + e_{q+1}``
  fixed by ``M`` and ``Ntilde``; with ``Y = (g u_+)_q + (g u_+)_{q+1}) / 2`` one
  gets ``y = 1/|Y|`` and ``x_mu = eta_mumu (g u_+)_mu / (2 Y)``.

Outside the open cells the denominators vanish and :class:`NotInCell` is
raised.  A residual that fails its membership test means the conventions are
inconsistent and raises :class:`ConventionError`.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import liealg
from ._exact import frac, zeros
from .grp import (
    FLOAT_TOL,
    GroupElement,
    is_in_H,
    is_in_MNtilde,
    make_dilatation,
    make_n,
)


class NotInCell(ArithmeticError):
    """The element lies in the measure-zero complement of the chart's cell."""

    def __init__(self, chart: str, message: str):
        super().__init__(f"{chart}: {message}")
        self.chart = chart


class ConventionError(RuntimeError):
    """A residual factor failed its subgroup test."""


@dataclass(frozen=True)
class BulkPoint:
    x: tuple
    y: object
    chart: str = "sekiguchi"

    def __post_init__(self):
        object.__setattr__(self, "x", tuple(self.x))
        if self.y <= 0:
            raise ValueError(f"y must be positive, got {self.y}")
        if self.chart not in ("sekiguchi", "bruhat"):
            raise ValueError(f"unknown chart {self.chart!r}")

    @property
    def q(self) -> int:
        return len(self.x)

    @property
    def exact(self) -> bool:
        return not isinstance(self.y, float) and not any(isinstance(v, float) for v in self.x)

    def coords(self) -> tuple:
        return self.x + (self.y,)


@dataclass(frozen=True)
class SekiguchiFactors:
    point: BulkPoint
    h: GroupElement
    sign: int

    def reconstruct(self) -> GroupElement:
        p = self.point
        return make_n(p.x, exact=p.exact) @ make_dilatation(p.q, p.y) @ self.h


@dataclass(frozen=True)
class BruhatFactors:
    point: BulkPoint
    m: GroupElement
    ntilde: GroupElement
    ntilde_params: tuple
    sign: int

    def reconstruct(self) -> GroupElement:
        p = self.point
        return make_n(p.x, exact=p.exact) @ make_dilatation(p.q, p.y) @ self.m @ self.ntilde


def _is_zero(v, exact: bool) -> bool:
    return v == 0 if exact else abs(v) <= FLOAT_TOL


def _eta(q: int) -> tuple[int, ...]:
    return liealg.metric(q).diagonal


def sekiguchi_coords(g: GroupElement) -> BulkPoint:
    q = g.q
    e = g.entries
    den = e[q, q + 1] + e[q + 1, q + 1]
    if _is_zero(den, g.exact):
        raise NotInCell("sekiguchi", "g[q, q+1] + g[q+1, q+1] = 0")
    eta = _eta(q)
    x = tuple(eta[mu] * e[mu, q + 1] / den for mu in range(q))
    return BulkPoint(x, 1 / abs(den), "sekiguchi")


def sekiguchi_factorize(g: GroupElement) -> SekiguchiFactors:
    p = sekiguchi_coords(g)
    h = make_dilatation(g.q, p.y).inverse() @ make_n(p.x, exact=g.exact).inverse() @ g
    check = is_in_H(h)
    if not check:
        raise ConventionError(f"Sekiguchi residual is not in H: {check.reason}")
    return SekiguchiFactors(p, h, check.sign)


def bruhat_coords(g: GroupElement) -> tuple[BulkPoint, int]:
    q = g.q
    e = g.entries
    w = [e[i, q] + e[i, q + 1] for i in range(q + 2)]
    Y = (w[q] + w[q + 1]) / 2
    if _is_zero(Y, g.exact):
        raise NotInCell("bruhat", "g[q,q] + g[q,q+1] + g[q+1,q] + g[q+1,q+1] = 0")
    eta = _eta(q)
    x = tuple(eta[mu] * w[mu] / (2 * Y) for mu in range(q))
    return BulkPoint(x, 1 / abs(Y), "bruhat"), (1 if Y > 0 else -1)


def bruhat_factorize(g: GroupElement) -> BruhatFactors:
    p, sign = bruhat_coords(g)
    r = make_dilatation(g.q, p.y).inverse() @ make_n(p.x, exact=g.exact).inverse() @ g
    split = is_in_MNtilde(r)
    if not split:
        raise ConventionError(f"Bruhat residual is not in M Ntilde: {split.reason}")
    return BruhatFactors(p, split.m, split.u, split.params, split.sign)


# ---------------------------------------------------------------------------
# closed-form charts


def closed_form_sekiguchi(g: GroupElement, corrected: bool = True) -> tuple[tuple, object]:
    """``y = |d|``, ``x_mu = g[mu, q+1] / d``.

    ``corrected=False`` uses ``d = g[q+1, q] + g[q+1, q+1]``;
    ``corrected=True`` uses ``d = g[q, q+1] + g[q+1, q+1]``.  The corrected
    form returns ``(eta x, 1/y)`` for the factorization chart ``(x, y)``.
    """
    q = g.q
    e = g.entries
    d = (e[q, q + 1] if corrected else e[q + 1, q]) + e[q + 1, q + 1]
    if _is_zero(d, g.exact):
        raise NotInCell("sekiguchi", "closed-form denominator vanishes")
    return tuple(e[mu, q + 1] / d for mu in range(q)), abs(d)


def closed_form_bruhat(g: GroupElement) -> tuple[tuple, object]:
    """``y = (g_qq + g_q,q+1 + g_q+1,q + g_q+1,q+1)/2``, ``x_mu = (g_mu,q + g_mu,q+1)/(2y)``.

    Returns ``(eta x, 1/y)`` for the factorization chart ``(x, y)``.
    """
    q = g.q
    e = g.entries
    y = (e[q, q] + e[q, q + 1] + e[q + 1, q] + e[q + 1, q + 1]) / 2
    if _is_zero(y, g.exact):
        raise NotInCell("bruhat", "closed-form y vanishes")
    return tuple((e[mu, q] + e[mu, q + 1]) / (2 * y) for mu in range(q)), y


def chart_to_closed_form(p: BulkPoint) -> tuple[tuple, object]:
    """Map factorization-chart coordinates to the closed-form coordinates."""
    eta = _eta(p.q)
    return tuple(eta[mu] * v for mu, v in enumerate(p.x)), 1 / p.y


# ---------------------------------------------------------------------------
# bulk geometry


def base_point(q: int, exact: bool = True) -> np.ndarray:
    v = zeros(q + 2, exact)
    v[q + 1] = Fraction(1) if exact else 1.0
    return v


def embed_hyperboloid(p: BulkPoint) -> np.ndarray:
    """``xi = n_x a_y e_{q+1}``; ``<xi, xi> = -1``."""
    g = make_n(p.x, exact=p.exact) @ make_dilatation(p.q, p.y)
    return g.entries[:, p.q + 1].copy()


def eta_norm(xi: Sequence) -> object:
    q = len(xi) - 2
    return sum(s * v * v for s, v in zip(_eta(q), xi))


def act_on_bulk(g: GroupElement, p: BulkPoint) -> tuple[BulkPoint, int]:
    """``g n_x a_y = n_x' a_y' h``; returns the image point and the sign of ``h``."""
    f = sekiguchi_factorize(g @ make_n(p.x, exact=g.exact and p.exact) @ make_dilatation(p.q, p.y))
    return f.point, f.sign


def boundary_limit_coords(p: BulkPoint) -> tuple:
    """The boundary point reached as ``y -> 0``."""
    return p.x


def act_on_boundary(g: GroupElement, x: Sequence) -> tuple[tuple, object]:
    """``g n_x = n_x' a_y m ntilde``; returns ``(x', y)``."""
    f = bruhat_factorize(g @ make_n(list(x), exact=g.exact))
    return f.point.x, f.point.y


def point(x: Sequence, y, chart: str = "sekiguchi") -> BulkPoint:
    """Convenience constructor coercing exact inputs to Fractions."""
    exact = not isinstance(y, float) and not any(isinstance(v, float) for v in x)
    if exact:
        return BulkPoint(tuple(frac(v) for v in x), frac(y), chart)
    return BulkPoint(tuple(float(v) for v in x), float(y), chart)
