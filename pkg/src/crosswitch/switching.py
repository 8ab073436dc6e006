"""Decomposition of the switching cross into crossing / sliding / escaping
arcs, tangency (fold) points, the sliding vector field on each branch and its
pseudo-equilibria.

Sign conventions (derived once, used everywhere): on the half-branch of
Sigma_i with running-coordinate sign h, field X occupies the side where the
normal coordinate has sign h and Y the opposite side.  Writing Xi, Yi for the
normal components,

    crossing  <=>  Xi*Yi > 0,
    sliding   <=>  h*Xi < 0 and h*Yi > 0   (both fields point at the branch),
    escaping  <=>  h*Xi > 0 and h*Yi < 0   (both fields point away).

The sliding field on Sigma_i factors as  Z_i^s(s) = N_i(s) / D_i(s)  with
N_i = (det Z)|Sigma_i and D_i = (-1)^(i-1) * (X_i - Y_i)|Sigma_i, where
det Z = X1*Y2 - X2*Y1.
"""
from __future__ import annotations

import os
from dataclasses import dataclass
from enum import Enum

from .errors import EvaluationOutsideDomain, TooManyTangencies
from .fields import (
    FieldSpec,
    PiecewiseSystem,
    Point,
    Poly1,
    branch_point,
    normal_component,
)
from .numerics import scan_roots

#: Relative tolerance for treating a normal component as vanishing.
TANGENCY_RTOL = 1e-9


def band_tolerance() -> float:
    """Global degeneracy half-width for sign decisions (env-overridable)."""
    return float(os.environ.get("CROSSWITCH_TOL", "1e-9"))


def field_scale(Z: PiecewiseSystem, p: Point) -> float:
    """Max absolute field component at p — the local scale for tolerances."""
    x = Z.X.eval(p)
    y = Z.Y.eval(p)
    return max(abs(x[0]), abs(x[1]), abs(y[0]), abs(y[1]))


def tangency_tolerance(Z: PiecewiseSystem, p: Point) -> float:
    return TANGENCY_RTOL * (1.0 + field_scale(Z, p))


class ArcKind(str, Enum):
    CROSSING = "crossing"
    SLIDING = "sliding"
    ESCAPING = "escaping"
    TANGENCY = "tangency"


#: One-letter codes used in outward kind sequences.
SHORT_CODE = {
    ArcKind.CROSSING: "c",
    ArcKind.SLIDING: "s",
    ArcKind.ESCAPING: "e",
    ArcKind.TANGENCY: "t",
}


class Visibility(str, Enum):
    VISIBLE = "visible"
    INVISIBLE = "invisible"
    DEGENERATE = "degenerate"


def xi_values(Z: PiecewiseSystem) -> tuple[float, float]:
    """(xi1, xi2) with xi_i = X_i(0) * Y_i(0): positive means the half-branches
    of Sigma_i are crossing arcs near the origin."""
    x1, x2, y1, y2 = Z.origin_components()
    return (x1 * y1, x2 * y2)


def branch_point_class(Z: PiecewiseSystem, branch: int, s: float,
                       tol: float | None = None) -> ArcKind:
    """Classify the branch point at running coordinate s != 0 on Sigma_branch."""
    if s == 0.0:
        raise ValueError("the origin does not lie on an open half-branch")
    p = branch_point(branch, s)
    xn = normal_component(Z.X, branch).eval_point(p)
    yn = normal_component(Z.Y, branch).eval_point(p)
    if tol is None:
        tol = tangency_tolerance(Z, p)
    if abs(xn) <= tol or abs(yn) <= tol:
        return ArcKind.TANGENCY
    if xn * yn > 0.0:
        return ArcKind.CROSSING
    h = 1.0 if s > 0.0 else -1.0
    return ArcKind.SLIDING if h * xn < 0.0 else ArcKind.ESCAPING


def crossing_direction(Z: PiecewiseSystem, branch: int, s: float) -> int:
    """At a crossing point: sign of the (shared) normal-component direction."""
    p = branch_point(branch, s)
    xn = normal_component(Z.X, branch).eval_point(p)
    return 1 if xn > 0.0 else -1


# ---------------------------------------------------------------------------
# tangency (fold) points
# ---------------------------------------------------------------------------

def fold_lie_value(field: FieldSpec, branch: int, p: Point) -> float:
    """Second-order contact quantity W_j * dW_i/dx_j at a point with W_i = 0
    (i = branch = normal index, j = the running index)."""
    i = branch
    j = 2 if branch == 1 else 1
    wj = field.component(j).eval_point(p)
    dwi = field.component(i).partial(j).eval_point(p)
    return wj * dwi


def fold_visibility(field_name: str, lie: float, s: float, tol: float) -> Visibility:
    """Visible = the field's parabolic arc stays in its own active region.

    For field X (active where x1*x2 > 0) this happens iff sign(lie) equals
    sign(s); for Y the rule flips.
    """
    if abs(lie) <= tol:
        return Visibility.DEGENERATE
    orient = 1.0 if field_name == "X" else -1.0
    h = 1.0 if s > 0.0 else -1.0
    return Visibility.VISIBLE if orient * lie * h > 0.0 else Visibility.INVISIBLE


@dataclass(frozen=True)
class TangencyPoint:
    """Fold of one field with one branch (W_i = 0 at an isolated point)."""

    field: str            # "X" or "Y"
    branch: int           # 1 or 2
    s: float              # running coordinate
    point: Point
    lie: float            # W_j * dW_i/dx_j at the point
    visibility: Visibility

    @property
    def half(self) -> int:
        return 1 if self.s > 0.0 else -1


def find_tangencies(Z: PiecewiseSystem, branch: int, lo: float, hi: float,
                    exclude_origin: bool = True) -> list[TangencyPoint]:
    """Folds of X and Y on Sigma_branch with running coordinate in [lo, hi].

    Raises TooManyTangencies when a normal component vanishes identically on
    the branch (every point would be a tangency).
    """
    out: list[TangencyPoint] = []
    for name in ("X", "Y"):
        field = Z.field(name)
        restricted = normal_component(field, branch).restrict_to_branch(branch)
        if restricted.is_zero:
            raise TooManyTangencies(
                f"{name}{branch} vanishes identically on Sigma{branch}")
        for s in scan_roots(restricted, lo, hi):
            if exclude_origin and abs(s) <= 1e-12:
                continue
            p = branch_point(branch, s)
            lie = fold_lie_value(field, branch, p)
            vis = fold_visibility(name, lie, s, tangency_tolerance(Z, p))
            out.append(TangencyPoint(name, branch, s, p, lie, vis))
    out.sort(key=lambda t: (t.s, t.field))
    return out


# ---------------------------------------------------------------------------
# decomposition into arcs
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Arc:
    """Open sub-arc of one half-branch with a single region kind.

    inner/outer are signed running coordinates with |inner| < |outer|; the
    arc is ordered outward from the origin.
    """

    branch: int
    half: int
    inner: float
    outer: float
    kind: ArcKind

    def midpoint(self) -> float:
        return 0.5 * (self.inner + self.outer)


@dataclass(frozen=True)
class SigmaDecomposition:
    """Arcs and tangency points on all four half-branches within a radius."""

    radius: float
    arcs: tuple[Arc, ...]
    tangencies: tuple[TangencyPoint, ...]

    def half_branch(self, branch: int, half: int) -> tuple[Arc, ...]:
        return tuple(a for a in self.arcs if a.branch == branch and a.half == half)

    def kind_sequence(self, branch: int, half: int) -> tuple[str, ...]:
        """One-letter kinds ordered outward from the origin."""
        return tuple(SHORT_CODE[a.kind] for a in self.half_branch(branch, half))


def sigma_decomposition(Z: PiecewiseSystem, radius: float = 1.0) -> SigmaDecomposition:
    """Decompose all four half-branches within |s| <= radius into arcs of
    constant kind separated by tangency points."""
    arcs: list[Arc] = []
    tangencies: list[TangencyPoint] = []
    eps = 1e-9 * radius
    for branch in (1, 2):
        found = find_tangencies(Z, branch, -radius, radius)
        tangencies.extend(t for t in found if abs(t.s) <= radius)
        for half in (1, -1):
            cuts = sorted({abs(t.s) for t in found
                           if t.half == half and eps < abs(t.s) < radius})
            stops = [0.0] + cuts + [radius]
            for lo_abs, hi_abs in zip(stops, stops[1:]):
                mid = half * 0.5 * (lo_abs + hi_abs)
                kind = branch_point_class(Z, branch, mid)
                arcs.append(Arc(branch, half, half * lo_abs, half * hi_abs, kind))
    arcs.sort(key=lambda a: (a.branch, -a.half, abs(a.inner)))
    tangencies.sort(key=lambda t: (t.branch, t.s, t.field))
    return SigmaDecomposition(radius, tuple(arcs), tuple(tangencies))


# ---------------------------------------------------------------------------
# sliding dynamics
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SlidingField:
    """Scalar sliding dynamics s' = N(s)/D(s) on Sigma_branch.

    N = (det Z) restricted to the branch; D = (-1)^(branch-1) * (X_i - Y_i)
    restricted.  Valid wherever the two normal components differ (in
    particular on every sliding/escaping arc).
    """

    branch: int
    numerator: Poly1
    denominator: Poly1

    def value(self, s: float) -> float:
        d = self.denominator(s)
        if abs(d) < 1e-300:
            raise EvaluationOutsideDomain(
                f"sliding denominator vanishes at s={s} on Sigma{self.branch}")
        return self.numerator(s) / d

    def derivative(self, s: float) -> float:
        n, d = self.numerator, self.denominator
        dv = d(s)
        if abs(dv) < 1e-300:
            raise EvaluationOutsideDomain(
                f"sliding denominator vanishes at s={s} on Sigma{self.branch}")
        return (n.derivative()(s) * dv - n(s) * d.derivative()(s)) / (dv * dv)

    def derivative_at_root(self, s0: float) -> float:
        """d/ds of N/D at a zero of N: exactly N'(s0)/D(s0)."""
        return self.numerator.derivative()(s0) / self.denominator(s0)


def sliding_field(Z: PiecewiseSystem, branch: int) -> SlidingField:
    i = branch
    sign = 1.0 if branch == 1 else -1.0
    numer = Z.det_poly.restrict_to_branch(branch)
    diff = (Z.X.component(i) - Z.Y.component(i)).restrict_to_branch(branch)
    denom = Poly1([sign * c for c in diff.coeffs])
    return SlidingField(branch, numer, denom)


def filippov_combination(Z: PiecewiseSystem, branch: int, p: Point) -> tuple[float, tuple[float, float]]:
    """Independent route to the sliding vector: the convex combination
    lam*X + (1-lam)*Y with vanishing normal component.  Returns (lam, vector).
    """
    xv = Z.X.eval(p)
    yv = Z.Y.eval(p)
    i = branch - 1
    denom = yv[i] - xv[i]
    if abs(denom) < 1e-300:
        raise EvaluationOutsideDomain(
            f"normal components coincide at {p}: no unique convex combination")
    lam = yv[i] / denom
    vec = (lam * xv[0] + (1.0 - lam) * yv[0], lam * xv[1] + (1.0 - lam) * yv[1])
    return lam, vec


def sliding_value_direct(Z: PiecewiseSystem, branch: int, s: float) -> float:
    """Running component of the Filippov convex combination at the branch
    point (independent of the det-factorization route)."""
    p = branch_point(branch, s)
    _, vec = filippov_combination(Z, branch, p)
    return vec[1] if branch == 1 else vec[0]


# ---------------------------------------------------------------------------
# pseudo-equilibria
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PseudoEquilibrium:
    """Zero of the sliding field inside a sliding or escaping arc."""

    branch: int
    s: float
    point: Point
    region_kind: ArcKind          # SLIDING or ESCAPING
    derivative: float             # d(N/D)/ds at the zero
    hyperbolic: bool
    stability: str | None         # "attracting" | "repelling" | None


def pseudo_equilibria(Z: PiecewiseSystem, branch: int,
                      radius: float = 1.0) -> list[PseudoEquilibrium]:
    """Pseudo-equilibria on Sigma_branch with 0 < |s| <= radius.

    Zeros of det Z restricted to the branch, kept only where the branch point
    lies in a sliding or escaping region (normal components of opposite sign).
    The origin is excluded: a vanishing determinant there is an organizing-
    center condition handled by the classifier.
    """
    sf = sliding_field(Z, branch)
    eps = 1e-9 * radius
    roots: list[float] = []
    for lo, hi in ((-radius, -eps), (eps, radius)):
        roots.extend(scan_roots(sf.numerator, lo, hi))
    out: list[PseudoEquilibrium] = []
    for s0 in sorted(roots):
        kind = branch_point_class(Z, branch, s0)
        if kind not in (ArcKind.SLIDING, ArcKind.ESCAPING):
            continue
        p = branch_point(branch, s0)
        der = sf.derivative_at_root(s0)
        hyper = abs(der) > band_tolerance() * (1.0 + field_scale(Z, p))
        stability = None
        if hyper:
            stability = "attracting" if der < 0.0 else "repelling"
        out.append(PseudoEquilibrium(branch, s0, p, kind, der, hyper, stability))
    return out
