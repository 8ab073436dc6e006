"""Half maps between the two branches, the composed return map around the
origin, its cubic-model coefficients, and fixed-point extraction.

For transient systems (X carries orbits across {x1*x2 > 0}, Y across
{x1*x2 < 0}) every orbit near the origin visits the four half-branches in
turn.  The branch-to-branch orbit maps are

    phi_Y : Sigma2 -> Sigma1   (chart dx2/dx1 = Y2/Y1),
    phi_X : Sigma1 -> Sigma2   (chart dx1/dx2 = X1/X2),

half turn psi = phi_X o phi_Y : Sigma2 -> Sigma2, full turn phi = psi o psi.
First-order coefficients: a_X = -X1(0)/X2(0), a_Y = -Y2(0)/Y1(0), and the
full-turn linear multiplier is alpha^2 with alpha = a_X * a_Y.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from scipy.integrate import solve_ivp

from .errors import EtaUndefined, NotTransient, NotTransverse
from .fields import PiecewiseSystem, Point
from .numerics import central_slope, scan_roots
from .series import invert_graph, picard_chart_jet
from .switching import band_tolerance, field_scale

#: |alpha + 1| below this means "on the critical multiplier band".
ALPHA_CRITICAL_TOL = 1e-9


# ---------------------------------------------------------------------------
# transversality / transience predicates
# ---------------------------------------------------------------------------

def is_transient(Z: PiecewiseSystem) -> bool:
    """True when orbits near 0 cross all four half-branches in sequence:
    X1*X2(0) < 0 (X connects the two branches across its quadrants) and
    Y1*Y2(0) > 0 (Y does across its quadrants)."""
    x1, x2, y1, y2 = Z.origin_components()
    return x1 * x2 < 0.0 and y1 * y2 > 0.0


def require_transverse(Z: PiecewiseSystem) -> None:
    """Charts for the half maps need X2(0) != 0 and Y1(0) != 0."""
    x1, x2, y1, y2 = Z.origin_components()
    tol = band_tolerance() * (1.0 + field_scale(Z, (0.0, 0.0)))
    if abs(x2) <= tol:
        raise NotTransverse("X2(0) vanishes: phi_X chart is singular")
    if abs(y1) <= tol:
        raise NotTransverse("Y1(0) vanishes: phi_Y chart is singular")


def require_transient(Z: PiecewiseSystem) -> None:
    if not is_transient(Z):
        x1, x2, y1, y2 = Z.origin_components()
        raise NotTransient(
            f"return map needs X1*X2(0) < 0 < Y1*Y2(0); "
            f"got X1*X2 = {x1 * x2:g}, Y1*Y2 = {y1 * y2:g}")


def alpha_value(Z: PiecewiseSystem) -> float:
    """Linear coefficient of the half-turn map psi: a_X * a_Y."""
    require_transverse(Z)
    x1, x2, y1, y2 = Z.origin_components()
    return (-x1 / x2) * (-y2 / y1)


def gamma_value(Z: PiecewiseSystem) -> float:
    """gamma = X1*Y2(0) + X2*Y1(0); proportional to alpha + 1, so gamma = 0
    exactly on the critical band alpha = -1."""
    x1, x2, y1, y2 = Z.origin_components()
    return x1 * y2 + x2 * y1


# ---------------------------------------------------------------------------
# half-map coefficients
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HalfMapCoeffs:
    """Cubic jet G(x) = a x + b x^2 + c x^3 of one half map."""

    field: str                    # "X" or "Y"
    a: float
    b: float
    c: float
    source: str                   # "jet" | "numeric"
    error_estimate: float | None  # attached by the numeric fit

    def eval(self, x: float) -> float:
        return ((self.c * x + self.b) * x + self.a) * x


def _chart_polys(Z: PiecewiseSystem, field: str):
    """Chart numerator/denominator written in the (s, w) variables."""
    if field == "Y":
        # s = x1, w = x2; dw/ds = Y2/Y1 with natural variable order
        return Z.Y.f2, Z.Y.f1
    if field == "X":
        # s = x2, w = x1; dw/ds = X1/X2 with the arguments swapped
        return Z.X.f1.swap_vars(), Z.X.f2.swap_vars()
    raise ValueError(f"field must be 'X' or 'Y', got {field!r}")


def half_map_jet(Z: PiecewiseSystem, field: str) -> HalfMapCoeffs:
    """Exact cubic jet of the half map via Picard iteration on the chart ODE
    and order-by-order inversion of the two-parameter solution."""
    require_transverse(Z)
    num, den = _chart_polys(Z, field)
    w = picard_chart_jet(num, den)
    g1, g2, g3 = invert_graph(w, order=3)
    return HalfMapCoeffs(field, g1, g2, g3, source="jet", error_estimate=None)


def half_map_value_numeric(Z: PiecewiseSystem, field: str, x: float,
                           rtol: float = 1e-12, atol: float = 1e-14) -> float:
    """Half-map value by high-order adaptive integration of the chart ODE
    (independent of the jet machinery; fixed endpoint, no event location)."""
    num, den = _chart_polys(Z, field)

    def rhs(s, w):
        return [num(s, w[0]) / den(s, w[0])]

    sol = solve_ivp(rhs, (x, 0.0), [0.0], method="DOP853", rtol=rtol, atol=atol)
    if not sol.success:  # pragma: no cover - guarded by callers' domains
        raise RuntimeError(f"chart integration failed: {sol.message}")
    return float(sol.y[0, -1])


def _fit_cubic_through_origin(samples: dict[float, float], mags: tuple[float, float, float]):
    """Solve for (a, b, c) of f = a x + b x^2 + c x^3 + O(x^4) from values at
    +/- the three magnitudes, separating odd and even parts exactly."""
    import numpy as np

    m = np.asarray(mags)
    odd = np.array([(samples[mm] - samples[-mm]) / (2.0 * mm) for mm in mags])
    even = np.array([(samples[mm] + samples[-mm]) / (2.0 * mm * mm) for mm in mags])
    # odd[m]  = a + c m^2 + e m^4 ; even[m] = b + d m^2 + f m^4
    van = np.vander(m * m, 3, increasing=True)  # columns 1, m^2, m^4
    a, c, _e = np.linalg.solve(van, odd)
    b, _d, _f = np.linalg.solve(van, even)
    return float(a), float(b), float(c)


def half_map_numeric_fit(Z: PiecewiseSystem, field: str,
                         h: float = 0.01) -> HalfMapCoeffs:
    """Cubic coefficients fitted to accurately integrated half-map values at
    x in {±h/4, ±h/2, ±h, ±2h}.  Two staggered three-magnitude fits give the
    coefficients and a defensible error estimate (their disagreement).

    The default span keeps the seventh-order contamination of the exact
    degree-5 odd solve (which scales like h^4) below 1e-6 for charts with
    order-one curvature while staying far above integrator noise.
    """
    require_transverse(Z)
    mags = (h / 4.0, h / 2.0, h, 2.0 * h)
    samples = {}
    for m in mags:
        samples[m] = half_map_value_numeric(Z, field, m)
        samples[-m] = half_map_value_numeric(Z, field, -m)
    fine = _fit_cubic_through_origin(samples, mags[:3])
    coarse = _fit_cubic_through_origin(samples, mags[1:])
    err = max(abs(f - g) for f, g in zip(fine, coarse))
    return HalfMapCoeffs(field, *fine, source="numeric", error_estimate=err)


def half_map_coeffs(Z: PiecewiseSystem, field: str,
                    method: str = "jet") -> HalfMapCoeffs:
    if method == "jet":
        return half_map_jet(Z, field)
    if method == "numeric":
        return half_map_numeric_fit(Z, field)
    raise ValueError(f"method must be 'jet' or 'numeric', got {method!r}")


# ---------------------------------------------------------------------------
# composed return map
# ---------------------------------------------------------------------------

def compose_cubic(outer: tuple[float, float, float],
                  inner: tuple[float, float, float]) -> tuple[float, float, float]:
    """Cubic jet of outer o inner for maps fixing 0."""
    ao, bo, co = outer
    ai, bi, ci = inner
    return (
        ao * ai,
        ao * bi + bo * ai * ai,
        ao * ci + 2.0 * bo * ai * bi + co * ai ** 3,
    )


@dataclass(frozen=True)
class ReturnMapModel:
    """Cubic models of the half turn psi and the full turn phi = psi o psi."""

    alpha: float                  # linear coefficient of psi
    gamma: float                  # X1*Y2(0) + X2*Y1(0)
    beta: float                   # quadratic coefficient of psi
    c3: float                     # cubic coefficient of psi
    eta: float | None             # cubic coefficient of phi on the band alpha = -1
    half_x: HalfMapCoeffs
    half_y: HalfMapCoeffs
    psi: tuple[float, float, float]
    phi: tuple[float, float, float]

    def eval_half(self, x: float) -> float:
        a, b, c = self.psi
        return ((c * x + b) * x + a) * x

    def eval_full(self, x: float) -> float:
        a, b, c = self.phi
        return ((c * x + b) * x + a) * x

    @property
    def attractive(self) -> bool | None:
        """Origin attracts the orbit sequence iff |alpha| < 1 (None on band)."""
        if abs(abs(self.alpha) - 1.0) <= ALPHA_CRITICAL_TOL:
            return None
        return abs(self.alpha) < 1.0


def return_map_model(Z: PiecewiseSystem, method: str = "jet") -> ReturnMapModel:
    """Build the cubic return-map model; requires a transient system."""
    require_transient(Z)
    hx = half_map_coeffs(Z, "X", method)
    hy = half_map_coeffs(Z, "Y", method)
    psi = compose_cubic((hx.a, hx.b, hx.c), (hy.a, hy.b, hy.c))
    a, b, c = psi
    phi = compose_cubic(psi, psi)
    eta = None
    if abs(a + 1.0) <= ALPHA_CRITICAL_TOL:
        eta = -2.0 * (c + b * b)
    return ReturnMapModel(alpha=a, gamma=gamma_value(Z), beta=b, c3=c, eta=eta,
                          half_x=hx, half_y=hy, psi=psi, phi=phi)


def eta_coefficient(Z: PiecewiseSystem, method: str = "jet") -> float:
    """Cubic coefficient of the full turn on the critical band alpha = -1."""
    model = return_map_model(Z, method)
    if model.eta is None:
        raise EtaUndefined(
            f"eta needs alpha = -1 (within {ALPHA_CRITICAL_TOL:g}); "
            f"got alpha = {model.alpha!r}")
    return model.eta


def eta_variant_sum_of_squares(Z: PiecewiseSystem) -> float:
    """Alternative sum-of-squares style combination of half-map coefficients
    sometimes quoted for the critical cubic coefficient.  Reported alongside
    eta for diagnostics; the composed-jet value is authoritative (the two
    differ in general)."""
    hx = half_map_jet(Z, "X")
    hy = half_map_jet(Z, "Y")
    return -2.0 * ((hx.b * hy.a) ** 2 + hx.c * hy.a ** 3
                   + (hy.b / hy.a) ** 2 + (hy.c / hy.a) ** 2)


# ---------------------------------------------------------------------------
# numeric return map (leg-by-leg orbit composition)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class NumericReturn:
    """Result of composing actual orbit legs between branches."""

    value: float
    hit_sliding: bool             # some junction landed off the crossing set
    legs: tuple[Point, ...]       # visited branch points, seed first


def numeric_return_map(Z: PiecewiseSystem, x: float,
                       half: bool = False) -> NumericReturn:
    """Follow the orbit geometry leg by leg starting from (x, 0) on Sigma2:
    Y-leg to Sigma1, X-leg to Sigma2 (half turn), twice for the full turn."""
    from .flow import half_crossing  # deferred: flow builds on this module's API

    require_transient(Z)
    pts: list[Point] = [(x, 0.0)]
    hit = False
    n_legs = 2 if half else 4
    for k in range(n_legs):
        field = "Y" if k % 2 == 0 else "X"
        res = half_crossing(Z, field, pts[-1])
        hit = hit or res.off_crossing
        pts.append(res.point)
    value = pts[-1][0] if n_legs % 2 == 0 else pts[-1][1]
    return NumericReturn(value=value, hit_sliding=hit, legs=tuple(pts))


def numeric_return_samples(Z: PiecewiseSystem, n: int = 16,
                           radius: float = 1e-2, max_halvings: int = 10,
                           half: bool = False):
    """Sample the numeric return map at n seeds on Sigma2-, halving the
    window (up to max_halvings) whenever a seed's orbit leaves the tractable
    neighbourhood.  Returns (radius_used, [(x, value, hit_sliding), ...])."""
    from .errors import LeftDomain, StepLimit

    r = radius
    for _ in range(max_halvings + 1):
        out = []
        try:
            for k in range(1, n + 1):
                x = -r * k / n
                res = numeric_return_map(Z, x, half=half)
                out.append((x, res.value, res.hit_sliding))
            return r, out
        except (LeftDomain, StepLimit):
            r *= 0.5
    raise LeftDomain(
        f"no tractable sampling window found down to radius {r:g}")


# ---------------------------------------------------------------------------
# fixed points of the numeric full-turn map
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FixedPoint:
    """Nontrivial fixed point of the full-turn map on Sigma2."""

    x: float
    conjugate: float              # half-turn image: the paired branch point
    multiplier: float             # d(phi)/dx at the fixed point
    stable: bool | None           # None when |multiplier - 1| is in the band
    hit_sliding: bool


def fixed_points(Z: PiecewiseSystem, lo: float, hi: float,
                 cells: int = 256, slope_step: float = 1e-5) -> list[FixedPoint]:
    """Fixed points of the numeric full turn with x in [lo, hi], 0 excluded.

    Grid scan of phi(x) - x with bisection refinement; the multiplier comes
    from a central difference of the numeric map.
    """
    require_transient(Z)
    guard = 1e-9 * (1.0 + abs(lo) + abs(hi))

    def displacement(x: float) -> float:
        if abs(x) <= guard:
            return 0.0
        return numeric_return_map(Z, x).value - x

    windows = []
    if lo < -guard:
        windows.append((lo, min(hi, -guard)))
    if hi > guard:
        windows.append((max(lo, guard), hi))
    out: list[FixedPoint] = []
    for wlo, whi in windows:
        for root in scan_roots(displacement, wlo, whi, cells=cells):
            if abs(root) <= 2.0 * guard:
                continue
            res = numeric_return_map(Z, root)
            mult = central_slope(lambda u: numeric_return_map(Z, u).value,
                                 root, slope_step * (1.0 + abs(root)))
            stable: bool | None
            if abs(abs(mult) - 1.0) <= 1e-6:
                stable = None
            else:
                stable = abs(mult) < 1.0
            conj = numeric_return_map(Z, root, half=True).value
            out.append(FixedPoint(root, conj, mult, stable, res.hit_sliding))
    return out
