"""Hand-rolled numerical primitives used by the analysis layers.

These are pinned implementations (grid-scan root isolation + bisection,
classical RK4 steps, Richardson-extrapolated difference quotients) so that
results are bit-reproducible across platforms.  Library root finders and
adaptive integrators appear only as independent oracles in the test suite.
"""
from __future__ import annotations

from typing import Callable, Sequence

#: Default number of scan cells for root isolation on an interval.
SCAN_CELLS = 512

#: Default absolute width tolerance for bisection refinement.
ROOT_XTOL = 1e-12


def bisect_root(f: Callable[[float], float], a: float, b: float,
                fa: float | None = None, fb: float | None = None,
                xtol: float = ROOT_XTOL, max_iter: int = 200) -> float:
    """Bisection on a bracketing interval [a, b] (f(a), f(b) opposite signs)."""
    fa = f(a) if fa is None else fa
    fb = f(b) if fb is None else fb
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b
    if (fa < 0.0) == (fb < 0.0):
        raise ValueError("bisect_root: interval does not bracket a sign change")
    for _ in range(max_iter):
        m = 0.5 * (a + b)
        if (b - a) <= xtol:
            return m
        fm = f(m)
        if fm == 0.0:
            return m
        if (fm < 0.0) == (fa < 0.0):
            a, fa = m, fm
        else:
            b, fb = m, fm
    return 0.5 * (a + b)


def scan_roots(f: Callable[[float], float], lo: float, hi: float,
               cells: int = SCAN_CELLS, xtol: float = ROOT_XTOL) -> list[float]:
    """Sign-change roots of f on [lo, hi]: uniform scan + bisection.

    Roots of even multiplicity (no sign change) are not detected; duplicates
    within a small merge window are collapsed.  Returns an ascending list.
    """
    if not hi > lo:
        return []
    step = (hi - lo) / cells
    xs = [lo + step * k for k in range(cells + 1)]
    xs[-1] = hi
    vals = [f(x) for x in xs]
    roots: list[float] = []

    def push(r: float) -> None:
        if roots and abs(r - roots[-1]) <= max(4.0 * xtol, 1e-11 * (1.0 + abs(r))):
            return
        roots.append(r)

    for k in range(cells):
        fa, fb = vals[k], vals[k + 1]
        if fa == 0.0:
            push(xs[k])
            continue
        if fb == 0.0:
            continue  # picked up as the next cell's left endpoint (or below)
        if (fa < 0.0) != (fb < 0.0):
            push(bisect_root(f, xs[k], xs[k + 1], fa, fb, xtol))
    if vals[-1] == 0.0:
        push(hi)
    return roots


def central_slope(f: Callable[[float], float], x: float, h: float) -> float:
    """Plain central difference quotient (O(h^2))."""
    return (f(x + h) - f(x - h)) / (2.0 * h)


def richardson_slope(f: Callable[[float], float], x: float, h: float) -> float:
    """Two-level Richardson extrapolation of the central quotient (O(h^4))."""
    d1 = central_slope(f, x, h)
    d2 = central_slope(f, x, 0.5 * h)
    return (4.0 * d2 - d1) / 3.0


def rk4_step_2d(f: Callable[[tuple[float, float]], tuple[float, float]],
                y: tuple[float, float], h: float) -> tuple[float, float]:
    """One classical RK4 step for an autonomous planar field."""
    k1 = f(y)
    k2 = f((y[0] + 0.5 * h * k1[0], y[1] + 0.5 * h * k1[1]))
    k3 = f((y[0] + 0.5 * h * k2[0], y[1] + 0.5 * h * k2[1]))
    k4 = f((y[0] + h * k3[0], y[1] + h * k3[1]))
    return (
        y[0] + (h / 6.0) * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
        y[1] + (h / 6.0) * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
    )


def rk4_step_1d(f: Callable[[float], float], y: float, h: float) -> float:
    """One classical RK4 step for an autonomous scalar field."""
    k1 = f(y)
    k2 = f(y + 0.5 * h * k1)
    k3 = f(y + 0.5 * h * k2)
    k4 = f(y + h * k3)
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def polyline_arclength(points: Sequence[tuple[float, float]]) -> float:
    """Total length of a polyline (used for portrait bookkeeping)."""
    total = 0.0
    for (a1, a2), (b1, b2) in zip(points, points[1:]):
        total += ((b1 - a1) ** 2 + (b2 - a2) ** 2) ** 0.5
    return total
