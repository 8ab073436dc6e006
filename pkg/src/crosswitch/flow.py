"""Event-driven integration of the piecewise flow.

Fixed-step RK4 (h = 1e-3) with event localization by bisection of the final
substep: branch junctions are resolved to |coordinate| <= 1e-12 and snapped
onto the branch.  Junction handling follows the convex (Filippov) convention:

- crossing arc: switch to the field active on the entered quadrant;
- sliding (or escaping) arc: move along the branch with the scalar field
  N(s)/D(s) (sliding motion on escaping arcs is an admissible, non-unique
  selection and is flagged);
- tangency of the arriving field: grazing — continue with the same field;
- tangency of the other field: cross, then continue with that (tangent) field;
- origin: pass through (both branches crossing), slide through (one branch
  crossing), or stop (no branch crossing / degenerate data).

Backward time integrates the negated system forward; all sliding/escaping
roles then swap consistently because every decision is made on the
integrated system.
"""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from enum import Enum

from .errors import LeftDomain, NotTransverse, StepLimit, TooManyTangencies
from .fields import ACTIVE_FIELD, PiecewiseSystem, Point, branch_point, quadrant_of_signs
from .numerics import rk4_step_1d, rk4_step_2d
from .switching import (
    ArcKind,
    band_tolerance,
    branch_point_class,
    field_scale,
    find_tangencies,
    sliding_field,
    tangency_tolerance,
    xi_values,
)

#: Fixed RK4 step.
STEP_H = 1e-3

#: Hard cap on RK4 steps per integration call.
MAX_STEPS = 1_000_000

#: Branch-coordinate magnitude treated as exactly on the branch after landing.
SNAP = 1e-12

#: Event watchers arm only once the coordinate magnitude exceeds this.
ARM = 1e-10


class Mode(str, Enum):
    SMOOTH_X = "SmoothX"
    SMOOTH_Y = "SmoothY"
    SLIDING1 = "Sliding1"
    SLIDING2 = "Sliding2"
    STATIONARY_ORIGIN = "StationaryOrigin"
    STATIONARY_TANGENCY = "StationarySingularTangency"


class EventKind(str, Enum):
    BRANCH_CROSS = "BranchCross"
    SLIDING_ENTRY = "SlidingEntry"
    SLIDING_EXIT = "SlidingExit"
    GRAZE = "Graze"
    TANGENCY_STOP = "TangencyStop"
    ORIGIN_STOP = "OriginStop"
    TIME_LIMIT = "TimeLimit"
    BOX_EXIT = "BoxExit"


@dataclass(frozen=True)
class Event:
    kind: EventKind
    t: float
    point: Point
    branch: int | None = None
    note: str = ""


@dataclass(frozen=True)
class Sample:
    t: float
    x1: float
    x2: float
    mode: Mode


@dataclass
class Trajectory:
    """Piecewise-smooth orbit with its event log."""

    seed: Point
    direction: int                      # +1 forward, -1 backward
    samples: list[Sample] = dc_field(default_factory=list)
    events: list[Event] = dc_field(default_factory=list)
    terminal: Event | None = None

    @property
    def nonunique(self) -> bool:
        return any("nonunique" in e.note or "escaping" in e.note for e in self.events)

    def final_point(self) -> Point:
        s = self.samples[-1]
        return (s.x1, s.x2)


# ---------------------------------------------------------------------------
# substep localization helpers
# ---------------------------------------------------------------------------

def _locate_axis_crossing(F, p: Point, h: float, axis: int):
    """Smallest tau in (0, h] with coordinate `axis` of the RK4(tau) image at
    zero (|.| <= SNAP); assumes a sign change over the full step.  Returns
    (tau, landed_point) with the coordinate snapped to exactly 0."""
    base = p[axis]

    def g(tau: float) -> float:
        return rk4_step_2d(F, p, tau)[axis]

    a, b = 0.0, h
    fa, fb = base, g(h)
    tau, val = b, fb
    for _ in range(200):
        if abs(val) <= SNAP:
            break
        m = 0.5 * (a + b)
        fm = g(m) if m > 0.0 else fa
        if (fm < 0.0) == (fa < 0.0):
            a, fa = m, fm
        else:
            b, fb = m, fm
        tau, val = b, fb
        if b - a <= 1e-16 * h:
            break
    q = rk4_step_2d(F, p, tau)
    q = (0.0, q[1]) if axis == 0 else (q[0], 0.0)
    return tau, q


def _locate_box_exit(F, p: Point, h: float, box: float):
    """tau in (0, h] where max(|x1|, |x2|) - box hits zero from below."""

    def g(tau: float) -> float:
        q = rk4_step_2d(F, p, tau)
        return max(abs(q[0]), abs(q[1])) - box

    a, b = 0.0, h
    fa = max(abs(p[0]), abs(p[1])) - box
    tau = b
    for _ in range(200):
        m = 0.5 * (a + b)
        fm = g(m) if m > 0.0 else fa
        if abs(fm) <= SNAP:
            tau = m
            break
        if (fm < 0.0) == (fa < 0.0):
            a, fa = m, fm
        else:
            b = m
        tau = b
        if b - a <= 1e-16 * h:
            break
    return tau, rk4_step_2d(F, p, tau)


# ---------------------------------------------------------------------------
# half-branch crossing primitive (orbit geometry, used by the return map)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HalfCrossingResult:
    point: Point
    branch: int                   # branch reached (1 or 2)
    time: float                   # unsigned orbit time of the leg
    sigma: int                    # time direction used (+1 / -1)
    off_crossing: bool            # landing point is not on a crossing arc


def half_crossing(Z: PiecewiseSystem, field_name: str, start: Point,
                  h: float = STEP_H, box: float = 4.0,
                  max_steps: int = MAX_STEPS) -> HalfCrossingResult:
    """Follow the orbit of one field from a branch point to the other branch.

    The time direction is chosen so the leg immediately enters the field's
    own active region: sigma = h_side * sgn(W_i) for X and the opposite for Y
    (h_side = sign of the running coordinate at the start).
    """
    x1, x2 = start
    if abs(x2) <= ARM and abs(x1) > ARM:
        i, s0, p = 2, x1, (x1, 0.0)
    elif abs(x1) <= ARM and abs(x2) > ARM:
        i, s0, p = 1, x2, (0.0, x2)
    else:
        raise ValueError(f"start {start} must lie on exactly one open half-branch")
    fld = Z.field(field_name)
    ni = fld.component(i).eval_point(p)
    if abs(ni) <= tangency_tolerance(Z, p):
        raise NotTransverse(
            f"{field_name}{i} vanishes at the start point {p}: leg is tangent")
    hside = 1.0 if s0 > 0.0 else -1.0
    orient = 1.0 if field_name == "X" else -1.0
    sigma = 1 if orient * hside * ni > 0.0 else -1
    ev = fld.eval
    if sigma > 0:
        F = ev
    else:
        def F(q, _ev=ev):
            v = _ev(q)
            return (-v[0], -v[1])

    watch = (3 - i) - 1           # coordinate index of the target branch
    home = i - 1                  # coordinate index of the starting branch
    home_armed = False
    t = 0.0
    for _ in range(max_steps):
        q = rk4_step_2d(F, p, h)
        if max(abs(q[0]), abs(q[1])) > box:
            raise LeftDomain(f"orbit leg left the box |x| <= {box}")
        if not home_armed:
            if abs(q[home]) > ARM:
                home_armed = True
        elif (q[home] < 0.0) != (p[home] < 0.0):
            raise LeftDomain("orbit leg returned to its starting branch")
        crossed = (q[watch] < 0.0) != (p[watch] < 0.0) or abs(q[watch]) <= SNAP
        if crossed:
            tau, land = _locate_axis_crossing(F, p, h, watch)
            t += tau
            j = 3 - i
            s_land = land[i - 1]
            if abs(s_land) <= 1e-11:
                return HalfCrossingResult(land, j, t, sigma, True)
            kind = branch_point_class(Z, j, s_land)
            return HalfCrossingResult(land, j, t, sigma,
                                      kind is not ArcKind.CROSSING)
        p = q
        t += h
    raise StepLimit(f"no branch reached within {max_steps} steps")


# ---------------------------------------------------------------------------
# full event-driven integration
# ---------------------------------------------------------------------------

class _Integrator:
    def __init__(self, Z: PiecewiseSystem, t_max: float, box: float, h: float):
        self.Z = Z
        self.t_max = t_max
        self.box = box
        self.h = h
        self.t = 0.0
        self.steps = 0
        self.samples: list[Sample] = []
        self.events: list[Event] = []
        self.terminal: Event | None = None
        self._sliding_cache: dict[int, tuple] = {}

    # -- bookkeeping -------------------------------------------------------
    def emit(self, kind: EventKind, p: Point, branch: int | None = None,
             note: str = "", terminal: bool = False) -> None:
        e = Event(kind, self.t, p, branch, note)
        self.events.append(e)
        if terminal:
            self.terminal = e

    def record(self, p: Point, mode: Mode) -> None:
        self.samples.append(Sample(self.t, p[0], p[1], mode))

    def tick(self) -> None:
        self.steps += 1
        if self.steps > MAX_STEPS:
            raise StepLimit(f"exceeded {MAX_STEPS} RK4 steps")

    # -- sliding data ------------------------------------------------------
    def sliding_data(self, branch: int):
        """(scalar field, sorted tangency cut coordinates) on one branch."""
        if branch not in self._sliding_cache:
            sf = sliding_field(self.Z, branch)
            cuts = sorted(t.s for t in find_tangencies(
                self.Z, branch, -self.box, self.box))
            self._sliding_cache[branch] = (sf, cuts)
        return self._sliding_cache[branch]

    # -- main loop ---------------------------------------------------------
    def run(self, seed: Point) -> None:
        state = self.start_state(seed)
        while state is not None and self.terminal is None:
            mode, data = state
            if mode in (Mode.SMOOTH_X, Mode.SMOOTH_Y):
                state = self.run_smooth(mode, *data)
            elif mode in (Mode.SLIDING1, Mode.SLIDING2):
                state = self.run_sliding(mode, *data)
            else:  # stationary modes are terminal and set by their creators
                break

    # -- seeding -----------------------------------------------------------
    def start_state(self, seed: Point):
        x1, x2 = seed
        on1 = abs(x1) <= ARM
        on2 = abs(x2) <= ARM
        if max(abs(x1), abs(x2)) > self.box:
            raise ValueError(f"seed {seed} lies outside the box |x| <= {self.box}")
        if on1 and on2:
            self.record((0.0, 0.0), Mode.STATIONARY_ORIGIN)
            return self.handle_origin(arriving_field=None)
        if not on1 and not on2:
            name = ACTIVE_FIELD[quadrant_of_signs(
                1 if x1 > 0 else -1, 1 if x2 > 0 else -1)]
            mode = Mode.SMOOTH_X if name == "X" else Mode.SMOOTH_Y
            self.record(seed, mode)
            return (mode, (seed, name, {0: not on1, 1: not on2}))
        branch = 1 if on1 else 2
        p = (0.0, x2) if on1 else (x1, 0.0)
        s = x2 if on1 else x1
        kind = branch_point_class(self.Z, branch, s)
        if kind is ArcKind.CROSSING:
            return self.enter_crossing_side(p, branch, s)
        if kind is ArcKind.SLIDING:
            self.emit(EventKind.SLIDING_ENTRY, p, branch, note="seed_on_sliding_arc")
            return self.enter_sliding(p, branch, s)
        if kind is ArcKind.ESCAPING:
            # forward continuations are non-unique; depart with the
            # return-composition orientation: Y from Sigma2, X from Sigma1
            name = "X" if branch == 1 else "Y"
            self.emit(EventKind.GRAZE, p, branch,
                      note=f"escaping_seed_departs_with_{name}_nonunique")
            return self.smooth_from_branch(p, name)
        # tangency seed: continue with the tangent field's grazing arc
        name = self.tangent_field_at(p, branch)
        if name is None:
            self.record(p, Mode.STATIONARY_TANGENCY)
            self.emit(EventKind.TANGENCY_STOP, p, branch,
                      note="both_fields_tangent", terminal=True)
            return None
        self.emit(EventKind.GRAZE, p, branch, note=f"tangency_seed_{name}")
        return self.smooth_from_branch(p, name)

    # -- helpers for junctions ----------------------------------------------
    def tangent_field_at(self, p: Point, branch: int) -> str | None:
        """Which field is tangent at a tangency-classified point; None if both."""
        tol = tangency_tolerance(self.Z, p)
        xn = self.Z.X.component(branch).eval_point(p)
        yn = self.Z.Y.component(branch).eval_point(p)
        xt, yt = abs(xn) <= tol, abs(yn) <= tol
        if xt and yt:
            return None
        return "X" if xt else "Y"

    def smooth_from_branch(self, p: Point, name: str):
        mode = Mode.SMOOTH_X if name == "X" else Mode.SMOOTH_Y
        self.record(p, mode)
        armed = {0: abs(p[0]) > ARM, 1: abs(p[1]) > ARM}
        return (mode, (p, name, armed))

    def enter_crossing_side(self, p: Point, branch: int, s: float):
        """Continue past a crossing point with the field of the entered side."""
        nu = 1 if self.Z.X.component(branch).eval_point(p) > 0.0 else -1
        hside = 1 if s > 0.0 else -1
        quad = quadrant_of_signs(nu, hside) if branch == 1 else quadrant_of_signs(hside, nu)
        return self.smooth_from_branch(p, ACTIVE_FIELD[quad])

    def enter_sliding(self, p: Point, branch: int, s: float):
        mode = Mode.SLIDING1 if branch == 1 else Mode.SLIDING2
        self.record(p, mode)
        return (mode, (s,))

    # -- origin ------------------------------------------------------------
    def handle_origin(self, arriving_field: str | None):
        Z = self.Z
        origin = (0.0, 0.0)
        xi1, xi2 = xi_values(Z)
        band = band_tolerance() * (1.0 + field_scale(Z, origin) ** 2)
        if abs(xi1) <= band or abs(xi2) <= band:
            self.emit(EventKind.ORIGIN_STOP, origin, note="degenerate_origin_data",
                      terminal=True)
            return None
        if xi1 > 0.0 and xi2 > 0.0:
            name = arriving_field or "X"
            self.emit(EventKind.ORIGIN_STOP, origin,
                      note=f"passthrough_{name}_nonunique_selection")
            return self.smooth_from_branch(origin, name)
        if xi1 < 0.0 and xi2 < 0.0:
            self.record(origin, Mode.STATIONARY_ORIGIN)
            self.emit(EventKind.ORIGIN_STOP, origin, note="stationary_origin",
                      terminal=True)
            return None
        branch = 1 if xi1 < 0.0 else 2
        self.emit(EventKind.ORIGIN_STOP, origin, branch,
                  note=f"slide_through_sigma{branch}_nonunique")
        sf, _ = self.sliding_data(branch)
        v = sf.value(0.0)
        if v == 0.0:
            self.record(origin, Mode.STATIONARY_ORIGIN)
            self.emit(EventKind.ORIGIN_STOP, origin, branch,
                      note="sliding_field_vanishes_at_origin", terminal=True)
            return None
        return self.enter_sliding(origin, branch, 0.0)

    # -- smooth mode ---------------------------------------------------------
    def run_smooth(self, mode: Mode, p: Point, name: str, armed: dict):
        Z = self.Z
        F = Z.field(name).eval
        h = self.h
        while True:
            if self.t >= self.t_max:
                self.emit(EventKind.TIME_LIMIT, p, terminal=True)
                return None
            self.tick()
            step = min(h, self.t_max - self.t)
            q = rk4_step_2d(F, p, step)
            if max(abs(q[0]), abs(q[1])) > self.box:
                tau, edge = _locate_box_exit(F, p, step, self.box)
                self.t += tau
                self.record(edge, mode)
                self.emit(EventKind.BOX_EXIT, edge, terminal=True)
                return None
            hits = []
            for axis in (0, 1):
                if not armed[axis]:
                    if abs(q[axis]) > ARM:
                        armed[axis] = True
                    continue
                if (q[axis] < 0.0) != (p[axis] < 0.0) or abs(q[axis]) <= SNAP:
                    tau, land = _locate_axis_crossing(F, p, step, axis)
                    hits.append((tau, axis, land))
            if not hits:
                p = q
                self.t += step
                self.record(p, mode)
                continue
            tau, axis, land = min(hits, key=lambda r: r[0])
            self.t += tau
            branch = axis + 1
            other = land[1] if branch == 1 else land[0]
            self.record(land, mode)
            if abs(other) <= ARM:
                return self.handle_origin(arriving_field=name)
            return self.handle_junction(land, branch, other, name)

    def handle_junction(self, p: Point, branch: int, s: float, arriving: str):
        kind = branch_point_class(self.Z, branch, s)
        if kind is ArcKind.CROSSING:
            self.emit(EventKind.BRANCH_CROSS, p, branch)
            return self.enter_crossing_side(p, branch, s)
        if kind is ArcKind.SLIDING:
            self.emit(EventKind.SLIDING_ENTRY, p, branch)
            return self.enter_sliding(p, branch, s)
        if kind is ArcKind.ESCAPING:
            self.emit(EventKind.GRAZE, p, branch,
                      note="grazing_arrival_on_escaping_arc_same_field")
            return self.smooth_from_branch(p, arriving)
        tangent = self.tangent_field_at(p, branch)
        if tangent is None:
            self.record(p, Mode.STATIONARY_TANGENCY)
            self.emit(EventKind.TANGENCY_STOP, p, branch,
                      note="both_fields_tangent", terminal=True)
            return None
        if tangent == arriving:
            self.emit(EventKind.GRAZE, p, branch, note="fold_of_arriving_field")
            return self.smooth_from_branch(p, arriving)
        self.emit(EventKind.BRANCH_CROSS, p, branch,
                  note="crossing_at_fold_of_other_field")
        return self.smooth_from_branch(p, tangent)

    # -- sliding mode --------------------------------------------------------
    def run_sliding(self, mode: Mode, s: float):
        branch = 1 if mode is Mode.SLIDING1 else 2
        sf, cuts = self.sliding_data(branch)
        f = sf.value
        h = self.h
        while True:
            if self.t >= self.t_max:
                self.emit(EventKind.TIME_LIMIT, branch_point(branch, s), branch,
                          terminal=True)
                return None
            self.tick()
            step = min(h, self.t_max - self.t)
            s_new = rk4_step_1d(f, s, step)
            # stop coordinates reached within this step (tangency cuts, the
            # origin, the box edge), nearest first
            stops = [c for c in cuts + ([0.0] if s != 0.0 else [])
                     if min(s, s_new) < c < max(s, s_new)
                     or (abs(s_new - c) <= SNAP and c != s)]
            if abs(s_new) > self.box:
                stops.append(self.box if s_new > 0 else -self.box)
            if not stops:
                s = s_new
                self.t += step
                self.record(branch_point(branch, s), mode)
                continue
            target = min(stops, key=lambda c: abs(c - s))
            tau = self._sliding_tau(f, s, step, target)
            self.t += tau
            s = target
            p = branch_point(branch, s)
            self.record(p, mode)
            if abs(s) >= self.box:
                self.emit(EventKind.BOX_EXIT, p, branch, terminal=True)
                return None
            if s == 0.0:
                return self.handle_origin(arriving_field=None)
            # tangency cut: leave the branch with the tangent field
            tangent = self.tangent_field_at(p, branch)
            if tangent is None:
                self.record(p, Mode.STATIONARY_TANGENCY)
                self.emit(EventKind.TANGENCY_STOP, p, branch,
                          note="both_fields_tangent", terminal=True)
                return None
            self.emit(EventKind.SLIDING_EXIT, p, branch,
                      note=f"exit_at_fold_of_{tangent}")
            return self.smooth_from_branch(p, tangent)

    @staticmethod
    def _sliding_tau(f, s: float, h: float, target: float) -> float:
        """tau in (0, h] with the RK4(tau) sliding image at the target cut."""
        a, b = 0.0, h
        fa = s - target
        tau = h
        for _ in range(200):
            m = 0.5 * (a + b)
            fm = (rk4_step_1d(f, s, m) - target) if m > 0.0 else fa
            if abs(fm) <= SNAP:
                return m
            if (fm < 0.0) == (fa < 0.0):
                a, fa = m, fm
            else:
                b = m
            tau = b
            if b - a <= 1e-16 * h:
                break
        return tau


def integrate(Z: PiecewiseSystem, seed: Point, t_max: float,
              box: float = 2.0, h: float = STEP_H,
              backward: bool = False) -> Trajectory:
    """Integrate the piecewise flow from a seed for orbit time t_max.

    Backward trajectories integrate the negated system forward (sample times
    remain non-negative; the direction is recorded on the trajectory).
    """
    W = Z.negate() if backward else Z
    eng = _Integrator(W, t_max, box, h)
    eng.run(seed)
    traj = Trajectory(seed=seed, direction=-1 if backward else 1,
                      samples=eng.samples, events=eng.events,
                      terminal=eng.terminal)
    return traj


# ---------------------------------------------------------------------------
# portraits and cycle detection
# ---------------------------------------------------------------------------

def phase_portrait(Z: PiecewiseSystem, box: float = 1.0,
                   seeds_per_quadrant: int = 3, seeds_per_branch: int = 2,
                   t_max: float = 5.0, h: float = STEP_H) -> list[Trajectory]:
    """Trajectories from a deterministic seed lattice: points along each
    quadrant diagonal and along each half-branch, each integrated in both
    time directions."""
    seeds: list[Point] = []
    inv_sqrt2 = 2.0 ** -0.5
    for s1, s2 in ((1, 1), (-1, 1), (-1, -1), (1, -1)):
        for k in range(1, seeds_per_quadrant + 1):
            r = box * k / (seeds_per_quadrant + 1)
            seeds.append((s1 * r * inv_sqrt2, s2 * r * inv_sqrt2))
    for branch in (1, 2):
        for half in (1, -1):
            for k in range(1, seeds_per_branch + 1):
                s = half * box * k / (seeds_per_branch + 1)
                seeds.append(branch_point(branch, s))
    out: list[Trajectory] = []
    for seed in seeds:
        for backward in (False, True):
            try:
                out.append(integrate(Z, seed, t_max, box=box, h=h,
                                     backward=backward))
            except (StepLimit, TooManyTangencies):
                continue
    return out


@dataclass(frozen=True)
class PseudoCycle:
    """Crossing cycle detected as a nontrivial fixed point of the full turn."""

    x_minus: float                # fixed point on Sigma2-
    x_plus: float                 # conjugate half-turn image on Sigma2+
    multiplier: float
    stable: bool | None
    hit_sliding: bool


def detect_pseudo_cycle(Z: PiecewiseSystem, radius: float = 0.2,
                        cells: int = 256) -> list[PseudoCycle]:
    """Scan the numeric full-turn map on (-radius, 0) for crossing cycles."""
    from .returnmap import fixed_points  # deferred to avoid an import cycle

    out = []
    for fp in fixed_points(Z, -radius, -radius / 1e6, cells=cells):
        out.append(PseudoCycle(fp.x, fp.conjugate, fp.multiplier, fp.stable,
                               fp.hit_sliding))
    return out
