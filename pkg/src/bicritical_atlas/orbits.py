"""Critical-orbit classification, cycle detection, and center searches.

The classifier follows the free critical point c_plus only; the orbit of
c_minus is its image under the family involution, so every verdict about one
determines the other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

from .errors import (
    DerivativeSingular,
    NoConvergence,
    NoCycleFound,
    NoRootInRange,
    OrbitHitPole,
    PeriodCapExceeded,
)
from .families import (
    Family,
    Parameter,
    antipodal_parameter,
    fixed_targets,
    free_critical_points,
    involution_c,
    map_derivative,
    map_value,
    newton_parameter,
    require_in_region,
)

PERIOD_CAP = 64
NEAR_RETURN = 1e-6
CYCLE_RESIDUAL = 1e-12
TARGET_RADIUS = 1e-8
ESCAPE_RADIUS = 1e6

BUDGET_PREVIEW = 2_000
BUDGET_STANDARD = 20_000
BUDGET_ANALYSIS = 200_000


class ComponentType(Enum):
    PRINCIPAL = "Principal"
    CAPTURE = "Capture"
    MANDELBROT = "Mandelbrot"
    TRICORN = "Tricorn"
    UNKNOWN = "Unknown"


@dataclass
class Cycle:
    points: list
    period: int
    multiplier: complex
    self_symmetric: bool


@dataclass
class OrbitClassification:
    kind: str  # "fixed_basin" | "cycle" | "undecided"
    component_type: ComponentType
    target: object = None  # complex target, or the string "infinity"
    immediate: bool = False
    cycle: Cycle | None = None
    period: int = 0
    budget_spent: int = 0

    @property
    def decided(self) -> bool:
        return self.kind != "undecided"


def _step(param: Parameter, z: complex) -> complex:
    w = map_value(param, z)
    if not (math.isfinite(w.real) and math.isfinite(w.imag)):
        # exact pole hit; restart just off the pole is pointless, report huge
        return complex(1e30, 0.0)
    return w


def _converges_to(param: Parameter, z0: complex, target, budget: int) -> bool:
    """Does the orbit of z0 reach `target` (complex or "infinity") first?"""
    targets = fixed_targets(param)
    z = z0
    for _ in range(budget):
        if target == "infinity":
            if abs(z) > ESCAPE_RADIUS:
                return True
        for t in targets:
            if abs(z - t) < TARGET_RADIUS:
                return target != "infinity" and abs(complex(target) - t) < 1e-12
        if target != "infinity" and abs(z) > ESCAPE_RADIUS:
            return False
        z = _step(param, z)
    return False


def _immediate_by_segment(param: Parameter, start: complex, target, budget: int,
                          samples: int = 16) -> bool:
    """Pixel-grade immediacy heuristic.

    Samples the straight segment from the critical point to the target and
    requires every sample's orbit to converge to the same target.  For the
    antipodal target at infinity the test is transported through the
    involution, which maps that basin onto the basin of 0.
    """
    if target == "infinity":
        start = involution_c(param, start)
        target = 0j
    target = complex(target)
    per_point = max(200, budget // samples)
    for k in range(1, samples + 1):
        z = target + (start - target) * (k / samples)
        if not _converges_to(param, z, target, per_point):
            return False
    return True


def refine_periodic(param: Parameter, z0: complex, p: int) -> tuple[complex, complex]:
    """Polish a p-periodic point with Newton on F^p(z) - z.

    Returns (z*, multiplier of F^p at z*).
    """
    z = z0
    for _ in range(50):
        w = z
        deriv = 1.0 + 0j
        for _ in range(p):
            deriv *= map_derivative(param, w)
            w = _step(param, w)
        g = w - z
        gp = deriv - 1.0
        if abs(g) < CYCLE_RESIDUAL:
            return z, deriv
        if abs(gp) < 1e-14:
            raise DerivativeSingular(f"(F^{p})' - 1 vanished at {z}")
        z = z - g / gp
        if not (math.isfinite(z.real) and math.isfinite(z.imag)):
            raise NoConvergence("iterate left the finite plane")
    # final residual check
    w = z
    deriv = 1.0 + 0j
    for _ in range(p):
        deriv *= map_derivative(param, w)
        w = _step(param, w)
    if abs(w - z) < CYCLE_RESIDUAL:
        return z, deriv
    raise NoConvergence(f"no {p}-periodic point near {z0}")


def _cycle_points(param: Parameter, z: complex, p: int) -> list:
    pts = [z]
    for _ in range(p - 1):
        pts.append(_step(param, pts[-1]))
    return pts


def _minimal_period(param: Parameter, z: complex, p: int) -> int:
    for d in range(1, p):
        if p % d:
            continue
        w = z
        for _ in range(d):
            w = _step(param, w)
        if abs(w - z) < 1e-10:
            return d
    return p


def _self_symmetric(param: Parameter, pts: list) -> bool:
    for z in pts:
        img = involution_c(param, z)
        if not (math.isfinite(img.real) and math.isfinite(img.imag)):
            return False
        if min(abs(img - w) for w in pts) > 1e-8:
            return False
    return True


def detect_cycle(param: Parameter, orbit_tail: list) -> Cycle:
    """Find the attracting cycle an orbit tail has settled onto."""
    n = len(orbit_tail)
    for k in range(n):
        z0 = orbit_tail[k]
        scale = max(1.0, abs(z0))
        cap = min(PERIOD_CAP, n - k - 1)
        for p in range(1, cap + 1):
            if abs(orbit_tail[k + p] - z0) < NEAR_RETURN * scale:
                try:
                    zstar, mult = refine_periodic(param, z0, p)
                except (NoConvergence, DerivativeSingular):
                    continue
                p_min = _minimal_period(param, zstar, p)
                if p_min != p:
                    zstar, mult = refine_periodic(param, zstar, p_min)
                    p = p_min
                pts = _cycle_points(param, zstar, p)
                return Cycle(pts, p, mult, _self_symmetric(param, pts))
    raise NoCycleFound("no near-return within the period cap")


def classify(param: Parameter, budget: int = BUDGET_STANDARD) -> OrbitClassification:
    """Classify the fate of the free critical orbit of a parameter."""
    require_in_region(param)
    c = free_critical_points(param).c_plus
    targets = fixed_targets(param)
    antipodal = param.family is Family.ANTIPODAL

    z = c
    spent = 0
    tail: list = []
    tail_keep = 2 * PERIOD_CAP + 4

    def fixed_basin(target) -> OrbitClassification:
        if target == "infinity" or antipodal:
            immediate = _immediate_by_segment(param, c, target, budget)
        else:
            t = complex(target)
            if abs(t - 1.0) < 1e-12 or abs(t + 1.0) < 1e-12:
                immediate = _immediate_by_segment(param, c, t, budget)
            else:
                # basins of the conjugate root pair hold no free critical point
                immediate = False
        comp = ComponentType.PRINCIPAL if immediate else ComponentType.CAPTURE
        return OrbitClassification("fixed_basin", comp, target=target,
                                   immediate=immediate, period=1, budget_spent=spent)

    while spent < budget:
        z = _step(param, z)
        spent += 1
        if antipodal and abs(z) > ESCAPE_RADIUS:
            return fixed_basin("infinity")
        hit = None
        for t in targets:
            if abs(z - t) < TARGET_RADIUS:
                hit = t
                break
        if hit is not None:
            # confirm contraction for 10 further steps
            w, ok = z, True
            for _ in range(10):
                w = _step(param, w)
                if abs(w - hit) > TARGET_RADIUS:
                    ok = False
                    break
            spent += 10
            if ok:
                return fixed_basin(hit)
        tail.append(z)
        if len(tail) > tail_keep:
            del tail[0]
        if len(tail) == tail_keep and spent % tail_keep == 0 and spent > budget // 10:
            try:
                cyc = detect_cycle(param, tail)
            except (NoCycleFound, PeriodCapExceeded):
                continue
            if abs(cyc.multiplier) < 1.0 - 1e-9:
                if cyc.self_symmetric and cyc.period % 2 == 0:
                    comp = ComponentType.TRICORN
                elif cyc.self_symmetric and cyc.period == 1:
                    comp = ComponentType.MANDELBROT
                else:
                    comp = ComponentType.MANDELBROT
                return OrbitClassification("cycle", comp, cycle=cyc,
                                           period=cyc.period, budget_spent=spent)
    # last attempt on whatever tail we have
    if len(tail) > 2:
        try:
            cyc = detect_cycle(param, tail)
            if abs(cyc.multiplier) < 1.0 - 1e-9:
                comp = (ComponentType.TRICORN
                        if cyc.self_symmetric and cyc.period % 2 == 0
                        else ComponentType.MANDELBROT)
                return OrbitClassification("cycle", comp, cycle=cyc,
                                           period=cyc.period, budget_spent=spent)
        except (NoCycleFound, PeriodCapExceeded, NoConvergence):
            pass
    return OrbitClassification("undecided", ComponentType.UNKNOWN, budget_spent=spent)


# ---------------------------------------------------------------------------
# center searches
# ---------------------------------------------------------------------------


@dataclass
class CenterSearchDiagnostics:
    samples: int = 0
    pole_hits: list = field(default_factory=list)
    rejected: list = field(default_factory=list)


def center_search_newton(n: int, t_range: tuple[float, float], samples: int = 4000,
                         diagnostics: CenterSearchDiagnostics | None = None) -> list:
    """Superattracting tricorn centers a = it on the symmetry locus.

    On the locus the free critical point is purely imaginary and the orbit
    stays on the imaginary axis, so the period-2n center condition
    N^n(c) = -c reduces to one real equation in t.
    """
    diag = diagnostics if diagnostics is not None else CenterSearchDiagnostics()
    lo, hi = t_range
    lo = max(lo, 1.0 + 1e-9)

    def g(t: float) -> float:
        param = newton_parameter(1j * t)
        c = free_critical_points(param).c_plus
        z = c
        for _ in range(n):
            z = map_value(param, z)
            if not (math.isfinite(z.real) and math.isfinite(z.imag)) or abs(z) > 1e12:
                raise OrbitHitPole(f"orbit hit a pole at t = {t}")
        return z.imag + c.imag

    ts = [lo + (hi - lo) * k / samples for k in range(samples + 1)]
    vals: list = []
    for t in ts:
        diag.samples += 1
        try:
            vals.append(g(t))
        except OrbitHitPole:
            diag.pole_hits.append(t)
            vals.append(None)

    centers = []
    for (t0, v0), (t1, v1) in zip(zip(ts, vals), zip(ts[1:], vals[1:])):
        if v0 is None or v1 is None or v0 == 0.0 or v0 * v1 > 0.0:
            continue
        a, b, fa = t0, t1, v0
        try:
            for _ in range(200):
                mid = 0.5 * (a + b)
                fm = g(mid)
                if fm == 0.0 or (b - a) < 1e-15 * max(1.0, abs(mid)):
                    a = b = mid
                    break
                if fa * fm < 0.0:
                    b = mid
                else:
                    a, fa = mid, fm
        except OrbitHitPole:
            diag.pole_hits.append(0.5 * (a + b))
            continue
        t = 0.5 * (a + b)
        param = newton_parameter(1j * t)
        verdict = classify(param, budget=BUDGET_ANALYSIS)
        if (verdict.kind == "cycle"
                and verdict.component_type is ComponentType.TRICORN
                and verdict.period == 2 * n):
            centers.append(1j * t)
        else:
            diag.rejected.append((t, verdict.component_type.value, verdict.period))
    if not centers:
        raise NoRootInRange(f"no period-{2 * n} centers for t in {t_range}")
    return centers


def center_search_antipodal(r: int, seed_grid=None) -> list:
    """Tricorn/tongue centers of the antipodal family with return time r.

    Solves f_q^r(c_0(q)) = c_inf(q) as a two-real-dimensional root problem
    (the unknown enters both holomorphically and antiholomorphically) by
    damped Newton with a finite-difference Jacobian from each seed.
    """
    if seed_grid is None:
        vals = [0.2 + 0.475 * k for k in range(9)]
        seed_grid = [complex(x, y) for x in vals for y in vals]

    def G(q: complex) -> complex:
        param = antipodal_parameter(q)
        pair = free_critical_points(param)
        z = pair.c_plus
        for _ in range(r):
            z = map_value(param, z)
            if not (math.isfinite(z.real) and math.isfinite(z.imag)):
                return complex(1e6, 1e6)
        return z - pair.c_minus

    roots = []
    dropped = 0
    h = 1e-7
    for seed in seed_grid:
        q = seed
        ok = False
        try:
            for _ in range(80):
                v = G(q)
                if abs(v) < 1e-12:
                    ok = True
                    break
                gx = (G(q + h) - G(q - h)) / (2 * h)
                gy = (G(q + h * 1j) - G(q - h * 1j)) / (2 * h)
                # real 2x2 system [gx.re gy.re; gx.im gy.im] [dx dy] = -[v.re v.im]
                det = gx.real * gy.imag - gy.real * gx.imag
                if abs(det) < 1e-16:
                    break
                dx = (-v.real * gy.imag + v.imag * gy.real) / det
                dy = (-gx.real * v.imag + gx.imag * v.real) / det
                step = complex(dx, dy)
                lam = 1.0
                base = abs(v)
                moved = False
                for _ in range(25):
                    cand = q + lam * step
                    if abs(cand) > 1e-6 and abs(G(cand)) < base:
                        q = cand
                        moved = True
                        break
                    lam *= 0.5
                if not moved:
                    break
        except (ZeroDivisionError, OverflowError):
            pass
        if not ok:
            dropped += 1
            continue
        if any(abs(q - root) < 1e-8 for root in roots):
            continue
        verdict = classify(antipodal_parameter(q), budget=BUDGET_ANALYSIS)
        if (verdict.kind == "cycle"
                and verdict.component_type is ComponentType.TRICORN
                and verdict.period % 2 == 0
                and (2 * r) % verdict.period == 0):
            roots.append(q)
    if not roots:
        raise NoRootInRange(f"no antipodal centers with return time {r}")
    return roots
