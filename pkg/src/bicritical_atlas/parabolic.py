"""Parabolic boundary parameters, Fatou coordinates, Ecalle heights, arcs.

All coordinates are built from the return map F = (family map)^period at the
characteristic parabolic point z1.  Writing the local form as

    F(z) = z + A (z - z1)^2 + B (z - z1)^3 + C (z - z1)^4 + ...

the substitution w = -1/(A (z - z1)) conjugates F to

    w -> w + 1 + (1 - beta)/w + (1 + gamma - 2 beta)/w^2 + O(1/w^3)

with beta = B/A^2 and gamma = C/A^3.  The corrected Abel coordinate

    phi(w) = w - btilde Log(w) + d/w,   btilde = 1 - beta,
    d = ctilde - btilde^2 + btilde/2,   ctilde = 1 + gamma - 2 beta

satisfies phi(F(w)) = phi(w) + 1 + O(1/w^3), so iterating deep into the petal
and subtracting the step count converges to a Fatou coordinate with error
bounded by a convergent tail sum.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    BisectionFailed,
    ContinuationStalled,
    CuspReached,
    DepthExhausted,
    NoConvergence,
    NotEscaping,
    NotInPetal,
    RefinementDiverged,
    SplitPointsNotFound,
)
from .families import Parameter, free_critical_points, involution_c, map_derivative, map_value
from .orbits import (
    BUDGET_ANALYSIS,
    BUDGET_STANDARD,
    ComponentType,
    OrbitClassification,
    classify,
)

CUSP_TOL = 1e-8
PETAL_ENTRY = 250.0
PETAL_DEPTH_CAP = 400_000


def return_map(param: Parameter, z: complex, p: int) -> complex:
    for _ in range(p):
        z = map_value(param, z)
    return z


def return_map_with_derivative(param: Parameter, z: complex, p: int) -> tuple[complex, complex]:
    deriv = 1.0 + 0j
    for _ in range(p):
        deriv *= map_derivative(param, z)
        z = map_value(param, z)
    return z, deriv


def half_return(param: Parameter, z: complex, n: int) -> complex:
    """The antiholomorphic half-return sigma = involution after n steps."""
    return involution_c(param, return_map(param, z, n))


@dataclass
class ParabolicDatum:
    param: Parameter
    period: int  # 2n, period of the holomorphic return map
    parabolic_point: complex
    cycle: list
    petal_kind: str  # "Simple" | "Cusp"
    A: complex
    b: complex  # log-correction residue 1 - B/A^2
    coeffs: tuple  # (A, B, C)


@dataclass
class FatouNormalization:
    beta: complex
    shift: complex
    depth: int


@dataclass
class EcalleSample:
    param: complex
    h: float
    point: complex | None = None  # characteristic parabolic point, if known


@dataclass
class PhaseSample:
    param: complex
    escape_time: int
    lifted_phase: float
    transit_height: float
    incoming_height: float = 0.0


def _like(reference: Parameter, a: complex) -> Parameter:
    """A parameter of the same family as `reference` with a fresh value."""
    from .families import Family, region_membership, Region
    if reference.family is Family.NEWTON:
        return Parameter(Family.NEWTON, a,
                         in_region=region_membership(a)[0] is Region.IN_U)
    return Parameter(Family.ANTIPODAL, a)


# ---------------------------------------------------------------------------
# locating parabolic parameters
# ---------------------------------------------------------------------------


def _parabolic_residual(param_cls, a: complex, z: complex, p: int) -> np.ndarray:
    param = param_cls(a)
    w, dw = return_map_with_derivative(param, z, p)
    return np.array([(w - z).real, (w - z).imag, (dw - 1.0).real, (dw - 1.0).imag])


def refine_parabolic(param_cls, a0: complex, z0: complex, p: int,
                     tol: float = 1e-11, max_iter: int = 80) -> tuple[complex, complex]:
    """Project (a0, z0) onto the parabolic locus F^p(z) = z, (F^p)'(z) = 1.

    The solution set is one-real-dimensional, so the 4x4 Jacobian is rank
    deficient; the least-squares step moves transversally to the locus and
    leaves the tangential position alone.
    """
    x = np.array([z0.real, z0.imag, a0.real, a0.imag])
    h = 1e-7

    def residual(x):
        return _parabolic_residual(param_cls, complex(x[2], x[3]), complex(x[0], x[1]), p)

    r = residual(x)
    for _ in range(max_iter):
        if np.linalg.norm(r) < tol:
            break
        J = np.empty((4, 4))
        for j in range(4):
            e = np.zeros(4)
            e[j] = h
            J[:, j] = (residual(x + e) - residual(x - e)) / (2 * h)
        step, *_ = np.linalg.lstsq(J, -r, rcond=None)
        lam = 1.0
        base = np.linalg.norm(r)
        for _ in range(30):
            cand = x + lam * step
            rc = residual(cand)
            if np.linalg.norm(rc) < base:
                x, r = cand, rc
                break
            lam *= 0.5
        else:
            raise RefinementDiverged(f"stalled at residual {base:.2e}")
    if np.linalg.norm(r) >= max(tol, 1e-9):
        raise RefinementDiverged(f"final residual {np.linalg.norm(r):.2e}")
    return complex(x[2], x[3]), complex(x[0], x[1])


def _polish_parabolic(make_param, a0: complex, z0: complex, p: int,
                      max_iter: int = 60) -> tuple[complex, complex]:
    """Drive the parabolic residuals to machine precision.

    Alternates a 1D Newton solve for the point where (F^p)' = 1 with a
    least-squares parameter step killing F^p(z1) - z1.  The coordinate
    pipeline drifts linearly in the residual times the cube of the petal
    depth, so sloppy residuals here poison every downstream quantity.
    """
    h = 1e-7

    def z1_of(a: complex, z: complex) -> complex:
        return _unit_multiplier_point(make_param(a), z, p)

    a, z = a0, z0
    for _ in range(max_iter):
        z = z1_of(a, z)
        param = make_param(a)
        e = return_map(param, z, p) - z
        if abs(e) < 2e-15:
            return a, z

        def E(acand: complex) -> complex:
            zz = z1_of(acand, z)
            return return_map(make_param(acand), zz, p) - zz

        gx = (E(a + h) - E(a - h)) / (2 * h)
        gy = (E(a + h * 1j) - E(a - h * 1j)) / (2 * h)
        J = np.array([[gx.real, gy.real], [gx.imag, gy.imag]])
        rhs = -np.array([e.real, e.imag])
        step, *_ = np.linalg.lstsq(J, rhs, rcond=None)
        lam = 1.0
        improved = False
        for _ in range(25):
            cand = a + lam * complex(step[0], step[1])
            if abs(E(cand)) < abs(e):
                a = cand
                improved = True
                break
            lam *= 0.5
        if not improved:
            break
    z = z1_of(a, z)
    e = return_map(make_param(a), z, p) - z
    # the least-squares step stalls about a decade above the evaluation
    # noise; walk the last decade by direct coordinate sampling
    best = abs(e)
    for delta in (1e-13, 3e-14, 1e-14, 3e-15):
        moved = True
        while moved:
            moved = False
            for d in (delta, -delta, delta * 1j, -delta * 1j):
                cand = a + d
                zc = z1_of(cand, z)
                ec = return_map(make_param(cand), zc, p) - zc
                if abs(ec) < best:
                    a, z, best = cand, zc, abs(ec)
                    moved = True
    e = return_map(make_param(a), z, p) - z
    if abs(e) > 1e-12:
        raise RefinementDiverged(f"parabolic residual stuck at {abs(e):.2e}")
    return a, z


def local_coefficients(param: Parameter, z1: complex, p: int,
                       radius: float = 2e-2, samples: int = 128) -> tuple:
    """(A, B, C, D) of the return map at z1 via Cauchy integrals on a circle."""
    ang = np.exp(2j * np.pi * np.arange(samples) / samples)
    vals = np.array([return_map(param, z1 + radius * e, p) - z1 for e in ang])
    coeff = np.fft.fft(vals) / samples
    a1 = coeff[1] / radius
    if abs(a1 - 1.0) > 1e-5:
        raise RefinementDiverged(f"linear coefficient {a1} is not 1 at the parabolic point")
    A = coeff[2] / radius ** 2
    B = coeff[3] / radius ** 3
    C = coeff[4] / radius ** 4
    D = coeff[5] / radius ** 5
    return complex(A), complex(B), complex(C), complex(D)


def _unit_multiplier_point(param: Parameter, z: complex, p: int) -> complex:
    """Nearby point where (F^p)' = 1, by 1D Newton on the derivative.

    Near a parabolic parameter the fixed-point residual is insensitive to
    the point (its z-derivative is the multiplier minus one), so pinning
    the derivative recovers the parabolic point to machine precision even
    from a seed carrying forward-iteration roundoff.
    """
    h = 1e-7
    for _ in range(60):
        _, dw = return_map_with_derivative(param, z, p)
        g = dw - 1.0
        if abs(g) < 1e-14:
            return z
        _, dp = return_map_with_derivative(param, z + h, p)
        _, dm = return_map_with_derivative(param, z - h, p)
        d2 = (dp - dm) / (2 * h)
        if abs(d2) < 1e-12:
            break
        z = z - g / d2
    return z


def _characteristic_point(param: Parameter, cycle: list, p: int) -> complex:
    """Cycle point whose petal absorbs the free critical orbit."""
    c = free_critical_points(param).c_plus
    z = c
    for _ in range(60):
        z = return_map(param, z, p)
    return min(cycle, key=lambda w: abs(w - z))


def make_datum(param: Parameter, a: complex, z1: complex, p: int) -> ParabolicDatum:
    cycle = [z1]
    for _ in range(p - 1):
        cycle.append(map_value(param, cycle[-1]))
    z1 = _unit_multiplier_point(param, _characteristic_point(param, cycle, p), p)
    A, B, C, D = local_coefficients(param, z1, p)
    kind = "Simple" if abs(A) > CUSP_TOL else "Cusp"
    b = 1.0 - B / (A * A) if kind == "Simple" else 0j
    return ParabolicDatum(param, p, z1, cycle, kind, A, b, (A, B, C, D))


def find_boundary_parabolic(center_param: Parameter, direction: complex,
                            period: int) -> ParabolicDatum:
    """Walk from a component center to its boundary and pin the parabolic."""
    verdict = classify(center_param, budget=BUDGET_ANALYSIS)
    if not (verdict.component_type is ComponentType.TRICORN and verdict.period == period):
        raise ValueError(f"center does not classify Tricorn({period})")
    direction = direction / abs(direction)
    a0 = center_param.value

    # standard budget suffices for the bracketing scan; the final refinement
    # verifies the multiplier independently
    def same(a):
        v = classify(_like(center_param, a), budget=BUDGET_STANDARD)
        return (v.component_type is ComponentType.TRICORN and v.period == period), v

    s_lo, s_hi = 0.0, 0.05
    found = False
    for _ in range(12):
        ok, _ = same(a0 + s_hi * direction)
        if not ok:
            found = True
            break
        s_lo = s_hi
        s_hi *= 2.0
    if not found:
        raise BisectionFailed("no verdict change along the ray")
    cycle_seed = None
    # stop once the bracket seeds the Newton refinement; classification gets
    # very expensive right against the arc (near-parabolic orbits), and the
    # refinement owns the remaining distance anyway
    for _ in range(50):
        if s_hi - s_lo < 1e-8:
            break
        mid = 0.5 * (s_lo + s_hi)
        ok, v = same(a0 + mid * direction)
        if ok:
            s_lo = mid
            cycle_seed = v.cycle
        else:
            s_hi = mid
    if cycle_seed is None:
        _, v = same(a0 + s_lo * direction)
        if v.cycle is None:
            raise BisectionFailed("lost the attracting cycle near the boundary")
        cycle_seed = v.cycle
    a_near = a0 + s_lo * direction
    # seed the parabolic refinement from a point of the attracting cycle,
    # whose multiplier approaches 1 at the boundary
    z_seed = cycle_seed.points[0]
    make = lambda a: _like(center_param, a)
    a_star, z_star = refine_parabolic(make, a_near, z_seed, period)
    a_star, z_star = _polish_parabolic(make, a_star, z_star, period)
    # the residual transported to another cycle point grows by the partial
    # cycle derivative, so polish again at the characteristic point, which
    # is the one the Fatou coordinates are anchored to
    draft = make_datum(_like(center_param, a_star), a_star, z_star, period)
    a_star, z_star = _polish_parabolic(make, a_star, draft.parabolic_point, period)
    param = _like(center_param, a_star)
    w, dw = return_map_with_derivative(param, z_star, period)
    if abs(dw - 1.0) > 1e-6:
        raise RefinementDiverged(f"multiplier {dw} not within 1e-6 of 1")
    return make_datum(param, a_star, z_star, period)


def datum_at_parameter(reference: ParabolicDatum, a: complex, z_seed: complex) -> ParabolicDatum:
    """Rebuild a parabolic datum at a parameter known to lie on an arc."""
    make = lambda a_: _like(reference.param, a_)
    a2, z = _polish_parabolic(make, a, z_seed, reference.period)
    if abs(a2 - a) > 1e-8:
        raise RefinementDiverged(f"parameter {a} drifted to {a2} during polish")
    return make_datum(make(a2), a2, z, reference.period)


# ---------------------------------------------------------------------------
# attracting Fatou coordinate
# ---------------------------------------------------------------------------


def _phi(datum: ParabolicDatum, w: complex) -> complex:
    A, B, C, D = datum.coeffs
    beta = B / (A * A)
    gamma = C / (A * A * A)
    delta = D / (A * A * A * A)
    bt = 1.0 - beta
    ct = 1.0 + gamma - 2.0 * beta
    dt = 1.0 + beta * beta + 2.0 * gamma - 3.0 * beta - delta
    d = ct - bt * bt + bt / 2.0
    g = (dt - bt * ct + bt * bt - bt / 3.0 + d * (1.0 - bt)) / 2.0
    return w - bt * cmath.log(w) + d / w + g / (w * w)


def _to_w(datum: ParabolicDatum, z: complex) -> complex:
    return -1.0 / (datum.A * (z - datum.parabolic_point))


def attracting_fatou_raw(datum: ParabolicDatum, z: complex,
                         entry: float = PETAL_ENTRY) -> tuple[complex, int]:
    """Unnormalized Fatou coordinate and the iteration depth used."""
    if datum.petal_kind != "Simple":
        raise NotInPetal("cusp datum has no simple petal")
    param, p = datum.param, datum.period
    k = 0
    guard = 0
    while True:
        w = _to_w(datum, z)
        if w.real > entry:
            return _phi(datum, w) - k, k
        z = return_map(param, z, p)
        k += 1
        if not (math.isfinite(z.real) and math.isfinite(z.imag)):
            raise NotInPetal("orbit left the finite plane")
        if abs(z - datum.parabolic_point) > 10.0:
            guard += 1
            if guard > 50:
                raise NotInPetal("orbit wandered far from the parabolic point")
        if k > PETAL_DEPTH_CAP:
            raise DepthExhausted(f"no petal entry after {k} returns")


def fatou_normalization(datum: ParabolicDatum, probe: complex | None = None,
                        entry: float = PETAL_ENTRY) -> FatouNormalization:
    """Fix the imaginary gauge so the half-return acts as conj + 1/2."""
    if probe is None:
        probe = free_critical_points(datum.param).c_plus
    psi_z, k1 = attracting_fatou_raw(datum, probe, entry)
    sigma_z = half_return(datum.param, probe, datum.period // 2)
    psi_s, k2 = attracting_fatou_raw(datum, sigma_z, entry)
    beta = psi_s - psi_z.conjugate()
    shift = -1j * beta.imag / 2.0
    return FatouNormalization(beta, shift, max(k1, k2))


def attracting_fatou_coordinate(datum: ParabolicDatum, z: complex,
                                norm: FatouNormalization | None = None,
                                entry: float = PETAL_ENTRY) -> tuple[complex, FatouNormalization]:
    if norm is None:
        norm = fatou_normalization(datum, entry=entry)
    raw, _ = attracting_fatou_raw(datum, z, entry)
    return raw + norm.shift, norm


def critical_ecalle_height(datum: ParabolicDatum,
                           norm: FatouNormalization | None = None) -> EcalleSample:
    c = free_critical_points(datum.param).c_plus
    psi, norm = attracting_fatou_coordinate(datum, c, norm)
    return EcalleSample(datum.param.value, psi.imag)


def conjugate_critical_height(datum: ParabolicDatum,
                              norm: FatouNormalization | None = None) -> float:
    """Height measured from the other critical point, via its own orbit.

    The forward orbit of c_minus enters the same petal after an odd number of
    half-periods; the value is computed independently of the c_plus orbit.
    """
    c = free_critical_points(datum.param).c_minus
    z = return_map(datum.param, c, datum.period // 2)
    psi, _ = attracting_fatou_coordinate(datum, z, norm)
    return psi.imag


# ---------------------------------------------------------------------------
# arc tracing
# ---------------------------------------------------------------------------


def _arc_tangent(datum: ParabolicDatum) -> tuple[complex, complex]:
    """Unit tangent of the parabolic locus in (z, a) space at the datum."""
    a = datum.param.value
    z = datum.parabolic_point
    p = datum.period

    def residual(x):
        param = _like(datum.param, complex(x[2], x[3]))
        w, dw = return_map_with_derivative(param, complex(x[0], x[1]), p)
        zz = complex(x[0], x[1])
        return np.array([(w - zz).real, (w - zz).imag, (dw - 1.0).real, (dw - 1.0).imag])

    x = np.array([z.real, z.imag, a.real, a.imag])
    h = 1e-6
    J = np.empty((4, 4))
    for j in range(4):
        e = np.zeros(4)
        e[j] = h
        J[:, j] = (residual(x + e) - residual(x - e)) / (2 * h)
    _, _, vt = np.linalg.svd(J)
    t = vt[-1]
    dz = complex(t[0], t[1])
    da = complex(t[2], t[3])
    scale = math.hypot(abs(dz), abs(da))
    return dz / scale, da / scale


def _datum_at_offset(datum: ParabolicDatum, s: float,
                     dz: complex, da: complex) -> ParabolicDatum:
    a0 = datum.param.value + s * da
    z0 = datum.parabolic_point + s * dz
    make = lambda a: _like(datum.param, a)
    a, z = refine_parabolic(make, a0, z0, datum.period)
    a, z = _polish_parabolic(make, a, z, datum.period)
    return make_datum(make(a), a, z, datum.period)


def trace_arc(start: ParabolicDatum, h_targets: list, h_tol: float = 5e-5,
              max_steps: int = 200) -> list:
    """Continuation along the parabolic arc to prescribed critical heights."""
    if start.petal_kind != "Simple":
        raise CuspReached("start datum is a cusp", samples=[])
    samples = []
    current = start
    h_cur = critical_ecalle_height(current).h
    for target in h_targets:
        step = 0.02
        tries = 0
        while abs(h_cur - target) > h_tol:
            tries += 1
            if tries > max_steps:
                raise ContinuationStalled(f"could not reach h = {target}")
            dz, da = _arc_tangent(current)
            try:
                trial = _datum_at_offset(current, step, dz, da)
                if trial.petal_kind != "Simple":
                    raise CuspReached("hit a cusp during continuation", samples=samples)
                h_trial = critical_ecalle_height(trial).h
            except CuspReached:
                raise
            except (RefinementDiverged, NotInPetal, DepthExhausted, NoConvergence):
                step *= 0.5
                if abs(step) < 1e-12:
                    raise CuspReached("arc ran out of simple parabolics", samples=samples)
                continue
            dh = h_trial - h_cur
            if abs(dh) < 1e-12:
                step *= 2.0
                if abs(step) > 1.0:
                    raise CuspReached("height stopped responding", samples=samples)
                continue
            # secant step toward the target, clamped for robustness
            want = step * (target - h_cur) / dh
            if abs(want) > 4 * abs(step):
                want = 4 * abs(step) * (1 if want > 0 else -1)
            if (h_trial - target) * (h_cur - target) <= 0 or abs(h_trial - target) < abs(h_cur - target):
                current, h_cur = trial, h_trial
            step = want
        samples.append(EcalleSample(current.param.value, h_cur, current.parabolic_point))
    return samples


def continue_to_cusp(start: ParabolicDatum, direction_sign: float,
                     step: float = 0.05, max_steps: int = 400) -> list:
    """March along the arc until the simple-parabolic structure degenerates.

    Returns the height samples gathered before CuspReached, which is raised
    with those samples attached.
    """
    samples = []
    current = start
    dz_prev = da_prev = None
    s = direction_sign * step
    for _ in range(max_steps):
        dz, da = _arc_tangent(current)
        if da_prev is not None:
            # keep a consistent orientation along the arc
            if (dz * dz_prev.conjugate() + da * da_prev.conjugate()).real < 0:
                dz, da = -dz, -da
        elif direction_sign < 0:
            dz, da = -dz, -da
        try:
            nxt = _datum_at_offset(current, abs(s), dz, da)
        except (RefinementDiverged, NoConvergence):
            s *= 0.5
            if abs(s) < 1e-10:
                raise CuspReached("refinement collapsed at the arc end", samples=samples)
            continue
        if abs(nxt.A) < 10 * CUSP_TOL or abs(nxt.param.value - current.param.value) < 1e-13:
            raise CuspReached("quadratic coefficient degenerated", samples=samples)
        try:
            h = critical_ecalle_height(nxt).h
        except (NotInPetal, DepthExhausted):
            raise CuspReached("petal dynamics degenerated", samples=samples)
        samples.append(EcalleSample(nxt.param.value, h))
        dz_prev, da_prev = dz, da
        current = nxt
        if abs(h) > 25.0:
            # heights blow up approaching the cusp ends of an arc
            raise CuspReached("height diverged toward the arc end", samples=samples)
    raise ContinuationStalled("no cusp found within the step budget")


# ---------------------------------------------------------------------------
# perturbed (outgoing) coordinates
# ---------------------------------------------------------------------------


def _split_periodic_points(param: Parameter, z1: complex, p: int) -> tuple[complex, complex]:
    """The two simple periodic points a simple parabolic splits into."""
    roots = []
    offsets = [0.0, 3e-4, -3e-4, 3e-4j, -3e-4j, (2e-4 + 2e-4j), (-2e-4 - 2e-4j),
               1e-3, -1e-3, 1e-3j, -1e-3j]
    for off in offsets:
        z = z1 + off
        try:
            for _ in range(60):
                w, dw = return_map_with_derivative(param, z, p)
                g = w - z
                if abs(g) < 1e-13:
                    break
                gp = dw - 1.0
                if abs(gp) < 1e-14:
                    break
                z = z - g / gp
            else:
                continue
        except (OverflowError, ZeroDivisionError):
            continue
        if abs(z - z1) < 0.3 and all(abs(z - r) > 1e-9 for r in roots):
            roots.append(z)
        if len(roots) >= 2:
            break
    if len(roots) < 2:
        raise SplitPointsNotFound(f"found {len(roots)} split points near {z1}")
    return roots[0], roots[1]


def _flow_model(param: Parameter, z_plus: complex, z_minus: complex, p: int,
                degree: int = 5):
    """Local model of F^p(z) - z near the gate, as a log-sum flow time.

    Interpolating the displacement P(z) = F^p(z) - z by a polynomial, the
    time function of the flow dz/dt = P is sum 1/P'(r_i) log(z - r_i).  The
    time-1 flow differs from the map at second order in P; the standard
    correction replaces the field by P (1 - P'/2 + ...), whose reciprocal
    integrates to an extra (1/2) log P(z), i.e. simply +1/2 on every residue.
    """
    m = 0.5 * (z_plus + z_minus)
    radius = max(6.0 * abs(z_plus - z_minus), 1e-4)
    samples = 64
    ang = np.exp(2j * np.pi * np.arange(samples) / samples)
    vals = np.array([return_map(param, m + radius * e, p) - (m + radius * e) for e in ang])
    coeff = np.fft.fft(vals) / samples
    c = [coeff[j] / radius ** j for j in range(degree + 1)]
    poly = np.array(c[::-1])  # highest degree first, in u = z - m
    roots_u = np.roots(poly)
    roots = [m + complex(r) for r in roots_u]
    roots.sort(key=lambda r: min(abs(r - z_plus), abs(r - z_minus)))
    dpoly = np.polyder(poly)
    alphas = [1.0 / complex(np.polyval(dpoly, r - m)) + 0.5 for r in roots]
    return roots, alphas


def _flow_time(roots, alphas, z: complex) -> complex:
    return sum(al * cmath.log(z - r) for al, r in zip(alphas, roots))


def repelling_fatou_and_phase(param_value: complex, reference: ParabolicDatum,
                              depth: int = 200_000) -> PhaseSample:
    """Escape time, lifted phase, and transit height near a parabolic arc."""
    param = _like(reference.param, param_value)
    p = reference.period
    verdict = classify(param, budget=BUDGET_ANALYSIS)
    if (verdict.component_type is ComponentType.TRICORN and verdict.period == p):
        raise NotEscaping(f"{param_value} still classifies Tricorn({p})")

    z_plus, z_minus = _split_periodic_points(param, reference.parabolic_point, p)
    roots, alphas = _flow_model(param, z_plus, z_minus, p)
    gate = 0.5 * (z_plus + z_minus)

    c = free_critical_points(param).c_plus
    # accumulate the flow time branch-safely along the orbit of c
    orbit = [c]
    t = [_flow_time(roots, alphas, c)]
    gate_index = 0
    gate_dist = abs(c - gate)
    escape_guard = 0
    for k in range(depth):
        z_next = map_value(param, orbit[-1])
        for _ in range(p - 1):
            z_next = map_value(param, z_next)
        if not (math.isfinite(z_next.real) and math.isfinite(z_next.imag)):
            raise NotEscaping("orbit left the finite plane before escaping")
        inc = sum(al * cmath.log((z_next - r) / (orbit[-1] - r))
                  for al, r in zip(alphas, roots))
        t.append(t[-1] + inc)
        orbit.append(z_next)
        d = abs(z_next - gate)
        if d < gate_dist:
            gate_dist = d
            gate_index = len(orbit) - 1
        if len(orbit) > 3 and d > 0.5 and abs(orbit[-1] - reference.parabolic_point) > 0.5:
            escape_guard += 1
            if escape_guard > 6:
                break
    else:
        raise NotEscaping("orbit never left the parabolic region")

    if gate_index == 0 or gate_index >= len(orbit) - 1:
        raise NotEscaping("orbit did not transit through the gate")

    # one shared gauge for the incoming and outgoing coordinates: the real
    # part is anchored at the gate passage, the imaginary part through the
    # half-return relation psi(sigma z) = conj(psi z) + 1/2 probed on the
    # incoming side; using a single gauge lets branch ambiguities cancel in
    # the transit comparison
    t_gate = t[gate_index].real
    in_idx = max(1, gate_index - max(3, gate_index // 10))
    zin = orbit[in_idx]
    sig = half_return(param, zin, p // 2)
    t_sig = _flow_time(roots, alphas, sig)
    beta_im = (t_sig - t[in_idx].conjugate()).imag
    shift_im = -beta_im / 2.0

    def psi(idx: int) -> complex:
        return complex(t[idx].real - t_gate, t[idx].imag + shift_im)

    incoming_height = psi(in_idx).imag

    k_a = None
    for idx in range(gate_index, len(orbit)):
        if psi(idx).real >= 0.0:
            k_a = idx
            break
    if k_a is None:
        raise NotEscaping("outgoing real part never reached 0")

    esc = psi(k_a)
    return PhaseSample(param_value, k_a, esc.real - k_a, esc.imag, incoming_height)
