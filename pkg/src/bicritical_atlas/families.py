"""Exact formulas and sphere-aware evaluation for the two map families.

Two families of degree-4 / degree-3 rational maps are supported:

* ``NEWTON`` -- the Newton iteration of the quartic (z^2-1)(z^2 - 2 Re(a) z + |a|^2),
  restricted to parameters where the two non-fixed critical points are complex
  conjugate.
* ``ANTIPODAL`` -- the antipode-preserving cubic z^2 (q - z) / (1 + conj(q) z).

The Newton map is evaluated through the cancellation-free quotient form

    N(z) = (3 z^4 - 4 Re(a) z^3 + (|a|^2 - 1) z^2 + |a|^2)
           / (4 z^3 - 6 Re(a) z^2 + 2 (|a|^2 - 1) z + 2 Re(a))

which is exactly z - f/f' but avoids loss of significance near the poles.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum

from .errors import DegenerateParameter, NonFiniteParameter, OutsideDomain

#: |z| beyond which a finite-chart point is renormalized to the w = 1/z chart.
CHART_SWITCH = 1e8

#: Default absolute tolerance for algebraic residuals.
RESIDUAL_TOL = 1e-10


class Family(Enum):
    NEWTON = "newton"
    ANTIPODAL = "antipodal"


class Region(Enum):
    IN_U = "InU"
    IN_CONJUGATE_U = "InConjugateU"
    OUTSIDE = "Outside"


class Chart(Enum):
    FINITE = "finite"
    INFINITY = "infinity"


@dataclass(frozen=True)
class SpherePoint:
    """A point of the Riemann sphere in one of two affine charts.

    For ``chart == INFINITY`` the coordinate ``z`` stores w = 1/zeta, so the
    point at infinity itself is ``SpherePoint(Chart.INFINITY, 0)``.
    """

    chart: Chart
    z: complex

    @staticmethod
    def finite(z: complex) -> "SpherePoint":
        z = complex(z)
        if abs(z) > CHART_SWITCH:
            return SpherePoint(Chart.INFINITY, 1.0 / z)
        return SpherePoint(Chart.FINITE, z)

    @staticmethod
    def infinity() -> "SpherePoint":
        return SpherePoint(Chart.INFINITY, 0j)

    def as_complex(self) -> complex:
        """Finite-chart coordinate; ``inf`` for points at/near infinity."""
        if self.chart is Chart.FINITE:
            return self.z
        if self.z == 0:
            return complex(math.inf, 0.0)
        return 1.0 / self.z

    def is_infinity(self) -> bool:
        return self.chart is Chart.INFINITY and self.z == 0


@dataclass(frozen=True)
class Parameter:
    """A tagged member of one of the two families."""

    family: Family
    value: complex
    in_region: bool = True  # Newton only: membership in the open region U

    def __post_init__(self):
        if not (math.isfinite(self.value.real) and math.isfinite(self.value.imag)):
            raise NonFiniteParameter(f"parameter {self.value!r} is not finite")


def region_membership(a: complex) -> tuple[Region, bool]:
    """Classify a Newton parameter against 2 Im(a)^2 - Re(a)^2 - 2 > 0.

    Returns (region, on_symmetry_locus). The symmetry locus is the part of the
    region on the imaginary axis; the test on Re(a) is exact on the input
    representation. Boundary parameters (equality) classify as OUTSIDE.
    """
    a = complex(a)
    if not (math.isfinite(a.real) and math.isfinite(a.imag)):
        raise NonFiniteParameter(f"{a!r} is not finite")
    disc = 2.0 * a.imag * a.imag - a.real * a.real - 2.0
    if disc <= 0.0:
        return Region.OUTSIDE, False
    if a.imag > 0.0:
        return Region.IN_U, a.real == 0.0
    if a.imag < 0.0:
        return Region.IN_CONJUGATE_U, False
    return Region.OUTSIDE, False


def newton_parameter(a: complex) -> Parameter:
    region, _ = region_membership(a)
    return Parameter(Family.NEWTON, complex(a), in_region=region is Region.IN_U)


def antipodal_parameter(q: complex) -> Parameter:
    return Parameter(Family.ANTIPODAL, complex(q))


def require_in_region(param: Parameter) -> None:
    if param.family is Family.NEWTON and not param.in_region:
        raise OutsideDomain(f"Newton parameter {param.value} lies outside the region U")


# ---------------------------------------------------------------------------
# finite-chart map values and derivatives
# ---------------------------------------------------------------------------


def _newton_rm(a: complex) -> tuple[float, float]:
    return a.real, a.real * a.real + a.imag * a.imag


def newton_num_den(a: complex, z: complex) -> tuple[complex, complex]:
    """Numerator/denominator of the cancellation-free quotient form."""
    r, m = _newton_rm(a)
    num = ((3.0 * z - 4.0 * r) * z + (m - 1.0)) * z * z + m
    den = ((4.0 * z - 6.0 * r) * z + 2.0 * (m - 1.0)) * z + 2.0 * r
    return num, den


def map_value(param: Parameter, z: complex) -> complex:
    """Finite-chart value; returns complex infinity at a pole."""
    if param.family is Family.NEWTON:
        num, den = newton_num_den(param.value, z)
        if den == 0:
            return complex(math.inf, 0.0)
        return num / den
    q = param.value
    den = 1.0 + q.conjugate() * z
    if den == 0:
        return complex(math.inf, 0.0)
    return z * z * (q - z) / den


def map_derivative(param: Parameter, z: complex) -> complex:
    """Finite-chart derivative of the family map."""
    if param.family is Family.NEWTON:
        r, m = _newton_rm(param.value)
        f = (z * z - 1.0) * (z * z - 2.0 * r * z + m)
        fpp = 12.0 * z * z - 12.0 * r * z + 2.0 * (m - 1.0)
        den = ((4.0 * z - 6.0 * r) * z + 2.0 * (m - 1.0)) * z + 2.0 * r
        return f * fpp / (den * den)
    q = param.value
    qc = q.conjugate()
    m = q.real * q.real + q.imag * q.imag
    den = 1.0 + qc * z
    return z * (2.0 * q + (m - 3.0) * z - 2.0 * qc * z * z) / (den * den)


def _infinity_chart_value_derivative(param: Parameter, w: complex) -> tuple[complex, complex]:
    """Value and derivative of the map conjugated to the w = 1/z chart."""
    if param.family is Family.NEWTON:
        a = param.value
        r, m = _newton_rm(a)
        # W(w) = w (4 - 6 r w + 2(m-1) w^2 + 2 r w^3) / (3 - 4 r w + (m-1) w^2 + m w^4)
        A = 4.0 - 6.0 * r * w + 2.0 * (m - 1.0) * w * w + 2.0 * r * w * w * w
        B = 3.0 - 4.0 * r * w + (m - 1.0) * w * w + m * w * w * w * w
        Ap = -6.0 * r + 4.0 * (m - 1.0) * w + 6.0 * r * w * w
        Bp = -4.0 * r + 2.0 * (m - 1.0) * w + 4.0 * m * w * w * w
        val = w * A / B
        deriv = (A + w * Ap) / B - w * A * Bp / (B * B)
        return val, deriv
    q = param.value
    qc = q.conjugate()
    # W(w) = w^2 (w + conj q) / (q w - 1)
    den = q * w - 1.0
    val = w * w * (w + qc) / den
    deriv = (3.0 * w * w + 2.0 * qc * w) / den - w * w * (w + qc) * q / (den * den)
    return val, deriv


def evaluate(param: Parameter, point: SpherePoint) -> tuple[SpherePoint, complex]:
    """Apply the family map to a sphere point.

    Returns ``(image, derivative)`` where the derivative is taken between the
    charts the input and output happen to live in.  In particular the fixed
    point at infinity of the Newton map reports its chart multiplier 4/3.
    """
    if point.chart is Chart.INFINITY:
        val, deriv = _infinity_chart_value_derivative(param, point.z)
        if abs(val) <= 1.0 / CHART_SWITCH:
            # output stays near infinity; keep the w-chart
            return SpherePoint(Chart.INFINITY, val), deriv
        zeta = 1.0 / val
        # derivative of (1/W) wrt w
        return SpherePoint.finite(zeta), -deriv / (val * val)

    z = point.z
    if param.family is Family.NEWTON:
        num, den = newton_num_den(param.value, z)
        if den == 0 or abs(num) > CHART_SWITCH * abs(den):
            # pole (or near-pole): report in the w = 1/z output chart
            if num == 0:
                raise ZeroDivisionError("degenerate quotient 0/0 in Newton map")
            # derivative of den/num in the output w = 1/z chart
            r, m = _newton_rm(param.value)
            nump = 12.0 * z * z * z - 12.0 * r * z * z + 2.0 * (m - 1.0) * z
            denp = 12.0 * z * z - 12.0 * r * z + 2.0 * (m - 1.0)
            dw = (denp * num - den * nump) / (num * num)
            w = den / num
            return SpherePoint(Chart.INFINITY, w), dw
        val = num / den
        return SpherePoint.finite(val), map_derivative(param, z)

    q = param.value
    den = 1.0 + q.conjugate() * z
    num = z * z * (q - z)
    if den == 0 or abs(num) > CHART_SWITCH * abs(den):
        if num == 0:
            raise ZeroDivisionError("degenerate quotient 0/0 in antipodal map")
        qc = q.conjugate()
        nump = 2.0 * z * q - 3.0 * z * z
        denp = qc
        dw = (denp * num - den * nump) / (num * num)
        return SpherePoint(Chart.INFINITY, den / num), dw
    val = num / den
    return SpherePoint.finite(val), map_derivative(param, z)


# ---------------------------------------------------------------------------
# critical points, poles, involutions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CriticalPair:
    """The two free (non-fixed) critical points, ordered by convention.

    Newton: ``c_minus == conj(c_plus)`` with ``Im(c_plus) > 0``.
    Antipodal: ``c_minus == -1/conj(c_plus)``; ``c_plus`` is a positive real
    multiple of q.
    """

    c_plus: complex
    c_minus: complex


def free_critical_points(param: Parameter) -> CriticalPair:
    if param.family is Family.NEWTON:
        require_in_region(param)
        a = param.value
        r, m = _newton_rm(a)
        # roots of f'' = 12 z^2 - 12 r z + 2(m - 1); discriminant < 0 inside U
        disc = 36.0 * r * r - 24.0 * (m - 1.0)
        root = cmath.sqrt(complex(disc, 0.0))
        c1 = (6.0 * r + root) / 12.0
        c2 = (6.0 * r - root) / 12.0
        c_plus, c_minus = (c1, c2) if c1.imag > 0 else (c2, c1)
        return CriticalPair(c_plus, c_minus)

    q = param.value
    if q == 0:
        raise DegenerateParameter("antipodal q = 0 has no free critical points")
    qc = q.conjugate()
    m = q.real * q.real + q.imag * q.imag
    # roots of -2 conj(q) z^2 + (|q|^2 - 3) z + 2 q
    s = m - 3.0
    root = cmath.sqrt(s * s + 16.0 * m)
    c1 = (s + root) / (4.0 * qc)
    c2 = (s - root) / (4.0 * qc)
    # c_plus is the positive real multiple of q
    if (c1 / q).real > 0:
        return CriticalPair(c1, c2)
    return CriticalPair(c2, c1)


@dataclass(frozen=True)
class PoleSet:
    """The three finite poles of a Newton map: one real, one conjugate pair."""

    p_real: float
    p_pair: complex  # upper-half-plane member


def newton_poles(a: complex) -> PoleSet:
    region, _ = region_membership(a)
    if region is not Region.IN_U:
        raise OutsideDomain(f"{a} is not in the region U")
    r, m = _newton_rm(complex(a))

    def fp(x):
        return ((4.0 * x - 6.0 * r) * x + 2.0 * (m - 1.0)) * x + 2.0 * r

    # f'(1) > 0 and f'(-1) < 0 inside U, so the unique real root is in (-1, 1)
    lo, hi = -1.0, 1.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if fp(mid) < 0.0:
            lo = mid
        else:
            hi = mid
    p_real = 0.5 * (lo + hi)
    # polish with Newton on the cubic
    for _ in range(5):
        d = (12.0 * p_real - 12.0 * r) * p_real + 2.0 * (m - 1.0)
        p_real -= fp(p_real) / d
    # deflate: 4 z^3 - 6 r z^2 + 2(m-1) z + 2 r = (z - p)(4 z^2 + b z + c)
    b = 4.0 * p_real - 6.0 * r
    c = 2.0 * (m - 1.0) + p_real * b
    disc = complex(b * b - 16.0 * c, 0.0)
    root = cmath.sqrt(disc)
    z1 = (-b + root) / 8.0
    z2 = (-b - root) / 8.0
    p_pair = z1 if z1.imag > 0 else z2
    return PoleSet(p_real, p_pair)


def involution(param: Parameter, point: SpherePoint) -> SpherePoint:
    """The antiholomorphic involution commuting with the family map.

    Newton: complex conjugation; antipodal: z -> -1/conj(z) (swaps 0 and
    infinity).
    """
    if param.family is Family.NEWTON:
        if point.chart is Chart.INFINITY:
            return SpherePoint(Chart.INFINITY, point.z.conjugate())
        return SpherePoint(Chart.FINITE, point.z.conjugate())
    # antipodal map eta
    if point.chart is Chart.INFINITY:
        # zeta = 1/w  ->  -1/conj(zeta) = -conj(w), finite
        return SpherePoint.finite(-point.z.conjugate())
    if point.z == 0:
        return SpherePoint.infinity()
    return SpherePoint.finite(-1.0 / point.z.conjugate())


def involution_c(param: Parameter, z: complex) -> complex:
    """Finite-chart involution; maps 0 to inf for the antipodal family."""
    if param.family is Family.NEWTON:
        return z.conjugate()
    if z == 0:
        return complex(math.inf, 0.0)
    return -1.0 / z.conjugate()


def fixed_targets(param: Parameter) -> list[complex]:
    """Finite superattracting fixed points attracting free critical orbits.

    For the antipodal family the point at infinity is handled separately by
    callers (its w-chart coordinate is 0).
    """
    if param.family is Family.NEWTON:
        a = param.value
        return [1.0 + 0j, -1.0 + 0j, a, a.conjugate()]
    return [0j]
