"""Plain-dict report builders shared by the CLI and the HTTP service.

Both front ends emit exactly these records, so their outputs agree
field-for-field by construction.
"""

from __future__ import annotations

import cmath

from .families import Family, antipodal_parameter, newton_parameter
from .orbits import BUDGET_ANALYSIS, BUDGET_PREVIEW, BUDGET_STANDARD, classify

TIER_BUDGETS = {
    "preview": BUDGET_PREVIEW,
    "standard": BUDGET_STANDARD,
    "analysis": BUDGET_ANALYSIS,
}


def parse_family(text: str) -> Family:
    try:
        return Family(text)
    except ValueError:
        raise ValueError(f"unknown family {text!r}") from None


def parse_param(text: str) -> complex:
    try:
        re_s, im_s = text.split(",")
        return complex(float(re_s), float(im_s))
    except ValueError:
        raise ValueError(f"cannot parse parameter {text!r}, expected RE,IM") from None


def make_parameter(family: Family, value: complex):
    if family is Family.NEWTON:
        return newton_parameter(value)
    return antipodal_parameter(value)


def _c(z: complex | None):
    return None if z is None else [z.real, z.imag]


def classification_record(family: Family, value: complex,
                          tier: str = "standard") -> dict:
    """One structured classification record, the unit of CLI/service parity."""
    record = {"family": family.value, "parameter": _c(value), "tier": tier}
    param = make_parameter(family, value)
    if family is Family.NEWTON and not param.in_region:
        record.update(verdict="OutsideDomain", kind="outside", period=0,
                      multiplier=None, self_symmetric=None, budget_spent=0)
        return record
    v = classify(param, budget=TIER_BUDGETS[tier])
    if v.kind == "fixed_basin":
        verdict = v.component_type.value
        multiplier = None
        self_symmetric = None
    elif v.kind == "cycle":
        verdict = v.component_type.value
        multiplier = _c(v.cycle.multiplier)
        self_symmetric = v.cycle.self_symmetric
    else:
        verdict = "Undecided"
        multiplier = None
        self_symmetric = None
    record.update(verdict=verdict, kind=v.kind, period=v.period,
                  multiplier=multiplier, self_symmetric=self_symmetric,
                  budget_spent=v.budget_spent)
    return record


def arc_trace_records(family: Family, center: complex, direction: complex,
                      period: int, targets: list) -> list:
    from .parabolic import find_boundary_parabolic, return_map_with_derivative, trace_arc
    datum = find_boundary_parabolic(make_parameter(family, center),
                                    direction, period)
    out = []
    for sample in trace_arc(datum, list(targets)):
        _, dw = return_map_with_derivative(
            make_parameter(family, sample.param), sample.point, period)
        out.append({"parameter": _c(sample.param), "h": sample.h,
                    "multiplier_residual": abs(dw - 1.0),
                    "petal_kind": datum.petal_kind})
    return out


def visibility_record(family: Family, value: complex) -> dict:
    from .visibility import coroot_visibility, half_return_boundary_points
    param = make_parameter(family, value)
    triple = half_return_boundary_points(param)
    cycle = list(classify(param).cycle.points)
    verdicts = []
    for point in triple.points:
        v = coroot_visibility(param, point, cycle=cycle)
        verdicts.append({"point": _c(point), "state": v.state,
                         "witness": _c(v.witness), "floor": v.floor})
    return {"family": family.value, "parameter": _c(value),
            "tags": triple.tags, "symmetric_index": triple.symmetric_index,
            "verdicts": verdicts}


def scan_record(family: Family, center: complex, direction: complex,
                period: int, targets: list, window: float = 1e-2) -> dict:
    from .parabolic import find_boundary_parabolic, trace_arc
    from .visibility import arc_neighborhood_scan
    datum = find_boundary_parabolic(make_parameter(family, center),
                                    direction, period)
    samples = trace_arc(datum, list(targets))
    rep = arc_neighborhood_scan(samples, window=window, family=family,
                                period=period)
    return {"family": family.value,
            "arc_segment": [_c(p) for p in rep.arc_segment],
            "principal_contact": rep.principal_contact,
            "capture_hits": rep.capture_hits,
            "capture_samples": [_c(p) for p in rep.capture_samples],
            "tricorn_hits": [{"parameter": _c(p), "period": n}
                             for p, n in rep.tricorn_hits],
            "mandelbrot_hits": [{"parameter": _c(p), "period": n}
                                for p, n in rep.mandelbrot_hits],
            "h_window": list(rep.h_window)}
