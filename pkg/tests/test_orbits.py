import math
import random

import pytest

from bicritical_atlas.errors import NoConvergence, OutsideDomain
from bicritical_atlas.families import (
    antipodal_parameter,
    free_critical_points,
    involution_c,
    map_value,
    newton_parameter,
)
from bicritical_atlas.orbits import (
    BUDGET_PREVIEW,
    BUDGET_STANDARD,
    ComponentType,
    center_search_newton,
    classify,
    detect_cycle,
    refine_periodic,
)


class TestClassify:
    def test_tricorn_center(self, newton_center_2):
        v = classify(newton_parameter(newton_center_2))
        assert v.kind == "cycle"
        assert v.component_type is ComponentType.TRICORN
        assert v.period == 4
        assert abs(v.cycle.multiplier) < 1e-8
        assert v.cycle.self_symmetric
        # orbit closure oracle
        p = newton_parameter(newton_center_2)
        c = free_critical_points(p).c_plus
        z = c
        for _ in range(4):
            z = map_value(p, z)
        assert abs(z - c) < 1e-10

    def test_antipodal_principal(self):
        v = classify(antipodal_parameter(0.01 + 0j))
        assert v.kind == "fixed_basin"
        assert v.target == 0j
        assert v.immediate
        assert v.component_type is ComponentType.PRINCIPAL

    def test_newton_outside_rejected(self):
        with pytest.raises(OutsideDomain):
            classify(newton_parameter(2.0 + 0j))

    def test_newton_principal_like(self):
        # deep in the region, far from tricorn structure, criticals land in
        # fixed basins of the polynomial roots
        v = classify(newton_parameter(0.2 + 2.0j))
        assert v.decided

    def test_tricorn_cycle_avoids_real_line(self, newton_center_2):
        v = classify(newton_parameter(newton_center_2))
        assert min(abs(z.imag) for z in v.cycle.points) > 1e-6

    def test_symmetry_reduction_exact(self):
        # the orbit of c_minus is the conjugate of the orbit of c_plus
        rng = random.Random(5)
        for _ in range(10):
            a = complex(rng.uniform(-1, 1), rng.uniform(1.5, 5.0))
            if 2 * a.imag ** 2 - a.real ** 2 - 2 <= 0:
                continue
            p = newton_parameter(a)
            pair = free_critical_points(p)
            zp, zm = pair.c_plus, pair.c_minus
            for _ in range(50):
                zp = map_value(p, zp)
                zm = map_value(p, zm)
                if not (math.isfinite(abs(zp)) and math.isfinite(abs(zm))):
                    break
                assert abs(zm - zp.conjugate()) < 1e-8 * max(1.0, abs(zp))

    def test_budget_doubling_stability(self, newton_center_2):
        a0 = newton_center_2
        for i in range(-2, 3):
            for j in range(-2, 3):
                a = a0 + complex(i, j) * 0.01
                if 2 * a.imag ** 2 - a.real ** 2 - 2 <= 0:
                    continue
                v1 = classify(newton_parameter(a), budget=BUDGET_PREVIEW)
                v2 = classify(newton_parameter(a), budget=2 * BUDGET_PREVIEW)
                if v1.decided:
                    assert v2.decided
                    assert v1.component_type == v2.component_type
                    assert v1.period == v2.period


class TestDetectAndRefine:
    def test_settled_fixed_orbit(self):
        p = newton_parameter(2j)
        orbit = [1.0 + 1e-9j] * 70
        cyc = detect_cycle(p, orbit)
        assert cyc.period == 1
        assert abs(cyc.multiplier) < 1e-10

    def test_center_cycle_contains_both_criticals(self, newton_center_2):
        p = newton_parameter(newton_center_2)
        c = free_critical_points(p).c_plus
        orbit = []
        z = c
        for _ in range(140):
            orbit.append(z)
            z = map_value(p, z)
        cyc = detect_cycle(p, orbit)
        assert cyc.period == 4
        assert min(abs(w - c) for w in cyc.points) < 1e-8
        assert min(abs(w - c.conjugate()) for w in cyc.points) < 1e-8

    def test_refine_fixed_root(self):
        p = newton_parameter(2j)
        z, mult = refine_periodic(p, 1.001 + 0j, 1)
        assert abs(z - 1.0) < 1e-10
        assert abs(mult) < 1e-10

    def test_refine_superattracting_cycle(self, newton_center_2):
        p = newton_parameter(newton_center_2)
        c = free_critical_points(p).c_plus
        z, mult = refine_periodic(p, c + 1e-4, 4)
        assert abs(z - c) < 1e-9
        assert abs(mult) < 1e-8

    def test_refine_wrong_seed_fails(self):
        p = antipodal_parameter(1.0 + 0j)
        with pytest.raises(NoConvergence):
            refine_periodic(p, 5.0 + 0j, 5)

    def test_quadratic_convergence(self):
        # track the error sequence by hand on a well-conditioned instance
        p = newton_parameter(2j)
        z = 1.01 + 0.003j
        errors = []
        from bicritical_atlas.families import map_derivative
        for _ in range(8):
            g = map_value(p, z) - z
            gp = map_derivative(p, z) - 1.0
            errors.append(abs(z - 1.0))
            if errors[-1] < 1e-14:
                break
            z = z - g / gp
        tail = [e for e in errors if 1e-14 < e < 1e-2]
        for e0, e1 in zip(tail, tail[1:]):
            assert e1 <= 10.0 * e0 * e0


class TestCenters:
    def test_newton_n2(self, newton_center_2):
        assert abs(newton_center_2.real) < 1e-10
        assert newton_center_2.imag > 1.0

    def test_newton_n3(self, newton_center_3):
        v = classify(newton_parameter(newton_center_3))
        assert v.component_type is ComponentType.TRICORN
        assert v.period == 6

    def test_newton_n1_reported(self):
        # period-2 findings are informational; existence is not asserted
        try:
            centers = center_search_newton(1, (1.001, 10.0), samples=1000)
        except Exception:
            centers = []
        for a in centers:
            v = classify(newton_parameter(a))
            assert v.component_type is ComponentType.TRICORN
            assert v.period == 2

    def test_antipodal_r1(self, antipodal_center_r1):
        q = antipodal_center_r1
        p = antipodal_parameter(q)
        pair = free_critical_points(p)
        assert abs(map_value(p, pair.c_plus) - pair.c_minus) < 1e-9
        assert abs(map_value(p, pair.c_minus) - pair.c_plus) < 1e-9
        v = classify(p)
        assert v.component_type is ComponentType.TRICORN
        assert v.period == 2
        # self-antipodal: eta maps the cycle set to itself
        for z in v.cycle.points:
            img = involution_c(p, z)
            assert min(abs(img - w) for w in v.cycle.points) < 1e-8
