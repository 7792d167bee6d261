"""End-to-end acceptance suite.

Each test class corresponds to one acceptance criterion (A1-A12) and pins
its tolerances; shared expensive artifacts are module-scoped fixtures.
"""

import cmath
import math
import time

import numpy as np
import pytest

from bicritical_atlas.errors import CuspReached
from bicritical_atlas.families import (
    Family,
    _infinity_chart_value_derivative,
    antipodal_parameter,
    free_critical_points,
    involution_c,
    map_value,
    newton_parameter,
    newton_poles,
)
from bicritical_atlas.orbits import (
    BUDGET_STANDARD,
    ComponentType,
    center_search_antipodal,
    center_search_newton,
    classify,
)
from bicritical_atlas.raster import (
    KIND_OUTSIDE,
    KIND_PRINCIPAL,
    KIND_TRICORN,
    KIND_UNDECIDED,
    classify_grid,
)


def random_in_U(rng, n):
    re = rng.uniform(-2.0, 2.0, n)
    im = np.sqrt((re * re + 2.0) / 2.0) + rng.uniform(0.05, 2.0, n)
    return re + 1j * im


class TestA1NewtonIdentities:
    def test_identities(self):
        start = time.time()
        rng = np.random.default_rng(11)
        for a in random_in_U(rng, 100):
            p = newton_parameter(complex(a))
            pair = free_critical_points(p)
            from bicritical_atlas.families import map_derivative
            assert abs(map_derivative(p, pair.c_plus)) < 1e-10
            assert abs(map_derivative(p, pair.c_minus)) < 1e-10
            poles = newton_poles(complex(a))
            assert -1.0 < poles.p_real < 1.0
            _, dw = _infinity_chart_value_derivative(p, 0j)
            assert abs(dw - 4.0 / 3.0) < 1e-10
        p = newton_parameter(complex(random_in_U(rng, 1)[0]))
        for z in rng.normal(size=100) + 1j * rng.normal(size=100):
            assert abs(map_value(p, np.conj(z)) - np.conj(map_value(p, z))) < 1e-10
        assert time.time() - start < 5.0


class TestA2AntipodalIdentities:
    def test_identities(self):
        start = time.time()
        rng = np.random.default_rng(12)
        qs = rng.normal(size=100) + 1j * rng.normal(size=100)
        qs = qs[np.abs(qs) > 0.1]
        for q in qs:
            p = antipodal_parameter(complex(q))
            assert map_value(p, 0j) == 0j
            w, _ = _infinity_chart_value_derivative(p, 0j)
            assert w == 0j                     # infinity is fixed
            pair = free_critical_points(p)
            assert abs(pair.c_minus - (-1.0 / np.conj(pair.c_plus))) < 1e-10
        p = antipodal_parameter(complex(qs[0]))
        zs = rng.normal(size=100) + 1j * rng.normal(size=100)
        for z in zs[np.abs(zs) > 0.05]:
            lhs = map_value(p, involution_c(p, z))
            rhs = involution_c(p, map_value(p, z))
            assert abs(lhs - rhs) < 1e-10 * max(1.0, abs(lhs))
        assert time.time() - start < 5.0


class TestA3SymmetryLocus:
    def test_odd_on_locus(self):
        rng = np.random.default_rng(13)
        for t in rng.uniform(1.001, 8.0, 20):
            p = newton_parameter(complex(0.0, t))
            for z in rng.normal(size=5) + 1j * rng.normal(size=5):
                assert abs(map_value(p, -z) + map_value(p, z)) < 1e-10


class TestA4Centers:
    def test_centers_found(self, newton_center_2, newton_center_3, capsys):
        start = time.time()
        for n, a_n in ((2, newton_center_2), (3, newton_center_3)):
            assert abs(a_n.real) < 1e-12       # on the symmetry locus
            p = newton_parameter(a_n)
            v = classify(p)
            assert v.component_type is ComponentType.TRICORN
            assert v.period == 2 * n
            z = v.cycle.points[0]
            w = z
            for _ in range(2 * n):
                w = map_value(p, w)
            assert abs(w - z) < 1e-10
        # n = 1 findings are reported without a pass/fail judgement
        ones = center_search_newton(1, (1.001, 10.0), samples=1000)
        print(f"period-2 center search on the locus returned {len(ones)} "
              f"candidates: {ones[:5]}")
        assert time.time() - start < 120.0


class TestA5OracleEquivalence:
    def test_standard_vs_10x_budget(self, newton_center_2):
        n = 32
        xs = np.linspace(newton_center_2.real - 0.15,
                         newton_center_2.real + 0.15, n)
        ys = np.linspace(newton_center_2.imag - 0.15,
                         newton_center_2.imag + 0.15, n)
        grid = xs[None, :] + 1j * ys[:, None]
        kind, period = classify_grid(Family.NEWTON, grid, BUDGET_STANDARD)
        okind, operiod = classify_grid(Family.NEWTON, grid,
                                       10 * BUDGET_STANDARD)
        decided = kind != KIND_UNDECIDED
        assert np.array_equal(kind[decided], okind[decided])
        assert np.array_equal(period[decided], operiod[decided])


class TestA6FatouCoordinates:
    def test_simple_datum(self, parabolic_datum_n2):
        from bicritical_atlas.parabolic import (
            attracting_fatou_coordinate,
            conjugate_critical_height,
            critical_ecalle_height,
            fatou_normalization,
            return_map,
        )
        d = parabolic_datum_n2
        assert d.petal_kind == "Simple"
        norm = fatou_normalization(d)
        assert abs(norm.beta.real - 0.5) < 1e-6
        c = free_critical_points(d.param).c_plus
        z = c
        for _ in range(8):
            z = return_map(d.param, z, d.period)
        p1, _ = attracting_fatou_coordinate(d, z, norm)
        p2, _ = attracting_fatou_coordinate(d, return_map(d.param, z, d.period),
                                            norm)
        assert abs(p2 - p1 - 1.0) < 1e-6
        h = critical_ecalle_height(d, norm).h
        assert abs(h + conjugate_critical_height(d, norm)) < 1e-6
        d1, _ = attracting_fatou_coordinate(d, c, None, entry=250.0)
        d2, _ = attracting_fatou_coordinate(d, c, None, entry=500.0)
        assert abs(d1 - d2) < 1e-6


class TestA7ArcTracing:
    def test_trace_and_cusps(self, parabolic_datum_n2):
        from bicritical_atlas.parabolic import (
            continue_to_cusp,
            critical_ecalle_height,
            datum_at_parameter,
            trace_arc,
        )
        traced = trace_arc(parabolic_datum_n2, [-0.5, 0.0, 0.5])
        hs = [s.h for s in traced]
        assert hs == sorted(hs) and len(set(hs)) == 3
        for sample, target in zip(traced, [-0.5, 0.0, 0.5]):
            oracle = datum_at_parameter(parabolic_datum_n2, sample.param,
                                        sample.point)
            assert abs(critical_ecalle_height(oracle).h - target) < 1e-4
        for sign in (1.0, -1.0):
            with pytest.raises(CuspReached):
                continue_to_cusp(parabolic_datum_n2, sign)


class TestA8Implosion:
    def test_transit_and_phase(self, newton_center_2, parabolic_datum_n2):
        from bicritical_atlas.parabolic import repelling_fatou_and_phase
        d = parabolic_datum_n2
        nvec = d.param.value - newton_center_2
        nvec /= abs(nvec)
        phases = []
        for dist in (1e-3, 1e-4, 1e-5):
            ps = repelling_fatou_and_phase(d.param.value + dist * nvec, d)
            phases.append(ps.lifted_phase)
            if dist <= 1e-4:
                assert abs(ps.transit_height - ps.incoming_height) < 1e-4
        assert phases[0] > phases[1] > phases[2]


@pytest.fixture(scope="module")
def a2_triple(newton_center_2):
    from bicritical_atlas.visibility import half_return_boundary_points
    param = newton_parameter(newton_center_2)
    return param, half_return_boundary_points(param)


class TestA9VisibilityAtA2:
    def test_three_coroots_one_invisible(self, a2_triple):
        from bicritical_atlas.visibility import TAG_COROOT, coroot_visibility
        param, triple = a2_triple
        assert triple.tags == [TAG_COROOT] * 3
        cycle = list(classify(param).cycle.points)
        states = {}
        for k, point in enumerate(triple.points):
            v = coroot_visibility(param, point, floor=1e-6, cycle=cycle)
            states[k] = v
        invisible = [k for k, v in states.items() if v.state == "Invisible"]
        visible = [k for k, v in states.items() if v.state == "Visible"]
        assert len(invisible) == 1 and len(visible) == 2
        assert invisible[0] == triple.symmetric_index
        for k in visible:
            assert states[k].witness in (1.0 + 0j, -1.0 + 0j)


@pytest.fixture(scope="module")
def tongue_center():
    return min(center_search_antipodal(1), key=abs)


class TestA10AntipodalTongue:
    def test_theorem_at_desk_scale(self, tongue_center):
        from bicritical_atlas.parabolic import find_boundary_parabolic, trace_arc
        from bicritical_atlas.visibility import (
            TAG_COROOT,
            arc_neighborhood_scan,
            coroot_visibility,
            half_return_boundary_points,
        )
        start = time.time()
        param = antipodal_parameter(tongue_center)
        triple = half_return_boundary_points(param)
        co = triple.points[triple.tags.index(TAG_COROOT)]
        v = coroot_visibility(param, co)
        assert v.state == "Invisible"

        # the bounded arc leaves the center toward the co-root, away from
        # the tongue root on the real axis.  Samples span most of the
        # non-bifurcating window (|h| < u_h ~ 0.496); the wider window and
        # dense rungs let the strip reach the decoration belt where small
        # tricorns cluster around Mandelbrot copies
        datum = find_boundary_parabolic(param, -1j, 2)
        samples = trace_arc(datum, list(np.linspace(-0.46, 0.46, 25)))
        rep = arc_neighborhood_scan(samples, window=2.5e-2, resolution=256,
                                    family=Family.ANTIPODAL, period=2)
        assert rep.principal_contact is False
        assert rep.capture_hits >= 1
        assert any(p > 2 for _, p in rep.tricorn_hits)

        # the root arcs carry their bare (principal-accessible) heights
        # toward the finite cusp: negative h for the right arc, mirrored
        # for its conjugate partner
        for direction, targets in ((1.0 + 0j, [-0.5, -0.4, -0.3, -0.2]),
                                   (-1.0 + 0j, [0.2, 0.3, 0.4, 0.5])):
            datum = find_boundary_parabolic(param, direction, 2)
            samples = trace_arc(datum, targets)
            rep = arc_neighborhood_scan(samples, family=Family.ANTIPODAL,
                                        period=2)
            assert rep.principal_contact is True
        assert time.time() - start < 600.0


class TestA11RegionFigure:
    def test_boundary_matches_hyperbola(self):
        from bicritical_atlas.render import (
            Viewport,
            WORLDS,
            render_parameter_view,
        )
        center, half = WORLDS[Family.NEWTON]
        size = 512
        viewport = Viewport(center, 2.0 * half / size, size, size)
        kind, _ = render_parameter_view(Family.NEWTON, viewport, "preview")
        grid = viewport.grid()
        ys = grid[:, 0].imag                   # decreasing downward
        step = viewport.scale
        good = 0
        total = 0
        for j in range(size):
            x = grid[0, j].real
            target = math.sqrt((x * x + 2.0) / 2.0)
            inside = kind[:, j] != KIND_OUTSIDE
            if not inside.any():
                continue
            # topmost inside pixel in this column marks the rendered boundary
            i = int(np.argmax(inside[::-1]))
            rendered = ys[size - 1 - i]
            total += 1
            if abs(rendered - target) <= 1.5 * step:
                good += 1
        assert total > 400
        assert good / total >= 0.95


class TestA12RenderingPerformance:
    def test_tile_byte_determinism(self):
        from bicritical_atlas.render import TileKey, render_parameter_tile
        key = TileKey(Family.NEWTON, "param", 3, 4, 2, "preview")
        assert render_parameter_tile(key).png_bytes() == \
            render_parameter_tile(key).png_bytes()

    def test_world_render_under_budget_and_thread_invariant(self):
        from bicritical_atlas.render import (
            Viewport,
            WORLDS,
            render_parameter_view,
        )
        center, half = WORLDS[Family.NEWTON]
        viewport = Viewport(center, 2.0 * half / 512, 512, 512)
        start = time.time()
        k1, p1 = render_parameter_view(Family.NEWTON, viewport, "standard",
                                       threads=1)
        elapsed = time.time() - start
        assert elapsed < 60.0
        k4, p4 = render_parameter_view(Family.NEWTON, viewport, "standard",
                                       threads=4)
        assert np.array_equal(k1, k4)
        assert np.array_equal(p1, p4)
