import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from steklov_iso import geometry as geo
from steklov_iso.errors import DegenerateDomain, IntegrabilityViolation, OriginOnBoundary


def random_symmetric_polygon(rng, n_half=None):
    """Centrally symmetric star-shaped polygon around the origin."""
    n_half = n_half or int(rng.integers(2, 7))
    t = np.sort(rng.uniform(0, math.pi, n_half))
    t = np.concatenate([t, t + math.pi])
    r = rng.uniform(0.5, 2.0, n_half)
    r = np.concatenate([r, r])
    return geo.PolygonDomain(np.c_[r * np.cos(t), r * np.sin(t)])


def random_polygon(rng):
    """Star-shaped polygon around a random interior point (origin possibly outside)."""
    n = int(rng.integers(3, 9))
    t = np.sort(rng.uniform(0, 2 * math.pi, n))
    r = rng.uniform(0.4, 1.5, n)
    c = rng.uniform(-1, 1, 2)
    return geo.PolygonDomain(c + np.c_[r * np.cos(t), r * np.sin(t)])


def monte_carlo(dom, fn, n, rng):
    lo = dom.V.min(axis=0)
    hi = dom.V.max(axis=0)
    p = rng.uniform(lo, hi, size=(n, 2))
    vals = np.where(dom.contains(p), fn(p), 0.0)
    box = float(np.prod(hi - lo))
    return box * vals.mean(), box * vals.std() / math.sqrt(n)


class TestDomains:
    def test_reorients_clockwise(self):
        dom = geo.PolygonDomain([[-1, -1], [-1, 1], [1, 1], [1, -1]])
        assert geo.weighted_volume(dom, 0) == pytest.approx(4.0)

    def test_self_intersecting(self):
        with pytest.raises(DegenerateDomain):
            geo.PolygonDomain([[0, 0], [1, 1], [1, 0], [0, 1]])

    def test_too_few_vertices(self):
        with pytest.raises(DegenerateDomain):
            geo.PolygonDomain([[0, 0], [1, 0]])

    def test_star_nonpositive_radius(self):
        with pytest.raises(DegenerateDomain):
            geo.StarDomain((0.5, 0.0, 0.8))

    def test_spec_roundtrip(self):
        for dom in (geo.square(1.0), geo.cross(), geo.StarDomain((1.0, 0.0, 0.3), (0.0, 0.1))):
            again = geo.domain_from_spec(dom.to_spec())
            assert geo.weighted_volume(again, 0.5) == pytest.approx(geo.weighted_volume(dom, 0.5), rel=1e-14)

    def test_origin_on_boundary(self):
        dom = geo.PolygonDomain([[0, 0], [1, 0], [1, 1], [0, 1]])
        with pytest.raises(OriginOnBoundary):
            geo.require_origin_off_boundary(dom)
        with pytest.raises(OriginOnBoundary):
            geo.weighted_perimeter(dom, 1.0)

    def test_containment(self):
        dom = geo.cross()
        inside = dom.contains(np.array([[0.0, 0.0], [0.9, 0.0], [0.9, 0.9]]))
        assert inside.tolist() == [True, True, False]


class TestMeasures:
    def test_unit_disc(self):
        d = geo.disc(1.0)
        assert geo.weighted_volume(d, 0) == pytest.approx(math.pi, rel=1e-12)
        assert geo.weighted_perimeter(d, 0) == pytest.approx(2 * math.pi, rel=1e-12)

    @pytest.mark.parametrize("R,ell,k", [(0.5, -1.5, -1.2), (2.0, 1.0, 3.0), (3.0, 2.7, -0.5)])
    def test_disc_closed_forms(self, R, ell, k):
        d = geo.disc(R)
        assert geo.weighted_volume(d, ell) == pytest.approx(2 * math.pi * R ** (ell + 2) / (ell + 2), rel=1e-12)
        assert geo.weighted_perimeter(d, k) == pytest.approx(2 * math.pi * R ** (k + 1), rel=1e-12)

    def test_square(self):
        sq = geo.square(1.0)
        assert geo.weighted_volume(sq, 0) == pytest.approx(4.0, rel=1e-14)
        assert geo.weighted_perimeter(sq, 0) == pytest.approx(8.0, rel=1e-14)

    def test_square_radial_moment(self):
        # ∫_{[-1,1]²}|x| dx = (4/3)(√2 + asinh 1)
        exact = 4.0 / 3.0 * (math.sqrt(2) + math.asinh(1.0))
        assert geo.weighted_volume(geo.square(1.0), 1.0) == pytest.approx(exact, rel=1e-12)

    def test_origin_outside(self):
        # [0,2]² is twice the first quadrant of [-1,1]², and |x| has degree 1
        quarter = (4.0 / 3.0 * (math.sqrt(2) + math.asinh(1.0))) / 4.0
        dom = geo.square(1.0, center=(1.0, 1.0))
        assert geo.weighted_volume(dom, 1.0) == pytest.approx(8.0 * quarter, rel=1e-12)

    def test_nonintegrable(self):
        with pytest.raises(IntegrabilityViolation):
            geo.weighted_volume(geo.square(1.0), -2.0)

    @pytest.mark.parametrize("vol,ell,R", [(math.pi, 0, 1.0), (4.0, 0, 2 / math.sqrt(math.pi))])
    def test_equivalent_radius(self, vol, ell, R):
        assert geo.equivalent_radius(vol, ell, 2) == pytest.approx(R, rel=1e-14)

    @pytest.mark.parametrize("ell", [-1.5, -1.0, 0.0, 1.0, 2.7])
    def test_radius_roundtrip(self, ell):
        for R in (0.3, 1.0, 3.0):
            vol = geo.weighted_volume(geo.disc(R), ell)
            assert geo.equivalent_radius(vol, ell, 2) == pytest.approx(R, rel=1e-10)
            assert geo.ball_weighted_volume(geo.equivalent_radius(vol, ell, 2), ell, 2) == pytest.approx(vol, rel=1e-12)

    @pytest.mark.parametrize("seed", range(4))
    def test_monte_carlo(self, seed):
        rng = np.random.default_rng(seed)
        dom = random_polygon(rng)
        ell = 0.7
        est, se = monte_carlo(dom, lambda p: np.linalg.norm(p, axis=1) ** ell, 10**6, rng)
        assert abs(geo.weighted_volume(dom, ell) - est) <= 3 * se

    @pytest.mark.parametrize("seed", range(3))
    def test_perimeter_monte_carlo(self, seed):
        # uniform sampling along the boundary
        rng = np.random.default_rng(100 + seed)
        dom = random_polygon(rng)
        if dom.origin_distance() < 0.05:
            pytest.skip("origin too close to the boundary for the |x|^k sampler")
        k = -0.6
        edges = list(dom.edges())
        lens = np.array([np.linalg.norm(b - a) for a, b in edges])
        n = 10**6
        which = rng.choice(len(edges), size=n, p=lens / lens.sum())
        t = rng.uniform(size=n)
        A = np.array([a for a, _ in edges])[which]
        B = np.array([b for _, b in edges])[which]
        vals = np.linalg.norm(A + t[:, None] * (B - A), axis=1) ** k * lens.sum()
        est, se = vals.mean(), vals.std() / math.sqrt(n)
        assert abs(geo.weighted_perimeter(dom, k) - est) <= 3 * se

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 10**6), st.floats(0.2, 5.0), st.floats(-0.9, 3.0))
    def test_dilation(self, seed, t, k):
        dom = random_symmetric_polygon(np.random.default_rng(seed))
        assert geo.weighted_perimeter(dom.scaled(t), k) == pytest.approx(t ** (k + 1) * geo.weighted_perimeter(dom, k), rel=1e-10)
        assert geo.weighted_volume(dom.scaled(t), k) == pytest.approx(t ** (k + 2) * geo.weighted_volume(dom, k), rel=1e-10)

    def test_star_dilation(self):
        dom = geo.StarDomain((1.0, 0.0, 0.2, 0.0, 0.1))
        assert geo.weighted_perimeter(dom.scaled(1.7), 0.4) == pytest.approx(1.7**1.4 * geo.weighted_perimeter(dom, 0.4), rel=1e-10)

    def test_measure_radius_flat(self):
        assert geo.measure_radius(math.pi * 4, lambda r: np.ones_like(r)) == pytest.approx(2.0, rel=1e-12)


class TestSymmetry:
    def test_square(self):
        cert = geo.symmetry_certificate(geo.square(1.0))
        assert cert.s1.status == "analytic" and cert.s2.status == "analytic"

    def test_shifted_square(self):
        assert geo.check_S1(geo.square(1.0, center=(1.0, 1.0))).status == "fail"

    def test_even_star(self):
        dom = geo.StarDomain((1.0, 0.0, 0.3))
        assert geo.check_S1(dom).status == "analytic"
        assert geo.check_S2(dom).status == "fail"

    def test_quarter_turn_star(self):
        assert geo.check_S2(geo.StarDomain((1.0, 0, 0, 0, 0.15))).status == "analytic"

    def test_rectangle(self):
        rect = geo.rectangle(2.0, 1.0)
        assert geo.check_S1(rect).passed
        assert geo.check_S2(rect).status == "fail"
        arcs = geo.circle_arcs(rect, 1.5)
        first, second, length = geo.arc_moments(1.5, arcs)
        assert abs(second[0, 0] - second[1, 1]) > 0.1

    def test_disc(self):
        assert geo.check_S2(geo.disc(1.0)).status == "analytic"

    def test_numeric_path(self):
        # a regular hexagon is not quarter-turn invariant, yet its arc moments are isotropic
        t = np.linspace(0, 2 * math.pi, 7)[:-1] + 0.1
        hexagon = geo.PolygonDomain(np.c_[np.cos(t), np.sin(t)])
        res = geo.check_S2(hexagon)
        assert res.status == "numeric"
        assert res.max_value <= 1e-8

    def test_triangle_numeric(self):
        t = np.array([0.0, 2 * math.pi / 3, 4 * math.pi / 3]) + 0.3
        tri = geo.PolygonDomain(np.c_[np.cos(t), np.sin(t)])
        assert geo.check_S1(tri).status == "numeric"
        assert geo.check_S2(tri).status == "numeric"

    def test_arc_lengths(self):
        # on the unit square the circle r=1.2 loses four symmetric caps
        arcs = geo.circle_arcs(geo.square(1.0), 1.2)
        _, _, length = geo.arc_moments(1.2, arcs)
        lost = 8 * math.acos(1 / 1.2)
        assert length == pytest.approx(1.2 * (2 * math.pi - lost), rel=1e-10)

    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 10**6))
    def test_s2_implies_s1(self, seed):
        rng = np.random.default_rng(seed)
        if rng.uniform() < 0.5:
            base = rng.uniform(0.5, 1.5, 3)
            ang = np.sort(rng.uniform(0, math.pi / 2, 3))
            pts = []
            for q in range(4):
                for r, a in zip(base, ang):
                    a = a + q * math.pi / 2
                    pts.append((r * math.cos(a), r * math.sin(a)))
            dom = geo.PolygonDomain(pts)
        else:
            dom = random_symmetric_polygon(rng)
        s2 = geo.check_S2(dom, n_radii=16, n_angles=256)
        if s2.passed:
            assert geo.check_S1(dom, n_radii=16, n_angles=256).passed
