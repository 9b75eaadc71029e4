"""End-to-end acceptance criteria, one test per criterion.

Each test records a one-line pass/fail verdict that is printed in the
terminal summary, then asserts.
"""

import math
import time

import numpy as np
import pytest

from conftest import record_acceptance
from steklov_iso import geometry as geo
from steklov_iso.ball import lemma33_monotonicity, logconvex_ball_gamma1, power_ball_spectrum, solve_radial_ode
from steklov_iso.fem.assembly import assemble_for
from steklov_iso.fem.mesh import triangulate
from steklov_iso.fem.solver import observed_rate, solve_steklov, steklov_study
from steklov_iso.isoperimetry import check_isop, isop_constant
from steklov_iso.params import check_lemma23, derive_params, derived_threshold_triggers, f_value, find_z0
from steklov_iso.verify import Settings, verify_C13, verify_T11, verify_T12, verify_T14, verify_T15
from steklov_iso.weights import LogConvexWeight, make_power_pair

from test_geometry import random_symmetric_polygon
from test_isoperimetry import ADMISSIBLE

SETTINGS = Settings(h=0.1, refinements=2)
GAUSS = LogConvexWeight.create("quadratic", r_max=4.0, a=1.0)
FLAT = LogConvexWeight.create("constant")


def verdict(number, checks: dict):
    failed = [name for name, ok in checks.items() if not ok]
    detail = "all checks passed" if not failed else "failed: " + ", ".join(failed)
    record_acceptance(number, not failed, detail)
    print(f"criterion {number}: {'PASS' if not failed else 'FAIL'} ({detail})")
    assert not failed, detail


class TestAcceptance:
    def test_1_closed_form_disc(self):
        spec = power_ball_spectrum(make_power_pair(0, 0, 2), 1.0, 2)
        t0 = time.perf_counter()
        study = steklov_study(geo.disc(1.0), make_power_pair(0, 0, 2), 0.16, 2, 3)
        elapsed = time.perf_counter() - t0
        vals = study.values(1)
        rates = [observed_rate(vals[i : i + 2], 1.0) for i in range(len(vals) - 1)]
        verdict(
            1,
            {
                "ball gamma1 = gamma2 = 1": list(spec.eigenvalues(3)[1:]) == [1.0, 1.0],
                "final h = 0.02": study.finest.h == pytest.approx(0.02),
                "FEM within 1%": abs(vals[-1] - 1.0) <= 0.01,
                "rate 2 +- 0.3": all(abs(r - 2.0) <= 0.3 for r in rates),
                "runtime < 60 s": elapsed < 60.0,
            },
        )

    def test_2_ode_oracle(self):
        checks = {}
        for R in (0.5, 1.0, 3.0):
            prof = solve_radial_ode(FLAT, R, 2, 2000)
            checks[f"F = r at R={R}"] = np.max(np.abs(prof.F - prof.grid)) <= 1e-8
            checks[f"gamma1 = 1/R at R={R}"] = abs(logconvex_ball_gamma1(prof) - 1.0 / R) <= 1e-8
        a = logconvex_ball_gamma1(solve_radial_ode(GAUSS, 1.0, 2, 4000, eps_rel=1e-6))
        b = logconvex_ball_gamma1(solve_radial_ode(GAUSS, 1.0, 2, 4000, eps_rel=1e-8))
        checks["epsilon robustness"] = abs(a - b) <= 1e-7 * abs(a)
        verdict(2, checks)

    def test_3_first_eigenvalue_suite(self, unit_square, cross):
        checks = {}
        for dom in (unit_square, cross):
            for beta in (-2.0, -1.0, 0.0, 1.0):
                rep = verify_T11(dom, make_power_pair(0, beta, 2), settings=SETTINGS)
                checks[f"{dom.name} beta={beta:g} verified"] = rep.status == "verified" and rep.margin >= -rep.tolerance_used
                c13 = verify_C13(dom, beta, settings=SETTINGS)[0]
                checks[f"{dom.name} beta={beta:g} corollary"] = c13.status == "verified"
                if beta == 0.0:
                    R = math.sqrt(geo.weighted_volume(dom, 0.0) / math.pi)
                    checks[f"{dom.name} classical radius"] = abs(rep.R - R) <= 1e-12 * R
                    checks[f"{dom.name} classical ball value"] = abs(rep.gamma1_ball - 1.0 / R) <= 1e-12 / R
                    checks[f"{dom.name} classical bound"] = rep.gamma1_omega <= 1.0 / R + rep.tolerance_used
        verdict(3, checks)

    def test_4_harmonic_mean_suite(self, unit_square, cross):
        checks = {}
        for dom in (unit_square, cross):
            for beta in (-2.0, -1.0, 0.0, 1.0):
                rep = verify_T12(dom, make_power_pair(0, beta, 2), settings=SETTINGS)
                checks[f"{dom.name} beta={beta:g}"] = rep.status == "verified" and rep.margin >= -rep.tolerance_used
        for beta in (-1.0, 0.0, 1.0):
            rep = verify_T12(geo.disc(1.0), make_power_pair(0, beta, 2), settings=SETTINGS)
            checks[f"disc equality beta={beta:g}"] = rep.status == "verified" and abs(rep.margin) <= rep.tolerance_used
        verdict(4, checks)

    def test_5_power_weight_square(self, unit_square):
        wp = make_power_pair(1, 0, 2)
        rep = verify_T11(unit_square, wp, settings=SETTINGS)
        ps = derive_params(wp)
        R = geo.equivalent_radius(geo.weighted_volume(unit_square, ps.ell), ps.ell, 2)
        ball = (math.sqrt(5) - 1) / 2 * R ** (wp.alpha - wp.beta - 1)
        verdict(
            5,
            {
                "ball value from the closed form": abs(rep.gamma1_ball - ball) <= 1e-12 * ball,
                "FEM below ball within tolerance": rep.gamma1_omega <= ball + rep.tolerance_used,
                "status verified": rep.status == "verified",
            },
        )

    def test_6_logconvex_suite(self, unit_square, cross):
        checks = {}
        for dom in (unit_square, cross):
            r14 = verify_T14(dom, GAUSS, settings=SETTINGS)
            r15 = verify_T15(dom, GAUSS, settings=SETTINGS)
            rows = {r["name"]: r for r in r15.consistency}
            checks[f"{dom.name} T1.4 verified"] = r14.status == "verified"
            checks[f"{dom.name} T1.5 verified"] = r15.status == "verified"
            checks[f"{dom.name} normalization"] = abs(rows["normalization"]["lhs"] - 2.0) <= 1e-6 * 2.0
            checks[f"{dom.name} rows"] = r14.consistency_ok and r15.consistency_ok
            prof = solve_radial_ode(GAUSS, r14.R, 2, 2000)
            checks[f"{dom.name} monotonicity"] = lemma33_monotonicity(prof).ok
        verdict(6, checks)

    def test_7_isoperimetry(self):
        checks = {"classical constant": abs(isop_constant(0, 0, 2) - 2 * math.sqrt(math.pi)) <= 1e-12}
        checks["grid has 20 admissible points"] = len(ADMISSIBLE) == 20
        disc = geo.disc(1.3)
        checks["disc equality"] = all(
            abs(r.margin) <= 1e-10 * r.lhs for r in (check_isop(disc, k, ell) for k, ell in ADMISSIBLE)
        )
        rng = np.random.default_rng(2024)
        worst = min(
            (lambda r: r.margin / r.lhs)(check_isop(random_symmetric_polygon(rng), *ADMISSIBLE[i % 20]))
            for i in range(100)
        )
        checks["random symmetric polygons"] = worst >= -1e-9
        verdict(7, checks)

    def test_8_classifier(self):
        rng = np.random.default_rng(8)
        failures, roots = 0, []
        for _ in range(10_000):
            n = int(rng.integers(2, 5))
            a, b = rng.uniform(-n, 5.0), rng.uniform(-6.0, 6.0)
            if a <= -n:
                continue
            ps = derive_params(make_power_pair(a, b, n))
            failures += not check_lemma23(ps, "derived")
            if derived_threshold_triggers(ps.rho, n):
                roots.append((ps.rho, n))
        roots += [(20.0, 3), (8.0, 2), (12.0, 4)]
        worst_f = max(abs(f_value(find_z0(rho, n), rho, n)) for rho, n in roots)
        slopes_ok = True
        for rho, n in [(2.0, 2), (3.0, 3), (20.0, 3), (7.5, 4)]:
            z = np.linspace(-rho / 3, 0, 2001)[1:-1]
            fp = (f_value(z + 1e-7, rho, n) - f_value(z - 1e-7, rho, n)) / 2e-7
            slopes_ok &= bool(np.all(fp > 0))
        verdict(
            8,
            {
                "case implication sweep": failures == 0,
                "f(z0) <= 1e-12": worst_f <= 1e-12,
                "f' > 0 on the bracket": slopes_ok,
            },
        )

    def test_9_structural(self):
        checks = {}
        wp = make_power_pair(0.5, -0.5, 2)
        for dom in (geo.square(1.0), geo.disc(1.0), geo.cross()):
            mesh = triangulate(dom, 0.1)
            sys_ = assemble_for(mesh, wp)
            A = sys_.A
            checks[f"{dom.name} A.1 = 0"] = np.max(np.abs(A @ np.ones(A.shape[0]))) <= 1e-12 * abs(A).max()
            res = solve_steklov(sys_, 4)
            checks[f"{dom.name} zero mode"] = res.eigenvalues[0] <= 1e-8 * res.eigenvalues[1]
            rb, ra = res.orthogonality_residuals()
            checks[f"{dom.name} orthogonality"] = rb <= 1e-8 and ra <= 1e-8
        t = 1.6
        for a, b in ((0.0, 0.0), (1.0, 0.5)):
            w = make_power_pair(a, b, 2)
            g1 = steklov_study(geo.disc(1.0), w, 0.1, 2, 0).finest.gamma[0]
            gt = steklov_study(geo.disc(t), w, 0.1 * t, 2, 0).finest.gamma[0]
            checks[f"gamma1 scaling a={a:g} b={b:g}"] = abs(gt - t ** (a - b - 1) * g1) <= 1e-8 * gt
        dom = geo.cross()
        for k in (-0.5, 0.0, 1.5):
            checks[f"P_k scaling k={k:g}"] = math.isclose(
                geo.weighted_perimeter(dom.scaled(t), k), t ** (k + 1) * geo.weighted_perimeter(dom, k), rel_tol=1e-10
            )
            checks[f"volume scaling l={k:g}"] = math.isclose(
                geo.weighted_volume(dom.scaled(t), k), t ** (k + 2) * geo.weighted_volume(dom, k), rel_tol=1e-10
            )
        verdict(9, checks)
