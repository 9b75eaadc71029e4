import math

import numpy as np
import pytest
import scipy.linalg
import scipy.sparse as sp
from scipy.integrate import quad

from steklov_iso import geometry as geo
from steklov_iso.ball import logconvex_ball_gamma1, solve_radial_ode
from steklov_iso.errors import FactorizationFailure, MeshFailure, ZeroModeMismatch
from steklov_iso.fem.assembly import (
    SteklovSystem,
    assemble,
    assemble_boundary_mass,
    assemble_for,
    element_weight_integrals,
)
from steklov_iso.fem.eigen import cholesky_lower, generalized_eigh
from steklov_iso.fem.mesh import refine, triangulate
from steklov_iso.fem.solver import harmonic_mean_check, schur_complement, solve_steklov, steklov_study
from steklov_iso.weights import LogConvexWeight, RadialPower, make_power_pair

CLASSICAL = make_power_pair(0, 0, 2)


@pytest.fixture(scope="module")
def disc_mesh():
    return triangulate(geo.disc(1.0), 0.1)


@pytest.fixture(scope="module")
def square_mesh():
    return triangulate(geo.square(1.0), 0.2)


class TestMesh:
    def test_disc_boundary_on_circle(self, disc_mesh):
        r = np.linalg.norm(disc_mesh.vertices[disc_mesh.boundary_vertices], axis=1)
        assert np.max(np.abs(r - 1.0)) <= 0.1**2
        assert disc_mesh.min_angle() >= 20.0
        assert disc_mesh.origin_vertex is not None
        assert 200 < len(disc_mesh.triangles) < 5000

    def test_square(self, square_mesh):
        assert np.sum(square_mesh.triangle_areas()) == pytest.approx(4.0, rel=1e-12)
        assert square_mesh.min_angle() >= 20.0
        V = square_mesh.vertices[square_mesh.boundary_vertices]
        assert np.allclose(np.max(np.abs(V), axis=1), 1.0)

    def test_ccw_and_conforming(self, square_mesh):
        assert np.all(square_mesh.triangle_areas() > 0)
        # every interior edge is shared by exactly two triangles
        e = np.sort(square_mesh.triangles[:, [0, 1, 1, 2, 2, 0]].reshape(-1, 2), axis=1)
        _, counts = np.unique(e, axis=0, return_counts=True)
        assert set(counts.tolist()) <= {1, 2}
        assert np.sum(counts == 1) == len(square_mesh.boundary_edges)

    def test_cross_min_angle(self):
        assert triangulate(geo.cross(), 0.1).min_angle() >= 20.0

    def test_too_coarse(self):
        with pytest.raises(MeshFailure):
            triangulate(geo.disc(1.0), 2.0)

    def test_refine_nested(self, square_mesh):
        fine = refine(square_mesh)
        assert len(fine.triangles) == 4 * len(square_mesh.triangles)
        assert np.allclose(fine.vertices[: square_mesh.n_vertices], square_mesh.vertices)
        assert fine.h == pytest.approx(square_mesh.h / 2)


class TestAssembly:
    @pytest.mark.parametrize("alpha", [0.0, 2.0, -1.0])
    def test_constants_in_kernel(self, disc_mesh, alpha):
        sys_ = assemble(disc_mesh, RadialPower(alpha))
        A = sys_.A
        assert np.max(np.abs(A @ np.ones(A.shape[0]))) <= 1e-12 * abs(A).max()
        assert abs(A - A.T).max() <= 1e-14 * abs(A).max()

    def test_logconvex_kernel(self, disc_mesh):
        A = assemble_for(disc_mesh, LogConvexWeight.create("quadratic", a=1.0)).A
        assert np.max(np.abs(A @ np.ones(A.shape[0]))) <= 1e-12 * abs(A).max()

    def test_element_integrals_monte_carlo(self, disc_mesh, rng):
        w = RadialPower(2.0)
        wint = element_weight_integrals(disc_mesh, w)
        for t in rng.choice(len(disc_mesh.triangles), 8, replace=False):
            P = disc_mesh.vertices[disc_mesh.triangles[t]]
            u = rng.uniform(size=(200_000, 2))
            flip = u.sum(axis=1) > 1
            u[flip] = 1 - u[flip]
            pts = P[0] + u[:, :1] * (P[1] - P[0]) + u[:, 1:] * (P[2] - P[0])
            d1, d2 = P[1] - P[0], P[2] - P[0]
            area = 0.5 * abs(d1[0] * d2[1] - d1[1] * d2[0])
            vals = area * np.sum(pts**2, axis=1)
            se = vals.std() / math.sqrt(len(vals))
            assert abs(wint[t] - vals.mean()) <= 3 * se + 1e-15

    def test_origin_elements_singular_weight(self, square_mesh):
        assert square_mesh.origin_vertex is not None
        total = element_weight_integrals(square_mesh, RadialPower(-1.0)).sum()
        assert total == pytest.approx(geo.weighted_volume(geo.square(1.0), -1.0), rel=1e-5)

    @pytest.mark.parametrize("beta", [0.0, 2.0, -0.7, 1.3])
    def test_boundary_mass_edge_integrals(self, square_mesh, beta):
        B = assemble_boundary_mass(square_mesh, RadialPower(beta))
        V = square_mesh.vertices
        # a boundary edge on x = 1
        e = next(e for e in square_mesh.boundary_edges if np.allclose(V[e, 0], 1.0))
        y0, y1 = V[e[0], 1], V[e[1], 1]
        L = abs(y1 - y0)

        def phi0(y):
            return (y1 - y) / (y1 - y0)

        def dens(y):
            return (1 + y * y) ** (beta / 2)

        lo, hi = min(y0, y1), max(y0, y1)
        m01 = quad(lambda y: dens(y) * phi0(y) * (1 - phi0(y)), lo, hi, epsabs=1e-15)[0]
        assert B[e[0], e[1]] == pytest.approx(m01, rel=1e-9)
        assert L > 0
        ones = np.ones(B.shape[0])
        assert ones @ B @ ones == pytest.approx(geo.weighted_perimeter(geo.square(1.0), beta), rel=1e-9)

    def test_boundary_mass_support(self, square_mesh):
        sys_ = assemble_for(square_mesh, CLASSICAL)
        rows = np.unique(sys_.B.tocoo().row)
        assert set(rows.tolist()) == set(sys_.boundary_dofs.tolist())


class TestEigen:
    def test_cholesky(self, rng):
        M = rng.normal(size=(30, 30))
        B = M @ M.T + 30 * np.eye(30)
        L = cholesky_lower(B)
        assert np.allclose(L, np.linalg.cholesky(B), atol=1e-12)

    def test_not_definite(self):
        with pytest.raises(FactorizationFailure):
            cholesky_lower(np.diag([1.0, -1.0]))

    def test_against_scipy(self, rng):
        M = rng.normal(size=(25, 25))
        S = M + M.T
        N = rng.normal(size=(25, 25))
        B = N @ N.T + 25 * np.eye(25)
        gam, X = generalized_eigh(S, B)
        ref = scipy.linalg.eigh(S, B, eigvals_only=True)
        assert np.allclose(gam, ref, atol=1e-10)
        assert np.allclose(X.T @ B @ X, np.eye(25), atol=1e-10)


class TestSolver:
    @pytest.fixture(scope="class")
    @classmethod
    def disc_result(cls):
        mesh = triangulate(geo.disc(1.0), 0.1)
        return solve_steklov(assemble_for(mesh, CLASSICAL), 4)

    def test_zero_mode(self, disc_result):
        g = disc_result.eigenvalues
        assert g[0] <= 1e-8 * g[1]
        S, _, _ = schur_complement(disc_result.system)
        assert np.max(np.abs(S @ np.ones(len(S)))) <= 1e-10 * np.max(np.abs(S))

    def test_rayleigh_quotients(self, disc_result):
        rq = disc_result.rayleigh_quotients()
        assert np.allclose(rq[1:], disc_result.eigenvalues[1:], rtol=1e-10)

    def test_orthogonality(self, disc_result):
        rb, ra = disc_result.orthogonality_residuals()
        assert rb <= 1e-8 and ra <= 1e-8

    def test_residuals(self, disc_result):
        assert np.max(disc_result.residuals) <= 1e-9

    def test_disc_values(self, disc_result):
        g = disc_result.gamma
        assert g[0] == pytest.approx(1.0, rel=2e-2)
        assert g[1] == pytest.approx(g[0], rel=1e-2)
        assert g[2] == pytest.approx(2.0, rel=5e-2)

    def test_harmonic_mean_on_ball(self, disc_result):
        margin = harmonic_mean_check(disc_result, 1.0)
        assert abs(margin) <= 0.05

    def test_nested_min_max(self):
        study = steklov_study(geo.cross(), CLASSICAL, 0.2, 4, 2)
        for i in range(1, 5):
            v = study.values(i)
            assert np.all(np.diff(v) <= 1e-10 * v[0])

    def test_alpha_one_convergence(self):
        study = steklov_study(geo.disc(1.0), make_power_pair(1, 0, 2), 0.2, 2, 3)
        exact = (math.sqrt(5) - 1) / 2
        errs = np.abs(study.values(1) - exact)
        assert errs[-1] < errs[0]
        assert errs[-1] <= 1e-3

    def test_logconvex_disc_against_ode(self):
        W = LogConvexWeight.create("quadratic", r_max=4.0, a=1.0)
        ode = logconvex_ball_gamma1(solve_radial_ode(W, 1.0, 2, 2000))
        fem = steklov_study(geo.disc(1.0), W, 0.1, 2, 1).finest.gamma
        assert fem[0] == pytest.approx(ode, rel=1e-2)
        assert fem[1] == pytest.approx(ode, rel=1e-2)

    @pytest.mark.parametrize("alpha,beta", [(0.0, 0.0), (0.0, 1.0), (1.0, -0.5)])
    def test_scaling_law(self, alpha, beta):
        wp = make_power_pair(alpha, beta, 2)
        t = 1.7
        g1 = steklov_study(geo.disc(1.0), wp, 0.1, 2, 0).finest.gamma[0]
        gt = steklov_study(geo.disc(t), wp, 0.1 * t, 2, 0).finest.gamma[0]
        assert gt == pytest.approx(t ** (alpha - beta - 1) * g1, rel=1e-8)

    def test_zero_mode_mismatch(self, square_mesh):
        sys_ = assemble_for(square_mesh, CLASSICAL)
        shifted = SteklovSystem(sys_.A + 0.1 * sys_.B, sys_.B, sys_.boundary_dofs, sys_.mesh)
        with pytest.raises(ZeroModeMismatch):
            solve_steklov(shifted)

    def test_n_eigs(self, square_mesh):
        with pytest.raises(ValueError):
            solve_steklov(assemble_for(square_mesh, CLASSICAL), 0)

    def test_origin_on_boundary_refused(self):
        dom = geo.PolygonDomain([[0, 0], [1, 0], [1, 1], [0, 1]])
        with pytest.raises(geo.OriginOnBoundary):
            steklov_study(dom, CLASSICAL, 0.1, 2, 0)

    def test_singular_interior_block(self, square_mesh):
        sys_ = assemble_for(square_mesh, CLASSICAL)
        broken = SteklovSystem(sp.csr_matrix(sys_.A.shape), sys_.B, sys_.boundary_dofs, sys_.mesh)
        with pytest.raises(FactorizationFailure):
            solve_steklov(broken)
