"""Steklov eigenvalues through the discrete Dirichlet-to-Neumann map."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from ..errors import FactorizationFailure, ZeroModeMismatch
from ..geometry import require_origin_off_boundary
from .assembly import SteklovSystem, assemble_for
from .eigen import generalized_eigh
from .mesh import refine, triangulate

ZERO_MODE_REL = 1e-8


@dataclass
class SpectrumResult:
    eigenvalues: np.ndarray  # γ0 ≤ γ1 ≤ ... ≤ γn
    eigenvectors: np.ndarray  # boundary traces, B-orthonormal, one column per eigenvalue
    residuals: np.ndarray
    h: float
    boundary_dofs: np.ndarray
    extensions: np.ndarray = field(repr=False)  # harmonic extensions on all vertices
    system: SteklovSystem | None = field(default=None, repr=False)

    @property
    def gamma(self) -> np.ndarray:
        """Nontrivial eigenvalues γ1, γ2, ..."""
        return self.eigenvalues[1:]

    def boundary_gram(self) -> np.ndarray:
        B = self.system.B
        U = self.extensions
        return U.T @ (B @ U)

    def energy_gram(self) -> np.ndarray:
        A = self.system.A
        U = self.extensions
        return U.T @ (A @ U)

    def orthogonality_residuals(self) -> tuple[float, float]:
        """Deviation of the boundary Gram from I and of the energy Gram from diag(γ)."""
        n = len(self.eigenvalues)
        rb = float(np.max(np.abs(self.boundary_gram() - np.eye(n))))
        ea = self.energy_gram()
        scale = max(float(np.max(np.abs(self.eigenvalues))), 1.0)
        ra = float(np.max(np.abs(ea - np.diag(self.eigenvalues)))) / scale
        return rb, ra

    def rayleigh_quotients(self) -> np.ndarray:
        return np.diag(self.energy_gram()) / np.diag(self.boundary_gram())

    def to_dict(self) -> dict:
        return {"h": self.h, "eigenvalues": self.eigenvalues.tolist(), "residuals": self.residuals.tolist()}


def schur_complement(sys_: SteklovSystem) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """S = A_bb - A_bi A_ii⁻¹ A_ib (dense) together with X = A_ii⁻¹ A_ib."""
    A = sys_.A.tocsr()
    b, i = sys_.boundary_dofs, sys_.interior_dofs
    A_bb = A[b][:, b].toarray()
    A_ib = A[i][:, b]
    if len(i) == 0:
        return A_bb, np.zeros((0, len(b))), A_bb
    try:
        lu = splu(sp.csc_matrix(A[i][:, i]))
    except RuntimeError as exc:
        raise FactorizationFailure(f"interior stiffness factorization failed: {exc}") from exc
    X = lu.solve(A_ib.toarray())
    if not np.all(np.isfinite(X)):
        raise FactorizationFailure("interior stiffness is singular")
    S = A_bb - A_ib.T @ X
    return 0.5 * (S + S.T), X, A_bb


def solve_steklov(sys_: SteklovSystem, n_eigs: int = 2) -> SpectrumResult:
    """Lowest ``n_eigs + 1`` eigenpairs (including the trivial γ0 = 0)."""
    if n_eigs < 1:
        raise ValueError("n_eigs must be at least 1")
    b = sys_.boundary_dofs
    S, X, _ = schur_complement(sys_)
    Bbb = sys_.B.tocsr()[b][:, b].toarray()
    gam, V = generalized_eigh(S, Bbb)
    k = min(n_eigs + 1, len(gam))
    gam, V = gam[:k], V[:, :k]
    if not abs(gam[0]) <= ZERO_MODE_REL * gam[1]:
        raise ZeroModeMismatch(f"gamma0={gam[0]:.3e} is not negligible against gamma1={gam[1]:.3e}")
    v0 = V[:, 0]
    if np.ptp(v0) > 1e-6 * np.max(np.abs(v0)):
        raise ZeroModeMismatch("the lowest eigenvector is not constant")
    gam = gam.copy()
    gam[0] = max(gam[0], 0.0)
    R = S @ V - (Bbb @ V) * gam[None, :]
    residuals = np.linalg.norm(R, axis=0) / np.linalg.norm(V, axis=0)
    n = sys_.A.shape[0]
    ext = np.zeros((n, k))
    ext[b] = V
    ext[sys_.interior_dofs] = -X @ V
    return SpectrumResult(gam, V, residuals, sys_.mesh.h, b, ext, sys_)


def harmonic_mean_check(res: SpectrumResult, gamma1_ball: float, dim: int = 2) -> float:
    """Σ_{i=1..N} 1/γ_i(Ω) − N/γ1(B_R)."""
    g = res.gamma
    if len(g) < dim:
        raise ValueError(f"need {dim} nontrivial eigenvalues, have {len(g)}")
    return float(np.sum(1.0 / g[:dim]) - dim / gamma1_ball)


def observed_rate(values, reference: float | None = None) -> float:
    """Convergence rate under mesh halving from the last three values (or the last two errors)."""
    v = np.asarray(values, dtype=float)
    if reference is not None:
        if len(v) < 2:
            return float("nan")
        e1, e2 = abs(v[-2] - reference), abs(v[-1] - reference)
    else:
        if len(v) < 3:
            return float("nan")
        e1, e2 = abs(v[-3] - v[-2]), abs(v[-2] - v[-1])
    if e1 == 0.0 or e2 == 0.0:
        return float("nan")
    return math.log2(e1 / e2)


@dataclass
class RefinementStudy:
    levels: list[SpectrumResult]

    @property
    def h(self) -> list[float]:
        return [r.h for r in self.levels]

    def values(self, index: int = 1) -> np.ndarray:
        return np.array([r.eigenvalues[index] for r in self.levels])

    @property
    def finest(self) -> SpectrumResult:
        return self.levels[-1]

    def rate(self, index: int = 1, reference: float | None = None) -> float:
        return observed_rate(self.values(index), reference)

    def error_estimate(self, index: int = 1) -> float:
        """Richardson-type bound 2|γ_M − γ_{M−1}|/(2^p − 1) with p clipped to [1, 2]."""
        v = self.values(index)
        if len(v) < 2:
            return float("inf")
        p = self.rate(index)
        p = 1.0 if not np.isfinite(p) else min(max(p, 1.0), 2.0)
        return 2.0 * abs(v[-1] - v[-2]) / (2.0**p - 1.0)

    def to_dict(self, n_show: int | None = None) -> dict:
        k = len(self.levels[0].eigenvalues)
        return {
            "h": self.h,
            "eigenvalues": [r.eigenvalues[:n_show].tolist() for r in self.levels],
            "residual_max": [float(np.max(r.residuals)) for r in self.levels],
            "rates": [self.rate(i) for i in range(1, k)],
        }


def steklov_study(dom, weight, h: float, n_eigs: int = 2, refinements: int = 2) -> RefinementStudy:
    """Spectra on a base mesh of size h and ``refinements`` uniform refinements of it."""
    return _cached_study(dom, weight, float(h), int(n_eigs), int(refinements))


@lru_cache(maxsize=32)
def _cached_study(dom, weight, h, n_eigs, refinements) -> RefinementStudy:
    require_origin_off_boundary(dom)
    mesh = triangulate(dom, h)
    levels = []
    for level in range(refinements + 1):
        if level:
            mesh = refine(mesh)
        levels.append(solve_steklov(assemble_for(mesh, weight), n_eigs))
    return RefinementStudy(levels)
