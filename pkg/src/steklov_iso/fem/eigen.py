"""Dense symmetric-definite generalized eigensolver.

``S x = γ B x`` with B symmetric positive definite is reduced to the standard
problem ``L⁻¹ S L⁻ᵀ y = γ y`` through the Cholesky factor ``B = L Lᵀ``; the
standard symmetric problem goes to LAPACK (``numpy.linalg.eigh``).
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import solve_triangular

from ..errors import FactorizationFailure


def cholesky_lower(B: np.ndarray) -> np.ndarray:
    """Lower Cholesky factor, column by column."""
    B = np.asarray(B, dtype=float)
    n = B.shape[0]
    L = np.zeros_like(B)
    for j in range(n):
        d = B[j, j] - L[j, :j] @ L[j, :j]
        if not d > 0.0:
            raise FactorizationFailure(f"matrix is not positive definite (pivot {j})")
        L[j, j] = np.sqrt(d)
        if j + 1 < n:
            L[j + 1 :, j] = (B[j + 1 :, j] - L[j + 1 :, :j] @ L[j, :j]) / L[j, j]
    return L


def generalized_eigh(S: np.ndarray, B: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigenpairs of S x = γ B x, ascending, with B-orthonormal eigenvectors."""
    S = 0.5 * (S + S.T)
    B = 0.5 * (B + B.T)
    L = cholesky_lower(B)
    Y = solve_triangular(L, S, lower=True)
    C = solve_triangular(L, Y.T, lower=True)
    C = 0.5 * (C + C.T)
    gam, V = np.linalg.eigh(C)
    X = solve_triangular(L.T, V, lower=False)
    return gam, X
