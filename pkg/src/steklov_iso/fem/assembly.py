"""P1 assembly of the weighted stiffness and boundary mass matrices."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from ..quadrature import TRIANGLE_DEG4_WEIGHTS, gauss_legendre, triangle_rule_points
from ..weights import LogConvexWeight, PowerWeightPair, RadialPower
from .mesh import Mesh

EDGE_POINTS = 4  # Gauss-Legendre, exact to degree 7
RADIAL_POINTS = 16


@dataclass
class SteklovSystem:
    A: sp.csr_matrix
    B: sp.csr_matrix
    boundary_dofs: np.ndarray
    mesh: Mesh

    @property
    def interior_dofs(self) -> np.ndarray:
        mask = np.ones(self.A.shape[0], dtype=bool)
        mask[self.boundary_dofs] = False
        return np.nonzero(mask)[0]


def p1_gradients(mesh: Mesh) -> tuple[np.ndarray, np.ndarray]:
    """Constant gradients of the three hat functions on each triangle, and the areas."""
    p = mesh.vertices[mesh.triangles]
    d1, d2 = p[:, 1] - p[:, 0], p[:, 2] - p[:, 0]
    det = d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0]
    # rows of the inverse Jacobian give the gradients of λ1, λ2
    g1 = np.stack([d2[:, 1], -d2[:, 0]], axis=1) / det[:, None]
    g2 = np.stack([-d1[:, 1], d1[:, 0]], axis=1) / det[:, None]
    g0 = -g1 - g2
    return np.stack([g0, g1, g2], axis=1), 0.5 * det


def _radial_exact_mass(a: np.ndarray, b: np.ndarray, alpha: float) -> np.ndarray:
    """∫_T |x|^α over triangles (0, a, b): |a×b|/(α+2) ∫_0^1 |a + t(b-a)|^α dt."""
    t, w = gauss_legendre(RADIAL_POINTS)
    p = a[:, None, :] + t[None, :, None] * (b - a)[:, None, :]
    vals = np.linalg.norm(p, axis=-1) ** alpha
    cross = np.abs(a[:, 0] * b[:, 1] - a[:, 1] * b[:, 0])
    return cross / (alpha + 2.0) * (vals @ w)


def element_weight_integrals(mesh: Mesh, w) -> np.ndarray:
    """∫_T w dx per triangle.

    Degree-4 rule in general.  For homogeneous power weights, triangles with
    a vertex at the origin use the radial-exact rule instead.
    """
    areas = np.abs(mesh.triangle_areas())
    pts = triangle_rule_points(mesh.vertices[mesh.triangles])
    alpha = getattr(w, "homogeneous_degree", None)
    out = np.empty(len(areas))
    at_origin = np.zeros(len(areas), dtype=bool)
    o = mesh.origin_vertex
    if alpha is not None and o is not None:
        at_origin = np.any(mesh.triangles == o, axis=1)
    reg = ~at_origin
    out[reg] = areas[reg] * (w(pts[reg]) @ TRIANGLE_DEG4_WEIGHTS)
    if at_origin.any():
        tri = mesh.triangles[at_origin]
        # the two vertices other than the origin, in cyclic order
        pos = np.argmax(tri == o, axis=1)
        rows = np.arange(len(tri))
        a = mesh.vertices[tri[rows, (pos + 1) % 3]]
        b = mesh.vertices[tri[rows, (pos + 2) % 3]]
        out[at_origin] = _radial_exact_mass(a, b, alpha)
    return out


def assemble_stiffness(mesh: Mesh, w) -> sp.csr_matrix:
    grads, _ = p1_gradients(mesh)
    wint = element_weight_integrals(mesh, w)
    local = wint[:, None, None] * np.einsum("tik,tjk->tij", grads, grads)
    rows = np.repeat(mesh.triangles, 3, axis=1).ravel()
    cols = np.tile(mesh.triangles, (1, 3)).ravel()
    n = mesh.n_vertices
    return sp.csr_matrix((local.ravel(), (rows, cols)), shape=(n, n))


def assemble_boundary_mass(mesh: Mesh, density) -> sp.csr_matrix:
    """Entries ∫_{∂Ω} density φ_i φ_j ds over the boundary edges."""
    t, wq = gauss_legendre(EDGE_POINTS)
    e = mesh.boundary_edges
    a, b = mesh.vertices[e[:, 0]], mesh.vertices[e[:, 1]]
    L = np.linalg.norm(b - a, axis=1)
    p = a[:, None, :] + t[None, :, None] * (b - a)[:, None, :]
    dens = density(p)  # (k, q)
    phi0, phi1 = 1.0 - t, t
    m00 = L * ((dens * phi0 * phi0) @ wq)
    m01 = L * ((dens * phi0 * phi1) @ wq)
    m11 = L * ((dens * phi1 * phi1) @ wq)
    rows = np.concatenate([e[:, 0], e[:, 0], e[:, 1], e[:, 1]])
    cols = np.concatenate([e[:, 0], e[:, 1], e[:, 0], e[:, 1]])
    vals = np.concatenate([m00, m01, m01, m11])
    n = mesh.n_vertices
    return sp.csr_matrix((vals, (rows, cols)), shape=(n, n))


def weight_functions(weight):
    """(interior weight, boundary density) of a weight spec.

    The boundary density is w·v: |x|^β for power pairs, W itself for a
    log-convex weight with v ≡ 1.
    """
    if isinstance(weight, PowerWeightPair):
        return weight.w, weight.boundary_density
    if isinstance(weight, LogConvexWeight):
        return weight, weight
    raise TypeError(f"unsupported weight {weight!r}")


def assemble(mesh: Mesh, w, v=None) -> SteklovSystem:
    """Stiffness ∫ w ∇φ_i·∇φ_j and boundary mass ∫ w v φ_i φ_j.

    ``v=None`` means v ≡ 1.  Power factors are combined into a single power
    so that the boundary density stays homogeneous.
    """
    if v is None:
        density = w
    elif isinstance(w, RadialPower) and isinstance(v, RadialPower):
        density = RadialPower(w.exponent + v.exponent)
    else:
        density = lambda x: w(x) * v(x)  # noqa: E731
    return SteklovSystem(assemble_stiffness(mesh, w), assemble_boundary_mass(mesh, density), mesh.boundary_vertices, mesh)


def assemble_for(mesh: Mesh, weight) -> SteklovSystem:
    w, dens = weight_functions(weight)
    return SteklovSystem(assemble_stiffness(mesh, w), assemble_boundary_mass(mesh, dens), mesh.boundary_vertices, mesh)
