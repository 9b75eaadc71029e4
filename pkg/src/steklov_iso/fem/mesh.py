"""Triangular meshes of planar domains.

The mesher places boundary nodes at spacing ≤ h, fills the interior with a
hexagonal lattice anchored at the origin (so the origin is a vertex whenever
it lies inside), and triangulates with Delaunay.  Missing boundary segments
are recovered by splitting them, and triangles outside the domain are
dropped.  A few sweeps of Laplacian smoothing improve the band next to the
boundary.  ``refine`` performs uniform red refinement; new boundary nodes of
curved domains are projected radially onto the boundary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import Delaunay

from ..errors import MeshFailure
from ..geometry import PolygonDomain, StarDomain

MIN_ANGLE_DEG = 20.0


@dataclass
class Mesh:
    vertices: np.ndarray  # (n, 2)
    triangles: np.ndarray  # (m, 3), counter-clockwise
    boundary_edges: np.ndarray  # (k, 2), domain on the left
    h: float
    domain: PolygonDomain | StarDomain | None = field(default=None, repr=False)
    origin_vertex: int | None = None

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def boundary_vertices(self) -> np.ndarray:
        return np.unique(self.boundary_edges)

    def triangle_areas(self) -> np.ndarray:
        p = self.vertices[self.triangles]
        d1, d2 = p[:, 1] - p[:, 0], p[:, 2] - p[:, 0]
        return 0.5 * (d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0])

    def min_angle(self) -> float:
        """Smallest interior angle over all triangles, in degrees."""
        p = self.vertices[self.triangles]
        worst = 180.0
        for i in range(3):
            u = p[:, (i + 1) % 3] - p[:, i]
            v = p[:, (i + 2) % 3] - p[:, i]
            c = np.einsum("ij,ij->i", u, v) / (np.linalg.norm(u, axis=1) * np.linalg.norm(v, axis=1))
            worst = min(worst, float(np.degrees(np.min(np.arccos(np.clip(c, -1, 1))))))
        return worst

    def max_edge(self) -> float:
        p = self.vertices[self.triangles]
        return float(max(np.max(np.linalg.norm(p[:, (i + 1) % 3] - p[:, i], axis=1)) for i in range(3)))


def boundary_edges_of(triangles: np.ndarray) -> np.ndarray:
    """Edges used by exactly one triangle, oriented as in that triangle."""
    e = np.concatenate([triangles[:, [0, 1]], triangles[:, [1, 2]], triangles[:, [2, 0]]])
    key = np.sort(e, axis=1)
    _, inv, counts = np.unique(key, axis=0, return_inverse=True, return_counts=True)
    return e[counts[inv.ravel()] == 1]


def _polygon_boundary(dom: PolygonDomain, h: float) -> np.ndarray:
    pts = []
    for a, b in dom.edges():
        n = max(1, math.ceil(np.linalg.norm(b - a) / h - 1e-9))
        t = np.arange(n) / n
        pts.append(a + t[:, None] * (b - a))
    return np.concatenate(pts)


def _star_boundary(dom: StarDomain, h: float) -> np.ndarray:
    theta = np.linspace(0.0, 2 * np.pi, 8193)
    speed = np.hypot(dom.R(theta), dom.dR(theta))
    s = np.concatenate([[0.0], np.cumsum(0.5 * (speed[1:] + speed[:-1]) * np.diff(theta))])
    n = max(8, math.ceil(s[-1] / h))
    targets = s[-1] * np.arange(n) / n
    return dom.point(np.interp(targets, s, theta))


def _segment_distance(points: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Distance from each point to the closed polyline a[i]→b[i] (min over segments)."""
    d = b - a
    dd = np.einsum("ij,ij->i", d, d)
    best = np.full(len(points), np.inf)
    for start in range(0, len(a), 256):
        sl = slice(start, start + 256)
        rel = points[:, None, :] - a[None, sl, :]
        t = np.clip(np.einsum("pij,ij->pi", rel, d[sl]) / dd[sl], 0.0, 1.0)
        diff = rel - t[..., None] * d[None, sl, :]
        best = np.minimum(best, np.min(np.linalg.norm(diff, axis=-1), axis=1))
    return best


def _hex_lattice(lo: np.ndarray, hi: np.ndarray, h: float) -> np.ndarray:
    dy = h * math.sqrt(3.0) / 2.0
    j = np.arange(math.floor(lo[1] / dy) - 1, math.ceil(hi[1] / dy) + 2)
    i = np.arange(math.floor(lo[0] / h) - 2, math.ceil(hi[0] / h) + 3)
    I, J = np.meshgrid(i, j)
    x = h * (I + 0.5 * (J % 2))
    y = dy * J
    return np.stack([x.ravel(), y.ravel()], axis=1)


def _triangulate_points(dom, pts: np.ndarray, n_bnd: int):
    """Delaunay triangulation restricted to the domain; boundary nodes are pts[:n_bnd] in order."""
    tri = Delaunay(pts).simplices
    cent = pts[tri].mean(axis=1)
    tri = tri[dom.contains(cent)]
    p = pts[tri]
    area = (p[:, 1, 0] - p[:, 0, 0]) * (p[:, 2, 1] - p[:, 0, 1]) - (p[:, 1, 1] - p[:, 0, 1]) * (p[:, 2, 0] - p[:, 0, 0])
    tri = np.where((area < 0)[:, None], tri[:, [0, 2, 1]], tri)
    seg = np.stack([np.arange(n_bnd), (np.arange(n_bnd) + 1) % n_bnd], axis=1)
    have = {tuple(sorted(e)) for e in boundary_edges_of(tri).tolist()}
    missing = [i for i, e in enumerate(seg.tolist()) if tuple(sorted(e)) not in have]
    return tri, missing


def _smooth(pts: np.ndarray, tri: np.ndarray, movable: np.ndarray, dom, sweeps: int) -> np.ndarray:
    n = len(pts)
    e = np.concatenate([tri[:, [0, 1]], tri[:, [1, 2]], tri[:, [2, 0]]])
    e = np.unique(np.sort(e, axis=1), axis=0)
    for _ in range(sweeps):
        acc = np.zeros_like(pts)
        deg = np.zeros(n)
        np.add.at(acc, e[:, 0], pts[e[:, 1]])
        np.add.at(acc, e[:, 1], pts[e[:, 0]])
        np.add.at(deg, e[:, 0], 1)
        np.add.at(deg, e[:, 1], 1)
        new = pts.copy()
        idx = np.nonzero(movable & (deg > 0))[0]
        new[idx] = acc[idx] / deg[idx, None]
        ok = dom.contains(new[idx])
        pts = pts.copy()
        pts[idx[ok]] = new[idx[ok]]
    return pts


def triangulate(dom: PolygonDomain | StarDomain, h: float, smoothing_sweeps: int = 4) -> Mesh:
    """Conforming triangulation of ``dom`` with target edge length ``h``."""
    if not h > 0 or h >= dom.diameter / 4.0:
        raise MeshFailure(f"h={h} must lie in (0, diameter/4)")
    bnd = _polygon_boundary(dom, h) if isinstance(dom, PolygonDomain) else _star_boundary(dom, h)
    lo, hi = bnd.min(axis=0), bnd.max(axis=0)
    lattice = _hex_lattice(lo, hi, h)
    lattice = lattice[dom.contains(lattice)]
    seg_a, seg_b = bnd, np.roll(bnd, -1, axis=0)
    dist = _segment_distance(lattice, seg_a, seg_b)
    keep = dist > 0.6 * h
    at_origin = np.all(np.abs(lattice) < 1e-12 * h, axis=1)
    origin_inside = bool(dom.contains(np.zeros((1, 2)))[0]) and dom.origin_distance() > 1e-9 * dom.diameter
    if origin_inside:
        near_origin = np.linalg.norm(lattice, axis=1) < 0.6 * h
        keep = (keep & ~near_origin) | at_origin
        if not at_origin.any():
            lattice = np.vstack([lattice, [[0.0, 0.0]]])
            keep = np.append(keep, True)
    interior = lattice[keep]
    for _ in range(12):
        n_b = len(bnd)
        pts = np.vstack([bnd, interior])
        tri, missing = _triangulate_points(dom, pts, n_b)
        if not missing:
            break
        # split missing boundary segments at their midpoints
        mids = {i: 0.5 * (bnd[i] + bnd[(i + 1) % n_b]) for i in missing}
        if isinstance(dom, StarDomain):
            mids = {i: dom.project(m[None, :])[0] for i, m in mids.items()}
        new = []
        for i in range(n_b):
            new.append(bnd[i])
            if i in mids:
                new.append(mids[i])
        bnd = np.asarray(new)
    else:
        raise MeshFailure("boundary recovery did not converge")
    n_b = len(bnd)
    movable = np.ones(len(pts), dtype=bool)
    movable[:n_b] = False
    origin_idx = None
    if origin_inside:
        origin_idx = int(n_b + np.argmin(np.linalg.norm(interior, axis=1)))
        movable[origin_idx] = False
    for _ in range(2):
        pts = _smooth(pts, tri, movable, dom, smoothing_sweeps)
        tri, missing = _triangulate_points(dom, pts, n_b)
        if missing:
            raise MeshFailure("smoothing broke boundary conformity")
    used = np.zeros(len(pts), dtype=bool)
    used[tri.ravel()] = True
    if not used.all():
        raise MeshFailure("mesh has isolated vertices")
    mesh = Mesh(pts, tri, boundary_edges_of(tri), h, dom, origin_idx)
    if len(mesh.boundary_edges) != n_b:
        raise MeshFailure("mesh boundary does not match the domain boundary")
    return mesh


def refine(mesh: Mesh) -> Mesh:
    """Uniform red refinement (each triangle split into four)."""
    tri = mesh.triangles
    e = np.concatenate([tri[:, [0, 1]], tri[:, [1, 2]], tri[:, [2, 0]]])
    key = np.sort(e, axis=1)
    uniq, inv = np.unique(key, axis=0, return_inverse=True)
    inv = inv.ravel()
    n = mesh.n_vertices
    mids = 0.5 * (mesh.vertices[uniq[:, 0]] + mesh.vertices[uniq[:, 1]])
    bkey = np.sort(mesh.boundary_edges, axis=1)
    edge_index = {tuple(k): i for i, k in enumerate(uniq.tolist())}
    bidx = np.array([edge_index[tuple(k)] for k in bkey.tolist()], dtype=int)
    if isinstance(mesh.domain, StarDomain):
        mids[bidx] = mesh.domain.project(mids[bidx])
    verts = np.vstack([mesh.vertices, mids])
    m = len(tri)
    e01, e12, e20 = (inv[i * m : (i + 1) * m] + n for i in range(3))
    a, b, c = tri[:, 0], tri[:, 1], tri[:, 2]
    new_tri = np.concatenate(
        [
            np.stack([a, e01, e20], axis=1),
            np.stack([e01, b, e12], axis=1),
            np.stack([e20, e12, c], axis=1),
            np.stack([e01, e12, e20], axis=1),
        ]
    )
    be = mesh.boundary_edges
    bm = bidx + n
    new_b = np.concatenate([np.stack([be[:, 0], bm], axis=1), np.stack([bm, be[:, 1]], axis=1)])
    return Mesh(verts, new_tri, new_b, mesh.h / 2.0, mesh.domain, mesh.origin_vertex)
