"""Planar domains, symmetry certificates and weighted measures.

Two boundary representations are supported: simple polygons (vertices stored
counter-clockwise) and star domains ``r < R(θ)`` with a finite Fourier series
``R(θ) = a₀ + Σ_q (a_q cos qθ + b_q sin qθ)``.  Volume-type integrals of
homogeneous or radial integrands reduce to one-dimensional integrals along the
boundary through the fan decomposition from the origin.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable, Mapping

import numpy as np
from scipy.optimize import brentq

from .errors import DegenerateDomain, IntegrabilityViolation, OriginOnBoundary, RootFindFailure
from .quadrature import adaptive_gauss, periodic_trapezoid
from .radial import RadialAntiderivative, ball_volume, sphere_area

QUAD_RTOL = 1e-13


def _cross(a: np.ndarray, b: np.ndarray) -> float:
    return float(a[0] * b[1] - a[1] * b[0])


def points_in_polygon(points: np.ndarray, vertices: np.ndarray) -> np.ndarray:
    """Even-odd ray casting, vectorized over ``points`` (n, 2)."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    x, y = pts[:, 0][:, None], pts[:, 1][:, None]
    a = vertices
    b = np.roll(vertices, -1, axis=0)
    ax, ay, bx, by = a[:, 0], a[:, 1], b[:, 0], b[:, 1]
    straddle = (ay > y) != (by > y)
    with np.errstate(divide="ignore", invalid="ignore"):
        x_cross = ax + (y - ay) * (bx - ax) / (by - ay)
    hits = straddle & (x < x_cross)
    return np.count_nonzero(hits, axis=1) % 2 == 1


def _segments_intersect(p1, p2, q1, q2) -> bool:
    def orient(a, b, c):
        return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])

    d1, d2 = orient(q1, q2, p1), orient(q1, q2, p2)
    d3, d4 = orient(p1, p2, q1), orient(p1, p2, q2)
    return (d1 * d2 < 0) and (d3 * d4 < 0)


@dataclass(frozen=True)
class PolygonDomain:
    vertices: tuple[tuple[float, float], ...]
    declared_symmetries: frozenset = frozenset()
    name: str = ""

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 2 or len(v) < 3:
            raise DegenerateDomain("polygon needs at least three 2D vertices")
        area = 0.5 * np.sum(v[:, 0] * np.roll(v[:, 1], -1) - np.roll(v[:, 0], -1) * v[:, 1])
        if abs(area) < 1e-14 * max(np.ptp(v[:, 0]), np.ptp(v[:, 1]), 1.0) ** 2:
            raise DegenerateDomain("polygon has zero area")
        if area < 0:
            v = v[::-1]
        n = len(v)
        for i in range(n):
            for j in range(i + 2, n):
                if i == 0 and j == n - 1:
                    continue
                if _segments_intersect(v[i], v[(i + 1) % n], v[j], v[(j + 1) % n]):
                    raise DegenerateDomain("polygon is not simple")
        object.__setattr__(self, "vertices", tuple(map(tuple, v.tolist())))

    @property
    def V(self) -> np.ndarray:
        return np.asarray(self.vertices, dtype=float)

    def edges(self):
        v = self.V
        return zip(v, np.roll(v, -1, axis=0))

    def contains(self, points) -> np.ndarray:
        return points_in_polygon(points, self.V)

    @property
    def diameter(self) -> float:
        v = self.V
        return float(np.max(np.linalg.norm(v[:, None, :] - v[None, :, :], axis=-1)))

    @property
    def max_radius(self) -> float:
        return float(np.max(np.linalg.norm(self.V, axis=1)))

    def origin_distance(self) -> float:
        """Distance from the origin to the boundary."""
        best = np.inf
        for a, b in self.edges():
            d = b - a
            t = np.clip(-np.dot(a, d) / np.dot(d, d), 0.0, 1.0)
            best = min(best, float(np.linalg.norm(a + t * d)))
        return best

    @property
    def contains_origin(self) -> bool:
        return bool(self.contains(np.zeros((1, 2)))[0]) and self.origin_distance() > 0

    def scaled(self, t: float) -> "PolygonDomain":
        return PolygonDomain(tuple(map(tuple, (t * self.V).tolist())), self.declared_symmetries, self.name)

    def to_spec(self) -> dict:
        return {"shape": "polygon", "vertices": [list(p) for p in self.vertices]}


@dataclass(frozen=True)
class StarDomain:
    """``{r < R(θ)}`` with ``a = (a₀, a₁, ...)`` cosine and ``b = (b₁, b₂, ...)`` sine coefficients."""

    a: tuple[float, ...]
    b: tuple[float, ...] = ()
    declared_symmetries: frozenset = frozenset()
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "a", tuple(float(x) for x in self.a))
        object.__setattr__(self, "b", tuple(float(x) for x in self.b))
        if not self.a:
            raise DegenerateDomain("star domain needs a0")
        theta = np.linspace(0.0, 2 * np.pi, 4096, endpoint=False)
        if np.min(self.R(theta)) <= 0:
            raise DegenerateDomain("R(theta) must stay positive")

    def R(self, theta) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        out = np.full_like(theta, self.a[0])
        for q, c in enumerate(self.a[1:], start=1):
            out = out + c * np.cos(q * theta)
        for q, s in enumerate(self.b, start=1):
            out = out + s * np.sin(q * theta)
        return out

    def dR(self, theta) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        out = np.zeros_like(theta)
        for q, c in enumerate(self.a[1:], start=1):
            out = out - q * c * np.sin(q * theta)
        for q, s in enumerate(self.b, start=1):
            out = out + q * s * np.cos(q * theta)
        return out

    def point(self, theta) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        r = self.R(theta)
        return np.stack([r * np.cos(theta), r * np.sin(theta)], axis=-1)

    def contains(self, points) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        r = np.linalg.norm(pts, axis=1)
        return r < self.R(np.arctan2(pts[:, 1], pts[:, 0]))

    def project(self, points) -> np.ndarray:
        """Radial projection onto the boundary curve."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        return self.point(np.arctan2(pts[:, 1], pts[:, 0]))

    @property
    def diameter(self) -> float:
        p = self.point(np.linspace(0.0, 2 * np.pi, 2048, endpoint=False))
        d = p[:, None, :] - p[None, ::4, :]
        return float(np.max(np.linalg.norm(d, axis=-1)))

    @property
    def max_radius(self) -> float:
        return float(np.max(self.R(np.linspace(0.0, 2 * np.pi, 8192, endpoint=False))))

    def origin_distance(self) -> float:
        return float(np.min(self.R(np.linspace(0.0, 2 * np.pi, 8192, endpoint=False))))

    contains_origin = True

    def scaled(self, t: float) -> "StarDomain":
        return StarDomain(tuple(t * x for x in self.a), tuple(t * x for x in self.b), self.declared_symmetries, self.name)

    def to_spec(self) -> dict:
        return {"shape": "star", "a": list(self.a), "b": list(self.b)}


def disc(radius: float = 1.0, name: str = "disc") -> StarDomain:
    return StarDomain((float(radius),), (), frozenset({"central", "quarter_turn"}), name)


def square(half_width: float = 1.0, center=(0.0, 0.0), name: str = "square") -> PolygonDomain:
    c = np.asarray(center, dtype=float)
    s = half_width
    v = [(c[0] - s, c[1] - s), (c[0] + s, c[1] - s), (c[0] + s, c[1] + s), (c[0] - s, c[1] + s)]
    return PolygonDomain(tuple(v), name=name)


def rectangle(half_x: float, half_y: float, name: str = "rectangle") -> PolygonDomain:
    v = [(-half_x, -half_y), (half_x, -half_y), (half_x, half_y), (-half_x, half_y)]
    return PolygonDomain(tuple(v), name=name)


def cross(arm: float = 1.0, half_width: float = 0.4, name: str = "cross") -> PolygonDomain:
    """Plus-shaped 12-gon, invariant under quarter turns about the origin."""
    a, w = arm, half_width
    v = [(w, -w), (a, -w), (a, w), (w, w), (w, a), (-w, a), (-w, w), (-a, w), (-a, -w), (-w, -w), (-w, -a), (w, -a)]
    return PolygonDomain(tuple(v), name=name)


@dataclass(frozen=True)
class AnnularSectors:
    """Finite union of disjoint sectors ``{r0 < r < r1, t0 < θ < t1}``."""

    sectors: tuple[tuple[float, float, float, float], ...]
    name: str = ""

    def contains(self, points) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        r = np.linalg.norm(pts, axis=1)
        th = np.mod(np.arctan2(pts[:, 1], pts[:, 0]), 2 * np.pi)
        out = np.zeros(len(pts), dtype=bool)
        for r0, r1, t0, t1 in self.sectors:
            dt = np.mod(th - t0, 2 * np.pi)
            out |= (r > r0) & (r < r1) & (dt < t1 - t0)
        return out

    @property
    def max_radius(self) -> float:
        return max(s[1] for s in self.sectors)


Domain = PolygonDomain | StarDomain


def domain_from_spec(spec: Mapping[str, Any]) -> Domain | AnnularSectors:
    shape = spec.get("shape")
    name = str(spec.get("id", spec.get("name", "")))
    syms = frozenset(spec.get("symmetries", ()))
    if shape == "polygon":
        return PolygonDomain(tuple(tuple(map(float, p)) for p in spec["vertices"]), syms, name)
    if shape == "star":
        return StarDomain(tuple(spec["a"]), tuple(spec.get("b", ())), syms, name)
    if shape == "disc":
        return StarDomain((float(spec.get("radius", 1.0)),), (), syms, name)
    if shape == "sectors":
        return AnnularSectors(tuple(tuple(map(float, s)) for s in spec["sectors"]), name)
    raise DegenerateDomain(f"unknown domain shape {shape!r}")


def require_origin_off_boundary(dom: Domain) -> None:
    if dom.origin_distance() <= 1e-9 * dom.diameter:
        raise OriginOnBoundary("the origin lies on the boundary")


# ---------------------------------------------------------------------------
# boundary and fan integrals


def _edge_breaks(a: np.ndarray, d: np.ndarray) -> list[float]:
    """Parameter of the point on the edge closest to the origin."""
    t = -float(np.dot(a, d)) / float(np.dot(d, d))
    return [t] if 0.0 < t < 1.0 else []


def boundary_integral(dom: Domain, g: Callable[[np.ndarray], np.ndarray], rtol: float = QUAD_RTOL) -> tuple[float, float]:
    """∫_{∂Ω} g ds for vectorized ``g(points)``; returns (value, error estimate)."""
    if isinstance(dom, StarDomain):

        def integrand(theta):
            return g(dom.point(theta)) * np.hypot(dom.R(theta), dom.dR(theta))

        return periodic_trapezoid(integrand, rtol=rtol)
    total, err = [], 0.0
    for a, b in dom.edges():
        d = b - a
        L = float(np.linalg.norm(d))
        val, e = adaptive_gauss(lambda t: g(a + t[:, None] * d), 0.0, 1.0, rtol=rtol, breakpoints=_edge_breaks(a, d))
        total.append(L * val)
        err += L * e
    return math.fsum(total), err


def homogeneous_integral(
    dom: Domain, f: Callable[[np.ndarray], np.ndarray], degree: float, rtol: float = QUAD_RTOL
) -> tuple[float, float]:
    """∫_Ω f dx for f positively homogeneous of the given degree (> -2).

    Each boundary element is coned to the origin; the radial integral is done
    in closed form, leaving a 1D integral along the boundary.
    """
    if not degree > -2:
        raise IntegrabilityViolation(f"homogeneous degree {degree} is not integrable in the plane")
    c = 1.0 / (degree + 2.0)
    if isinstance(dom, StarDomain):

        def integrand(theta):
            u = np.stack([np.cos(theta), np.sin(theta)], axis=-1)
            return c * dom.R(theta) ** (degree + 2.0) * f(u)

        return periodic_trapezoid(integrand, rtol=rtol)
    total, err = [], 0.0
    for a, b in dom.edges():
        d = b - a
        cr = _cross(a, b)
        if cr == 0.0:
            continue
        val, e = adaptive_gauss(lambda t: f(a + t[:, None] * d), 0.0, 1.0, rtol=rtol, breakpoints=_edge_breaks(a, d))
        total.append(c * cr * val)
        err += abs(c * cr) * e
    return math.fsum(total), err


def radial_integral(
    region: Domain | AnnularSectors, g, rtol: float = QUAD_RTOL, antiderivative: RadialAntiderivative | None = None
) -> tuple[float, float]:
    """∫_region g(|x|) dx for a vectorized radial profile ``g`` (2D)."""
    G = antiderivative or RadialAntiderivative(g, region.max_radius * (1 + 1e-9), dim=2)
    if isinstance(region, AnnularSectors):
        vals = [(t1 - t0) * float(G(r1) - G(r0)) for r0, r1, t0, t1 in region.sectors]
        return math.fsum(vals), 0.0
    if isinstance(region, StarDomain):
        return periodic_trapezoid(lambda th: G(region.R(th)), rtol=rtol)
    breaks_r = [b for b in getattr(g, "breakpoints", ()) if b > 0]
    total, err = [], 0.0
    for a, b in region.edges():
        d = b - a
        cr = _cross(a, b)
        if cr == 0.0:
            continue
        cuts = _edge_breaks(a, d)
        dd, ad, aa = float(np.dot(d, d)), float(np.dot(a, d)), float(np.dot(a, a))
        for rb in breaks_r:
            disc_ = ad * ad - dd * (aa - rb * rb)
            if disc_ > 0:
                sq = math.sqrt(disc_)
                cuts += [t for t in ((-ad - sq) / dd, (-ad + sq) / dd) if 0.0 < t < 1.0]

        def integrand(t):
            p = a + t[:, None] * d
            rho2 = np.einsum("ij,ij->i", p, p)
            return G(np.sqrt(rho2)) / rho2

        val, e = adaptive_gauss(integrand, 0.0, 1.0, rtol=rtol, breakpoints=cuts)
        total.append(cr * val)
        err += abs(cr) * e
    return math.fsum(total), err


# ---------------------------------------------------------------------------
# weighted measures


def _volume_with_error(dom: Domain, ell: float) -> tuple[float, float]:
    if not ell > -2:
        raise IntegrabilityViolation(f"|x|^{ell} is not integrable near the origin in the plane")
    if ell < 0:
        require_origin_off_boundary(dom)
    return homogeneous_integral(dom, lambda p: np.linalg.norm(p, axis=-1) ** ell, ell)


def _perimeter_with_error(dom: Domain, k: float) -> tuple[float, float]:
    require_origin_off_boundary(dom)
    return boundary_integral(dom, lambda p: np.linalg.norm(p, axis=-1) ** k)


def weighted_volume(dom: Domain, ell: float) -> float:
    """|Ω|_ℓ = ∫_Ω |x|^ℓ dx."""
    return _volume_with_error(dom, ell)[0]


def weighted_perimeter(dom: Domain, k: float) -> float:
    """P_k(Ω) = ∫_{∂Ω} |x|^k ds."""
    return _perimeter_with_error(dom, k)[0]


def ball_weighted_volume(R: float, ell: float, dim: int) -> float:
    return sphere_area(dim) * R ** (ell + dim) / (ell + dim)


def ball_weighted_perimeter(R: float, k: float, dim: int) -> float:
    return sphere_area(dim) * R ** (k + dim - 1)


def equivalent_radius(vol_ell: float, ell: float, dim: int) -> float:
    """Radius of the centred ball with |B_R|_ℓ = vol_ell."""
    if not vol_ell > 0:
        raise ValueError("weighted volume must be positive")
    if not ell > -dim:
        raise IntegrabilityViolation(f"ell={ell} must exceed -N")
    return ((ell + dim) * vol_ell / (dim * ball_volume(dim))) ** (1.0 / (ell + dim))


def measure_radius(mass: float, W, dim: int = 2, r_hint: float = 1.0) -> float:
    """R with ∫_{B_R} W(|x|) dx = mass, for a positive radial weight W."""
    if not mass > 0:
        raise RootFindFailure("target measure must be positive")
    area = sphere_area(dim)
    r_hi = max(r_hint, 1e-3)
    for _ in range(200):
        if area * float(RadialAntiderivative(W, r_hi, dim=dim, n_cells=64)(r_hi)) >= mass:
            break
        r_hi *= 2.0
    else:
        raise RootFindFailure("could not bracket the equal-measure radius")
    r_hi *= 1.5  # margin against the coarse bracketing table
    G = RadialAntiderivative(W, r_hi, dim=dim)
    return brentq(lambda R: area * float(G(R)) - mass, 0.0, r_hi, xtol=1e-15, rtol=1e-15)


# ---------------------------------------------------------------------------
# symmetry


@dataclass(frozen=True)
class SymmetryResult:
    status: str  # "analytic" | "numeric" | "fail"
    max_value: float = 0.0
    radii_sampled: int = 0

    @property
    def passed(self) -> bool:
        return self.status != "fail"


@dataclass(frozen=True)
class SymmetryCertificate:
    s1: SymmetryResult
    s2: SymmetryResult

    @property
    def radii_sampled(self) -> int:
        return max(self.s1.radii_sampled, self.s2.radii_sampled)

    def to_dict(self) -> dict:
        return {
            "s1": self.s1.status,
            "s1_max_moment": self.s1.max_value,
            "s2": self.s2.status,
            "s2_max_deviation": self.s2.max_value,
            "radii_sampled": self.radii_sampled,
        }


def _cyclic_match(v: np.ndarray, w: np.ndarray, tol: float) -> bool:
    n = len(v)
    for shift in range(n):
        if np.max(np.abs(np.roll(v, -shift, axis=0) - w)) <= tol:
            return True
    return False


def _analytic_symmetry(dom: Domain, which: str) -> bool:
    if isinstance(dom, StarDomain):
        step = 2 if which == "central" else 4
        coeffs = [(q, c) for q, c in enumerate(dom.a)] + [(q, s) for q, s in enumerate(dom.b, start=1)]
        return all(q % step == 0 or c == 0.0 for q, c in coeffs)
    v = dom.V
    tol = 1e-12 * max(dom.max_radius, 1.0)
    if which == "central":
        image = -v
    else:
        image = np.stack([-v[:, 1], v[:, 0]], axis=1)
    return _cyclic_match(v, image, tol)


def circle_arcs(dom: Domain, r: float, n_angles: int = 720) -> list[tuple[float, float]]:
    """Angular intervals of Ω ∩ ∂B_r (θ increasing; may wrap past 2π)."""
    offset = 1e-3 / n_angles
    theta = offset + 2 * np.pi * np.arange(n_angles) / n_angles
    pts = np.stack([r * np.cos(theta), r * np.sin(theta)], axis=1)
    inside = dom.contains(pts)
    if inside.all():
        return [(0.0, 2 * np.pi)]
    if not inside.any():
        return []

    def crossing(i: int) -> float:
        lo, hi = theta[i], theta[i] + 2 * np.pi / n_angles
        state = inside[i]
        while hi - lo > 1e-13:
            mid = 0.5 * (lo + hi)
            p = np.array([[r * math.cos(mid), r * math.sin(mid)]])
            if bool(dom.contains(p)[0]) == state:
                lo = mid
            else:
                hi = mid
        return 0.5 * (lo + hi)

    nxt = np.roll(inside, -1)
    starts = [crossing(i) for i in np.nonzero(~inside & nxt)[0]]
    ends = [crossing(i) for i in np.nonzero(inside & ~nxt)[0]]
    if len(starts) != len(ends) or not starts:
        raise DegenerateDomain(f"inconsistent arc detection at r={r}")
    starts.sort()
    ends.sort()
    arcs = []
    for s in starts:
        later = [e for e in ends if e > s]
        e = later[0] if later else ends[0] + 2 * np.pi
        arcs.append((s, e))
    return arcs


def arc_moments(r: float, arcs) -> tuple[np.ndarray, np.ndarray, float]:
    """First moments, second-moment matrix and length of the arc set on ∂B_r."""
    m1 = np.zeros(2)
    m2 = np.zeros((2, 2))
    length = 0.0
    for s, e in arcs:
        length += r * (e - s)
        m1 += r * r * np.array([math.sin(e) - math.sin(s), math.cos(s) - math.cos(e)])
        cc = 0.5 * (e - s) + 0.25 * (math.sin(2 * e) - math.sin(2 * s))
        ss = 0.5 * (e - s) - 0.25 * (math.sin(2 * e) - math.sin(2 * s))
        cs = 0.5 * (math.sin(e) ** 2 - math.sin(s) ** 2)
        m2 += r**3 * np.array([[cc, cs], [cs, ss]])
    return m1, m2, length


def _sample_radii(dom: Domain, n_radii: int) -> np.ndarray:
    rmax = dom.max_radius
    return rmax * (np.arange(n_radii) + 0.5) / n_radii


def check_S1(dom: Domain, n_radii: int = 64, n_angles: int = 720, tol: float = 1e-8) -> SymmetryResult:
    """Balanced spherical slices: analytic via central symmetry, else sampled first moments."""
    if _analytic_symmetry(dom, "central"):
        return SymmetryResult("analytic")
    worst = 0.0
    for r in _sample_radii(dom, n_radii):
        arcs = circle_arcs(dom, r, n_angles)
        m1, _, length = arc_moments(r, arcs)
        if length > 0:
            worst = max(worst, float(np.max(np.abs(m1))) / (r * length))
    return SymmetryResult("numeric" if worst <= tol else "fail", worst, n_radii)


def check_S2(dom: Domain, n_radii: int = 64, n_angles: int = 720, tol: float = 1e-8) -> SymmetryResult:
    """Isotropic slice second moments: analytic via quarter-turn invariance, else sampled."""
    if _analytic_symmetry(dom, "quarter_turn"):
        return SymmetryResult("analytic")
    worst = 0.0
    for r in _sample_radii(dom, n_radii):
        arcs = circle_arcs(dom, r, n_angles)
        _, m2, length = arc_moments(r, arcs)
        tr = m2[0, 0] + m2[1, 1]
        if length > 0 and tr > 0:
            dev = max(abs(m2[0, 0] - m2[1, 1]), 2 * abs(m2[0, 1])) / tr
            worst = max(worst, float(dev))
    return SymmetryResult("numeric" if worst <= tol else "fail", worst, n_radii)


def symmetry_certificate(dom: Domain, n_radii: int = 64, n_angles: int = 720) -> SymmetryCertificate:
    return SymmetryCertificate(check_S1(dom, n_radii, n_angles), check_S2(dom, n_radii, n_angles))
