"""Weighted isoperimetric inequalities.

* power weights: P_k(Ω) ≥ C_{k,ℓ,N} |Ω|_ℓ^{(k+N-1)/(ℓ+N)}, equivalently P_k(Ω) ≥ P_k(B_R)
  for the centred ball with the same ℓ-volume;
* Hardy–Littlewood: among sets of equal μ-measure, the centred ball minimizes
  the integral of a non-decreasing radial function;
* a boundary inequality for log-convex ``W`` and radial ``Φ`` obeying a
  monotonicity condition.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from . import geometry as geo
from .errors import MonotoneCondViolated
from .params import classify_lemma21
from .radial import ProductProfile, RadialAntiderivative, sphere_area
from .weights import LogConvexWeight

DEFAULT_SLACK = 1e-9


def isop_constant(k: float, ell: float, dim: int) -> float:
    if not ell > -dim:
        raise ValueError(f"ell={ell} must exceed -N")
    s = sphere_area(dim)
    return s ** ((ell - k + 1.0) / (ell + dim)) * (ell + dim) ** ((k + dim - 1.0) / (ell + dim))


@dataclass(frozen=True)
class IsopMargin:
    lhs: float
    rhs: float
    margin: float
    relative_margin: float
    condition: str
    ball_perimeter: float
    ball_margin: float
    radius: float
    advisory: bool

    @property
    def ok(self) -> bool:
        return self.margin >= -DEFAULT_SLACK * abs(self.lhs)

    @property
    def label(self) -> str:
        return "unsupported parameter range" if self.advisory else "certified"

    def to_dict(self) -> dict:
        d = asdict(self)
        d["ok"] = self.ok
        d["label"] = self.label
        return d


def check_isop(dom: geo.Domain, k: float, ell: float, dim: int = 2) -> IsopMargin:
    """Margin of P_k(Ω) ≥ C·|Ω|_ℓ^{(k+N-1)/(ℓ+N)} and of P_k(Ω) ≥ P_k(B_R)."""
    if dim != 2:
        raise ValueError("domains are planar; use dim=2")
    condition = classify_lemma21(k, ell, dim)
    vol = geo.weighted_volume(dom, ell)
    per = geo.weighted_perimeter(dom, k)
    rhs = isop_constant(k, ell, dim) * vol ** ((k + dim - 1.0) / (ell + dim))
    R = geo.equivalent_radius(vol, ell, dim)
    ball = geo.ball_weighted_perimeter(R, k, dim)
    margin = per - rhs
    return IsopMargin(
        lhs=per,
        rhs=rhs,
        margin=margin,
        relative_margin=margin / per,
        condition=condition,
        ball_perimeter=ball,
        ball_margin=per - ball,
        radius=R,
        advisory=condition == "none",
    )


def _check_nondecreasing(fn, r_max: float, n: int = 2048) -> tuple[bool, float | None]:
    r = np.linspace(0.0, r_max, n)
    vals = np.asarray(fn(r), dtype=float)
    tol = 1e-12 * max(float(np.max(np.abs(vals))), 1.0)
    bad = np.nonzero(np.diff(vals) < -tol)[0]
    return (bad.size == 0, None if bad.size == 0 else float(r[bad[0]]))


@dataclass(frozen=True)
class InequalityCheck:
    lhs: float
    rhs: float
    ok: bool
    radius: float

    def to_dict(self) -> dict:
        return asdict(self)


def check_hardy_littlewood(M, H, mu_weight: LogConvexWeight, slack: float = DEFAULT_SLACK) -> InequalityCheck:
    """∫_{B_R} H dμ ≤ ∫_M H dμ with μ = W dx and μ(B_R) = μ(M)."""
    r_max = M.max_radius
    ok_h, where = _check_nondecreasing(H, r_max)
    if not ok_h:
        raise ValueError(f"H must be non-decreasing (drops near r={where:.6g})")
    W = mu_weight.of_radius
    mass, _ = geo.radial_integral(M, W)
    R = geo.measure_radius(mass, W, dim=2, r_hint=r_max)
    rhs, _ = geo.radial_integral(M, ProductProfile(H, W))
    HW = RadialAntiderivative(ProductProfile(H, W), R, dim=2)
    lhs = 2.0 * math.pi * float(HW(R))
    return InequalityCheck(lhs, rhs, lhs <= rhs + slack * abs(rhs), R)


@dataclass(frozen=True)
class MonotoneCertificate:
    ok: bool
    violation_r: float | None = None
    max_drop: float = 0.0

    def to_dict(self) -> dict:
        return asdict(self)


def monotone_quantity(W: LogConvexWeight, Phi, dim: int, r) -> np.ndarray:
    """G(r) = (N-1)Φ/r + Φ' + (W'/W)Φ."""
    r = np.asarray(r, dtype=float)
    phi = Phi(r)
    return (dim - 1.0) * phi / r + Phi.derivative(r) + W.dV(r) * phi


def check_monotone_cond(
    W: LogConvexWeight, Phi, dim: int = 2, r_max: float | None = None, n: int = 4096, tol: float = 1e-8
) -> MonotoneCertificate:
    """Certify that G(r) is non-decreasing on a grid of (0, r_max]."""
    if r_max is None:
        r_max = W.r_max
        prof = getattr(Phi, "profile", None)
        if prof is not None:
            r_max = min(r_max, float(prof.grid[-1]))
    r = np.linspace(r_max / n, r_max, n)
    G = monotone_quantity(W, Phi, dim, r)
    scale = max(float(np.max(np.abs(G))), 1e-300)
    drops = -np.diff(G)
    bad = np.nonzero(drops > tol * scale)[0]
    if bad.size:
        return MonotoneCertificate(False, float(r[bad[0]]), float(np.max(drops)) / scale)
    return MonotoneCertificate(True, None, float(max(np.max(drops), 0.0)) / scale)


def check_weighted_isop_L32(
    dom: geo.Domain, W: LogConvexWeight, Phi, slack: float = DEFAULT_SLACK, r_max: float | None = None
) -> InequalityCheck:
    """∫_{∂B_R} W Φ dH ≤ ∫_{∂Ω} W Φ dH where μ(B_R) = μ(Ω), dμ = W dx."""
    cert = check_monotone_cond(W, Phi, 2, r_max=r_max)
    if not cert.ok:
        raise MonotoneCondViolated(f"monotonicity condition fails near r={cert.violation_r:.6g}")
    mass, _ = geo.radial_integral(dom, W.of_radius)
    R = geo.measure_radius(mass, W.of_radius, dim=2, r_hint=dom.max_radius)
    lhs = 2.0 * math.pi * R * float(W.of_radius(R)) * float(Phi(np.array(R)))

    def density(p):
        r = np.linalg.norm(p, axis=-1)
        return W.of_radius(r) * Phi(r)

    rhs, _ = geo.boundary_integral(dom, density)
    return InequalityCheck(lhs, rhs, lhs <= rhs + slack * abs(rhs), R)
