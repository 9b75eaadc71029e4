"""End-to-end checks of the eigenvalue inequalities on concrete domains.

Each ``verify_*`` function gates on the symmetry and parameter hypotheses,
computes the ball side exactly (power weights) or by shooting (log-convex
weights), the domain side by finite elements, and compares them against a
combined error bar ``ε_total = ε_fem + ε_quad + ε_ode``.  Intermediate
inequalities of the proofs are recorded as consistency rows.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Any

import numpy as np

from . import geometry as geo
from .ball import (
    lemma33_monotonicity,
    logconvex_ball_gamma1,
    power_ball_spectrum,
    power_trial_gradients,
    solve_radial_ode,
)
from .errors import MonotoneCondViolated, WeightInvalid
from .fem.solver import steklov_study
from .isoperimetry import check_isop, check_weighted_isop_L32
from .params import condition_tag, derive_params
from .radial import FunctionProfile, sphere_area
from .weights import LogConvexWeight, PowerWeightPair, validate_log_convex

THEOREMS = ("T1.1", "T1.2", "T1.4", "T1.5", "C1.3")
STATUSES = ("verified", "violated", "unsupported", "inconclusive")


@dataclass
class Settings:
    h: float = 0.1
    refinements: int = 2
    inconclusive_fraction: float = 0.05  # ε_total above this share of the scale → inconclusive
    slack: float = 1e-9
    ode_steps: int = 2000
    f_threshold: str = "derived"


@dataclass
class ConsistencyRow:
    name: str
    lhs: float
    relation: str  # ">=", "<=" or "=="
    rhs: float
    tol: float
    ok: bool

    @classmethod
    def compare(cls, name: str, lhs: float, relation: str, rhs: float, tol: float) -> "ConsistencyRow":
        if relation == ">=":
            ok = lhs >= rhs - tol
        elif relation == "<=":
            ok = lhs <= rhs + tol
        else:
            ok = abs(lhs - rhs) <= tol
        return cls(name, float(lhs), relation, float(rhs), float(tol), bool(ok))


@dataclass
class VerificationReport:
    theorem: str
    domain_id: str
    weight_spec: dict
    params: dict
    symmetry: dict
    gamma1_omega: float
    gamma_list_omega: list
    R: float
    gamma1_ball: float
    margin: float
    tolerance_used: float
    status: str
    mesh_h: float
    convergence_rate: float
    variant: str | None = None
    condition: dict | None = None
    error_budget: dict = field(default_factory=dict)
    sharp: bool = False
    reasons: list = field(default_factory=list)
    consistency: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return _clean(asdict(self))

    @property
    def consistency_ok(self) -> bool:
        return all(row["ok"] if isinstance(row, dict) else row.ok for row in self.consistency)


def _clean(obj):
    """JSON-safe copy: numpy scalars to Python, non-finite floats to None."""
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def decide_status(margin: float, eps_total: float, scale: float, gates_ok: bool, settings: Settings) -> tuple[str, bool]:
    """(status, sharp) from the margin, the error bar and the hypothesis gates."""
    sharp = abs(margin) < eps_total
    if not gates_ok:
        return "unsupported", sharp
    if not eps_total <= settings.inconclusive_fraction * abs(scale):
        return "inconclusive", sharp
    if margin >= -eps_total:
        return "verified", sharp
    return "violated", sharp


def _domain_id(dom) -> str:
    return getattr(dom, "name", "") or type(dom).__name__


def _fem(dom, weight, settings: Settings, n_eigs: int = 2):
    study = steklov_study(dom, weight, settings.h, n_eigs, settings.refinements)
    fin = study.finest
    return study, fin


# ---------------------------------------------------------------------------
# power weights


@dataclass
class _PowerSetup:
    ps: Any
    tag: Any
    sym: geo.SymmetryCertificate
    vol: float
    vol_err: float
    R: float
    gamma_ball: float
    eps_quad: float


def _power_setup(dom, wp: PowerWeightPair, settings: Settings) -> _PowerSetup:
    if wp.dim != 2:
        raise ValueError("finite element checks are planar; use dim=2")
    ps = derive_params(wp)
    tag = condition_tag(ps, settings.f_threshold)
    sym = geo.symmetry_certificate(dom)
    vol, vol_err = geo._volume_with_error(dom, ps.ell)
    R = geo.equivalent_radius(vol, ps.ell, wp.dim)
    gamma_ball = power_ball_spectrum(wp, R, j_max=1).gamma1
    # relative error in R is vol_err / (vol (ℓ+N)); γ ∝ R^(α-β-1)
    rel_R = vol_err / (vol * (ps.ell + wp.dim))
    eps_quad = abs(gamma_ball) * (abs(wp.alpha - wp.beta - 1.0) * rel_R + 1e-12)
    return _PowerSetup(ps, tag, sym, vol, vol_err, R, gamma_ball, eps_quad)


def _trial_rows(dom, wp: PowerWeightPair, s: _PowerSetup, gamma1: float, eps_fem: float) -> list[ConsistencyRow]:
    ps = s.ps
    m, N = ps.m, wp.dim

    def energy_density(p):
        g = power_trial_gradients(p, m)  # (..., N, N): g[..., i, :] = ∇u_i
        r = np.linalg.norm(p, axis=-1)
        return np.sum(g**2, axis=(-1, -2)) * r**wp.alpha

    closed = (N + m * m - 1.0) * s.vol
    quad, qerr = geo.homogeneous_integral(dom, energy_density, ps.ell)
    P_k = geo.weighted_perimeter(dom, ps.k)
    rows = [
        ConsistencyRow.compare("trial_energy_identity", quad, "==", closed, 1e-9 * abs(closed) + qerr),
        ConsistencyRow.compare("trial_inequality", closed, ">=", gamma1 * P_k, eps_fem * P_k + 1e-9 * closed),
        ConsistencyRow.compare(
            "ball_identity",
            (N + m * m - 1.0) * geo.ball_weighted_volume(s.R, ps.ell, N),
            "==",
            s.gamma_ball * geo.ball_weighted_perimeter(s.R, ps.k, N),
            1e-10 * closed,
        ),
    ]
    iso = check_isop(dom, ps.k, ps.ell, N)
    rows.append(ConsistencyRow.compare("isoperimetric", iso.lhs, ">=", iso.ball_perimeter, 1e-9 * iso.lhs))
    if s.sym.s1.passed:
        for i in range(N):
            mom, _ = geo.boundary_integral(
                dom, lambda p, i=i: p[..., i] * np.linalg.norm(p, axis=-1) ** (m - 1.0 + wp.beta)
            )
            rows.append(ConsistencyRow.compare(f"balanced_trace_x{i + 1}", mom, "==", 0.0, 1e-8 * P_k))
    return rows


def verify_T11(dom, wp: PowerWeightPair, h: float | None = None, settings: Settings | None = None) -> VerificationReport:
    settings = _settings(settings, h)
    s = _power_setup(dom, wp, settings)
    study, fin = _fem(dom, wp, settings)
    gamma1 = float(fin.gamma[0])
    eps_fem = study.error_estimate(1)
    eps_total = eps_fem + s.eps_quad
    margin = s.gamma_ball - gamma1
    reasons = []
    if not s.sym.s1.passed:
        reasons.append("S1 fails")
    if s.tag.theorem_case == "none":
        reasons.append("no admissible parameter case")
    status, sharp = decide_status(margin, eps_total, s.gamma_ball, not reasons, settings)
    return VerificationReport(
        theorem="T1.1",
        domain_id=_domain_id(dom),
        weight_spec=wp.to_spec(),
        params=s.ps.to_dict(),
        symmetry=s.sym.to_dict(),
        gamma1_omega=gamma1,
        gamma_list_omega=fin.gamma.tolist(),
        R=s.R,
        gamma1_ball=s.gamma_ball,
        margin=margin,
        tolerance_used=eps_total,
        status=status,
        mesh_h=fin.h,
        convergence_rate=study.rate(1),
        condition=s.tag.to_dict(),
        error_budget={"fem": eps_fem, "quad": s.eps_quad, "ode": 0.0},
        sharp=sharp,
        reasons=reasons,
        consistency=[asdict(r) for r in _trial_rows(dom, wp, s, gamma1, eps_fem)],
    )


def verify_T12(dom, wp: PowerWeightPair, h: float | None = None, settings: Settings | None = None) -> VerificationReport:
    settings = _settings(settings, h)
    s = _power_setup(dom, wp, settings)
    N = wp.dim
    study, fin = _fem(dom, wp, settings)
    g = fin.gamma[:N]
    eps_g = [study.error_estimate(i + 1) for i in range(N)]
    lhs = float(np.sum(1.0 / g))
    rhs = N / s.gamma_ball
    margin = lhs - rhs
    eps_fem = float(sum(e / gi**2 for e, gi in zip(eps_g, g)))
    eps_quad = rhs * s.eps_quad / s.gamma_ball
    eps_total = eps_fem + eps_quad
    reasons = []
    if not s.sym.s1.passed:
        reasons.append("S1 fails")
    if not s.sym.s2.passed:
        reasons.append("S2 fails")
    if s.tag.theorem_case == "none":
        reasons.append("no admissible parameter case")
    status, sharp = decide_status(margin, eps_total, rhs, not reasons, settings)
    m = s.ps.m
    P_k = geo.weighted_perimeter(dom, s.ps.k)
    middle = N / (N + m * m - 1.0) * P_k / s.vol
    rows = [
        ConsistencyRow.compare("harmonic_trial_bound", lhs, ">=", middle, eps_fem + 1e-9 * middle),
        ConsistencyRow.compare("harmonic_isoperimetric", middle, ">=", rhs, eps_quad + 1e-9 * rhs),
    ]
    return VerificationReport(
        theorem="T1.2",
        domain_id=_domain_id(dom),
        weight_spec=wp.to_spec(),
        params=s.ps.to_dict(),
        symmetry=s.sym.to_dict(),
        gamma1_omega=float(g[0]),
        gamma_list_omega=fin.gamma.tolist(),
        R=s.R,
        gamma1_ball=s.gamma_ball,
        margin=margin,
        tolerance_used=eps_total,
        status=status,
        mesh_h=fin.h,
        convergence_rate=study.rate(1),
        condition=s.tag.to_dict(),
        error_budget={"fem": eps_fem, "quad": eps_quad, "ode": 0.0},
        sharp=sharp,
        reasons=reasons,
        consistency=[asdict(r) for r in rows],
    )


def verify_C13(dom, weight: PowerWeightPair | float, h: float | None = None, settings: Settings | None = None) -> list[VerificationReport]:
    """α = 0, β ≥ −2: both the first-eigenvalue and the harmonic-mean bound.

    ``weight`` may be a power pair or just β.  Pairs outside the corollary's
    range are still computed but marked unsupported.
    """
    wp = weight if isinstance(weight, PowerWeightPair) else PowerWeightPair(0.0, float(weight), 2)
    out = []
    for fn, tag in ((verify_T11, "T1.1"), (verify_T12, "T1.2")):
        rep = fn(dom, wp, h, settings)
        rep.theorem = "C1.3"
        rep.variant = tag
        extra = [r for r, bad in (("alpha != 0", wp.alpha != 0.0), ("beta < -2", wp.beta < -2.0)) if bad]
        if extra:
            rep.reasons.extend(extra)
            rep.status = "unsupported"
        out.append(rep)
    return out


# ---------------------------------------------------------------------------
# log-convex weights


@dataclass
class _LogConvexSetup:
    sym: geo.SymmetryCertificate
    mass: float
    R: float
    profile: Any
    gamma_ball: float
    eps_ode: float
    eps_quad: float


def _logconvex_setup(dom, W: LogConvexWeight, settings: Settings) -> _LogConvexSetup:
    cert = validate_log_convex(W)
    if not cert.ok:
        raise WeightInvalid(f"weight is not non-decreasing log-convex ({cert.reason} at r={cert.violation_r:.4g})")
    sym = geo.symmetry_certificate(dom)
    mass, mass_err = geo.radial_integral(dom, W.of_radius)
    R = geo.measure_radius(mass, W.of_radius, 2, r_hint=dom.max_radius)
    r_max = 1.05 * max(R, dom.max_radius)
    steps = settings.ode_steps
    profile = solve_radial_ode(W, R, 2, steps, r_max=r_max)
    gamma_ball = logconvex_ball_gamma1(profile)
    coarse = logconvex_ball_gamma1(solve_radial_ode(W, R, 2, steps // 2, validate=False))
    eps_ode = abs(gamma_ball - coarse)
    dR = mass_err / (2.0 * math.pi * R * float(W.of_radius(R))) + 1e-14 * R
    bumped = logconvex_ball_gamma1(solve_radial_ode(W, R * (1 + 1e-4), 2, steps, validate=False))
    eps_quad = abs(bumped - gamma_ball) / (1e-4 * R) * dR + 1e-12 * abs(gamma_ball)
    return _LogConvexSetup(sym, mass, R, profile, gamma_ball, eps_ode, eps_quad)


def _profile_rows(dom, W: LogConvexWeight, s: _LogConvexSetup, gamma1: float, eps_fem: float) -> tuple[list, dict]:
    prof = s.profile
    N = 2

    def energy(r, F, dF):
        return (dF**2 + (N - 1.0) * F**2 / r**2) * W.of_radius(r)

    E_ball = prof.ball_integral(energy)
    FR = float(prof.F[prof.radius_index])
    bnd_ball = sphere_area(N) * s.R ** (N - 1) * FR**2 * float(W.of_radius(s.R))
    g = FunctionProfile(lambda r: energy(r, prof.F_at(r), prof.dF_at(r)))
    E_dom, e_err = geo.radial_integral(dom, g)
    bnd_dom, _ = geo.boundary_integral(dom, lambda p: prof.F_at(np.linalg.norm(p, axis=-1)) ** 2 * W(p))
    mono = lemma33_monotonicity(prof)
    rows = [
        ConsistencyRow.compare("lemma33_monotonicity", float(mono.ok), "==", 1.0, 0.0),
        ConsistencyRow.compare("ball_energy_identity", E_ball, "==", s.gamma_ball * bnd_ball, 1e-6 * E_ball),
        ConsistencyRow.compare("trial_inequality", E_dom, ">=", gamma1 * bnd_dom, eps_fem * bnd_dom + 1e-9 * E_dom),
        ConsistencyRow.compare("hardy_littlewood", E_dom, "<=", E_ball, 1e-9 * E_ball + e_err),
    ]
    try:
        l32 = check_weighted_isop_L32(dom, W, prof.phi_squared())
        rows.append(ConsistencyRow.compare("boundary_isoperimetric", l32.lhs, "<=", l32.rhs, 1e-9 * l32.rhs))
    except MonotoneCondViolated:
        rows.append(ConsistencyRow("boundary_isoperimetric", float("nan"), "<=", float("nan"), 0.0, False))
    info = {"E_ball": E_ball, "E_dom": E_dom, "bnd_ball": bnd_ball, "bnd_dom": bnd_dom, "printed_form_ok": mono.printed_form_ok}
    return rows, info


def _logconvex_report(theorem, dom, W, s, study, fin, margin, eps_fem, scale, gates, rows, settings):
    eps_total = eps_fem + s.eps_quad * (scale / s.gamma_ball if theorem == "T1.5" else 1.0) + s.eps_ode * (
        scale / s.gamma_ball if theorem == "T1.5" else 1.0
    )
    reasons = [r for r, ok in gates if not ok]
    status, sharp = decide_status(margin, eps_total, scale, not reasons, settings)
    return VerificationReport(
        theorem=theorem,
        domain_id=_domain_id(dom),
        weight_spec=W.to_spec(),
        params={"family": W.family, "mass": s.mass},
        symmetry=s.sym.to_dict(),
        gamma1_omega=float(fin.gamma[0]),
        gamma_list_omega=fin.gamma.tolist(),
        R=s.R,
        gamma1_ball=s.gamma_ball,
        margin=margin,
        tolerance_used=eps_total,
        status=status,
        mesh_h=fin.h,
        convergence_rate=study.rate(1),
        error_budget={"fem": eps_fem, "quad": s.eps_quad, "ode": s.eps_ode},
        sharp=sharp,
        reasons=reasons,
        consistency=[asdict(r) for r in rows],
    )


def verify_T14(dom, W: LogConvexWeight, h: float | None = None, settings: Settings | None = None) -> VerificationReport:
    settings = _settings(settings, h)
    s = _logconvex_setup(dom, W, settings)
    study, fin = _fem(dom, W, settings)
    gamma1 = float(fin.gamma[0])
    eps_fem = study.error_estimate(1)
    rows, _ = _profile_rows(dom, W, s, gamma1, eps_fem)
    margin = s.gamma_ball - gamma1
    gates = [("S1 fails", s.sym.s1.passed)]
    return _logconvex_report("T1.4", dom, W, s, study, fin, margin, eps_fem, s.gamma_ball, gates, rows, settings)


def verify_T15(dom, W: LogConvexWeight, h: float | None = None, settings: Settings | None = None) -> VerificationReport:
    settings = _settings(settings, h)
    N = 2
    s = _logconvex_setup(dom, W, settings)
    study, fin = _fem(dom, W, settings)
    g = fin.gamma[:N]
    eps_g = [study.error_estimate(i + 1) for i in range(N)]
    eps_fem = float(sum(e / gi**2 for e, gi in zip(eps_g, g)))
    lhs = float(np.sum(1.0 / g))
    rhs = N / s.gamma_ball
    rows, info = _profile_rows(dom, W, s, float(g[0]), study.error_estimate(1))
    # F scaled so that the ball energy equals N
    c_ball = N / info["E_ball"]
    rows.append(ConsistencyRow.compare("normalization", s.gamma_ball * c_ball * info["bnd_ball"], "==", float(N), 1e-6 * N))
    # F scaled so that the domain energy equals N (unit energy per trial function)
    c_dom = N / info["E_dom"]
    rows.append(ConsistencyRow.compare("sum_integrals", lhs, ">=", c_dom * info["bnd_dom"], eps_fem + 1e-9 * lhs))
    gates = [("S1 fails", s.sym.s1.passed), ("S2 fails", s.sym.s2.passed)]
    return _logconvex_report("T1.5", dom, W, s, study, fin, lhs - rhs, eps_fem, rhs, gates, rows, settings)


def _settings(settings: Settings | None, h: float | None) -> Settings:
    settings = Settings() if settings is None else settings
    if h is not None and h != settings.h:
        settings = Settings(**{**asdict(settings), "h": float(h)})
    return settings


def verify(theorem: str, dom, weight, h: float | None = None, settings: Settings | None = None) -> list[VerificationReport]:
    """Dispatch by theorem label; always returns a list of reports."""
    if theorem not in THEOREMS:
        raise ValueError(f"unknown theorem {theorem!r}")
    if theorem in ("T1.1", "T1.2", "C1.3") and not isinstance(weight, PowerWeightPair):
        raise WeightInvalid(f"{theorem} needs a power weight pair")
    if theorem in ("T1.4", "T1.5") and not isinstance(weight, LogConvexWeight):
        raise WeightInvalid(f"{theorem} needs a log-convex weight")
    if theorem == "T1.1":
        return [verify_T11(dom, weight, h, settings)]
    if theorem == "T1.2":
        return [verify_T12(dom, weight, h, settings)]
    if theorem == "C1.3":
        return verify_C13(dom, weight, h, settings)
    if theorem == "T1.4":
        return [verify_T14(dom, weight, h, settings)]
    return [verify_T15(dom, weight, h, settings)]
