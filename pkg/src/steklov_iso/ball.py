"""Steklov spectra of origin-centred balls.

Power weights separate into ``u = r^m Y_j(θ)`` with the closed-form exponent
``m₁(j)`` and eigenvalue ``γ = m₁(j) R^(α-β-1)``.  For a log-convex weight the
first N nontrivial eigenfunctions are ``(x_i/|x|) F(|x|)`` where F is the
regular solution of

    F'' + (W'/W) F' + (N-1) F'/r = (N-1) F / r²,

and ``γ₁(B_R) = F'(R)/F(R)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np
from scipy.integrate import simpson
from scipy.interpolate import CubicHermiteSpline
from scipy.special import comb

from .errors import IntegrationFailure, WeightInvalid
from .radial import sphere_area
from .weights import LogConvexWeight, PowerWeightPair, validate_log_convex


def exponent_m(j: int, alpha: float, dim: int, branch: str = "plus") -> float:
    if j < 0:
        raise ValueError("mode index j must be non-negative")
    base = (2.0 - dim - alpha) / 2.0
    root = 0.5 * math.sqrt((dim - 2.0 + alpha) ** 2 + 4.0 * j * (j + dim - 2.0))
    if branch == "plus":
        return base + root
    if branch == "minus":
        return base - root
    raise ValueError(f"branch must be 'plus' or 'minus', got {branch!r}")


def harmonic_multiplicity(j: int, dim: int) -> int:
    """Dimension of the degree-j spherical harmonics on S^(N-1)."""
    if j == 0:
        return 1
    if j == 1:
        return dim
    return int(comb(j + dim - 1, dim - 1, exact=True) - comb(j + dim - 3, dim - 1, exact=True))


@dataclass(frozen=True)
class SpectrumEntry:
    j: int
    exponent: float
    gamma: float
    multiplicity: int


@dataclass(frozen=True)
class BallSpectrum:
    radius: float
    dim: int
    entries: tuple[SpectrumEntry, ...]

    @property
    def gamma1(self) -> float:
        return self.entries[1].gamma

    def eigenvalues(self, n: int | None = None) -> np.ndarray:
        """Eigenvalues repeated by multiplicity, γ₀ first."""
        vals = np.repeat([e.gamma for e in self.entries], [e.multiplicity for e in self.entries])
        return vals if n is None else vals[:n]

    def to_dict(self) -> dict:
        return {
            "radius": self.radius,
            "dim": self.dim,
            "entries": [e.__dict__ for e in self.entries],
        }


def power_ball_spectrum(wp: PowerWeightPair, R: float, j_max: int = 4) -> BallSpectrum:
    if not R > 0:
        raise ValueError("radius must be positive")
    if j_max < 1:
        raise ValueError("j_max must be at least 1")
    scale = R ** (wp.alpha - wp.beta - 1.0)
    entries = []
    for j in range(j_max + 1):
        m = 0.0 if j == 0 else exponent_m(j, wp.alpha, wp.dim)
        entries.append(SpectrumEntry(j, m, m * scale, harmonic_multiplicity(j, wp.dim)))
    return BallSpectrum(float(R), wp.dim, tuple(entries))


def power_trial_gradients(x: np.ndarray, m: float) -> np.ndarray:
    """Gradients of u_i = x_i |x|^(m-1); returns array [..., i, k] = ∂u_i/∂x_k."""
    x = np.asarray(x, dtype=float)
    r = np.linalg.norm(x, axis=-1)[..., None, None]
    N = x.shape[-1]
    eye = np.eye(N)
    outer = x[..., :, None] * x[..., None, :]
    return eye * r ** (m - 1.0) + (m - 1.0) * outer * r ** (m - 3.0)


def profile_trial_gradients(x: np.ndarray, F: float | np.ndarray, dF: float | np.ndarray) -> np.ndarray:
    """Gradients of u_i = (x_i/|x|) F(|x|) given F and F' at |x|."""
    x = np.asarray(x, dtype=float)
    r = np.linalg.norm(x, axis=-1)[..., None, None]
    F = np.asarray(F, dtype=float)[..., None, None]
    dF = np.asarray(dF, dtype=float)[..., None, None]
    N = x.shape[-1]
    outer = x[..., :, None] * x[..., None, :]
    return np.eye(N) * F / r + outer / r**2 * (dF - F / r)


# ---------------------------------------------------------------------------
# log-convex weights


@dataclass(frozen=True)
class RadialProfile:
    """Regular solution F of the j=1 radial equation on a log-uniform grid.

    ``grid`` runs from ε to ``r_max`` (≥ R) and contains R exactly at
    ``grid[radius_index]``.
    """

    grid: np.ndarray
    F: np.ndarray
    Fprime: np.ndarray
    weight: LogConvexWeight
    radius: float
    dim: int
    radius_index: int
    step: float  # uniform step in s = log r
    _splines: Any = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        r, F, dF = self.grid, self.F, self.Fprime
        object.__setattr__(
            self,
            "_splines",
            (CubicHermiteSpline(r, F, dF), CubicHermiteSpline(r, dF, self.second_derivative(r, F, dF))),
        )

    def second_derivative(self, r, F, dF) -> np.ndarray:
        N = self.dim
        return -(self.weight.dV(r) + (N - 1.0) / r) * dF + (N - 1.0) * F / r**2

    def _split(self, r):
        r = np.asarray(r, dtype=float)
        small = r < self.grid[0]
        rr = np.where(small, self.grid[0], r)
        return r, small, rr

    def F_at(self, r) -> np.ndarray:
        r, small, rr = self._split(r)
        out = self._splines[0](rr)
        # F ≈ r·F(ε)/ε on [0, ε]
        return np.where(small, r * self.F[0] / self.grid[0], out)

    def dF_at(self, r) -> np.ndarray:
        r, small, rr = self._split(r)
        return np.where(small, self.Fprime[0], self._splines[1](rr))

    def residual(self) -> float:
        """Relative ODE residual at interior grid points (4th-order differences in log r)."""
        s_F = self.F
        Fs = self.grid * self.Fprime
        h = self.step
        # F_ss from 4th-order central differences of F_s on the uniform s-grid
        Fss = (-Fs[4:] + 8 * Fs[3:-1] - 8 * Fs[1:-3] + Fs[:-4]) / (12 * h)
        r = self.grid[2:-2]
        N = self.dim
        terms = [Fss, (N - 2.0) * Fs[2:-2], r * self.weight.dV(r) * Fs[2:-2], (N - 1.0) * s_F[2:-2]]
        res = terms[0] + terms[1] + terms[2] - terms[3]
        scale = np.maximum.reduce([np.abs(t) for t in terms])
        return float(np.max(np.abs(res) / scale))

    def ball_integral(self, integrand) -> float:
        """∫_{B_R} g(|x|) dx for g given on the grid values, via Simpson in log r."""
        i = self.radius_index
        r = self.grid[: i + 1]
        g = np.asarray(integrand(r, self.F[: i + 1], self.Fprime[: i + 1]), dtype=float)
        s = np.log(r)
        body = simpson(g * r**self.dim, x=s)
        head = g[0] * r[0] ** self.dim / self.dim
        return sphere_area(self.dim) * float(body + head)

    def phi_squared(self) -> "SquaredProfile":
        return SquaredProfile(self)


@dataclass(frozen=True)
class SquaredProfile:
    """Φ = F² built from a solved profile, with Φ' = 2 F F'."""

    profile: RadialProfile
    breakpoints: tuple[float, ...] = ()

    def __call__(self, r):
        return self.profile.F_at(r) ** 2

    def derivative(self, r):
        return 2.0 * self.profile.F_at(r) * self.profile.dF_at(r)


def _rk4_log(W: LogConvexWeight, dim: int, s0: float, n: int, h: float, y0: np.ndarray) -> np.ndarray:
    """RK4 in s = log r for y = (F, r F')."""
    N = dim
    # r·V'(r) at the step starts and midpoints, evaluated once
    half = s0 + 0.5 * h * np.arange(2 * n + 1)
    rv = np.exp(half) * W.dV(np.exp(half))
    ys = np.empty((n + 1, 2))
    ys[0] = y0
    F, G = float(y0[0]), float(y0[1])
    for i in range(n):
        c0, c1, c2 = rv[2 * i], rv[2 * i + 1], rv[2 * i + 2]
        k1F, k1G = G, -(N - 2.0 + c0) * G + (N - 1.0) * F
        F2, G2 = F + 0.5 * h * k1F, G + 0.5 * h * k1G
        k2F, k2G = G2, -(N - 2.0 + c1) * G2 + (N - 1.0) * F2
        F3, G3 = F + 0.5 * h * k2F, G + 0.5 * h * k2G
        k3F, k3G = G3, -(N - 2.0 + c1) * G3 + (N - 1.0) * F3
        F4, G4 = F + h * k3F, G + h * k3G
        k4F, k4G = G4, -(N - 2.0 + c2) * G4 + (N - 1.0) * F4
        F += (h / 6.0) * (k1F + 2 * k2F + 2 * k3F + k4F)
        G += (h / 6.0) * (k1G + 2 * k2G + 2 * k3G + k4G)
        if not (math.isfinite(F) and math.isfinite(G)):
            raise IntegrationFailure(f"non-finite state at r={math.exp(s0 + (i + 1) * h):.3g}")
        ys[i + 1] = F, G
    return ys


def solve_radial_ode(
    W: LogConvexWeight,
    R: float,
    dim: int = 2,
    steps: int = 2000,
    *,
    r_max: float | None = None,
    eps_rel: float = 1e-6,
    validate: bool = True,
) -> RadialProfile:
    """Shoot the regular branch F(ε)=ε, F'(ε)=1 from ε = R·eps_rel out to R.

    The integration runs in s = log r, where the coordinate singularity at the
    origin becomes a constant-coefficient term.  With ``r_max > R`` the same
    step continues past R so the profile can be evaluated on a larger domain.
    """
    if steps < 128:
        raise ValueError("steps must be at least 128")
    if not R > 0:
        raise ValueError("radius must be positive")
    if validate:
        cert = validate_log_convex(W, 256)
        if not cert.ok:
            raise WeightInvalid(f"weight is not non-decreasing log-convex ({cert.reason} at r={cert.violation_r:.4g})")
    eps = R * eps_rel
    s0, sR = math.log(eps), math.log(R)
    h = (sR - s0) / steps
    n_total = steps
    if r_max is not None and r_max > R:
        n_total += int(math.ceil((math.log(r_max) - sR) / h))
    ys = _rk4_log(W, dim, s0, n_total, h, np.array([eps, eps]))
    s = s0 + h * np.arange(n_total + 1)
    grid = np.exp(s)
    grid[steps] = R
    F = ys[:, 0]
    dF = ys[:, 1] / grid
    if np.any(F <= 0):
        raise IntegrationFailure("profile lost positivity")
    return RadialProfile(grid, F, dF, W, float(R), dim, steps, h)


def logconvex_ball_gamma1(profile: RadialProfile) -> float:
    i = profile.radius_index
    return float(profile.Fprime[i] / profile.F[i])


@dataclass(frozen=True)
class MonotonicityCertificate:
    ok: bool
    violation: str | None = None
    violation_r: float | None = None
    printed_form_ok: bool | None = None


def lemma33_monotonicity(profile: RadialProfile, tol: float = 1e-8) -> MonotonicityCertificate:
    """Check A = F'² + (N-1)F²/r² non-increasing and B = (N-1)F²/r + 2FF' + (W'/W)F² non-decreasing.

    ``printed_form_ok`` records whether B with (N-1)F²/r² in place of
    (N-1)F²/r is also non-decreasing on the grid; it does not affect ``ok``.
    """
    i = profile.radius_index
    r = profile.grid[: i + 1]
    F = profile.F[: i + 1]
    dF = profile.Fprime[: i + 1]
    N = profile.dim
    lv = profile.weight.dV(r)
    A = dF**2 + (N - 1.0) * F**2 / r**2
    B = (N - 1.0) * F**2 / r + 2.0 * F * dF + lv * F**2
    B_printed = (N - 1.0) * F**2 / r**2 + 2.0 * F * dF + lv * F**2

    def first_bad(values: np.ndarray, sign: float) -> int | None:
        d = sign * np.diff(values)
        bad = np.nonzero(d < -tol * max(np.max(np.abs(values)), 1e-300))[0]
        return int(bad[0]) if bad.size else None

    printed_ok = first_bad(B_printed, 1.0) is None
    ia = first_bad(A, -1.0)
    if ia is not None:
        return MonotonicityCertificate(False, "A increasing", float(r[ia + 1]), printed_ok)
    ib = first_bad(B, 1.0)
    if ib is not None:
        return MonotonicityCertificate(False, "B decreasing", float(r[ib + 1]), printed_ok)
    return MonotonicityCertificate(True, None, None, printed_ok)
