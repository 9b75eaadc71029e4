"""Radial weight families: power pairs ``(|x|^α, |x|^(β-α))`` and log-convex ``W = e^V``."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Mapping

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import AlphaOutOfRange, DimTooSmall, SingularEvaluation, WeightInvalid


def _radii(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim == 0:
        raise ValueError("expected a point (array with a coordinate axis)")
    return np.linalg.norm(x, axis=-1)


@dataclass(frozen=True)
class RadialPower:
    """The homogeneous radial function ``|x|^exponent``."""

    exponent: float

    @property
    def homogeneous_degree(self) -> float:
        return self.exponent

    def of_radius(self, r) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        if self.exponent == 0.0:
            return np.ones_like(r)
        if self.exponent < 0.0 and np.any(r == 0.0):
            raise SingularEvaluation(f"|x|^{self.exponent} is undefined at the origin")
        return r**self.exponent

    def __call__(self, x) -> np.ndarray:
        return self.of_radius(_radii(x))


@dataclass(frozen=True)
class PowerWeightPair:
    alpha: float
    beta: float
    dim: int = 2

    def __post_init__(self):
        if self.dim < 2:
            raise DimTooSmall(f"dimension must be at least 2, got {self.dim}")
        if not self.alpha > -self.dim:
            raise AlphaOutOfRange(f"alpha={self.alpha} must exceed -N={-self.dim}")

    @property
    def w(self) -> RadialPower:
        """Interior weight |x|^α."""
        return RadialPower(self.alpha)

    @property
    def v(self) -> RadialPower:
        """Boundary-condition weight |x|^(β-α)."""
        return RadialPower(self.beta - self.alpha)

    @property
    def boundary_density(self) -> RadialPower:
        """Weight w·v = |x|^β of the boundary integral in the Rayleigh quotient."""
        return RadialPower(self.beta)

    def to_spec(self) -> dict:
        return {"kind": "power", "alpha": self.alpha, "beta": self.beta}


def make_power_pair(alpha: float, beta: float, dim: int) -> PowerWeightPair:
    return PowerWeightPair(float(alpha), float(beta), int(dim))


FAMILIES = ("constant", "quadratic", "power", "tabulated")


@dataclass(frozen=True)
class LogConvexWeight:
    """Radial weight ``W(r) = exp(V(r))``.

    ``params`` by family: constant ``{"c"}``, quadratic ``{"a"}`` (V = a r²),
    power ``{"a", "p"}`` (V = a r^p, p >= 1), tabulated ``{"r", "V"}``
    (cubic spline through the samples).
    """

    family: str
    params: tuple[tuple[str, Any], ...] = ()
    r_max: float = 10.0
    _spline: Any = field(default=None, compare=False, repr=False, hash=False)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise WeightInvalid(f"unknown log-convex family {self.family!r}")
        if not self.r_max > 0:
            raise WeightInvalid("r_max must be positive")
        p = self.param_dict
        if self.family == "power" and p.get("p", 1.0) < 1.0:
            raise WeightInvalid("power family requires p >= 1")
        if self.family == "tabulated":
            r = np.asarray(p["r"], dtype=float)
            V = np.asarray(p["V"], dtype=float)
            if r.ndim != 1 or r.shape != V.shape or r.size < 4 or np.any(np.diff(r) <= 0):
                raise WeightInvalid("tabulated family needs >= 4 increasing samples")
            object.__setattr__(self, "_spline", CubicSpline(r, V))

    @classmethod
    def create(cls, family: str, r_max: float = 10.0, **params) -> "LogConvexWeight":
        frozen = tuple(
            sorted((k, tuple(v) if isinstance(v, (list, np.ndarray)) else v) for k, v in params.items())
        )
        return cls(family, frozen, float(r_max))

    @property
    def param_dict(self) -> dict:
        return dict(self.params)

    homogeneous_degree = None

    def V(self, r) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        p = self.param_dict
        if self.family == "constant":
            return np.full_like(r, p.get("c", 0.0))
        if self.family == "quadratic":
            return p["a"] * r**2
        if self.family == "power":
            return p["a"] * r ** p.get("p", 1.0)
        return self._spline(r)

    def dV(self, r) -> np.ndarray:
        """V' = W'/W."""
        r = np.asarray(r, dtype=float)
        p = self.param_dict
        if self.family == "constant":
            return np.zeros_like(r)
        if self.family == "quadratic":
            return 2.0 * p["a"] * r
        if self.family == "power":
            q = p.get("p", 1.0)
            return p["a"] * q * r ** (q - 1.0)
        return self._spline(r, 1)

    def d2V(self, r) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        p = self.param_dict
        if self.family == "constant":
            return np.zeros_like(r)
        if self.family == "quadratic":
            return np.full_like(r, 2.0 * p["a"])
        if self.family == "power":
            q = p.get("p", 1.0)
            if q == 1.0:
                return np.zeros_like(r)
            with np.errstate(divide="ignore"):
                return p["a"] * q * (q - 1.0) * r ** (q - 2.0)
        return self._spline(r, 2)

    def of_radius(self, r) -> np.ndarray:
        return np.exp(self.V(r))

    def derivative(self, r) -> np.ndarray:
        return self.dV(r) * self.of_radius(r)

    def __call__(self, x) -> np.ndarray:
        return self.of_radius(_radii(x))

    def to_spec(self) -> dict:
        spec = {"kind": "logconvex", "family": self.family}
        spec.update({k: list(v) if isinstance(v, tuple) else v for k, v in self.params})
        return spec


def eval_interior_weight(wp: PowerWeightPair | LogConvexWeight, x) -> np.ndarray | float:
    """w(x) for a power pair (|x|^α) or a log-convex weight (exp V(|x|))."""
    w = wp.w if isinstance(wp, PowerWeightPair) else wp
    out = w(x)
    return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class LogConvexCertificate:
    ok: bool
    violation_r: float | None = None
    reason: str | None = None  # "decreasing" or "concave"


def validate_log_convex(W: LogConvexWeight, grid_size: int = 256) -> LogConvexCertificate:
    """Certify V' >= 0 and V'' >= 0 on a uniform grid of [0, r_max].

    Built-in families use analytic derivatives; tabulated weights use first
    and second differences of V on the grid.
    """
    if grid_size < 16:
        raise ValueError("grid_size must be at least 16")
    r = np.linspace(0.0, W.r_max, grid_size)
    if W.family == "tabulated":
        V = W.V(r)
        scale = max(np.max(np.abs(V)), 1.0)
        d1 = np.diff(V)
        d2 = V[2:] - 2.0 * V[1:-1] + V[:-2]
        tol = 1e-12 * scale
        bad1 = np.nonzero(d1 < -tol)[0]
        bad2 = np.nonzero(d2 < -tol)[0]
        first1 = r[bad1[0]] if bad1.size else np.inf
        first2 = r[bad2[0] + 1] if bad2.size else np.inf
    else:
        r_in = r[1:] if W.family == "power" and W.param_dict.get("p", 1.0) < 2.0 else r
        d1 = W.dV(r_in)
        d2 = W.d2V(r_in)
        tol = 1e-12 * max(np.max(np.abs(d1)), np.max(np.abs(d2)), 1.0)
        bad1 = np.nonzero(d1 < -tol)[0]
        bad2 = np.nonzero(d2 < -tol)[0]
        first1 = r_in[bad1[0]] if bad1.size else np.inf
        first2 = r_in[bad2[0]] if bad2.size else np.inf
    if np.isinf(first1) and np.isinf(first2):
        return LogConvexCertificate(True)
    if first1 <= first2:
        return LogConvexCertificate(False, float(first1), "decreasing")
    return LogConvexCertificate(False, float(first2), "concave")


def weight_from_spec(spec: Mapping[str, Any], dim: int = 2) -> PowerWeightPair | LogConvexWeight:
    """Build a weight from a tagged record such as ``{"kind": "power", "alpha": 0, "beta": 1}``."""
    kind = spec.get("kind")
    if kind == "power":
        return make_power_pair(spec.get("alpha", 0.0), spec.get("beta", 0.0), spec.get("dim", dim))
    if kind == "logconvex":
        params = {k: v for k, v in spec.items() if k not in ("kind", "family", "r_max", "id")}
        return LogConvexWeight.create(spec.get("family", "constant"), spec.get("r_max", 10.0), **params)
    raise WeightInvalid(f"unknown weight kind {kind!r}")
