"""Scalar radial profiles (test functions Φ, H) and radial antiderivatives."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Callable, Mapping, Sequence

import numpy as np

from .errors import WeightInvalid
from .quadrature import gauss_legendre


def sphere_area(dim: int) -> float:
    """(N-1)-dimensional measure of the unit sphere, N·ω_N."""
    return 2.0 * math.pi ** (dim / 2.0) / math.gamma(dim / 2.0)


def ball_volume(dim: int) -> float:
    """ω_N, the volume of the unit ball."""
    return math.pi ** (dim / 2.0) / math.gamma(dim / 2.0 + 1.0)


@dataclass(frozen=True)
class PowerProfile:
    """c · r^m."""

    m: float
    c: float = 1.0
    breakpoints: tuple[float, ...] = ()

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        return self.c * r**self.m

    def derivative(self, r):
        r = np.asarray(r, dtype=float)
        if self.m == 0.0:
            return np.zeros_like(r)
        return self.c * self.m * r ** (self.m - 1.0)


@dataclass(frozen=True)
class ExpProfile:
    """c0 · exp(c r)."""

    c: float
    c0: float = 1.0
    breakpoints: tuple[float, ...] = ()

    def __call__(self, r):
        return self.c0 * np.exp(self.c * np.asarray(r, dtype=float))

    def derivative(self, r):
        return self.c * self(r)


@dataclass(frozen=True)
class StepProfile:
    """Piecewise constant: ``values[i]`` on [breaks[i-1], breaks[i])."""

    breaks: tuple[float, ...]
    values: tuple[float, ...]

    def __post_init__(self):
        if len(self.values) != len(self.breaks) + 1:
            raise ValueError("StepProfile needs len(values) == len(breaks) + 1")

    @property
    def breakpoints(self) -> tuple[float, ...]:
        return self.breaks

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        return np.asarray(self.values)[np.searchsorted(self.breaks, r, side="right")]

    def derivative(self, r):
        return np.zeros_like(np.asarray(r, dtype=float))


@dataclass(frozen=True)
class ProductProfile:
    """Pointwise product f·g, used for integrands such as H·W."""

    f: Any
    g: Any

    @property
    def breakpoints(self) -> tuple[float, ...]:
        return tuple(getattr(self.f, "breakpoints", ())) + tuple(getattr(self.g, "breakpoints", ()))

    def __call__(self, r):
        return self.f(r) * self.g(r)


class FunctionProfile:
    """Wrap plain callables (value and optional derivative) as a profile."""

    def __init__(self, fn: Callable, dfn: Callable | None = None, breakpoints: Sequence[float] = ()):
        self._fn = fn
        self._dfn = dfn
        self.breakpoints = tuple(breakpoints)

    def __call__(self, r):
        return self._fn(np.asarray(r, dtype=float))

    def derivative(self, r):
        if self._dfn is None:
            raise NotImplementedError("no derivative supplied")
        return self._dfn(np.asarray(r, dtype=float))


def profile_from_spec(spec: Mapping[str, Any]):
    kind = spec.get("kind")
    if kind == "power":
        return PowerProfile(float(spec.get("m", 1.0)), float(spec.get("c", 1.0)))
    if kind == "constant":
        return PowerProfile(0.0, float(spec.get("c", 1.0)))
    if kind == "exp":
        return ExpProfile(float(spec.get("c", -1.0)), float(spec.get("c0", 1.0)))
    if kind == "step":
        return StepProfile(tuple(map(float, spec["breaks"])), tuple(map(float, spec["values"])))
    raise WeightInvalid(f"unknown radial profile kind {kind!r}")


class RadialAntiderivative:
    """G(ρ) = ∫_0^ρ g(r) r^(N-1) dr for a vectorized radial function ``g``.

    Cell integrals on a fixed grid (breakpoints of ``g`` are grid nodes) are
    accumulated once; evaluation adds a Gauss rule on the partial cell.
    """

    def __init__(self, g, r_max: float, dim: int = 2, n_cells: int = 512, order: int = 10):
        self.g = g
        self.dim = dim
        self.r_max = float(r_max)
        breaks = [b for b in getattr(g, "breakpoints", ()) if 0.0 < b < r_max]
        nodes = np.union1d(np.linspace(0.0, r_max, n_cells + 1), breaks)
        self.nodes = nodes
        self._t, self._w = gauss_legendre(order)
        lo, hi = nodes[:-1], nodes[1:]
        cells = self._panel(lo, hi)
        self.cumulative = np.concatenate([[0.0], np.cumsum(cells)])

    def _panel(self, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
        h = hi - lo
        r = lo[:, None] + h[:, None] * self._t[None, :]
        vals = self.g(r) * r ** (self.dim - 1)
        return h * (vals @ self._w)

    def __call__(self, rho) -> np.ndarray:
        rho = np.asarray(rho, dtype=float)
        if np.any(rho > self.r_max * (1 + 1e-12)) or np.any(rho < 0):
            raise ValueError("radius outside the antiderivative table")
        flat = np.clip(rho.ravel(), 0.0, self.r_max)
        idx = np.clip(np.searchsorted(self.nodes, flat, side="right") - 1, 0, len(self.nodes) - 2)
        base = self.nodes[idx]
        out = self.cumulative[idx] + self._panel(base, flat)
        return out.reshape(rho.shape)
