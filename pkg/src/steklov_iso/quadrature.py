"""Quadrature rules shared by the geometry, isoperimetry and FEM modules.

Every adaptive routine returns ``(value, error_estimate)`` where the error is
the difference between an n-point and a 2n-point rule on the accepted panels.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Callable, Iterable

import numpy as np

from .errors import QuadratureError

ArrayFn = Callable[[np.ndarray], np.ndarray]


@lru_cache(maxsize=None)
def gauss_legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of the n-point Gauss-Legendre rule on [0, 1]."""
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (x + 1.0), 0.5 * w


def fixed_gauss(f: ArrayFn, a: float, b: float, n: int = 16) -> float:
    t, w = gauss_legendre(n)
    return float((b - a) * np.dot(w, f(a + (b - a) * t)))


def adaptive_gauss(
    f: ArrayFn,
    a: float,
    b: float,
    *,
    rtol: float = 1e-13,
    atol: float = 0.0,
    n: int = 16,
    breakpoints: Iterable[float] = (),
    max_depth: int = 40,
) -> tuple[float, float]:
    """Adaptive Gauss-Legendre integration of a vectorized ``f`` over [a, b].

    Panels are bisected until the n-point and 2n-point rules agree.  Interior
    ``breakpoints`` (kinks, jumps) are always used as panel boundaries.
    """
    cuts = sorted({a, b, *(p for p in breakpoints if a < p < b)})
    t1, w1 = gauss_legendre(n)
    t2, w2 = gauss_legendre(2 * n)

    def panel(lo: float, hi: float) -> tuple[float, float]:
        h = hi - lo
        coarse = h * np.dot(w1, f(lo + h * t1))
        fine = h * np.dot(w2, f(lo + h * t2))
        return float(fine), float(abs(fine - coarse))

    # First pass fixes the global scale used by the relative tolerance.
    stack = [(lo, hi, 0) for lo, hi in zip(cuts[:-1], cuts[1:])]
    first = [panel(lo, hi) for lo, hi, _ in stack]
    scale = abs(sum(v for v, _ in first))
    scale = max(scale, sum(abs(v) for v, _ in first) * 1e-3)
    tol = max(atol, rtol * scale)

    total: list[float] = []
    error: list[float] = []
    pending = [(lo, hi, d, res) for (lo, hi, d), res in zip(stack, first)]
    while pending:
        lo, hi, depth, (val, err) = pending.pop()
        width_share = (hi - lo) / (b - a) if b > a else 1.0
        if err <= max(tol * width_share, 1e-300) or err <= 4e-16 * abs(val):
            total.append(val)
            error.append(err)
            continue
        if depth >= max_depth:
            raise QuadratureError(f"adaptive_gauss did not converge on [{lo}, {hi}]")
        mid = 0.5 * (lo + hi)
        pending.append((lo, mid, depth + 1, panel(lo, mid)))
        pending.append((mid, hi, depth + 1, panel(mid, hi)))
    return float(np.sum(np.sort(total))), float(np.sum(error))


def periodic_trapezoid(
    f: ArrayFn,
    *,
    rtol: float = 1e-14,
    n0: int = 64,
    n_max: int = 1 << 18,
) -> tuple[float, float]:
    """Integrate a smooth 2π-periodic function over [0, 2π] with doubling."""
    n = n0
    vals = f(2.0 * np.pi * np.arange(n) / n)
    prev = 2.0 * np.pi * float(np.mean(vals))
    while True:
        n *= 2
        if n > n_max:
            raise QuadratureError("periodic_trapezoid did not converge")
        vals = f(2.0 * np.pi * np.arange(n) / n)
        cur = 2.0 * np.pi * float(np.mean(vals))
        scale = max(abs(cur), 2.0 * np.pi * float(np.mean(np.abs(vals))))
        err = abs(cur - prev)
        if err <= rtol * scale or scale == 0.0:
            return cur, err
        prev = cur


# Degree-4, 6-point symmetric triangle rule (barycentric points, weights sum to 1).
_A1, _B1 = 0.108103018168070, 0.445948490915965
_A2, _B2 = 0.816847572980459, 0.091576213509771
TRIANGLE_DEG4_POINTS = np.array(
    [
        [_A1, _B1, _B1],
        [_B1, _A1, _B1],
        [_B1, _B1, _A1],
        [_A2, _B2, _B2],
        [_B2, _A2, _B2],
        [_B2, _B2, _A2],
    ]
)
TRIANGLE_DEG4_WEIGHTS = np.array([0.223381589678011] * 3 + [0.109951743655322] * 3)
TRIANGLE_DEG4_WEIGHTS /= TRIANGLE_DEG4_WEIGHTS.sum()


def triangle_rule_points(tri_xy: np.ndarray) -> np.ndarray:
    """Physical quadrature points, shape (n_tri, 6, 2), for triangles (n_tri, 3, 2)."""
    return np.einsum("qk,tkd->tqd", TRIANGLE_DEG4_POINTS, tri_xy)
