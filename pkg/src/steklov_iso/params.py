"""Derived scalars for power weights and the admissibility classifiers.

For ``w = |x|^α``, ``v = |x|^(β-α)`` in dimension N::

    z = β + 1 - α          ρ = sqrt(N² + 2α(N-2) + α²)
    ℓ = ρ - N              k = z + 1 - N + ρ
    m = m₁(1) = (2 - N - α + ρ) / 2

so that ℓ = α + 2m - 2 and k = β + 2m.  The weighted isoperimetric inequality
relating P_k and |·|_ℓ is available on four parameter regions (cases i'..iv'),
and each case i..iv of the eigenvalue theorem maps into one of them.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

from .errors import EllOutOfRange, NoRootInBracket
from .weights import PowerWeightPair

THEOREM_CASES = ("i", "ii", "iii", "iv")
LEMMA_CASES = ("i'", "ii'", "iii'", "iv'")

# Closed inequalities are tested with this relative slack so that identities
# such as k - ℓ - 1 = z survive rounding.
_SLACK = 1e-12


def _le(a: float, b: float) -> bool:
    return a <= b + _SLACK * (1.0 + abs(a) + abs(b))


@dataclass(frozen=True)
class ParamSet:
    alpha: float
    beta: float
    dim: int
    z: float
    rho: float
    ell: float
    k: float
    m: float

    def to_dict(self) -> dict:
        return asdict(self)


def derive_params(wp: PowerWeightPair) -> ParamSet:
    a, b, N = wp.alpha, wp.beta, wp.dim
    rho = math.sqrt(N * N + 2.0 * a * (N - 2) + a * a)
    z = b + 1.0 - a
    return ParamSet(
        alpha=a,
        beta=b,
        dim=N,
        z=z,
        rho=rho,
        ell=-N + rho,
        k=z + 1.0 - N + rho,
        m=(2.0 - N - a) / 2.0 + rho / 2.0,
    )


def f_value(z: float, rho: float, dim: int) -> float:
    return z * (z + rho) ** 2 + rho * (dim - 1) ** 2 / dim


def find_z0(rho: float, dim: int) -> float:
    """Unique zero of f on (-ρ/3, 0), by bisection to full double precision."""
    lo, hi = -rho / 3.0, 0.0
    f_lo = f_value(lo, rho, dim)
    if f_lo >= 0.0:
        raise NoRootInBracket(f"f(-rho/3) = {f_lo} >= 0: no zero in (-rho/3, 0)")
    # f(0) > 0 always, and f is increasing on the bracket.
    while True:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if f_value(mid, rho, dim) < 0.0:
            lo = mid
        else:
            hi = mid
    return lo if abs(f_value(lo, rho, dim)) <= abs(f_value(hi, rho, dim)) else hi


def paper_threshold_triggers(rho: float, dim: int) -> bool:
    """The printed trigger N-1 < 2ρ/(3√3) for the z ≥ z₀ proviso."""
    return dim - 1 < 2.0 * rho / (3.0 * math.sqrt(3.0))


def derived_threshold_triggers(rho: float, dim: int) -> bool:
    """f(-ρ/3) < 0, i.e. f actually changes sign on [-ρ/3, 0]."""
    return f_value(-rho / 3.0, rho, dim) < 0.0


def classify_theorem11(ps: ParamSet, f_threshold: str = "derived") -> str:
    """First of the cases i..iv that holds for (z, ρ, N), else ``"none"``.

    ``f_threshold="derived"`` imposes z ≥ z₀ exactly when f(-ρ/3) < 0;
    ``"paper"`` uses the printed trigger N-1 < 2ρ/(3√3).
    """
    z, rho, N = ps.z, ps.rho, ps.dim
    if _le(0.0, z):
        return "i"
    if _le(-rho / N, z) and _le(z, min(0.0, N - 1.0 - rho)):
        return "ii"
    if N >= 3 and _le(N - 1.0 - rho, z) and _le(z, 0.0):
        if f_threshold == "paper":
            needs_root = paper_threshold_triggers(rho, N)
        elif f_threshold == "derived":
            needs_root = derived_threshold_triggers(rho, N)
        else:
            raise ValueError(f"f_threshold must be 'paper' or 'derived', got {f_threshold!r}")
        if not needs_root or _le(find_z0(rho, N), z):
            return "iii"
    if N == 2 and _le((abs(ps.alpha) - rho) / 2.0, z) and _le(z, 0.0):
        return "iv"
    return "none"


def iv_derived_inequality(ps: ParamSet) -> bool:
    """0 ≤ z + 1/(z+ρ), the inequality the N=2 lower bound is used to produce."""
    if ps.z + ps.rho <= 0.0:
        return False
    return _le(0.0, ps.z + 1.0 / (ps.z + ps.rho))


def classify_lemma21(k: float, ell: float, dim: int) -> str:
    """First of the cases i'..iv' that holds for (k, ℓ, N), else ``"none"``."""
    N = dim
    if not ell > -N:
        raise EllOutOfRange(f"ell={ell} must exceed -N={-N}")
    if N >= 1 and _le(ell + 1.0, k):
        return "i'"
    if N >= 2 and _le(k, ell + 1.0) and _le(ell * (N - 1.0) / N, k) and _le(k, 0.0):
        return "ii'"
    if N >= 3 and _le(0.0, k) and _le(k, ell + 1.0):
        s = k + N - 1.0
        denom = s * s - (N - 1.0) ** 2 / N
        if denom > 0.0 and _le(ell, s**3 / denom - N):
            return "iii'"
    if N == 2 and _le(0.0, k) and _le(k, ell + 1.0) and _le(ell, k - 1.0 + 1.0 / (k + 1.0)):
        return "iv'"
    return "none"


def check_lemma23(ps: ParamSet, f_threshold: str = "derived") -> bool:
    """Theorem case present ⇒ some isoperimetric case present for (k, ℓ)."""
    if classify_theorem11(ps, f_threshold) == "none":
        return True
    return classify_lemma21(ps.k, ps.ell, ps.dim) != "none"


@dataclass(frozen=True)
class ConditionTag:
    theorem_case: str
    lemma_case: str
    z0: float | None = None
    threshold_rules_agree: bool = True
    iv_derived_ok: bool | None = None

    def to_dict(self) -> dict:
        return asdict(self)


def condition_tag(ps: ParamSet, f_threshold: str = "derived") -> ConditionTag:
    theorem = classify_theorem11(ps, f_threshold)
    other = classify_theorem11(ps, "paper" if f_threshold == "derived" else "derived")
    lemma = classify_lemma21(ps.k, ps.ell, ps.dim)
    z0 = None
    if theorem == "iii" and derived_threshold_triggers(ps.rho, ps.dim):
        z0 = find_z0(ps.rho, ps.dim)
    iv_ok = iv_derived_inequality(ps) if ps.dim == 2 else None
    return ConditionTag(theorem, lemma, z0, theorem == other, iv_ok)
