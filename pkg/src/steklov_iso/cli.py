"""Command line entry point ``steklov-iso``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import geometry as geo
from .ball import lemma33_monotonicity, logconvex_ball_gamma1, power_ball_spectrum, solve_radial_ode
from .errors import ConfigError, SteklovError
from .isoperimetry import check_isop, check_weighted_isop_L32
from .params import condition_tag, derive_params
from .radial import profile_from_spec
from .suite import run_suite
from .verify import THEOREMS, Settings, _clean, verify
from .weights import LogConvexWeight, PowerWeightPair, make_power_pair, weight_from_spec


def _json_arg(value: str):
    """Inline JSON, or a path to a JSON file."""
    text = value.strip()
    if text.startswith("{") or text.startswith("["):
        return json.loads(text)
    return json.loads(Path(value).read_text())


def _emit(obj) -> None:
    print(json.dumps(_clean(obj), indent=2, sort_keys=True))


def cmd_classify(args) -> int:
    ps = derive_params(make_power_pair(args.alpha, args.beta, args.dim))
    tag = condition_tag(ps, args.f_threshold)
    _emit({"params": ps.to_dict(), "condition": tag.to_dict()})
    return 0


def cmd_ball(args) -> int:
    if args.weight is not None:
        weight = weight_from_spec(_json_arg(args.weight), args.dim)
    else:
        weight = make_power_pair(args.alpha, args.beta, args.dim)
    if isinstance(weight, PowerWeightPair):
        _emit(power_ball_spectrum(weight, args.R, args.jmax).to_dict())
        return 0
    prof = solve_radial_ode(weight, args.R, args.dim, args.steps)
    cert = lemma33_monotonicity(prof)
    _emit(
        {
            "R": args.R,
            "gamma1": logconvex_ball_gamma1(prof),
            "residual": prof.residual(),
            "monotonicity": {"ok": cert.ok, "violation": cert.violation, "printed_form_ok": cert.printed_form_ok},
        }
    )
    return 0


def cmd_geometry(args) -> int:
    dom = geo.domain_from_spec(_json_arg(args.domain))
    vol = geo.weighted_volume(dom, args.ell)
    out = {
        "volume": vol,
        "perimeter": geo.weighted_perimeter(dom, args.k),
        "R": geo.equivalent_radius(vol, args.ell, 2),
        "symmetry": geo.symmetry_certificate(dom, args.n_radii, args.n_angles).to_dict(),
    }
    _emit(out)
    return 0


def cmd_isop(args) -> int:
    dom = geo.domain_from_spec(_json_arg(args.domain))
    res = check_isop(dom, args.k, args.ell, 2)
    _emit(res.to_dict())
    return 0 if res.ok or res.advisory else 1


def cmd_isop32(args) -> int:
    dom = geo.domain_from_spec(_json_arg(args.domain))
    W = weight_from_spec(_json_arg(args.weight), 2)
    if not isinstance(W, LogConvexWeight):
        raise SteklovError("isop32 needs a log-convex weight")
    phi = profile_from_spec(_json_arg(args.phi))
    res = check_weighted_isop_L32(dom, W, phi)
    _emit(res.to_dict())
    return 0 if res.ok else 1


def cmd_solve(args) -> int:
    from .fem.solver import steklov_study

    dom = geo.domain_from_spec(_json_arg(args.domain))
    weight = weight_from_spec(_json_arg(args.weight), 2)
    study = steklov_study(dom, weight, args.h, args.neigs, args.refinements)
    _emit(study.to_dict())
    return 0


def cmd_verify(args) -> int:
    dom = geo.domain_from_spec(_json_arg(args.domain))
    weight = weight_from_spec(_json_arg(args.weight), 2)
    settings = Settings(h=args.h, refinements=args.refinements)
    reports = verify(args.theorem, dom, weight, settings=settings)
    _emit([r.to_dict() for r in reports])
    return 1 if any(r.status == "violated" for r in reports) else 0


def cmd_suite(args) -> int:
    prefix = Path(args.out) if args.out else None
    jsonl = csv_path = None
    if prefix is not None:
        jsonl = prefix.with_suffix(".jsonl")
        csv_path = prefix.with_suffix(".csv")
    result = run_suite(args.config, jsonl, csv_path, workers=args.workers)
    counts = result.counts()
    print(json.dumps({"reports": len(result.reports), "counts": counts}, sort_keys=True))
    return result.exit_code


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="steklov-iso", description="Weighted Steklov eigenvalue bounds.")
    ap.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", help="derived parameters and admissible cases for power weights")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--f-threshold", choices=("derived", "paper"), default="derived",
                   help="rule deciding when the z >= z0 proviso applies")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("ball", help="spectrum on the centred ball")
    p.add_argument("--alpha", type=float, default=0.0)
    p.add_argument("--beta", type=float, default=0.0)
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--R", type=float, default=1.0)
    p.add_argument("--jmax", type=int, default=4)
    p.add_argument("--weight", default=None, help="weight spec (JSON or file); overrides alpha/beta")
    p.add_argument("--steps", type=int, default=2000, help="ODE steps for log-convex weights")
    p.set_defaults(func=cmd_ball)

    p = sub.add_parser("geometry", help="weighted volume, perimeter, radius and symmetry")
    p.add_argument("--domain", required=True)
    p.add_argument("--ell", type=float, default=0.0)
    p.add_argument("--k", type=float, default=0.0)
    p.add_argument("--n-radii", type=int, default=64)
    p.add_argument("--n-angles", type=int, default=720)
    p.set_defaults(func=cmd_geometry)

    p = sub.add_parser("isop", help="power-weight isoperimetric margin")
    p.add_argument("--domain", required=True)
    p.add_argument("--k", type=float, required=True)
    p.add_argument("--ell", type=float, required=True)
    p.set_defaults(func=cmd_isop)

    p = sub.add_parser("isop32", help="boundary inequality for a log-convex weight")
    p.add_argument("--domain", required=True)
    p.add_argument("--weight", required=True)
    p.add_argument("--phi", required=True, help='radial profile, e.g. {"kind": "power", "m": 1}')
    p.set_defaults(func=cmd_isop32)

    p = sub.add_parser("solve", help="finite element Steklov spectrum")
    p.add_argument("--domain", required=True)
    p.add_argument("--weight", required=True)
    p.add_argument("--h", type=float, default=0.1)
    p.add_argument("--neigs", type=int, default=4)
    p.add_argument("--refinements", type=int, default=0)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify", help="check one theorem on one domain")
    p.add_argument("--theorem", choices=THEOREMS, required=True)
    p.add_argument("--domain", required=True)
    p.add_argument("--weight", required=True)
    p.add_argument("--h", type=float, default=0.1)
    p.add_argument("--refinements", type=int, default=2)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("suite", help="run a verification suite")
    p.add_argument("config", nargs="?", default=None, help="suite JSON (default: built-in regression suite)")
    p.add_argument("--out", default=None, help="output prefix for .jsonl and .csv reports")
    p.add_argument("--workers", type=int, default=None)
    p.set_defaults(func=cmd_suite)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (SteklovError, ConfigError, ValueError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
