"""Suite configuration and batch execution.

A suite config is JSON::

    {
      "h": 0.1, "refinements": 2,
      "tolerances": {"inconclusive_fraction": 0.05, "slack": 1e-9},
      "domains": [{"id": "square", "shape": "polygon", "vertices": [[-1, -1], ...]}],
      "weights": [{"id": "classical", "kind": "power", "alpha": 0, "beta": 0}],
      "theorems": ["T1.1", "T1.2"],
      "workers": 1
    }

Every (theorem, domain, weight) combination whose weight kind matches the
theorem is run; power weights go to T1.1/T1.2/C1.3, log-convex weights to
T1.4/T1.5.  An optional ``"cases"`` list of ``{"theorem", "domain",
"weight"}`` id triples replaces the full product.
"""

from __future__ import annotations

import csv
import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .errors import ConfigError, SteklovError
from .geometry import domain_from_spec
from .verify import THEOREMS, Settings, VerificationReport, verify
from .weights import PowerWeightPair, weight_from_spec

log = logging.getLogger(__name__)

POWER_THEOREMS = ("T1.1", "T1.2", "C1.3")
LOGCONVEX_THEOREMS = ("T1.4", "T1.5")
CSV_FIELDS = (
    "theorem",
    "variant",
    "domain_id",
    "weight",
    "status",
    "sharp",
    "gamma1_omega",
    "gamma1_ball",
    "R",
    "margin",
    "tolerance_used",
    "mesh_h",
    "convergence_rate",
)


def _line_of(text: str, needle: str) -> int | None:
    for i, line in enumerate(text.splitlines(), start=1):
        if needle in line:
            return i
    return None


@dataclass
class SuiteConfig:
    settings: Settings
    domains: dict
    weights: dict
    cases: list  # (theorem, domain_id, weight_id)
    workers: int = 1


def default_suite_config() -> dict:
    """Disc, square, quarter-turn cross and a cos 4θ star against the α = 0 grid."""
    return {
        "h": 0.1,
        "refinements": 2,
        "domains": [
            {"id": "disc", "shape": "disc", "radius": 1.0},
            {"id": "square", "shape": "polygon", "vertices": [[-1, -1], [1, -1], [1, 1], [-1, 1]]},
            {
                "id": "cross",
                "shape": "polygon",
                "vertices": [
                    [0.4, -0.4], [1, -0.4], [1, 0.4], [0.4, 0.4], [0.4, 1], [-0.4, 1],
                    [-0.4, 0.4], [-1, 0.4], [-1, -0.4], [-0.4, -0.4], [-0.4, -1], [0.4, -1],
                ],
            },
            {"id": "star4", "shape": "star", "a": [1.0, 0.0, 0.0, 0.0, 0.15], "b": []},
        ],
        "weights": [{"id": f"alpha0_beta{b}", "kind": "power", "alpha": 0.0, "beta": float(b)} for b in (-2, -1, 0, 1)],
        "theorems": ["C1.3"],
    }


def parse_config(data: dict, text: str = "") -> SuiteConfig:
    if not isinstance(data, dict):
        raise ConfigError("top level must be a JSON object", 1 if text else None)
    known = {"h", "refinements", "tolerances", "domains", "weights", "theorems", "cases", "workers", "f_threshold"}
    for key in data:
        if key not in known:
            raise ConfigError(f"unknown key {key!r}", _line_of(text, f'"{key}"'))
    tol = data.get("tolerances", {}) or {}
    try:
        settings = Settings(
            h=float(data.get("h", 0.1)),
            refinements=int(data.get("refinements", 2)),
            inconclusive_fraction=float(tol.get("inconclusive_fraction", 0.05)),
            slack=float(tol.get("slack", 1e-9)),
            f_threshold=str(data.get("f_threshold", "derived")),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad numeric setting: {exc}") from exc
    if not settings.h > 0 or settings.refinements < 1:
        raise ConfigError("need h > 0 and refinements >= 1", _line_of(text, '"h"'))

    def build(section: str, factory) -> dict:
        out = {}
        for i, spec in enumerate(data.get(section, []) or []):
            ident = str(spec.get("id", f"{section[:-1]}{i}"))
            if ident in out:
                raise ConfigError(f"duplicate {section[:-1]} id {ident!r}", _line_of(text, f'"{ident}"'))
            try:
                out[ident] = factory(spec, ident)
            except (SteklovError, KeyError, TypeError, ValueError) as exc:
                raise ConfigError(f"{section[:-1]} {ident!r}: {exc}", _line_of(text, f'"{ident}"')) from exc
        return out

    def make_domain(spec, ident):
        return domain_from_spec({**spec, "id": ident})

    domains = build("domains", make_domain)
    weights = build("weights", lambda spec, ident: weight_from_spec(spec, 2))
    theorems = list(data.get("theorems", []) or [])
    for t in theorems:
        if t not in THEOREMS:
            raise ConfigError(f"unknown theorem {t!r}", _line_of(text, f'"{t}"'))
    cases = []
    if "cases" in data:
        for c in data["cases"]:
            t, d, w = c.get("theorem"), c.get("domain"), c.get("weight")
            if t not in THEOREMS:
                raise ConfigError(f"unknown theorem {t!r}", _line_of(text, f'"{t}"'))
            if d not in domains:
                raise ConfigError(f"unknown domain id {d!r}", _line_of(text, f'"{d}"'))
            if w not in weights:
                raise ConfigError(f"unknown weight id {w!r}", _line_of(text, f'"{w}"'))
            cases.append((t, d, w))
    else:
        for t in theorems:
            for d in domains:
                for w, weight in weights.items():
                    is_power = isinstance(weight, PowerWeightPair)
                    if (t in POWER_THEOREMS) == is_power:
                        cases.append((t, d, w))
    workers = int(data.get("workers", 1))
    return SuiteConfig(settings, domains, weights, cases, max(1, workers))


def load_config(path: str | Path | None) -> SuiteConfig:
    if path is None:
        return parse_config(default_suite_config())
    text = Path(path).read_text()
    if not text.strip():
        return parse_config({}, text)
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc.msg}", exc.lineno) from exc
    return parse_config(data, text)


def _run_case(args) -> list[dict]:
    theorem, dom, weight, settings = args
    return [r.to_dict() for r in verify(theorem, dom, weight, settings=settings)]


@dataclass
class SuiteResult:
    reports: list = field(default_factory=list)

    @property
    def exit_code(self) -> int:
        return 1 if any(r["status"] == "violated" for r in self.reports) else 0

    def counts(self) -> dict:
        out: dict[str, int] = {}
        for r in self.reports:
            out[r["status"]] = out.get(r["status"], 0) + 1
        return out


def run_suite(config: str | Path | SuiteConfig | None, jsonl_path=None, csv_path=None, workers: int | None = None) -> SuiteResult:
    cfg = config if isinstance(config, SuiteConfig) else load_config(config)
    jobs = [(t, cfg.domains[d], cfg.weights[w], cfg.settings) for t, d, w in cfg.cases]
    n_workers = workers or cfg.workers
    if n_workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=n_workers) as pool:
            batches = list(pool.map(_run_case, jobs))
    else:
        batches = [_run_case(j) for j in jobs]
    result = SuiteResult([r for batch in batches for r in batch])
    for r in result.reports:
        log.info("%s %s %s: %s", r["theorem"], r["domain_id"], r["weight_spec"], r["status"])
    if jsonl_path is not None:
        with open(jsonl_path, "w") as fh:
            for r in result.reports:
                fh.write(json.dumps(r, sort_keys=True) + "\n")
    if csv_path is not None:
        write_csv(result.reports, csv_path)
    return result


def write_csv(reports: list[dict], path) -> None:
    with open(path, "w", newline="") as fh:
        wr = csv.DictWriter(fh, fieldnames=CSV_FIELDS)
        wr.writeheader()
        for r in reports:
            row = {k: r.get(k) for k in CSV_FIELDS if k != "weight"}
            row["weight"] = json.dumps(r["weight_spec"], sort_keys=True)
            wr.writerow(row)
