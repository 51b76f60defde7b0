"""Command-line front end: ``bbp analyze | simulate | oracle | sweep``.

Triples may be given as ranges: ``--m 4,8,16``, ``--l 1:5`` (inclusive) or a
mix such as ``--b-peak 1:2,8``. Output is CSV or JSON on stdout or ``--output``.
Exit codes: 0 ok, 2 invalid config, 3 oracle budget refusal, 4 internal
invariant violation.
"""

from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import math
import os
import sys
from fractions import Fraction
from typing import Any, Sequence

from .analysis import DistortionFormulaReport, min_distortion
from .core import InvalidConfig, PeakConstraintViolation, validate_config
from .estimator import InconsistentTrajectory
from .oracle import DEFAULT_BUDGET, BudgetExceeded, evaluate_policy_exact, minimize_over_policies
from .policy import Mode, parse_policy
from .simulate import SimulationReport, run_experiment

SCHEMA_VERSION = 1
SIM_COLUMNS = [
    "m", "l", "b_peak", "policy", "mode", "blocks", "seed",
    "empirical_distortion", "std_error", "theoretical_distortion", "zero_distortion",
]
# sweep rows carry one extra trailing column so policies can be compared without simulating
SWEEP_COLUMNS = SIM_COLUMNS + ["exact_policy_distortion"]
ANALYZE_COLUMNS = [
    "m", "l", "b_peak", "schedule_exact", "schedule_feasible", "d_min", "d_min_decimal",
    "terms", "residual", "zero_distortion", "feasible_value", "feasible_matches",
]
ORACLE_COLUMNS = [
    "m", "l", "b_peak", "oracle_min", "formula", "equal", "feasible_value",
    "policies_evaluated", "argmin_tree",
]
BUDGET_ENV = "BBP_ORACLE_BUDGET"

EXIT_INVALID, EXIT_BUDGET, EXIT_INVARIANT = 2, 3, 4


class InvariantViolation(RuntimeError):
    pass


def parse_range(text: str) -> list[int]:
    values: list[int] = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        lo, sep, hi = part.partition(":")
        try:
            values.extend(range(int(lo), int(hi) + 1) if sep else [int(lo)])
        except ValueError:
            raise InvalidConfig(f"cannot parse range {text!r}") from None
    if not values:
        raise InvalidConfig(f"empty range {text!r}")
    return sorted(set(values))


def expand_triples(m: str, l: str, b_peak: str) -> list[tuple[int, int, int]]:  # noqa: E741
    """Cartesian product of the three ranges; b_peak values above M are clipped to M."""
    triples = set()
    for mm, ll, bb in itertools.product(parse_range(m), parse_range(l), parse_range(b_peak)):
        if mm >= 2 and bb > mm:
            bb = mm
        validate_config(mm, ll, bb)
        triples.add((mm, ll, bb))
    return sorted(triples)


def rational(x: Fraction) -> str:
    return str(Fraction(x))


def analyze_row(rep: DistortionFormulaReport) -> dict[str, Any]:
    c = rep.cfg
    return {
        "m": c.m, "l": c.l, "b_peak": c.b_peak,
        "schedule_exact": " ".join(map(rational, rep.schedule.exact)),
        "schedule_feasible": " ".join(map(str, rep.schedule.feasible)),
        "d_min": rational(rep.d_min),
        "d_min_decimal": float(rep.d_min),
        "terms": " ".join(map(rational, rep.terms)),
        "residual": rational(rep.residual),
        "zero_distortion": rep.zero_distortion,
        "feasible_value": rational(rep.feasible_value),
        "feasible_matches": rep.feasible_matches,
    }


def sim_row(rep: SimulationReport | None, cfg, policy: str, mode: str, blocks: int, seed: int,
            theo: DistortionFormulaReport, exact_policy: Fraction | None = None) -> dict[str, Any]:
    row: dict[str, Any] = {
        "m": cfg.m, "l": cfg.l, "b_peak": cfg.b_peak, "policy": policy, "mode": mode,
        "blocks": blocks, "seed": seed,
        "empirical_distortion": None if rep is None else rep.mean_distortion,
        "std_error": None if rep is None else rep.std_error,
        "theoretical_distortion": float(theo.d_min),
        "zero_distortion": theo.zero_distortion,
        "theoretical_distortion_exact": rational(theo.d_min),
    }
    if exact_policy is not None:
        row["exact_policy_distortion"] = rational(exact_policy)
    if rep is not None:
        row["errors"] = rep.errors
        row["binomial_interval"] = list(rep.binomial_interval)
        row["class_histogram"] = [
            {
                "class": "all-zero" if k is None else k,
                "count": s.count,
                "probability": s.probability,
                "mean_size": s.mean_size,
                "min_size": s.min_size,
                "max_size": s.max_size,
            }
            for k, s in rep.class_histogram.items()
        ]
        total = sum(s.probability for s in rep.class_histogram.values())
        if abs(total - 1) > 1e-9:
            raise InvariantViolation(f"class probabilities sum to {total}")
    return row


def render(rows: list[dict[str, Any]], columns: list[str], fmt: str, command: str) -> str:
    if fmt == "json":
        doc = {"schema_version": SCHEMA_VERSION, "command": command, "rows": rows}
        return json.dumps(doc, sort_keys=True, indent=2) + "\n"
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=columns, extrasaction="ignore", lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: ("" if r.get(k) is None else r[k]) for k in columns})
    return buf.getvalue()


def canonical_json(text: str) -> str:
    """Re-emit a JSON report; emitted reports are fixed points of this map."""
    return json.dumps(json.loads(text), sort_keys=True, indent=2) + "\n"


def _policies(args) -> list[str]:
    sel = [p.strip() for group in (args.policy or ["optimal"]) for p in group.split(",") if p.strip()]
    if not sel:
        raise InvalidConfig("no policy selected")
    return sorted(set(sel))


def cmd_analyze(args) -> list[dict[str, Any]]:
    return [analyze_row(min_distortion(validate_config(*t))) for t in expand_triples(args.m, args.l, args.b_peak)]


def _simulate_rows(args, blocks: int, with_exact: bool) -> list[dict[str, Any]]:
    rows = []
    for t in expand_triples(args.m, args.l, args.b_peak):
        cfg = validate_config(*t)
        theo = min_distortion(cfg)
        for sel in _policies(args):
            try:
                policy = parse_policy(sel, cfg, Mode(args.mode))
            except ValueError as e:
                raise InvalidConfig(str(e)) from None
            rep = run_experiment(cfg, policy, blocks, args.seed, args.workers, theo) if blocks else None
            exact = None
            if with_exact and _exact_is_cheap(cfg, policy):
                exact = evaluate_policy_exact(cfg, policy)
            rows.append(sim_row(rep, cfg, policy.label, policy.mode.value, blocks, args.seed, theo, exact))
    return rows


def _exact_is_cheap(cfg, policy) -> bool:
    if not policy.stochastic:
        return True
    # randomized policies are averaged over every draw at every node
    return math.comb(cfg.m, min(cfg.b_peak, cfg.m // 2)) ** cfg.l <= 10**6


def cmd_simulate(args) -> list[dict[str, Any]]:
    if args.blocks < 1:
        raise InvalidConfig("--blocks must be >= 1")
    return _simulate_rows(args, args.blocks, with_exact=False)


def cmd_oracle(args) -> list[dict[str, Any]]:
    rows = []
    for t in expand_triples(args.m, args.l, args.b_peak):
        cfg = validate_config(*t)
        res = minimize_over_policies(cfg, args.budget)
        rep = min_distortion(cfg)
        rows.append({
            "m": cfg.m, "l": cfg.l, "b_peak": cfg.b_peak,
            "oracle_min": rational(res.min_distortion),
            "formula": rational(rep.d_min),
            "equal": res.min_distortion == rep.d_min,
            "feasible_value": rational(rep.feasible_value),
            "policies_evaluated": res.policies_evaluated,
            "argmin_tree": ";".join(f"{h}:{p}" for h, p in res.argmin_tree.table()),
        })
    return rows


def cmd_sweep(args) -> list[dict[str, Any]]:
    if args.spec:
        with open(args.spec) as f:
            spec = json.load(f)
        for key in ("m", "l", "b_peak", "blocks", "seed", "mode"):
            if key in spec:
                val = spec[key]
                if key in ("m", "l", "b_peak") and isinstance(val, list):
                    val = ",".join(map(str, val))
                setattr(args, key, str(val) if key in ("m", "l", "b_peak") else val)
        if "policies" in spec:
            args.policy = [",".join(spec["policies"])]
    for key in ("m", "l", "b_peak"):
        if getattr(args, key) is None:
            raise InvalidConfig(f"sweep needs --{key.replace('_', '-')} (or a spec file)")
    if args.blocks < 0:
        raise InvalidConfig("--blocks must be >= 0")
    return _simulate_rows(args, args.blocks, with_exact=True)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bbp", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def triple(p, required=True):
        p.add_argument("--m", required=required, help="directions M (range syntax allowed)")
        p.add_argument("--l", required=required, help="block length L")
        p.add_argument("--b-peak", dest="b_peak", required=required, help="peak probe weight")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--output", "-o", help="write here instead of stdout")

    def sim_opts(p, blocks):
        p.add_argument("--policy", action="append",
                       help="optimal | sweep | idle | random:w (repeatable, comma lists allowed)")
        p.add_argument("--mode", choices=[m.value for m in Mode], default=Mode.CANONICAL.value)
        p.add_argument("--blocks", type=int, default=blocks)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("analyze", help="closed-form minimum distortion")
    triple(p)
    p.set_defaults(func=cmd_analyze, columns=ANALYZE_COLUMNS)

    p = sub.add_parser("simulate", help="Monte Carlo estimate of the block distortion")
    triple(p)
    sim_opts(p, 100_000)
    p.set_defaults(func=cmd_simulate, columns=SIM_COLUMNS)

    p = sub.add_parser("oracle", help="exhaustive minimum over deterministic policies")
    triple(p)
    p.add_argument("--budget", type=int,
                   default=int(os.environ.get(BUDGET_ENV, DEFAULT_BUDGET)),
                   help=f"max policy trees to cover (default ${BUDGET_ENV} or {DEFAULT_BUDGET})")
    p.set_defaults(func=cmd_oracle, columns=ORACLE_COLUMNS)

    p = sub.add_parser("sweep", help="grid of triples x policies, plot-ready")
    triple(p, required=False)
    p.add_argument("--spec", help="JSON file with m, l, b_peak, policies, blocks, seed")
    sim_opts(p, 0)
    p.set_defaults(func=cmd_sweep, columns=SWEEP_COLUMNS)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        rows = args.func(args)
    except InvalidConfig as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INVALID
    except BudgetExceeded as e:
        print(f"refused: {e}", file=sys.stderr)
        return EXIT_BUDGET
    except (InvariantViolation, PeakConstraintViolation, InconsistentTrajectory, AssertionError) as e:
        print(f"invariant violation: {e}", file=sys.stderr)
        return EXIT_INVARIANT
    text = render(rows, args.columns, args.format, args.command)
    if args.output:
        with open(args.output, "w", newline="") as f:
            f.write(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
