"""Command-line interface.

Subcommands: gap, delta, cheeger, path-bound, audit, scan, ensemble.
Chains come in as JSON chain-spec files (see families.ChainSpec);
results go to stdout and optionally to --out as CSV or JSON. The audit
exits nonzero if any applicable check fails. Every randomized command
takes --seed and is bit-reproducible.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

from .bounds import cheeger_exact, cheeger_search, inequality_audit, path_bound
from .empirical import DeltaCurve, DeltaPoint, delta_curve, delta_monte_carlo, delta_bounds_audit
from .experiments import emit_report, random_steps_ensemble, render_report, scan
from .families import ChainSpec
from .spectral import normal_gap, weighted_singular_spectrum
from . import tolerances as tol


def _load_spec(path: str) -> ChainSpec:
    with open(path, "r", encoding="utf-8") as fh:
        return ChainSpec.from_json(json.load(fh))


def _print_json(payload: dict) -> None:
    print(json.dumps(payload, sort_keys=True, indent=2))


def _maybe_emit(args, obj) -> None:
    if args.out:
        emit_report(obj, args.out, args.format)


def _parse_floats(text: str) -> list[float]:
    return [float(tok) for tok in text.split(",") if tok.strip()]


def _parse_ints(text: str) -> list[int]:
    return [int(tok) for tok in text.split(",") if tok.strip()]


def cmd_gap(args) -> int:
    spec = _load_spec(args.spec)
    _check_extended(spec, args)
    chain = spec.build()
    spectrum = normal_gap(chain) if chain.normal else weighted_singular_spectrum(chain)
    payload = spectrum.to_json()
    closed = spec.closed_form_gap()
    if closed is not None:
        payload["closed_form_gap"] = closed
    _print_json(payload)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(json.dumps(payload, sort_keys=True, indent=2) + "\n")
    return 0


def cmd_delta(args) -> int:
    spec = _load_spec(args.spec)
    _check_extended(spec, args)
    chain = spec.build()
    curve = delta_curve(chain, range(1, args.n_max + 1))
    if args.trials:
        if args.seed is None:
            raise SystemExit("--trials draws trajectories; give an explicit --seed")
        entries = []
        for e in curve.entries:
            est, se = delta_monte_carlo(chain, e.maximizer, e.n, args.trials, args.seed)
            entries.append(
                DeltaPoint(n=e.n, delta_exact=e.delta_exact, delta_mc=est, mc_stderr=se)
            )
        curve = DeltaCurve(entries=tuple(entries))
    sys.stdout.write(render_report(curve, "csv"))
    _maybe_emit(args, curve)
    return 0


def cmd_cheeger(args) -> int:
    spec = _load_spec(args.spec)
    _check_extended(spec, args)
    chain = spec.build()
    if chain.size <= tol.CHEEGER_ENUM_LIMIT:
        result = cheeger_exact(chain)
    else:
        if args.seed is None:
            raise SystemExit("search beyond 20 states is randomized; give --seed")
        result = cheeger_search(chain, iters=args.trials or 50, seed=args.seed)
    _print_json(
        {"xi": result.xi, "argmin_set": list(result.argmin_set), "exact": result.exact}
    )
    return 0


def cmd_path_bound(args) -> int:
    spec = _load_spec(args.spec)
    _check_extended(spec, args)
    chain = spec.build()
    congestion, gap_lower, _ = path_bound(chain)
    _print_json({"congestion": congestion, "gap_lower": gap_lower})
    return 0


def cmd_audit(args) -> int:
    spec = _load_spec(args.spec)
    _check_extended(spec, args)
    chain = spec.build()
    audit = inequality_audit(
        chain,
        eps=args.eps,
        k_max=args.k_max,
        group_walk=spec.family == "cardshuffle",
    )
    if args.n_max:
        audit = audit.merged(delta_bounds_audit(chain, args.n_max))
    print(audit.to_table())
    _maybe_emit(args, audit)
    return 0 if audit.all_pass else 1


def cmd_scan(args) -> int:
    template = _load_spec(args.spec)
    sizes = _parse_ints(args.n_list)
    if template.family == "cardshuffle" and any(n >= 7 for n in sizes) and not args.extended:
        raise SystemExit("cardshuffle with N >= 7 needs --extended (5040-state SVD)")
    rows = scan(template, sizes)
    sys.stdout.write(render_report(rows, "csv"))
    _maybe_emit(args, rows)
    return 0


def cmd_ensemble(args) -> int:
    if args.seed is None:
        raise SystemExit("ensemble sampling is randomized; give --seed")
    k = args.k
    p = _parse_floats(args.p) if args.p else [1.0 / k] * k
    rows = random_steps_ensemble(
        N=args.n,
        k=k,
        p=p,
        trials=args.trials,
        L_grid=_parse_floats(args.l_grid),
        seed=args.seed,
    )
    sys.stdout.write(render_report(rows, "csv"))
    _maybe_emit(args, rows)
    return 0


def _check_extended(spec: ChainSpec, args) -> None:
    if (
        spec.family == "cardshuffle"
        and spec.N is not None
        and spec.N >= 7
        and not getattr(args, "extended", False)
    ):
        raise SystemExit("cardshuffle with N >= 7 needs --extended (5040-state SVD)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="chaingap",
        description="Spectral gaps, relaxation times, and deviation bounds "
        "for finite Markov chains.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, help_text):
        p = sub.add_parser(name, help=help_text)
        p.set_defaults(fn=fn)
        p.add_argument("--out", help="write the result to this file")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--seed", type=int, default=None,
                       help="RNG seed; required by anything randomized")
        p.add_argument("--extended", action="store_true", help="allow the slow variants")
        return p

    p = add("gap", cmd_gap, "singular spectrum, gap, and relaxation time")
    p.add_argument("--spec", required=True, help="chain-spec JSON file")

    p = add("delta", cmd_delta, "exact deviation curve, optionally with Monte Carlo")
    p.add_argument("--spec", required=True)
    p.add_argument("--n-max", type=int, required=True, help="evaluate n = 1..n_max")
    p.add_argument("--trials", type=int, default=0, help="Monte Carlo replicates per n")

    p = add("cheeger", cmd_cheeger, "bottleneck ratio (exact up to 20 states)")
    p.add_argument("--spec", required=True)
    p.add_argument("--trials", type=int, default=0, help="search restarts beyond 20 states")

    p = add("path-bound", cmd_path_bound, "canonical-path congestion bound")
    p.add_argument("--spec", required=True)

    p = add("audit", cmd_audit, "run every applicable inequality check")
    p.add_argument("--spec", required=True)
    p.add_argument("--eps", type=float, default=1.0 / 6.0, help="mixing-time accuracy")
    p.add_argument("--k-max", type=int, default=10, help="pseudo-gap truncation")
    p.add_argument("--n-max", type=int, default=0, help="also audit deviation bounds to n_max")

    p = add("scan", cmd_scan, "gamma/tau table for a family over a size grid")
    p.add_argument("--spec", required=True, help="family template JSON")
    p.add_argument("--n-list", required=True, help="comma-separated sizes, e.g. 4,8,16")

    p = add("ensemble", cmd_ensemble, "tail fractions of tau over random step sets")
    p.add_argument("--n", type=int, required=True, help="prime modulus")
    p.add_argument("--k", type=int, required=True, help="number of steps")
    p.add_argument("--p", help="comma-separated step probabilities (default uniform)")
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--l-grid", default="1,2,4,8", help="comma-separated L values")

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
