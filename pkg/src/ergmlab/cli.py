"""Command line entry point.

Exit codes: 0 success, 2 configuration error, 3 precondition violation
(parameters not subcritical), 4 a check failed and ``--strict`` was given.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import experiments as ex
from .errors import ConfigError, DegenerateParameters, PreconditionError
from .model import ErgmParams, SubgraphSpec, load_config
from .sampler import ChainConfig

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_PRECONDITION = 3
EXIT_CHECK_FAILED = 4

DEFAULT_N_LIST = (16, 24, 32, 48, 64)


def _n_list(text: str) -> list[int]:
    try:
        vals = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not vals or min(vals) < 3:
        raise argparse.ArgumentTypeError("n values must be integers >= 3")
    return vals


def _seed(text: str) -> int:
    v = int(text)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, type=Path, help="YAML or JSON model configuration")
    common.add_argument("--seed", type=_seed, default=0)
    common.add_argument("--out", type=Path, default=None, help="directory for report.json, samples and plots")
    common.add_argument("--strict", action="store_true", help="exit 4 if any check fails")

    sweep = argparse.ArgumentParser(add_help=False)
    sweep.add_argument("--n-list", type=_n_list, default=None, help="comma-separated vertex counts")
    sweep.add_argument("--samples", type=int, default=None)
    sweep.add_argument("--workers", type=int, default=1)

    ap = argparse.ArgumentParser(prog="ergmlab", description="Exponential random graph experiments")
    sub = ap.add_subparsers(dest="command", required=True)
    sub.add_parser("analyze", parents=[common], help="solve the mean-field equation and classify")
    m = sub.add_parser("moments", parents=[common], help="print conditional moments, c* and sigma_n^2")
    m.add_argument("--p-tilde", type=float, default=None)
    sub.add_parser("verify-clt", parents=[common, sweep], help="conditional two-star CLT")
    sub.add_parser("verify-lclt", parents=[common, sweep], help="local CLT for the edge count")
    sub.add_parser("verify-ptilde", parents=[common, sweep], help="edge density against p + c*/n")
    c = sub.add_parser("verify-conjecture", parents=[common], help="conditional counts of a general H")
    c.add_argument("--graph", default="triangle", help="graph name or JSON edge list")
    c.add_argument("--n", type=int, default=None)
    c.add_argument("--samples", type=int, default=None)
    return ap


def _chain_config(cfg: dict, seed: int) -> ChainConfig | None:
    raw = cfg.get("chain")
    if raw is None:
        return None
    if not isinstance(raw, dict):
        raise ConfigError("expected a mapping", key="chain")
    allowed = set(ChainConfig.__dataclass_fields__)
    for k in raw:
        if k not in allowed:
            raise ConfigError(f"unknown chain option; known: {sorted(allowed)}", key=f"chain.{k}")
    try:
        return ChainConfig(**{**raw, "seed": seed})
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc), key="chain") from None


def _parse_graph(text: str) -> SubgraphSpec:
    try:
        if text.lstrip().startswith("["):
            return SubgraphSpec(json.loads(text))
        return SubgraphSpec.named(text)
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc), key="--graph") from None


def _emit(payload: dict, out: Path | None) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True)
    print(text)
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
        (out / "report.json").write_text(text + "\n")


def _finish(rep: ex.ExperimentReport, args) -> int:
    if args.out is not None:
        ex.write_report(rep, args.out)
    for c in rep.checks:
        print(f"{'PASS' if c.passed else 'FAIL'}  {c.name}: {c.value:.6g} ({c.threshold})")
    if rep.conjecture:
        print("CONJECTURE: moments under test are conjectured, not proved")
    print(f"wall clock {rep.wall_clock_seconds:.1f}s")
    if args.strict and not rep.passed:
        return EXIT_CHECK_FAILED
    return EXIT_OK


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        n_cfg = cfg.get("n")
        if args.command == "moments" or n_cfg is not None:
            params = ErgmParams.from_config(cfg)
        else:
            # analyze and n-sweeps do not need n from the file
            params = ErgmParams.from_config(cfg, n=16)
        chain = _chain_config(cfg, args.seed)

        if args.command == "analyze":
            _emit(ex.cmd_analyze(params), args.out)
            return EXIT_OK
        if args.command == "moments":
            _emit(ex.cmd_moments(params, args.p_tilde), args.out)
            return EXIT_OK

        if args.command == "verify-conjecture":
            h = _parse_graph(args.graph)
            n = args.n or n_cfg or 32
            rep = ex.cmd_verify_conjecture(params, h, n, samples=args.samples or 5000, seed=args.seed,
                                           chain=chain, out=args.out)
            return _finish(rep, args)

        n_list = args.n_list or list(DEFAULT_N_LIST)
        kw = dict(seed=args.seed, chain=chain, out=args.out, workers=args.workers)
        if args.samples is not None:
            kw["samples"] = args.samples
        if args.command == "verify-clt":
            rep = ex.cmd_verify_conditional_clt(params, n_list, **kw)
        elif args.command == "verify-lclt":
            rep = ex.cmd_verify_lclt(params, n_list, **kw)
        else:
            rep = ex.cmd_verify_ptilde(params, n_list, **kw)
        return _finish(rep, args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (PreconditionError, DegenerateParameters) as exc:
        print(f"precondition violated: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION


def main(argv=None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
