"""Command-line front end.

Exit codes: 0 success, 1 data or validation failure, 2 usage or I/O failure.

Usage:
  trilemma validate DATA_DIR --chain algorand --out out/
  trilemma decentralization ALGORAND_DIR ETHEREUM_DIR --window 7 --out out/
  trilemma scalability ALGORAND_DIR ETHEREUM_DIR --algorand-block-time 3.5 --out out/
  trilemma simulate --scheme xor --alpha 0.3 --grinding-bits 1 --seed 42 --out out/
  trilemma report --algorand DIR --ethereum DIR --out out/
"""
import argparse
import logging
import sys
from pathlib import Path

from . import __version__
from ._validation import CHAINS, INDEX_NAMES
from .decentralization import DEFAULT_THRESHOLD, DEFAULT_WINDOW, published_deviations
from .exceptions import IngestError, InvalidConfig, TrilemmaError
from .ingest import load_chain_dataset, validate_dataset
from .report import (
    DECENTRALIZATION_FIELDS,
    EXIT_DATA,
    EXIT_OK,
    EXIT_USAGE,
    ReportConfig,
    build_report,
    decentralization_rows,
    rolling_series,
    write_csv,
    write_json,
    write_report,
    write_rolling,
    write_scalability_plots,
)
from .scalability import DEFAULT_ALGORAND_BLOCK_TIME, compare_scalability
from .security import ROW_FIELDS, AttackSimConfig, simulate_attack, sweep_attack

log = logging.getLogger("trilemma")

SCHEME_FLAGS = {"seed-chain": "seed_chain", "xor": "xor_accumulator"}


class UsageError(Exception):
    pass


def _float_list(text):
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _check_index_flags(args):
    if args.window < 2:
        raise UsageError(f"--window must be at least 2, got {args.window}")
    if not 0 < args.threshold < 1:
        raise UsageError(f"--threshold must lie in (0, 1), got {args.threshold}")


def _load(directory, chain):
    ds = load_chain_dataset(directory, chain)
    for name in ds.skipped:
        log.info("%s: skipped unrecognised file %s", chain, name)
    return ds


def cmd_validate(args):
    ds = _load(args.data_dir, args.chain)
    report = validate_dataset(ds)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    payload = report.to_dict()
    payload["skipped_files"] = list(ds.skipped)
    path = write_json(payload, out / f"validation_{args.chain}.json")
    print(f"{args.chain}: {len(report.violations)} violation(s); wrote {path}")
    for v in report.violations:
        print(f"  {v.frame} row {v.row} {v.column}: {v.rule} ({v.value!r})")
    return EXIT_OK if report.passed else EXIT_DATA


def cmd_decentralization(args):
    _check_index_flags(args)
    datasets = [_load(args.data_dir_a, args.chain_a), _load(args.data_dir_b, args.chain_b)]
    rows, errors = decentralization_rows(datasets, args.threshold)
    rolling, rerrors = rolling_series(datasets, args.window, args.index or ["shannon"], args.threshold)
    errors += rerrors

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_csv([r.to_dict() for r in rows], DECENTRALIZATION_FIELDS, out / "decentralization.csv")
    write_json({"rows": [r.to_dict() for r in rows], "errors": errors,
                "window": args.window, "threshold": args.threshold},
               out / "decentralization.json")
    write_rolling(rolling, out / "rolling")

    for row in rows:
        print(f"{row.chain:<10} {row.layer:<12} shannon={row.shannon_entropy:.6g} gini={row.gini:.6g} "
              f"nakamoto={row.nakamoto} hhi={row.hhi:.6g} units={row.unit_count}")
    if args.published_baseline:
        deviations = published_deviations(rows)
        write_csv(deviations, ("chain", "layer", "index", "computed", "published", "deviation"),
                  out / "published_deviations.csv")
        for d in deviations:
            print(f"{d['chain']:<10} {d['layer']:<12} {d['index']:<16} computed={d['computed']:.6g} "
                  f"published={d['published']:.6g} deviation={d['deviation']:+.6g}")
    for err in errors:
        print(f"error: {err}", file=sys.stderr)
    return EXIT_DATA if errors else EXIT_OK


def cmd_scalability(args):
    datasets = [_load(args.data_dir_a, args.chain_a), _load(args.data_dir_b, args.chain_b)]
    comparison = compare_scalability(*datasets, args.algorand_block_time)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_json(comparison.to_dict(), out / "scalability.json")
    write_scalability_plots(datasets, args.algorand_block_time, out / "plots")
    for c in comparison.chains:
        t, l = c.throughput, c.latency
        print(f"{c.chain:<10} mean_tx={t.mean_daily_tx:.6g} peak_tx={t.peak_daily_tx:.6g} "
              f"({t.peak_date}) peak_tps={t.peak_tps:.4g} mean_block_time={l.mean_block_time:.4g}s")
    print(f"higher peak: {comparison.higher_peak_chain}; lower latency: {comparison.lower_latency_chain}")
    return EXIT_OK


def _sim_config(args):
    try:
        return AttackSimConfig(
            scheme=SCHEME_FLAGS[args.scheme],
            adversary_stake=args.alpha,
            honest_validators=args.honest_validators,
            rounds=args.rounds,
            trials=args.trials,
            grinding_bits=args.grinding_bits,
            rng_seed=args.seed,
        )
    except InvalidConfig as exc:
        raise UsageError(str(exc)) from None


def cmd_simulate(args):
    cfg = _sim_config(args)
    try:
        results = sweep_attack(cfg, args.sweep) if args.sweep else [simulate_attack(cfg)]
    except InvalidConfig as exc:
        raise UsageError(str(exc)) from None
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    rows = [r.to_row() for r in results]
    write_json({"results": rows}, out / "simulation.json")
    write_csv(rows, ROW_FIELDS, out / "simulation.csv")
    for r in results:
        line = (f"{r.config.scheme} alpha={r.config.adversary_stake} g={r.config.grinding_bits} "
                f"share={r.adversary_share:.5f} bias={r.bias:+.5f} stderr={r.stderr:.5f} "
                f"max_run={r.max_consecutive_adversary}")
        if r.ground_rounds:
            line += f" ground_share={r.ground_share:.5f}"
        print(line)
    return EXIT_OK


def cmd_report(args):
    _check_index_flags(args)
    datasets = [_load(args.algorand, "algorand"), _load(args.ethereum, "ethereum2")]
    sims = []
    if not args.no_simulation:
        base = dict(honest_validators=args.honest_validators, rounds=args.rounds,
                    trials=args.trials, rng_seed=args.seed)
        try:
            sims = [AttackSimConfig(scheme="seed_chain", **base),
                    AttackSimConfig(scheme="xor_accumulator", grinding_bits=args.grinding_bits, **base)]
        except InvalidConfig as exc:
            raise UsageError(str(exc)) from None
    config = ReportConfig(
        window=args.window,
        threshold=args.threshold,
        rolling_indices=tuple(args.index or ["shannon"]),
        algorand_block_time=args.algorand_block_time,
        simulations=tuple(sims),
        sweep=tuple(args.sweep),
    )
    try:
        report = build_report(datasets, config)
    except InvalidConfig as exc:
        raise UsageError(str(exc)) from None
    path = write_report(report, datasets, config, args.out)
    print(f"wrote {path}")
    for chain, frames in report.absent_frames.items():
        if frames:
            print(f"{chain}: absent frames {', '.join(frames)}")
    for err in report.errors:
        print(f"error: {err}", file=sys.stderr)
    for chain, v in report.validation.items():
        if not v.passed:
            print(f"{chain}: {len(v.violations)} validation violation(s)", file=sys.stderr)
    return report.exit_code


def _add_pair(p):
    p.add_argument("data_dir_a", help="first chain's data directory")
    p.add_argument("data_dir_b", help="second chain's data directory")
    p.add_argument("--chain-a", choices=CHAINS, default="algorand")
    p.add_argument("--chain-b", choices=CHAINS, default="ethereum2")


def _add_indices(p):
    p.add_argument("--window", type=int, default=DEFAULT_WINDOW, help="rolling window in days")
    p.add_argument("--threshold", type=float, default=DEFAULT_THRESHOLD, help="Nakamoto share threshold")
    p.add_argument("--index", action="append", choices=INDEX_NAMES,
                   help="rolling index to emit (repeatable; default shannon)")


def _add_sim(p, sweep_default=()):
    p.add_argument("--grinding-bits", type=int, default=0)
    p.add_argument("--honest-validators", type=int, default=100)
    p.add_argument("--rounds", type=int, default=1000)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--sweep", type=_float_list, default=list(sweep_default),
                   help="comma-separated stake fractions, one result each")


def build_parser():
    parser = argparse.ArgumentParser(prog="trilemma", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a data directory against the frame ranges")
    p.add_argument("data_dir")
    p.add_argument("--chain", choices=CHAINS, required=True)
    p.add_argument("--out", default="trilemma_out")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("decentralization", help="four indices per chain and layer")
    _add_pair(p)
    _add_indices(p)
    p.add_argument("--published-baseline", action="store_true",
                   help="print signed deviations from the published index table")
    p.add_argument("--out", default="trilemma_out")
    p.set_defaults(func=cmd_decentralization)

    p = sub.add_parser("scalability", help="throughput and latency comparison")
    _add_pair(p)
    p.add_argument("--algorand-block-time", type=float, default=DEFAULT_ALGORAND_BLOCK_TIME)
    p.add_argument("--out", default="trilemma_out")
    p.set_defaults(func=cmd_scalability)

    p = sub.add_parser("simulate", help="Monte Carlo proposer-selection attack")
    p.add_argument("--scheme", choices=sorted(SCHEME_FLAGS), default="seed-chain")
    p.add_argument("--alpha", type=float, default=0.3, help="adversary stake fraction in [0, 1)")
    _add_sim(p)
    p.add_argument("--out", default="trilemma_out")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("report", help="full report with provenance")
    p.add_argument("--algorand", required=True, help="Algorand data directory")
    p.add_argument("--ethereum", required=True, help="Ethereum 2.0 data directory")
    _add_indices(p)
    p.add_argument("--algorand-block-time", type=float, default=DEFAULT_ALGORAND_BLOCK_TIME)
    _add_sim(p, sweep_default=(0.1, 0.3, 0.51))
    p.set_defaults(grinding_bits=1)
    p.add_argument("--no-simulation", action="store_true")
    p.add_argument("--out", default="trilemma_out")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"trilemma: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except IngestError as exc:
        print(f"trilemma: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"trilemma: I/O error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except TrilemmaError as exc:
        print(f"trilemma: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    raise SystemExit(main())
