"""Command line interface.

Exit codes: 0 success, 1 data error, 2 usage error, 3 inference capacity error.

Options can also come from a ``key=value`` file given with ``--config``; keys
are option names without the leading dashes. Command line flags win over the
file, which wins over built-in defaults.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import bbn
from .corpus import ObservationError, UnknownNounError, parse_observations
from .inference import InferenceError, WidthLimitExceeded
from .pipeline import RunConfig, observed_counts, learn_preferences
from .synthetic import generate_benchmark
from .taxonomy import TaxonomyError, UnknownNodeError, parse_taxonomy
from .wsd import (
    WsdError,
    comparison_table,
    evaluate,
    format_test_instances,
    parse_sense_frequencies,
    parse_test_instances,
)

EXIT_DATA = 1
EXIT_USAGE = 2
EXIT_CAPACITY = 3

ALL_METHODS = ("random", "hmm", "resnik", "bbn-unbalanced", "bbn-balanced", "first-sense")
STOCHASTIC = ("random",)


class UsageError(Exception):
    pass


def _read(path: str | None, what: str) -> str:
    if not path:
        raise UsageError(f"--{what} is required")
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ObservationError(f"cannot read {what} file {path}: {exc.strerror}") from None


def _config(args) -> RunConfig:
    if args.samples is not None and args.seed is None:
        raise UsageError("--samples requires --seed")
    return RunConfig(
        likely=args.likely,
        unlikely=args.unlikely,
        balance=args.balance,
        balance_target=args.balance_target,
        balance_tol=args.balance_tol,
        width_limit=args.width_limit,
        max_fan_in=args.max_fan_in,
        samples=args.samples,
        seed=0 if args.seed is None else args.seed,
        skip_unknown_nouns=args.skip_unknown_nouns,
    )


def cmd_validate(args, out) -> int:
    taxonomy = parse_taxonomy(_read(args.taxonomy, "taxonomy"))
    unknown: list[str] = []
    n_records = 0
    if args.observations:
        store = parse_observations(_read(args.observations, "observations"))
        n_records = len(store)
        unknown = sorted(w for w in store.all_nouns() if not taxonomy.is_word(w))
    summary = (
        f"{len(taxonomy.synsets)} synsets, {len(taxonomy.words)} words, "
        f"{len(unknown)} unknown nouns"
    )
    if args.observations:
        summary += f", {n_records} observation records"
    out.write(summary + "\n")
    for w in unknown:
        out.write(f"warning: noun not in taxonomy: {w}\n")
    return EXIT_DATA if unknown else 0


def _load(args):
    taxonomy = parse_taxonomy(_read(args.taxonomy, "taxonomy"))
    store = parse_observations(_read(args.observations, "observations"))
    return taxonomy, store


def cmd_rank(args, out) -> int:
    if args.predicate is None:
        raise UsageError("--predicate is required")
    if args.method not in ("bbn", "resnik", "hmm"):
        raise UsageError(f"rank supports bbn, resnik and hmm, not {args.method}")
    taxonomy, store = _load(args)
    report = learn_preferences(
        taxonomy, store, args.predicate, args.relation, args.method, _config(args)
    )
    out.write(report.to_tsv())
    return 0


def cmd_dump_network(args, out) -> int:
    if args.predicate is None:
        raise UsageError("--predicate is required")
    taxonomy, store = _load(args)
    config = _config(args)
    counts = observed_counts(store, taxonomy, args.predicate, args.relation, config)
    network = bbn.build_network(taxonomy.ancestral_subgraph(counts), config.params)
    if config.max_fan_in is not None:
        network = bbn.or_cascade(network, config.max_fan_in)
    if config.balance:
        network, report = bbn.balance(
            network, config.target, config.balance_tol, config.balance_sweeps, config.width_limit
        )
        out.write(
            f"# balanced target={report.target} sweeps={report.sweeps} "
            f"max_deviation={report.max_deviation:.3g} clamped={','.join(report.clamped)}\n"
        )
    out.write(network.dump())
    return 0


def cmd_wsd(args, out) -> int:
    if not args.test:
        raise UsageError("--test is required for wsd")
    methods = list(ALL_METHODS) if args.all_methods else [args.method]
    sense_freqs = None
    if args.sense_freqs:
        sense_freqs = parse_sense_frequencies(_read(args.sense_freqs, "sense-freqs"))
    elif "first-sense" in methods:
        if not args.all_methods:
            raise UsageError("first-sense needs --sense-freqs")
        methods.remove("first-sense")
    if any(m in STOCHASTIC for m in methods) and args.seed is None:
        raise UsageError("--seed is required for the random baseline")
    taxonomy, train = _load(args)
    test = parse_test_instances(_read(args.test, "test"))
    config = _config(args)
    reports = [evaluate(train, test, taxonomy, m, config, sense_freqs) for m in methods]
    out.write(comparison_table(reports))
    by_name = {r.method: r.accuracy for r in reports}
    chain = [m for m in ("bbn-balanced", "bbn-unbalanced", "random") if m in by_name]
    if len(chain) > 1:
        ok = all(by_name[a] >= by_name[b] for a, b in zip(chain, chain[1:]))
        out.write(f"ordering {' >= '.join(chain)}: {'PASS' if ok else 'FAIL'}\n")
    for r in reports:
        if r.expected_accuracy is not None:
            out.write(f"# {r.method} analytic expected accuracy {r.expected_accuracy:.4f}\n")
    out.write("\n")
    for r in reports:
        out.write(r.to_tsv())
        out.write("\n")
    return 0


def cmd_synth(args, out) -> int:
    if args.seed is None:
        raise UsageError("--seed is required for synth")
    bench = generate_benchmark(args.seed, n_predicates=args.predicates)
    target = Path(args.out_dir)
    target.mkdir(parents=True, exist_ok=True)
    (target / "taxonomy.txt").write_text(bench.taxonomy.to_text(), encoding="utf-8")
    (target / "observations.tsv").write_text(bench.train.to_text(), encoding="utf-8")
    (target / "test.tsv").write_text(format_test_instances(bench.test), encoding="utf-8")
    (target / "sense_freqs.tsv").write_text(
        "".join(f"{w}\t{s}\t{n}\n" for (w, s), n in sorted(bench.sense_freqs.items())),
        encoding="utf-8",
    )
    out.write(
        f"wrote {len(bench.taxonomy.synsets)} synsets, {len(bench.train)} training records, "
        f"{len(bench.test)} test instances to {target}\n"
    )
    return 0


COMMANDS = {
    "validate": cmd_validate,
    "rank": cmd_rank,
    "wsd": cmd_wsd,
    "dump-network": cmd_dump_network,
    "synth": cmd_synth,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="selpref", description="Selectional preferences from predicate-argument counts."
    )
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--config", help="key=value file with option defaults")
    parser.add_argument("--taxonomy")
    parser.add_argument("--observations")
    parser.add_argument("--test")
    parser.add_argument("--sense-freqs", help="noun, synset, count TSV for first-sense")
    parser.add_argument("--predicate")
    parser.add_argument("--relation", default="object")
    parser.add_argument(
        "--method",
        default="bbn",
        choices=["bbn", "bbn-balanced", "bbn-unbalanced", "resnik", "hmm", "random", "first-sense"],
    )
    parser.add_argument("--likely", type=float, default=0.9)
    parser.add_argument("--unlikely", type=float, default=0.1)
    parser.add_argument("--balance", action="store_true")
    parser.add_argument("--balance-target", type=float)
    parser.add_argument("--balance-tol", type=float, default=1e-3)
    parser.add_argument("--width-limit", type=int, default=22)
    parser.add_argument("--max-fan-in", type=int)
    parser.add_argument("--samples", type=int)
    parser.add_argument("--seed", type=int)
    parser.add_argument("--all-methods", action="store_true")
    parser.add_argument("--skip-unknown-nouns", action="store_true")
    parser.add_argument("--out-dir", default="synthetic")
    parser.add_argument("--predicates", type=int, default=30)
    parser.add_argument("-v", "--verbose", action="store_true")
    return parser


def _apply_config_file(parser: argparse.ArgumentParser, path: str) -> None:
    actions = {a.dest: a for a in parser._actions}
    defaults = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key=value")
        key, value = (x.strip() for x in line.split("=", 1))
        dest = key.lstrip("-").replace("-", "_")
        action = actions.get(dest)
        if action is None or dest in ("command", "config"):
            raise UsageError(f"{path}:{lineno}: unknown option {key!r}")
        if isinstance(action, argparse._StoreTrueAction):
            defaults[dest] = value.lower() in ("1", "true", "yes", "on")
        else:
            defaults[dest] = action.type(value) if action.type else value
    parser.set_defaults(**defaults)


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        if args.config:
            _apply_config_file(parser, args.config)
            args = parser.parse_args(argv)
        return COMMANDS[args.command](args, out)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"selpref: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except WidthLimitExceeded as exc:
        print(f"selpref: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except (
        TaxonomyError,
        ObservationError,
        UnknownNounError,
        UnknownNodeError,
        WsdError,
        InferenceError,
        ValueError,
        OSError,
    ) as exc:
        print(f"selpref: error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
