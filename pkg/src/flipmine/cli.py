"""Command-line entry point: ``flipmine {mine,compare,generate}``.

Exit status: 0 on success, 1 for invalid flags or parameters, 2 for
unreadable or malformed input, 3 when a run hits its candidate budget or
engines disagree.
"""
from __future__ import annotations

import argparse
import sys
import time

from . import datagen
from .baseline import DEFAULT_ORACLE_BUDGET, mine_basic, oracle_enumerate
from .dataset import read_transactions
from .exceptions import BudgetExceeded, DataError, MismatchedOutputs, UsageError
from .measures import NULL_INVARIANT, Thresholds
from .miner import DEFAULT_CANDIDATE_BUDGET, MineStats, PruneConfig, mine_flipping
from .report import STAT_KEYS, format_patterns, format_stats
from .taxonomy import read_taxonomy

EXIT_USAGE, EXIT_DATA, EXIT_BUDGET = 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _minsup(text):
    if text in datagen.PROFILES:
        return datagen.threshold_profile(text)
    try:
        return tuple(float(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated fractions or a profile name, got {text!r}")


def _add_mining_flags(p):
    p.add_argument("taxonomy", help="child<TAB>parent edge file")
    p.add_argument("transactions", help="one transaction of leaf labels per line")
    p.add_argument("--measure", default="kulc", choices=[m.value for m in NULL_INVARIANT])
    p.add_argument("--gamma", type=float, default=datagen.DEFAULT_GAMMA, help="positive threshold")
    p.add_argument("--epsilon", type=float, default=datagen.DEFAULT_EPSILON, help="negative threshold")
    p.add_argument("--minsup", type=_minsup, required=True,
                   help="per-level minimum supports, top level first (or a profile name thr1..thr10)")
    p.add_argument("--no-tpg", action="store_true")
    p.add_argument("--no-sibp", action="store_true")
    p.add_argument("--no-flipping", action="store_true")
    p.add_argument("--unsafe-flipping-extension", action="store_true",
                   help="grow only from flip survivors (faster, may miss patterns)")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--candidate-budget", type=int, default=DEFAULT_CANDIDATE_BUDGET)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="flipmine", description="Mine flipping correlation patterns over an item taxonomy.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    mine = sub.add_parser("mine", help="mine flipping patterns")
    _add_mining_flags(mine)
    mine.add_argument("--engine", default="flipper", choices=["flipper", "basic", "oracle"])
    mine.add_argument("-o", "--output", help="pattern file (default: stdout)")
    mine.add_argument("--stats", help="write run statistics here")

    cmp_ = sub.add_parser("compare", help="run every pruning configuration and check they agree")
    _add_mining_flags(cmp_)
    cmp_.add_argument("--with-oracle", action="store_true", help="also run the brute-force oracle")
    cmp_.add_argument("-o", "--output", help="comparison table (default: stdout)")

    gen = sub.add_parser("generate", help="write a synthetic taxonomy and transaction file")
    gen.add_argument("taxonomy_out")
    gen.add_argument("transactions_out")
    d = datagen.GenParams()
    gen.add_argument("--n", type=int, default=d.n_transactions, help="number of transactions")
    gen.add_argument("--width", type=float, default=d.avg_width, help="average transaction width")
    gen.add_argument("--items", type=int, default=d.n_items, help="number of leaf items")
    gen.add_argument("--levels", type=int, default=d.n_levels)
    gen.add_argument("--roots", type=int, default=d.n_roots)
    gen.add_argument("--fanout", type=int, default=d.fanout)
    gen.add_argument("--patterns", type=int, default=d.n_patterns)
    gen.add_argument("--pattern-len", type=float, default=d.avg_pattern_len)
    gen.add_argument("--corruption", type=float, default=d.corruption_prob)
    gen.add_argument("--share-bias", type=float, default=d.share_bias)
    gen.add_argument("--seed", type=int, default=d.seed)
    return parser


def _load(args):
    path = args.taxonomy
    try:
        tree = read_taxonomy(path)
        path = args.transactions
        ds = read_transactions(path, tree)
    except DataError as exc:
        raise DataError(f"{path}: {exc}") from exc
    th = Thresholds(args.gamma, args.epsilon, args.minsup)
    if len(th.minsup) != tree.height:
        raise UsageError(f"--minsup has {len(th.minsup)} values but the taxonomy has {tree.height} levels")
    if args.threads < 1:
        raise UsageError("--threads must be at least 1")
    return tree, ds, th


def _prune_config(args) -> PruneConfig:
    return PruneConfig(
        enable_flipping=not args.no_flipping,
        enable_tpg=not args.no_tpg,
        enable_sibp=not args.no_sibp,
        unsafe_flipping_extension=args.unsafe_flipping_extension,
    )


def _emit(text, path):
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def cmd_mine(args) -> int:
    tree, ds, th = _load(args)
    if args.engine == "flipper":
        patterns, stats = mine_flipping(ds, tree, th, args.measure, _prune_config(args),
                                        args.threads, args.candidate_budget)
    elif args.engine == "basic":
        patterns, stats = mine_basic(ds, tree, th, args.measure, args.candidate_budget, args.threads)
    else:
        patterns = oracle_enumerate(ds, tree, th, args.measure, budget=DEFAULT_ORACLE_BUDGET).patterns
        stats = MineStats(engine="oracle", n_patterns=len(patterns))
    _emit(format_patterns(patterns, tree), args.output)
    if args.stats:
        _emit(format_stats(stats), args.stats)
    return 0


_CONFIGS = (
    ("BASIC", None),
    ("FLIPPING", PruneConfig(enable_tpg=False, enable_sibp=False)),
    ("TPG", PruneConfig(enable_sibp=False)),
    ("FULL", PruneConfig()),
)


def cmd_compare(args) -> int:
    tree, ds, th = _load(args)
    header = ("config",) + STAT_KEYS + ("patterns", "seconds")
    rows, outputs = [], {}
    for name, cfg in _CONFIGS:
        t0 = time.perf_counter()
        if cfg is None:
            patterns, stats = mine_basic(ds, tree, th, args.measure, args.candidate_budget, args.threads)
        else:
            patterns, stats = mine_flipping(ds, tree, th, args.measure, cfg, args.threads, args.candidate_budget)
        elapsed = time.perf_counter() - t0
        totals = stats.totals()
        rows.append((name,) + tuple(totals[k] for k in STAT_KEYS) + (len(patterns), f"{elapsed:.3f}"))
        outputs[name] = format_patterns(patterns, tree)
    if args.with_oracle:
        t0 = time.perf_counter()
        patterns = oracle_enumerate(ds, tree, th, args.measure).patterns
        elapsed = time.perf_counter() - t0
        rows.append(("ORACLE",) + ("-",) * len(STAT_KEYS) + (len(patterns), f"{elapsed:.3f}"))
        outputs["ORACLE"] = format_patterns(patterns, tree)
    table = "".join("\t".join(str(x) for x in r) + "\n" for r in [header] + rows)
    _emit(table, args.output)
    reference = outputs["BASIC"]
    differing = [name for name, text in outputs.items() if text != reference]
    if differing:
        raise MismatchedOutputs(f"pattern sets differ from BASIC for: {', '.join(differing)}")
    return 0


def cmd_generate(args) -> int:
    p = datagen.GenParams(
        n_transactions=args.n,
        avg_width=args.width,
        n_items=args.items,
        n_levels=args.levels,
        n_roots=args.roots,
        fanout=args.fanout,
        n_patterns=args.patterns,
        avg_pattern_len=args.pattern_len,
        corruption_prob=args.corruption,
        share_bias=args.share_bias,
        seed=args.seed,
    )
    datagen.write(p, args.taxonomy_out, args.transactions_out)
    return 0


_COMMANDS = {"mine": cmd_mine, "compare": cmd_compare, "generate": cmd_generate}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        code = EXIT_USAGE
        msg = str(exc)
    except (DataError, OSError) as exc:
        code = EXIT_DATA
        msg = str(exc)
    except (BudgetExceeded, MismatchedOutputs) as exc:
        code = EXIT_BUDGET
        msg = str(exc)
    print(f"flipmine: {msg}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
