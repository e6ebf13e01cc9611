"""Command-line harness: ``qaffine verify`` and ``qaffine chars``.

Exit status is 0 when every relation passes (or the character tables agree),
1 on a failure and 2 on a configuration error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .suites import CACHE_ENV, SUITES, ConfigError, SuiteConfig, report_to_json, report_to_tsv, run_suite

EXIT_PASS, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _csv_ints(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x != ""]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="qaffine", description="Exact verification of quantum affine algebra constructions.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    suite_help = "; ".join(f"{n}: {s.description} (defaults {s.defaults})" for n, s in SUITES.items())
    cache_default = os.environ.get(CACHE_ENV)

    v = sub.add_parser("verify", help="run a named verification suite",
                       description="Suites -- " + suite_help)
    v.add_argument("--suite", required=True, help="suite name (see description)")
    v.add_argument("--space", type=_csv_ints, help="space selector j in {0,1,2}, comma-separated (default: all)")
    v.add_argument("--lambda", dest="lambdas", action="append",
                   help="dominant weight such as 2L0, L0+L1 or 1,1; repeatable (default: all level-2 weights)")
    v.add_argument("--depth", type=int, help="truncation depth N (suite default)")
    v.add_argument("--window", type=int, help="mode window |k| <= w (suite default)")
    v.add_argument("--order", type=int, help="series order for prefactor suites (default 12)")
    v.add_argument("--sample", type=int, help="check only this many states, drawn with --seed (default: all)")
    v.add_argument("--seed", type=int, default=0, help="seed for sampled states (default 0)")
    v.add_argument("--jobs", type=int, default=1, help="worker processes (default 1)")
    v.add_argument("--cache-dir", default=cache_default,
                   help=f"module cache directory (default ${CACHE_ENV}, unset: no cache)")
    v.add_argument("--format", choices=("json", "tsv"), default="json", help="report format (default json)")
    v.add_argument("--output", "-o", help="write the report here instead of stdout")
    v.add_argument("--timing", action="store_true", help="add wall time per relation (breaks byte-identity)")

    c = sub.add_parser("chars", help="character tables of V(j) against the oracle, with branching")
    c.add_argument("--space", type=int, choices=(0, 1, 2), help="space j (default 0)")
    c.add_argument("--depth", type=int, default=4, help="truncation depth (default 4)")
    c.add_argument("--oracle-only", choices=("a1", "c2"), help="print only the oracle table for this algebra")
    c.add_argument("--level", type=int, default=1, help="level for --oracle-only (default 1)")
    c.add_argument("--format", choices=("tsv", "json"), default="tsv", help="table format (default tsv)")
    c.add_argument("--output", "-o", help="write the tables here instead of stdout")
    return p


def _emit(text: str, path: str | None) -> None:
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_verify(args) -> int:
    cfg = SuiteConfig(args.suite, depth=args.depth, window=args.window, order=args.order,
                      spaces=args.space, lambdas=args.lambdas, sample=args.sample, seed=args.seed,
                      jobs=args.jobs, cache_dir=args.cache_dir, timing=args.timing)
    try:
        report = run_suite(cfg)
    except ConfigError as exc:
        print(f"qaffine: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ValueError as exc:
        # unreadable or mismatched cache files land here
        if "cache" in str(exc):
            print(f"qaffine: {exc}", file=sys.stderr)
            return EXIT_CONFIG
        raise
    _emit(report_to_json(report) if args.format == "json" else report_to_tsv(report), args.output)
    return EXIT_PASS if report["pass"] else EXIT_FAIL


def _oracle_weights(alg: str, level: int) -> list[tuple[int, ...]]:
    if level < 1:
        raise ConfigError("level must be positive")
    if alg == "a1":
        return [(level - k, k) for k in range(level + 1)]
    # C2^(1): marks (1, 1, 1) for the coroots, so labels sum to the level
    out = []
    for a in range(level + 1):
        for b in range(level + 1 - a):
            out.append((a, b, level - a - b))
    return sorted(out, reverse=True)


def _branching(j: int, depth: int) -> list[dict]:
    from .spfour import BigSpace
    V = BigSpace(j, depth)
    rows: dict = {}
    for s in V.basis():
        p = s[0]
        d = V.degree(s)
        r = rows.setdefault(p, {"p": str(p), "lambda": V.lam_of(p).label,
                                "offset": V.charge_degree(p), "dims": [0] * (depth + 1)})
        r["dims"][d] += 1
    return [rows[p] for p in sorted(rows)]


def cmd_chars(args) -> int:
    from .charoracle import C2_AFFINE, compare, freudenthal
    try:
        if args.depth < 0:
            raise ConfigError("--depth must be non-negative")
        if args.oracle_only:
            weights = _oracle_weights(args.oracle_only, args.level)
            if args.space is not None:
                if (args.oracle_only, args.level) != ("c2", 1):
                    raise ConfigError("--space selects Lambda_j only for the c2 level-1 oracle")
                weights = [weights[args.space]]
            tables = [freudenthal(args.oracle_only, hw, args.depth) for hw in weights]
            if args.format == "json":
                text = "[" + ",\n".join(t.to_json() for t in tables) + "]\n"
            else:
                text = "".join(f"# oracle {t.system} highest {list(t.highest)}\n" + t.to_tsv() for t in tables)
            _emit(text, args.output)
            return EXIT_PASS
    except ConfigError as exc:
        print(f"qaffine: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    from .spfour import _HW_LABELS, character
    j = 0 if args.space is None else args.space
    ours = character(j, args.depth)
    oracle = freudenthal(C2_AFFINE, _HW_LABELS[j], args.depth)
    diff = compare(ours, oracle)
    branching = _branching(j, args.depth)
    if args.format == "json":
        text = json.dumps({"space": j, "depth": args.depth,
                           "constructed": json.loads(ours.to_json()),
                           "oracle": json.loads(oracle.to_json()),
                           "diff": diff["diff"], "equal": diff["equal"],
                           "branching": branching}, indent=1, sort_keys=True) + "\n"
    else:
        parts = [f"# constructed V({j})\n" + ours.to_tsv(),
                 f"# oracle C2 level 1 highest {list(_HW_LABELS[j])}\n" + oracle.to_tsv(),
                 "# diff\n" + "".join(f"{d['beta']}\t{d['a']}\t{d['b']}\n" for d in diff["diff"]),
                 "# branching\np\tlambda\toffset\tdims\n"
                 + "".join(f"{r['p']}\t{r['lambda']}\t{r['offset']}\t{','.join(map(str, r['dims']))}\n"
                           for r in branching)]
        text = "".join(parts)
    _emit(text, args.output)
    return EXIT_PASS if diff["equal"] else EXIT_FAIL


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "verify":
        return cmd_verify(args)
    return cmd_chars(args)


if __name__ == "__main__":
    sys.exit(main())
