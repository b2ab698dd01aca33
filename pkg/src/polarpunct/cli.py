"""Command-line front end: ``polarpunct <subcommand> ...``.

Exit codes: 0 success, 1 usage error, 2 acceptance mismatch, 3 resource cap hit.
Every run writes a JSON manifest (flags, seed, versions) next to ``--out``,
to ``--manifest`` if given, or to stderr.
"""

from __future__ import annotations

import argparse
import contextlib
import json
import os
import platform
import sys
from fractions import Fraction

import numpy as np
import scipy

from . import __version__
from .baselines import qup_pattern, shortening_pattern
from .density import (
    BEC,
    BiAwgn,
    NoBracket,
    Objective,
    bec_de,
    ga_de,
    noise_threshold,
    optimize_pattern,
    select_information,
    snr_db,
)
from .enumeration import (
    ResourceCapExceeded,
    count_search_tree,
    enumerate_primitive,
    enumerate_symmetric_all,
    search_tree_symmetric,
)
from .equivalence import OrbitOverflow, canonical, is_primitive
from .erasure import erasure_pattern, is_symmetric
from .patterns import CodeParams, Pattern, _log2_exact, format_patterns, minimal_generators, read_patterns
from .sc import monte_carlo_wer

EXIT_OK, EXIT_USAGE, EXIT_MISMATCH, EXIT_CAP = 0, 1, 2, 3
DB_CONVENTION = "snr_db = 10*log10(1/sigma2)"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _default_workers() -> int:
    raw = os.environ.get("POLARPUNCT_WORKERS")
    if not raw:
        return 1
    try:
        return max(1, int(raw))
    except ValueError:
        raise UsageError(f"POLARPUNCT_WORKERS must be an integer, got {raw!r}") from None


def parse_channel(text: str) -> BEC | BiAwgn:
    """``awgn:<sigma2>`` or ``bec:<eps>``; BEC values like ``1/2`` stay exact."""
    kind, _, value = text.partition(":")
    try:
        if kind == "awgn":
            return BiAwgn(float(value))
        if kind == "bec":
            return BEC(Fraction(value) if "/" in value else float(value))
    except ValueError as exc:
        raise UsageError(f"bad channel {text!r}: {exc}") from None
    raise UsageError(f"channel must be awgn:<sigma2> or bec:<eps>, got {text!r}")


def _fmt(x) -> str:
    if isinstance(x, Fraction):
        x = float(x)
    return repr(float(x))


# --- I/O -----------------------------------------------------------------------------


@contextlib.contextmanager
def _output(path):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            yield fh


def _load_patterns(path) -> list[Pattern]:
    try:
        if path is None or path == "-":
            return read_patterns(sys.stdin)
        with open(path, encoding="utf-8") as fh:
            return read_patterns(fh)
    except OSError as exc:
        raise UsageError(str(exc)) from None
    except ValueError as exc:
        raise UsageError(f"bad pattern file: {exc}") from None


def _single_pattern(path) -> Pattern:
    pats = _load_patterns(path)
    if len(pats) != 1:
        raise UsageError(f"expected exactly one pattern, found {len(pats)}")
    return pats[0]


def _manifest(args, argv) -> dict:
    flags = {k: v for k, v in vars(args).items() if k != "func"}
    return {
        "tool": "polarpunct",
        "version": __version__,
        "argv": list(argv),
        "flags": flags,
        "seed": flags.get("seed"),
        "db_convention": DB_CONVENTION,
        "versions": {
            "python": platform.python_version(),
            "numpy": np.__version__,
            "scipy": scipy.__version__,
        },
    }


def _write_manifest(args, argv) -> None:
    data = json.dumps(_manifest(args, argv), sort_keys=True, default=str)
    target = args.manifest
    if target is None and getattr(args, "out", None) not in (None, "-"):
        target = args.out + ".manifest.json"
    if target is None:
        print(f"manifest: {data}", file=sys.stderr)
    else:
        with open(target, "w", encoding="utf-8") as fh:
            fh.write(data + "\n")


# --- subcommands -----------------------------------------------------------------------


def cmd_enumerate(args) -> int:
    N, Np = args.N, args.Np
    if args.kind == "search-tree":
        if args.lmax is None:
            raise UsageError("--lmax is required for --kind search-tree")
        if args.count_only:
            with _output(args.out) as fh:
                c = count_search_tree(N, Np, args.lmax, args.max_patterns, args.max_seconds)
                print(f"count={c}", file=fh)
            return EXIT_OK
        pats = (p for p, _ in search_tree_symmetric(N, Np, args.lmax, args.max_patterns, args.max_seconds))
    elif args.kind == "primitive":
        pats = enumerate_primitive(N, Np, args.max_patterns)
    else:
        pats = enumerate_symmetric_all(N, Np, args.max_patterns)
    with _output(args.out) as fh:
        if args.count_only:
            print(f"count={sum(1 for _ in pats)}", file=fh)
        else:
            for line in format_patterns(pats, N):
                print(line, file=fh)
    return EXIT_OK


def cmd_erasure(args) -> int:
    with _output(args.out) as fh:
        for P in _load_patterns(args.pattern_file):
            E = erasure_pattern(P)
            sym = is_symmetric(P)
            order = minimal_generators(P).order if sym else "-"
            print(f"{P}\t{E}\tsymmetric:{int(sym)}\torder:{order}", file=fh)
    return EXIT_OK


def cmd_canonicalize(args) -> int:
    with _output(args.out) as fh:
        for P in _load_patterns(args.pattern_file):
            print(f"{P}\t{canonical(P)}\tprimitive:{int(is_primitive(P))}", file=fh)
    return EXIT_OK


def cmd_de(args) -> int:
    P = _single_pattern(args.pattern_file)
    ch = parse_channel(args.channel)
    de = bec_de(P, ch.eps) if isinstance(ch, BEC) else ga_de(P, ch.sigma2)
    with _output(args.out) as fh:
        print("position,reliability,p_ga", file=fh)
        for i, (r, p) in enumerate(zip(de.reliability, de.p_ga)):
            print(f"{i},{_fmt(r)},{_fmt(p)}", file=fh)
    return EXIT_OK


def cmd_threshold(args) -> int:
    pats = _load_patterns(args.pattern_file)
    with _output(args.out) as fh:
        print("pattern,sigma2,snr_db,info_set", file=fh)
        for P in pats:
            res = noise_threshold(P, args.K, args.eta, tol=args.tol, lo=args.lo, hi=args.hi)
            info = " ".join(map(str, res.info.positions))
            print(f"{P},{_fmt(res.sigma2)},{_fmt(res.snr_db)},{info}", file=fh)
    return EXIT_OK


def _candidates(args) -> list[Pattern]:
    if args.pattern_file is not None:
        return _load_patterns(args.pattern_file)
    if args.N is None or args.Np is None:
        raise UsageError("give --pattern-file or --N and --Np")
    if args.kind == "primitive":
        return list(enumerate_primitive(args.N, args.Np))
    if args.kind == "symmetric":
        return list(enumerate_symmetric_all(args.N, args.Np))
    if args.lmax is None:
        raise UsageError("--lmax is required for --kind search-tree")
    return [p for p, _ in search_tree_symmetric(args.N, args.Np, args.lmax)]


def cmd_optimize(args) -> int:
    if args.objective == "wer":
        if args.sigma2 is None:
            raise UsageError("--objective wer needs --sigma2")
        obj = Objective("min-wer", sigma2=args.sigma2)
    else:
        obj = Objective("max-threshold", eta=args.eta, tol=args.tol)
    res = optimize_pattern(_candidates(args), args.K, obj, workers=args.workers)
    with _output(args.out) as fh:
        json.dump(res.to_json(), fh, sort_keys=True)
        fh.write("\n")
    return EXIT_OK


def _design(P, S, frozen, model, K):
    """Information set from density evolution on the simulated channel."""
    n = P.n if P is not None else S.n
    base = P if P is not None else Pattern.zeros(n)
    if isinstance(model, BEC):
        de = bec_de(base, model.eps, shortened=S)
    else:
        de = ga_de(base, model.sigma2, shortened=S)
    E = erasure_pattern(base)
    if frozen is not None:
        E = E | frozen
    return select_information(de, K, E)


def cmd_simulate(args) -> int:
    try:
        n = _log2_exact(args.N)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    P = S = frozen = None
    if args.pattern_file is not None:
        P = _single_pattern(args.pattern_file)
    elif args.pattern == "qup":
        P = qup_pattern(args.N, args.Np)
    elif args.pattern == "shorten":
        S, frozen = shortening_pattern(args.N, args.Np)
    else:
        try:
            P = Pattern.from_bits(args.pattern)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    if (P if P is not None else S).N != args.N:
        raise UsageError("pattern length does not match --N")
    if P is not None and P.weight != args.Np:
        raise UsageError(f"pattern weight {P.weight} does not match --Np {args.Np}")
    params = CodeParams(n, args.K, 0 if S is not None else args.Np)
    with _output(args.out) as fh:
        print("snr_db,sigma2,words,errors,wer,ci_lo,ci_hi", file=fh)
        for k, text in enumerate(args.channel):
            model = parse_channel(text)
            sel = _design(P, S, frozen, model, args.K)
            est = monte_carlo_wer(
                params, P, S, sel.pattern, model,
                max_words=args.max_words, max_errors=args.max_errors,
                seed=args.seed + k, workers=args.workers,
                all_zero=args.all_zero, min_sum=args.min_sum,
            )
            if isinstance(model, BiAwgn):
                s2, db = _fmt(model.sigma2), _fmt(snr_db(model.sigma2))
            else:
                s2 = db = ""
            print(f"{db},{s2},{est.words},{est.errors},{_fmt(est.wer)},{_fmt(est.ci_lo)},{_fmt(est.ci_hi)}", file=fh)
    return EXIT_OK


def cmd_repro(args) -> int:
    from . import experiments as ex

    if args.target == "table3":
        rep = ex.table3(ex.Table3Config(extended=args.extended))
    elif args.target == "fig6":
        rep = ex.fig6(ex.Fig6Config(workers=args.workers))
    elif args.target == "fig7":
        cfg = ex.Fig7Config(workers=args.workers, seed=args.seed)
        if args.sigma2:
            cfg.sigma2_points = tuple(args.sigma2)
        if args.max_errors is not None:
            cfg.min_errors = args.max_errors
        rep = ex.fig7(cfg)
    else:
        rep = ex.EXPERIMENTS[args.target]()
    print(rep.text(), file=sys.stderr if args.out in (None, "-") and args.json else sys.stdout)
    if args.json or args.out not in (None, "-"):
        with _output(args.out) as fh:
            json.dump(rep.to_json(), fh, indent=1, sort_keys=True)
            fh.write("\n")
    return EXIT_OK if rep.ok else EXIT_MISMATCH


# --- parser ------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="polarpunct", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, workers=False):
        sp.add_argument("--out", help="output file (default stdout)")
        sp.add_argument("--manifest", help="manifest path (default <out>.manifest.json or stderr)")
        if workers:
            sp.add_argument("--workers", type=int, default=None, help="worker processes (env POLARPUNCT_WORKERS)")

    sp = sub.add_parser("enumerate", help="enumerate primitive or symmetric patterns")
    sp.add_argument("--kind", choices=["primitive", "symmetric", "search-tree"], required=True)
    sp.add_argument("--N", type=int, required=True)
    sp.add_argument("--Np", type=int, required=True)
    sp.add_argument("--lmax", type=int)
    sp.add_argument("--count-only", action="store_true")
    sp.add_argument("--max-patterns", type=int, default=10_000_000)
    sp.add_argument("--max-seconds", type=float)
    common(sp)
    sp.set_defaults(func=cmd_enumerate)

    for name, fn, desc in (
        ("erasure", cmd_erasure, "erasure pattern, symmetry and order"),
        ("canonicalize", cmd_canonicalize, "primitive representative of each pattern"),
    ):
        sp = sub.add_parser(name, help=desc)
        sp.add_argument("--pattern-file", help="pattern file (default stdin)")
        common(sp)
        sp.set_defaults(func=fn)

    sp = sub.add_parser("de", help="density evolution for one pattern")
    sp.add_argument("--channel", required=True, help="bec:<eps> or awgn:<sigma2>")
    sp.add_argument("--pattern-file")
    common(sp)
    sp.set_defaults(func=cmd_de)

    sp = sub.add_parser("threshold", help="GA noise threshold of each pattern")
    sp.add_argument("--pattern-file")
    sp.add_argument("--K", type=int, required=True)
    sp.add_argument("--eta", type=float, required=True)
    sp.add_argument("--tol", type=float, default=1e-4)
    sp.add_argument("--lo", type=float, default=1e-3)
    sp.add_argument("--hi", type=float, default=1e2)
    common(sp)
    sp.set_defaults(func=cmd_threshold)

    sp = sub.add_parser("optimize", help="best pattern among candidates")
    sp.add_argument("--objective", choices=["threshold", "wer"], required=True)
    sp.add_argument("--K", type=int, required=True)
    sp.add_argument("--eta", type=float, default=1e-4)
    sp.add_argument("--tol", type=float, default=1e-4)
    sp.add_argument("--sigma2", type=float)
    sp.add_argument("--pattern-file", help="candidates (otherwise generated from --kind)")
    sp.add_argument("--kind", choices=["primitive", "symmetric", "search-tree"], default="primitive")
    sp.add_argument("--N", type=int)
    sp.add_argument("--Np", type=int)
    sp.add_argument("--lmax", type=int)
    common(sp, workers=True)
    sp.set_defaults(func=cmd_optimize)

    sp = sub.add_parser("simulate", help="Monte-Carlo SC word error rate")
    sp.add_argument("--N", type=int, required=True)
    sp.add_argument("--K", type=int, required=True)
    sp.add_argument("--Np", type=int, required=True, help="punctured (or shortened) positions")
    src = sp.add_mutually_exclusive_group(required=True)
    src.add_argument("--pattern-file")
    src.add_argument("--pattern", help="qup, shorten or an N-character 0/1 string")
    sp.add_argument("--channel", action="append", required=True, help="repeatable: awgn:<sigma2> or bec:<eps>")
    sp.add_argument("--max-words", type=int, default=100_000)
    sp.add_argument("--max-errors", type=int, default=100)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--all-zero", action="store_true")
    sp.add_argument("--min-sum", action="store_true")
    common(sp, workers=True)
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("repro", help="run a reproduction experiment and compare with expected values")
    sp.add_argument("target", choices=["table1", "table2", "table3", "fig6", "fig7"])
    sp.add_argument("--json", action="store_true", help="write the JSON report")
    sp.add_argument("--extended", action="store_true", help="table3: include the slow lmax=5 count")
    sp.add_argument("--sigma2", type=float, action="append", help="fig7: simulation points")
    sp.add_argument("--max-errors", type=int, help="fig7: word errors per point")
    sp.add_argument("--seed", type=int, default=2016)
    common(sp, workers=True)
    sp.set_defaults(func=cmd_repro)
    return p


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if getattr(args, "workers", 0) is None:
            args.workers = _default_workers()
        code = args.func(args)
    except UsageError as exc:
        print(f"polarpunct: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ResourceCapExceeded, OrbitOverflow) as exc:
        print(f"polarpunct: resource cap hit: {exc}", file=sys.stderr)
        code = EXIT_CAP
    except (ValueError, NoBracket) as exc:
        print(f"polarpunct: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    _write_manifest(args, argv)
    return code


if __name__ == "__main__":
    sys.exit(main())
