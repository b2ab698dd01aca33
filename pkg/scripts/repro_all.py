"""Run every reproduction experiment and write one JSON report per experiment.

    python scripts/repro_all.py --outdir results [--extended] [--workers 4]
"""

import argparse
import json
import pathlib
import sys

from polarpunct import experiments as ex


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--outdir", default="results")
    ap.add_argument("--extended", action="store_true", help="include the lmax=5 count (about 2 min)")
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--only", nargs="*", choices=sorted(ex.EXPERIMENTS))
    args = ap.parse_args()

    out = pathlib.Path(args.outdir)
    out.mkdir(parents=True, exist_ok=True)
    runs = {
        "table1": ex.table1,
        "table2": ex.table2,
        "table3": lambda: ex.table3(ex.Table3Config(extended=args.extended)),
        "qup": ex.qup_orders,
        "fig6": lambda: ex.fig6(ex.Fig6Config(workers=args.workers)),
        "fig7": lambda: ex.fig7(ex.Fig7Config(workers=args.workers)),
    }
    failed = []
    for name, fn in runs.items():
        if args.only and name not in args.only:
            continue
        rep = fn()
        print(rep.text(), flush=True)
        (out / f"{name}.json").write_text(json.dumps(rep.to_json(), indent=1, sort_keys=True) + "\n")
        if not rep.ok:
            failed.append(name)
    print(f"failed: {', '.join(failed) or 'none'}")
    return 2 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
