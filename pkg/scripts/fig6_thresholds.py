"""Best GA noise thresholds of primitive, symmetric and low-order symmetric patterns.

Writes CSV ``Np,family,count,sigma2,snr_db,pattern`` for N=64, K=20, eta=1e-4.

    python scripts/fig6_thresholds.py --out fig6.csv
"""

import argparse
import sys

from polarpunct.experiments import Fig6Config, fig6


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="-")
    ap.add_argument("--K", type=int, default=20)
    ap.add_argument("--eta", type=float, default=1e-4)
    ap.add_argument("--Np", type=int, nargs="*", default=[6, 8, 10, 12, 14])
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()

    rep = fig6(Fig6Config(K=args.K, eta=args.eta, Np_values=tuple(args.Np), workers=args.workers))
    fh = sys.stdout if args.out == "-" else open(args.out, "w", encoding="utf-8")
    print("Np,family,count,sigma2,snr_db,pattern", file=fh)
    for row in rep.data["rows"]:
        for fam, key in (("primitive", "primitive"), ("symmetric", "symmetric"), ("order<=3", "low-order")):
            count = row["counts"]["low_order" if key == "low-order" else key]
            print(f"{row['Np']},{fam},{count},{row['sigma2'][key]!r},{row['threshold_db'][key]!r},"
                  f"{row['patterns'][key]}", file=fh)
    if fh is not sys.stdout:
        fh.close()
    print(rep.text(), file=sys.stderr)
    return 0 if rep.ok else 2


if __name__ == "__main__":
    sys.exit(main())
