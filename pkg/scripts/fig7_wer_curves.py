"""SC word error rate curves of (256, 64) codes at 85 removed bits.

For every sigma2 point the best order-<=4 symmetric pattern under WER^GA is
simulated next to QUP and shortening. Writes CSV
``scheme,snr_db,sigma2,words,errors,wer,ci_lo,ci_hi,wer_ga``.

    python scripts/fig7_wer_curves.py --sigma2 0.5 0.55 0.6 0.65 0.7 0.8 --out fig7.csv
"""

import argparse
import sys

from polarpunct.experiments import Fig7Config, fig7


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="-")
    ap.add_argument("--sigma2", type=float, nargs="+", default=[0.55, 0.65, 0.8])
    ap.add_argument("--errors", type=int, default=300)
    ap.add_argument("--max-words", type=int, default=2_000_000)
    ap.add_argument("--seed", type=int, default=2016)
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()

    cfg = Fig7Config(sigma2_points=tuple(args.sigma2), min_errors=args.errors,
                     max_words=args.max_words, seed=args.seed, workers=args.workers)
    rep = fig7(cfg)
    fh = sys.stdout if args.out == "-" else open(args.out, "w", encoding="utf-8")
    print("scheme,snr_db,sigma2,words,errors,wer,ci_lo,ci_hi,wer_ga", file=fh)
    for row in rep.data["rows"]:
        for scheme in ("optimized", "qup", "shortening"):
            if scheme not in row:
                continue
            mc = row[scheme]["mc"]
            print(f"{scheme},{row['snr_db']!r},{row['sigma2']!r},{mc['words']},{mc['errors']},"
                  f"{mc['wer']!r},{mc['ci_lo']!r},{mc['ci_hi']!r},{row[scheme]['wer_ga']!r}", file=fh)
    if fh is not sys.stdout:
        fh.close()
    print(rep.text(), file=sys.stderr)
    return 0 if rep.ok else 2


if __name__ == "__main__":
    sys.exit(main())
