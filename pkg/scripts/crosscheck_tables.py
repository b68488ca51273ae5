"""Per-cell counts from both classifications, side by side.

    python3 scripts/crosscheck_tables.py [--workers N]
"""
import argparse

from mu2lab.breuil_kisin import cross_check_counts
from mu2lab.dvr import DvrSpec

RINGS = [
    ("p=3, u^2 - 3", DvrSpec.mixed_char(3, e=2)),
    ("p=3, zeta_9", DvrSpec.cyclotomic(3, 2)),
    ("p=5, u^4 - 5", DvrSpec.mixed_char(5, e=4)),
    ("p=5, zeta_5", DvrSpec.cyclotomic(5, 1)),
]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()
    bad = 0
    for label, spec in RINGS:
        report = cross_check_counts(spec, args.workers)
        print(f"{label}")
        print("   m  n  classify  bk")
        for c in report.cells:
            flag = "" if c["agree"] else "  <-- differs"
            print(f"  {c['m']:>2} {c['n']:>2}  {c['classify']:>8} {c['bk']:>3}{flag}")
        bad += len(report.mismatches)
        print()
    print("all cells agree" if not bad else f"{bad} cells differ")
    return 1 if bad else 0


if __name__ == "__main__":
    raise SystemExit(main())
