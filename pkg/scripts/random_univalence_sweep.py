"""Check the total-univalence implication and amnestic agreement on random displays.

    python scripts/random_univalence_sweep.py --count 5000 --seed 7
"""
from __future__ import annotations

import argparse
import sys
from collections import Counter

from dispcat.generators import SizeLimits, random_displays, univalence_sweep


def main(argv: list[str] | None = None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--count", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--max-objects", type=int, default=4)
    ap.add_argument("--max-morphisms", type=int, default=10)
    ap.add_argument("--max-fibre", type=int, default=3)
    ap.add_argument("--json", action="store_true", help="print the report as JSON")
    a = ap.parse_args(argv)
    lim = SizeLimits(a.max_objects, a.max_morphisms, a.max_fibre)
    displays = random_displays(a.count, a.seed, lim)
    report = univalence_sweep(displays, f"random{a.count}@{a.seed}")
    if a.json:
        print(report.to_json())
    else:
        print(report.summary())
        sizes = Counter(len(d.base.objects) for d in displays)
        print("base sizes:", dict(sorted(sizes.items())))
    return 0 if report.passed else 1


if __name__ == "__main__":
    sys.exit(main())
