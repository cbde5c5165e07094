"""Compare the brute-force census with |H²| over every pair of groupoids with ≤ 4 arrows."""
from __future__ import annotations

import argparse
import itertools
import sys
import time

from gpdext import catalog
from gpdext.extension import Obstructed, classify, enumerate_bands
from gpdext.oracle import census_extensions


def sweep(names, log=print):
    gs = {n: catalog.named(n) for n in names}
    rows, mismatches = 0, []
    for an, kn in itertools.product(names, repeat=2):
        A, K = gs[an], gs[kn]
        cen = census_extensions(A, K)
        per_band: dict[tuple, int] = {}
        for cl in cen.classes:
            per_band[cen.bands[cl[0]]] = per_band.get(cen.bands[cl[0]], 0) + 1
        for band in enumerate_bands(A, K):
            try:
                expected = classify(A, band, verify=False).H2.order
            except Obstructed:
                expected = 0
            got = per_band.get(band.values, 0)
            rows += 1
            if got != expected:
                mismatches.append((an, kn, band.values, got, expected))
                log(f"MISMATCH {an} by {kn} band {band.values}: census {got}, H² {expected}")
        log(f"{an:>10} by {kn:<10} structures {cen.n_structures:4d}  classes {cen.n_classes:3d}")
    return rows, mismatches


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("names", nargs="*", default=list(catalog.SMALL))
    ap.add_argument("-q", "--quiet", action="store_true")
    args = ap.parse_args(argv)
    t0 = time.perf_counter()
    rows, bad = sweep(args.names, log=(lambda *_: None) if args.quiet else print)
    print(f"{rows} (A, K, band) instances, {len(bad)} mismatches, {time.perf_counter() - t0:.1f}s")
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main())
