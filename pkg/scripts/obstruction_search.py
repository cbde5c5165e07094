"""Search for a nonzero obstruction class [Ξ] ∈ H³.

Fibers: every groupoid with at most ``--max-arrows`` arrows whose components are groups of
order ≤ 8, pair(2) or pair(2)×Z2. Bases: B(Z2) and B(Z2×Z2). For each band the canonical
lifting is used (the class does not depend on the lifting). Cases whose automorphism
enumeration exceeds ``--saut-cap`` are listed as skipped rather than silently dropped.
"""
from __future__ import annotations

import argparse
import itertools
import json
import sys
import time

from gpdext import catalog
from gpdext.autalg import SizeCapExceeded, center, coarse_saut, enumerate_saut
from gpdext.extension import enumerate_bands, lift_band, obstruction, obstruction_class

GROUPS = ["Z2", "Z3", "Z4", "V4", "Z5", "Z6", "S3", "Z7", "Z8", "D4", "Q8"]


def components():
    out = [("unit1", catalog.named("unit1"))]
    out += [(n, catalog.named(n)) for n in GROUPS]
    out += [("Z2xZ4", catalog.abelian(2, 4)), ("Z2xZ2xZ2", catalog.abelian(2, 2, 2))]
    out += [("pair2", catalog.named("pair2")),
            ("pair2xZ2", catalog.product_groupoid(catalog.named("pair2"), catalog.named("Z2")))]
    return out


def fibers(max_arrows: int):
    comps = components()
    for k in range(1, max_arrows + 1):
        for combo in itertools.combinations_with_replacement(range(len(comps)), k):
            if sum(comps[i][1].n1 for i in combo) > max_arrows:
                continue
            parts = [comps[i] for i in combo]
            name = "+".join(p[0] for p in parts)
            yield name, catalog.disjoint_union(*[p[1] for p in parts]) if len(parts) > 1 else parts[0][1]


def search(max_arrows: int, saut_cap: int, log=print):
    bases = {"Z2": catalog.named("Z2"), "Z2xZ2": catalog.named("V4")}
    cases, skipped, nonzero = 0, [], []
    for name, A in fibers(max_arrows):
        if center(A).order == 1:
            continue  # H³ with trivial coefficients vanishes
        try:
            enumerate_saut(A, size_cap=max_arrows, count_cap=saut_cap)
            co = coarse_saut(A, size_cap=max_arrows)
        except SizeCapExceeded as e:
            skipped.append({"fiber": name, "reason": str(e)})
            continue
        for bname, K in bases.items():
            for band in enumerate_bands(A, K):
                coords, H3 = obstruction_class(obstruction(lift_band(A, band)))
                cases += 1
                if any(coords):
                    hit = {"fiber": name, "base": bname, "band": list(band.values),
                           "class": list(coords), "H3": list(H3.invariant_factors)}
                    nonzero.append(hit)
                    log(f"nonzero: {hit}")
        log(f"{name}: |coarse SAut| = {co.order}, cases so far {cases}")
    return {"cases": cases, "nonzero": nonzero, "skipped": skipped}


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--max-arrows", type=int, default=8)
    ap.add_argument("--saut-cap", type=int, default=5000, help="skip fibers with more strict automorphisms")
    ap.add_argument("--json", help="write the summary here")
    args = ap.parse_args(argv)
    t0 = time.perf_counter()
    res = search(args.max_arrows, args.saut_cap)
    res["seconds"] = round(time.perf_counter() - t0, 1)
    print(f"{res['cases']} band cases, {len(res['nonzero'])} nonzero classes, "
          f"{len(res['skipped'])} fibers skipped, {res['seconds']}s")
    if args.json:
        with open(args.json, "w", encoding="utf-8") as fh:
            json.dump(res, fh, indent=2, sort_keys=True)
    return 0


if __name__ == "__main__":
    sys.exit(main())
