"""Normalized versus unnormalized cochains: group orders, and class agreement on normalized cocycles.

Every module structure on small coefficient groups over the small groupoids is tried in
degrees 0..3. A normalized cocycle is also an unnormalized one, so its class can be read in
both complexes; the map must be well defined and injective for the two H^n to agree.
"""
from __future__ import annotations

import argparse
import sys
import time

from gpdext import catalog
from gpdext.abelian import FiniteAbelianGroup
from gpdext.cohomology import Cochain, all_modules, cohomology, composable_tuples, tuple_index


def widen(m, z: Cochain) -> Cochain:
    """Extend a normalized cochain by zero to all composable tuples."""
    idx = tuple_index(m.K, z.degree, True)
    vals = tuple(z.values[idx[t]] if t in idx else m.E.zero for t in composable_tuples(m.K, z.degree))
    return Cochain(z.degree, vals, False)


def run(names, orders_list, max_degree: int):
    total, bad = 0, []
    for kn in names:
        K = catalog.named(kn)
        for orders in orders_list:
            for m in all_modules(K, FiniteAbelianGroup.cyclic_product(orders)):
                for n in range(max_degree + 1):
                    Hn = cohomology(m, n, normalized=True)
                    Hu = cohomology(m, n)
                    total += 1
                    if Hn.invariant_factors != Hu.invariant_factors:
                        bad.append((kn, orders, n, "orders"))
                        continue
                    pairing = {}
                    for c in Hn.elements():
                        pairing[c] = Hu.coordinates(widen(m, Hn.representative(c)))
                    if len(set(pairing.values())) != len(pairing):
                        bad.append((kn, orders, n, "not injective"))
    return total, bad


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--max-degree", type=int, default=3)
    args = ap.parse_args(argv)
    t0 = time.perf_counter()
    names = list(catalog.SMALL) + ["S3", "pair3"]
    total, bad = run(names, [(2,), (3,), (4,), (2, 2)], args.max_degree)
    for row in bad:
        print("disagreement:", row)
    print(f"{total} (module, degree) cases, {len(bad)} disagreements, {time.perf_counter() - t0:.1f}s")
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main())
