"""Small named groupoids used by tests, scripts and the CLI fixtures."""
from __future__ import annotations

import itertools

from .core import FiniteGroupoid


def group_groupoid(names, table, *, obj: str = "*") -> FiniteGroupoid:
    """B(G) for a group given by its multiplication table (identity found from the table)."""
    n = len(names)
    e = next(i for i in range(n) if all(table[i][j] == j for j in range(n)))
    inv = [next(j for j in range(n) if table[i][j] == e) for i in range(n)]
    return FiniteGroupoid([obj], names, [0] * n, [0] * n, table, [e], inv)


def cyclic_table(n: int):
    return [[(i + j) % n for j in range(n)] for i in range(n)]


def cyclic(n: int) -> FiniteGroupoid:
    return group_groupoid([str(i) for i in range(n)], cyclic_table(n))


def abelian(*orders: int) -> FiniteGroupoid:
    """B(ℤ/d₁ × … × ℤ/d_k), elements in lexicographic order of coordinates."""
    elems = list(itertools.product(*[range(d) for d in orders]))
    index = {v: i for i, v in enumerate(elems)}
    table = [[index[tuple((a + b) % d for a, b, d in zip(u, v, orders))] for v in elems] for u in elems]
    return group_groupoid(["".join(map(str, v)) for v in elems], table)


def klein() -> FiniteGroupoid:
    return abelian(2, 2)


def permutation_group(perms) -> FiniteGroupoid:
    """B(G) for a list of permutations closed under composition; g·h means g then h."""
    perms = sorted(tuple(p) for p in perms)
    index = {p: i for i, p in enumerate(perms)}
    table = [[index[tuple(h[g[i]] for i in range(len(g)))] for h in perms] for g in perms]
    names = ["".join(map(str, p)) for p in perms]
    return group_groupoid(names, table)


def symmetric(n: int) -> FiniteGroupoid:
    return permutation_group(itertools.permutations(range(n)))


def _closure(gens):
    n = len(gens[0])
    seen = {tuple(range(n))}
    frontier = list(seen)
    while frontier:
        nxt = []
        for p in frontier:
            for g in gens:
                q = tuple(g[p[i]] for i in range(n))
                if q not in seen:
                    seen.add(q)
                    nxt.append(q)
        frontier = nxt
    return seen


def dihedral(n: int) -> FiniteGroupoid:
    """Symmetries of the n-gon (order 2n)."""
    rot = tuple((i + 1) % n for i in range(n))
    ref = tuple((-i) % n for i in range(n))
    return permutation_group(_closure([rot, ref]))


def quaternion() -> FiniteGroupoid:
    """Q8 via its regular representation; elements ±1, ±i, ±j, ±k."""
    basis = ["1", "i", "j", "k"]
    unit_mul = {
        ("1", "1"): (1, "1"), ("1", "i"): (1, "i"), ("1", "j"): (1, "j"), ("1", "k"): (1, "k"),
        ("i", "1"): (1, "i"), ("i", "i"): (-1, "1"), ("i", "j"): (1, "k"), ("i", "k"): (-1, "j"),
        ("j", "1"): (1, "j"), ("j", "i"): (-1, "k"), ("j", "j"): (-1, "1"), ("j", "k"): (1, "i"),
        ("k", "1"): (1, "k"), ("k", "i"): (1, "j"), ("k", "j"): (-1, "i"), ("k", "k"): (-1, "1"),
    }
    elems = [(s, b) for s in (1, -1) for b in basis]
    index = {v: i for i, v in enumerate(elems)}
    table = []
    for s1, b1 in elems:
        row = []
        for s2, b2 in elems:
            s, b = unit_mul[(b1, b2)]
            row.append(index[(s1 * s2 * s, b)])
        table.append(row)
    names = [("" if s == 1 else "-") + b for s, b in elems]
    return group_groupoid(names, table)


def pair_groupoid(n: int) -> FiniteGroupoid:
    """Objects 0..n-1 with exactly one arrow (i,j) between any two."""
    pairs = [(i, j) for i in range(n) for j in range(n)]
    index = {p: k for k, p in enumerate(pairs)}
    m = len(pairs)
    mul = [[-1] * m for _ in range(m)]
    for (i, j), a in index.items():
        for k in range(n):
            mul[a][index[(j, k)]] = index[(i, k)]
    return FiniteGroupoid([str(i) for i in range(n)], [f"({i},{j})" for i, j in pairs],
                          [i for i, _ in pairs], [j for _, j in pairs], mul,
                          [index[(i, i)] for i in range(n)], [index[(j, i)] for i, j in pairs])


def unit_groupoid(n: int) -> FiniteGroupoid:
    """n objects and only identity arrows."""
    return FiniteGroupoid([str(i) for i in range(n)], [f"1_{i}" for i in range(n)],
                          range(n), range(n), [[i if i == j else -1 for j in range(n)] for i in range(n)],
                          range(n), range(n))


def empty_groupoid() -> FiniteGroupoid:
    return FiniteGroupoid([], [], [], [], [], [], [])


def disjoint_union(*parts: FiniteGroupoid) -> FiniteGroupoid:
    objects, arrows, src, tgt, unit, inv = [], [], [], [], [], []
    offsets = []
    o0 = o1 = 0
    for p, G in enumerate(parts):
        offsets.append((o0, o1))
        objects += [f"{p}.{x}" for x in G.objects]
        arrows += [f"{p}.{g}" for g in G.arrows]
        src += [s + o0 for s in G.src]
        tgt += [t + o0 for t in G.tgt]
        unit += [u + o1 for u in G.unit]
        inv += [i + o1 for i in G.inv]
        o0 += G.n0
        o1 += G.n1
    mul = [[-1] * o1 for _ in range(o1)]
    for G, (a0, a1) in zip(parts, offsets):
        for g in range(G.n1):
            for h in G.out[G.tgt[g]]:
                mul[g + a1][h + a1] = G.mul[g][h] + a1
    return FiniteGroupoid(objects, arrows, src, tgt, mul, unit, inv)


def product_groupoid(A: FiniteGroupoid, K: FiniteGroupoid) -> FiniteGroupoid:
    """A × K with object (a,x) at index a·|K⁰|+x and arrow (α,ξ) at α·|K¹|+ξ."""
    n0, n1 = K.n0, K.n1
    objects = [f"{a}|{x}" for a in A.objects for x in K.objects]
    arrows = [f"{a}|{x}" for a in A.arrows for x in K.arrows]
    src = [A.src[a] * n0 + K.src[x] for a in range(A.n1) for x in range(n1)]
    tgt = [A.tgt[a] * n0 + K.tgt[x] for a in range(A.n1) for x in range(n1)]
    m = A.n1 * n1
    mul = [[-1] * m for _ in range(m)]
    for a in range(A.n1):
        for b in A.out[A.tgt[a]]:
            ab = A.mul[a][b]
            for x in range(n1):
                row = mul[a * n1 + x]
                for y in K.out[K.tgt[x]]:
                    row[b * n1 + y] = ab * n1 + K.mul[x][y]
    unit = [A.unit[a] * n1 + K.unit[x] for a in range(A.n0) for x in range(n0)]
    inv = [A.inv[a] * n1 + K.inv[x] for a in range(A.n1) for x in range(n1)]
    return FiniteGroupoid(objects, arrows, src, tgt, mul, unit, inv)


def action_groupoid(group_table, n_points: int, act) -> FiniteGroupoid:
    """Γ ⋉ X for a right action ``act(x, g)``; arrow (x, g): x → act(x, g)."""
    m = len(group_table)
    arrows = [(x, g) for x in range(n_points) for g in range(m)]
    index = {a: i for i, a in enumerate(arrows)}
    e = next(i for i in range(m) if all(group_table[i][j] == j for j in range(m)))
    gi = [next(j for j in range(m) if group_table[i][j] == e) for i in range(m)]
    mul = [[-1] * len(arrows) for _ in arrows]
    for (x, g), a in index.items():
        y = act(x, g)
        for h in range(m):
            mul[a][index[(y, h)]] = index[(x, group_table[g][h])]
    return FiniteGroupoid([str(x) for x in range(n_points)], [f"{x}.{g}" for x, g in arrows],
                          [x for x, _ in arrows], [act(x, g) for x, g in arrows], mul,
                          [index[(x, e)] for x in range(n_points)],
                          [index[(act(x, g), gi[g])] for x, g in arrows])


def named(name: str) -> FiniteGroupoid:
    """Look up a groupoid by a short name such as ``Z4``, ``V4``, ``S3``, ``pair2``, ``unit3``."""
    name = name.strip()
    if name.startswith("Z") and name[1:].isdigit():
        return cyclic(int(name[1:]))
    if name == "V4":
        return klein()
    if name.startswith("S") and name[1:].isdigit():
        return symmetric(int(name[1:]))
    if name.startswith("D") and name[1:].isdigit():
        return dihedral(int(name[1:]))
    if name == "Q8":
        return quaternion()
    if name.startswith("pair"):
        return pair_groupoid(int(name[4:]))
    if name.startswith("unit"):
        return unit_groupoid(int(name[4:]))
    if name == "empty":
        return empty_groupoid()
    if "+" in name:
        return disjoint_union(*[named(p) for p in name.split("+")])
    raise KeyError(f"unknown groupoid name {name!r}")


# every groupoid with at most four arrows, up to isomorphism
SMALL = ("unit1", "unit2", "Z2", "unit3", "Z2+unit1", "Z3", "unit4", "Z2+unit2", "Z3+unit1",
         "Z2+Z2", "Z4", "V4", "pair2")


def small_groupoids() -> dict[str, FiniteGroupoid]:
    return {n: named(n) for n in SMALL}
