"""Brute-force ground truth: an extension census and a classical group cohomology oracle.

Neither routine touches the cocycle formulas of ``extension`` or the linear algebra of
``cohomology``; they exist to cross-check those modules.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .abelian import FiniteAbelianGroup
from .core import FiniteGroupoid, StrictMorphism, check_axioms
from .search import search_functors

CENSUS_CAP = 16


class OracleError(Exception):
    pass


class CapExceeded(OracleError):
    pass


# --------------------------------------------------------------------------
# census of product extensions

class _TableSearch:
    """Fill the composition table of a product bundle with fixed targets.

    Arrow (α, ξ) is α·|K¹|+ξ. Kernel rows follow A, labels are normalized so that
    (α,1)(1_{tα},ξ) = (α,ξ); the remaining cells are searched with latin-square and
    associativity propagation.
    """

    def __init__(self, A: FiniteGroupoid, K: FiniteGroupoid, T: Sequence[tuple]):
        self.A, self.K = A, K
        n0, n1 = K.n0, K.n1
        self.n1 = n1
        N = A.n1 * n1
        self.N = N
        self.src = [A.src[g // n1] * n0 + K.src[g % n1] for g in range(N)]
        self.tgt = [T[g % n1][A.tgt[g // n1]] * n0 + K.tgt[g % n1] for g in range(N)]
        self.out: dict[int, list[int]] = {}
        self.into: dict[int, list[int]] = {}
        for g in range(N):
            self.out.setdefault(self.src[g], []).append(g)
            self.into.setdefault(self.tgt[g], []).append(g)
        self.mul = [[-1] * N for _ in range(N)]
        self.row_vals = [set() for _ in range(N)]
        self.col_vals = [set() for _ in range(N)]
        self.trail: list[tuple[int, int]] = []
        self.cells = [(g, h) for g in range(N) for h in self.out.get(self.tgt[g], [])]
        self.cands = {}
        for g, h in self.cells:
            k = K.mul[g % n1][h % n1]
            self.cands[(g, h)] = [c for c in self.out.get(self.src[g], [])
                                  if c % n1 == k and self.tgt[c] == self.tgt[h]]

    def assign(self, g: int, h: int, v: int) -> bool:
        mul, out, into = self.mul, self.out, self.into
        stack = [(g, h, v)]
        while stack:
            g, h, v = stack.pop()
            cur = mul[g][h]
            if cur >= 0:
                if cur != v:
                    return False
                continue
            if self.tgt[g] != self.src[h] or self.src[v] != self.src[g] or self.tgt[v] != self.tgt[h]:
                return False
            if v in self.row_vals[g] or v in self.col_vals[h]:
                return False
            mul[g][h] = v
            self.row_vals[g].add(v)
            self.col_vals[h].add(v)
            self.trail.append((g, h))
            for k in out.get(self.tgt[h], []):
                q = mul[h][k]
                if q < 0:
                    continue
                w1, w2 = mul[v][k], mul[g][q]
                if w1 >= 0 and w2 >= 0:
                    if w1 != w2:
                        return False
                elif w1 >= 0:
                    stack.append((g, q, w1))
                elif w2 >= 0:
                    stack.append((v, k, w2))
            for f in into.get(self.src[g], []):
                p = mul[f][g]
                if p < 0:
                    continue
                w1, w2 = mul[p][h], mul[f][v]
                if w1 >= 0 and w2 >= 0:
                    if w1 != w2:
                        return False
                elif w1 >= 0:
                    stack.append((f, v, w1))
                elif w2 >= 0:
                    stack.append((p, h, w2))
        return True

    def undo(self, mark: int):
        while len(self.trail) > mark:
            g, h = self.trail.pop()
            v = self.mul[g][h]
            self.row_vals[g].discard(v)
            self.col_vals[h].discard(v)
            self.mul[g][h] = -1

    def seed(self) -> bool:
        A, K, n1 = self.A, self.K, self.n1
        for g in range(self.N):
            a_s, a_t = A.src[g // n1], A.tgt[g // n1]
            u_src = A.unit[a_s] * n1 + K.unit[K.src[g % n1]]
            t_obj = self.tgt[g]
            u_tgt = A.unit[t_obj // K.n0] * n1 + K.unit[t_obj % K.n0]
            if not self.assign(u_src, g, g) or not self.assign(g, u_tgt, g):
                return False
        for x in range(K.n0):
            u = K.unit[x]
            for al in range(A.n1):
                for be in A.out[A.tgt[al]]:
                    if not self.assign(al * n1 + u, be * n1 + u, A.mul[al][be] * n1 + u):
                        return False
                for xi in K.out[x]:
                    if not self.assign(al * n1 + u, A.unit[A.tgt[al]] * n1 + xi, al * n1 + xi):
                        return False
        return True

    def solutions(self):
        if not self.seed():
            return
        yield from self._rec()

    def _rec(self):
        best, best_opts = None, None
        for cell in self.cells:
            g, h = cell
            if self.mul[g][h] >= 0:
                continue
            opts = [c for c in self.cands[cell] if c not in self.row_vals[g] and c not in self.col_vals[h]]
            if best is None or len(opts) < len(best_opts):
                best, best_opts = cell, opts
                if len(opts) <= 1:
                    break
        if best is None:
            yield [row[:] for row in self.mul]
            return
        for v in best_opts:
            mark = len(self.trail)
            if self.assign(best[0], best[1], v):
                yield from self._rec()
            self.undo(mark)


def _object_bijections(A: FiniteGroupoid) -> list[tuple]:
    """Object permutations preserving hom-set sizes (necessary for any automorphism)."""
    n = A.n0
    out = []
    for p in itertools.permutations(range(n)):
        if all(len(A.hom(x, y)) == len(A.hom(p[x], p[y])) for x in range(n) for y in range(n)):
            out.append(p)
    return out


def _pre_action(G: FiniteGroupoid, A: FiniteGroupoid, K: FiniteGroupoid, xi: int) -> StrictMorphism:
    n0, n1 = K.n0, K.n1
    u = K.unit[K.src[xi]]
    f0 = [G.tgt[A.unit[a] * n1 + xi] // n0 for a in range(A.n0)]
    f1 = []
    for al in range(A.n1):
        left = G.inv[A.unit[A.src[al]] * n1 + xi]
        g = G.mul[G.mul[left][al * n1 + u]][A.unit[A.tgt[al]] * n1 + xi]
        f1.append(g // n1)
    return StrictMorphism(A, A, f0, f1)


@dataclass
class CensusResult:
    A: FiniteGroupoid
    K: FiniteGroupoid
    band: Optional[tuple]
    structures: list[FiniteGroupoid]
    bands: list[tuple]
    classes: list[list[int]] = field(default_factory=list)

    @property
    def n_structures(self) -> int:
        return len(self.structures)

    @property
    def n_classes(self) -> int:
        return len(self.classes)

    def counts(self) -> dict:
        return {"structures": self.n_structures, "classes": self.n_classes}


def _fiber_isomorphic(G1: FiniteGroupoid, G2: FiniteGroupoid, n1: int, kernel: list[int]) -> bool:
    fixed = {g: g for g in kernel}
    it = search_functors(G1, G2, bijective=True, object_map=tuple(range(G1.n0)), fixed=fixed,
                         allowed=lambda g, v: g % n1 == v % n1, limit=1)
    return next(it, None) is not None


def census_extensions(A: FiniteGroupoid, K: FiniteGroupoid, band: Optional[Sequence[int]] = None,
                      cap: int = CENSUS_CAP) -> CensusResult:
    """Every product extension of K by A (normalized labels), partitioned by fiber isomorphism.

    ``band`` filters by coarse-SAut class per K-arrow (indices of ``autalg.coarse_saut``).
    """
    if A.n1 * K.n1 > cap:
        raise CapExceeded(f"|A¹|·|K¹| = {A.n1 * K.n1} exceeds the census cap {cap}")
    from .autalg import coarse_saut
    co = coarse_saut(A) if A.n1 else None
    ids = K.identity_set()
    perms = _object_bijections(A)
    ident = tuple(range(A.n0))
    choices = [[ident] if g in ids else perms for g in range(K.n1)]
    structures, bands = [], []
    n0, n1 = K.n0, K.n1
    objects = [f"{a}|{x}" for a in A.objects for x in K.objects]
    arrows = [f"{al}|{xi}" for al in A.arrows for xi in K.arrows]
    for T in itertools.product(*choices):
        search = _TableSearch(A, K, T)
        for mul in search.solutions():
            N = search.N
            units = [A.unit[a] * n1 + K.unit[x] for a in range(A.n0) for x in range(n0)]
            inv = []
            for g in range(N):
                found = [h for h in search.out.get(search.tgt[g], []) if mul[g][h] == units[search.src[g]]]
                inv.append(found[0] if found else 0)
            G = FiniteGroupoid(objects, arrows, search.src, search.tgt, mul, units, inv, check=False)
            if check_axioms(G, limit=1):
                continue
            lam = [_pre_action(G, A, K, xi) for xi in range(K.n1)]
            if not all(L.is_functor() and L.is_bijective() for L in lam):
                continue
            b = tuple(co.proj[co.saut.find(L)] for L in lam) if co else (0,) * K.n1
            if band is not None and b != tuple(band):
                continue
            structures.append(G)
            bands.append(b)
    kernel = [al * n1 + x for al in range(A.n1) for x in range(n1) if x in ids]
    classes: list[list[int]] = []
    for i, G in enumerate(structures):
        for cl in classes:
            j = cl[0]
            if bands[j] == bands[i] and _fiber_isomorphic(structures[j], G, n1, kernel):
                cl.append(i)
                break
        else:
            classes.append([i])
    return CensusResult(A, K, tuple(band) if band is not None else None, structures, bands, classes)


# --------------------------------------------------------------------------
# group cohomology by the bar resolution

def _identity_of(table) -> int:
    n = len(table)
    return next(i for i in range(n) if all(table[i][j] == j for j in range(n)))


def _invariants_by_orders(elements: list, add, zero) -> tuple:
    """Invariant factors of a finite abelian group from the sizes of its p^j-torsion."""
    n = len(elements)
    if n == 1:
        return ()

    def mult(k, x):
        acc = zero
        for _ in range(k):
            acc = add(acc, x)
        return acc

    primes, m = [], n
    p = 2
    while m > 1:
        if m % p == 0:
            primes.append(p)
            while m % p == 0:
                m //= p
        p += 1
    per_prime = {}
    for p in primes:
        sizes = [1]
        j = 1
        while True:
            s = sum(1 for x in elements if mult(p ** j, x) == zero)
            sizes.append(s)
            if s == sizes[-2] and j > 1:
                break
            j += 1
        ranks = []
        for j in range(1, len(sizes)):
            r, q = 0, sizes[j] // sizes[j - 1]
            while q > 1:
                q //= p
                r += 1
            ranks.append(r)
        parts = []
        for j, r in enumerate(ranks):
            nxt = ranks[j + 1] if j + 1 < len(ranks) else 0
            parts += [p ** (j + 1)] * (r - nxt)
        per_prime[p] = sorted(parts, reverse=True)
    width = max(len(v) for v in per_prime.values())
    out = []
    for i in range(width):
        d = 1
        for parts in per_prime.values():
            if i < len(parts):
                d *= parts[i]
        out.append(d)
    return tuple(sorted(out))


def _rank_mod_p(rows: list[list[int]], p: int) -> int:
    rows = [[x % p for x in r] for r in rows]
    rank, col = 0, 0
    width = len(rows[0]) if rows else 0
    while rank < len(rows) and col < width:
        piv = next((i for i in range(rank, len(rows)) if rows[i][col]), None)
        if piv is None:
            col += 1
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        inv = pow(rows[rank][col], -1, p)
        rows[rank] = [x * inv % p for x in rows[rank]]
        for i in range(len(rows)):
            if i != rank and rows[i][col]:
                f = rows[i][col]
                rows[i] = [(x - f * y) % p for x, y in zip(rows[i], rows[rank])]
        rank += 1
        col += 1
    return rank


def _elementary_dim(table, elems: list[int], M: FiniteAbelianGroup, beta, p: int, n: int) -> int:
    """dim_F_p H^n for an elementary abelian Γ-stable subgroup on ``elems``."""
    basis, span = [], {M.zero: ()}
    for e in elems:
        if e in span:
            continue
        basis.append(e)
        new = {}
        for x, cx in span.items():
            y = x
            for k in range(p):
                new[y] = cx + (k,)
                y = M.add[y][e]
        span = new
    r = len(basis)
    coords = {x: c + (0,) * (r - len(c)) for x, c in span.items()}
    from_coords = {c: x for x, c in coords.items()}
    e_id = _identity_of(table)
    G = [g for g in range(len(table)) if g != e_id]

    def tuples(k):
        return list(itertools.product(G, repeat=k))

    def d_matrix(k):
        # columns: basis cochains of degree k; rows: coordinates of values on degree-(k+1) tuples
        src_t, dst_t = tuples(k), tuples(k + 1)
        cols = []
        for ti, t in enumerate(src_t):
            for j in range(r):
                vec = tuple(1 if i == j else 0 for i in range(r))
                val = {t: from_coords[vec]}

                def f(u):
                    return val.get(u, M.zero)

                image = []
                for u in dst_t:
                    g1 = u[0]
                    v = beta[g1][f(u[1:])]
                    for i in range(1, k + 1):
                        merged = table[u[i - 1]][u[i]]
                        if merged == e_id:
                            x = M.zero
                        else:
                            x = f(u[:i - 1] + (merged,) + u[i + 1:])
                        v = M.add[v][x if i % 2 == 0 else M.neg[x]]
                    x = f(u[:-1])
                    v = M.add[v][x if (k + 1) % 2 == 0 else M.neg[x]]
                    image += list(coords[v])
                cols.append(image)
        if not cols:
            return 0
        return _rank_mod_p([list(c) for c in zip(*cols)], p) if cols[0] else 0

    dim_c = r * len(tuples(n))
    rank_out = d_matrix(n)
    rank_in = d_matrix(n - 1) if n > 0 else 0
    return dim_c - rank_out - rank_in


def _primary_parts(M: FiniteAbelianGroup) -> dict[int, list[int]]:
    parts: dict[int, list[int]] = {}
    n = M.order
    primes, m, p = [], n, 2
    while m > 1:
        if m % p == 0:
            primes.append(p)
            while m % p == 0:
                m //= p
        p += 1
    for p in primes:
        pk = 1
        while n % (pk * p) == 0:
            pk *= p
        parts[p] = [x for x in range(n) if M.scalar(pk, x) == M.zero]
    return parts


def group_cohomology_oracle(table, M: FiniteAbelianGroup, beta, n: int) -> tuple:
    """H^n(Γ; M) for |Γ| ≤ 4 and n ≤ 3, with Γ acting on the left by the permutations ``beta``.

    Cyclic Γ uses the periodic resolution; otherwise each primary part of M must be
    elementary abelian and the normalized bar complex is reduced mod p.
    """
    order = len(table)
    if order > 4 or n > 3 or n < 0:
        raise CapExceeded("oracle covers |Γ| ≤ 4 and 0 ≤ n ≤ 3")
    e = _identity_of(table)
    if order == 1:
        if n == 0:
            return _invariants_by_orders(list(range(M.order)), lambda a, b: M.add[a][b], M.zero)
        return ()

    def power_order(g):
        k, x = 1, g
        while x != e:
            x = table[x][g]
            k += 1
        return k

    gen = next((g for g in range(order) if power_order(g) == order), None)
    if gen is not None:
        t = beta[gen]
        fixed = [m for m in range(M.order) if t[m] == m]
        if n == 0:
            return _invariants_by_orders(fixed, lambda a, b: M.add[a][b], M.zero)

        def norm(m):
            acc, x = M.zero, m
            for _ in range(order):
                acc = M.add[acc][x]
                x = t[x]
            return acc

        if n % 2 == 1:
            num = [m for m in range(M.order) if norm(m) == M.zero]
            den = {M.add[m][M.neg[t[m]]] for m in range(M.order)}
        else:
            num = fixed
            den = {norm(m) for m in range(M.order)}
        return _quotient_invariants(M, num, den)
    total: list[int] = []
    for p, elems in _primary_parts(M).items():
        if any(M.scalar(p, x) != M.zero for x in elems):
            raise CapExceeded("non-cyclic Γ needs elementary abelian primary parts")
        total += [p] * _elementary_dim(table, elems, M, beta, p, n)
    return _combine(total)


def _quotient_invariants(M: FiniteAbelianGroup, num: list[int], den: set) -> tuple:
    den = sorted(den)
    coset_of, reps = {}, []
    for x in num:
        if x in coset_of:
            continue
        cid = len(reps)
        reps.append(x)
        for d in den:
            coset_of[M.add[x][d]] = cid
    return _invariants_by_orders(list(range(len(reps))),
                                 lambda a, b: coset_of[M.add[reps[a]][reps[b]]], coset_of[M.zero])


def _combine(primes: list[int]) -> tuple:
    """Invariant factors of a product of prime-order cyclic groups."""
    from collections import Counter
    c = Counter(primes)
    width = max(c.values(), default=0)
    out = []
    for i in range(width):
        d = 1
        for p, k in c.items():
            if i < k:
                d *= p
        out.append(d)
    return tuple(sorted(out))


def oracle_for_module(m, n: int) -> tuple:
    """Oracle answer for a KModule over a one-object K = B(Γ)."""
    K = m.K
    if K.n0 != 1:
        raise OracleError("the group oracle needs a one-object groupoid")
    return group_cohomology_oracle(K.mul, m.E, m.twist, n)
