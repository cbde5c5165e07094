"""Finite abelian groups and Smith normal forms (over ℤ and over ℤ/N)."""
from __future__ import annotations

import itertools
from math import gcd
from typing import Sequence

import numpy as np


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, x, y) with g = gcd(a, b) ≥ 0 and a·x + b·y = g."""
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        return -a, -x0, -y0
    return a, x0, y0


def _eye(n):
    return [[int(i == j) for j in range(n)] for i in range(n)]


def smith_normal_form(M: Sequence[Sequence[int]]):
    """Integer Smith normal form with transforms.

    Returns (U, D, V, Uinv, Vinv) with U·M·V = D diagonal, d₁ | d₂ | …, dᵢ ≥ 0.
    Meant for the small matrices that arise from presentations of tiny groups.
    """
    A = [list(map(int, r)) for r in M]
    m = len(A)
    n = len(A[0]) if m else 0
    U, Ui, V, Vi = _eye(m), _eye(m), _eye(n), _eye(n)

    def row_add(i, t, q):  # row_i += q·row_t
        if q == 0:
            return
        for mat in (A, U):
            mat[i] = [a + q * b for a, b in zip(mat[i], mat[t])]
        for r in Ui:  # col_t -= q·col_i
            r[t] -= q * r[i]

    def row_swap(i, t):
        if i == t:
            return
        for mat in (A, U):
            mat[i], mat[t] = mat[t], mat[i]
        for r in Ui:
            r[i], r[t] = r[t], r[i]

    def row_neg(t):
        for mat in (A, U):
            mat[t] = [-a for a in mat[t]]
        for r in Ui:
            r[t] = -r[t]

    def col_add(j, t, q):  # col_j += q·col_t
        if q == 0:
            return
        for mat in (A, V):
            for r in mat:
                r[j] += q * r[t]
        Vi[t] = [a - q * b for a, b in zip(Vi[t], Vi[j])]

    def col_swap(j, t):
        if j == t:
            return
        for mat in (A, V):
            for r in mat:
                r[j], r[t] = r[t], r[j]
        Vi[j], Vi[t] = Vi[t], Vi[j]

    t = 0
    while t < min(m, n):
        best = None
        for i in range(t, m):
            for j in range(t, n):
                if A[i][j] and (best is None or abs(A[i][j]) < abs(A[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        row_swap(best[0], t)
        col_swap(best[1], t)
        while True:
            p = A[t][t]
            dirty = False
            for i in range(t + 1, m):
                if A[i][t]:
                    row_add(i, t, -(A[i][t] // p))
                    if A[i][t]:
                        dirty = True
            for j in range(t + 1, n):
                if A[t][j]:
                    col_add(j, t, -(A[t][j] // p))
                    if A[t][j]:
                        dirty = True
            if dirty:
                best = min(((i, t) for i in range(t, m) if A[i][t]),
                           key=lambda ij: abs(A[ij[0]][ij[1]]))
                best2 = min(((t, j) for j in range(t, n) if A[t][j]),
                            key=lambda ij: abs(A[ij[0]][ij[1]]))
                if abs(A[best2[0]][best2[1]]) < abs(A[best[0]][best[1]]):
                    col_swap(best2[1], t)
                else:
                    row_swap(best[0], t)
                continue
            bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n) if A[i][j] % p), None)
            if bad is None:
                break
            row_add(t, bad[0], 1)
        if A[t][t] < 0:
            row_neg(t)
        t += 1
    return U, A, V, Ui, Vi


def diagonalize_mod(A, N: int, *, track_u: bool = False, track_v: bool = False):
    """Diagonalize an integer matrix over ℤ/N by invertible row and column operations.

    Returns (U, diag, V) with U·A·V ≡ diag (mod N); U or V is None unless tracked.
    ``diag`` has length min(rows, cols). No divisibility chain is imposed.
    """
    A = np.array(A, dtype=np.int64).reshape(len(A), -1) % N if len(A) else np.zeros((0, 0), np.int64)
    r, c = A.shape
    U = np.eye(r, dtype=np.int64) if track_u else None
    V = np.eye(c, dtype=np.int64) if track_v else None
    diag = []
    t = 0
    while t < min(r, c):
        sub = A[t:, t:]
        nz = sub != 0
        if not nz.any():
            break
        g = np.gcd(sub, N)
        g[~nz] = N + 1
        i, j = np.unravel_index(int(np.argmin(g)), g.shape)
        i, j = int(i) + t, int(j) + t
        if i != t:
            A[[t, i]] = A[[i, t]]
            if U is not None:
                U[[t, i]] = U[[i, t]]
        if j != t:
            A[:, [t, j]] = A[:, [j, t]]
            if V is not None:
                V[:, [t, j]] = V[:, [j, t]]
        while True:
            changed = False
            # column below the pivot
            p = int(A[t, t])
            gp = gcd(p, N)
            col = A[t + 1:, t]
            nzr = np.nonzero(col)[0]
            if len(nzr):
                div = nzr[col[nzr] % gp == 0]
                if len(div):
                    rows = div + t + 1
                    q = ((A[rows, t] // gp) * pow(p // gp, -1, N // gp)) % (N // gp)
                    A[rows] = (A[rows] - q[:, None] * A[t]) % N
                    if U is not None:
                        U[rows] = (U[rows] - q[:, None] * U[t]) % N
                rest = nzr[col[nzr] % gp != 0]
                if len(rest):
                    i = int(rest[0]) + t + 1
                    a, b = int(A[t, t]), int(A[i, t])
                    g2, x, y = xgcd(a, b)
                    rt, ri = x * A[t] + y * A[i], (-b // g2) * A[t] + (a // g2) * A[i]
                    A[t], A[i] = rt % N, ri % N
                    if U is not None:
                        ut, ui = x * U[t] + y * U[i], (-b // g2) * U[t] + (a // g2) * U[i]
                        U[t], U[i] = ut % N, ui % N
                    continue
            # row right of the pivot
            p = int(A[t, t])
            gp = gcd(p, N)
            row = A[t, t + 1:]
            nzc = np.nonzero(row)[0]
            if len(nzc):
                div = nzc[row[nzc] % gp == 0]
                if len(div):
                    cols = div + t + 1
                    q = ((A[t, cols] // gp) * pow(p // gp, -1, N // gp)) % (N // gp)
                    A[:, cols] = (A[:, cols] - A[:, [t]] * q[None, :]) % N
                    if V is not None:
                        V[:, cols] = (V[:, cols] - V[:, [t]] * q[None, :]) % N
                rest = nzc[row[nzc] % gp != 0]
                if len(rest):
                    j = int(rest[0]) + t + 1
                    a, b = int(A[t, t]), int(A[t, j])
                    g2, x, y = xgcd(a, b)
                    ct, cj = x * A[:, t] + y * A[:, j], (-b // g2) * A[:, t] + (a // g2) * A[:, j]
                    A[:, t], A[:, j] = ct % N, cj % N
                    if V is not None:
                        vt, vj = x * V[:, t] + y * V[:, j], (-b // g2) * V[:, t] + (a // g2) * V[:, j]
                        V[:, t], V[:, j] = vt % N, vj % N
                    changed = True
            if not changed and not A[t + 1:, t].any():
                break
        diag.append(int(A[t, t]))
        t += 1
    diag += [0] * (min(r, c) - len(diag))
    return U, diag, V


def canonical_decomposition(orders: Sequence[int]):
    """Re-express ⊕ℤ/oⱼ in invariant-factor form.

    Returns (factors, to_new, gens) where ``to_new(coords)`` maps old coordinates to
    new ones and ``gens[i]`` is the old coordinate vector of the i-th new generator.
    """
    k = len(orders)
    if k == 0:
        return (), (lambda v: ()), []
    U, D, V, Ui, Vi = smith_normal_form([[orders[i] if i == j else 0 for j in range(k)] for i in range(k)])
    d = [D[i][i] for i in range(k)]
    keep = [i for i in range(k) if d[i] != 1]
    factors = tuple(d[i] for i in keep)

    def to_new(v):
        return tuple(sum(U[i][j] * v[j] for j in range(k)) % d[i] for i in keep)

    gens = [tuple(Ui[j][i] % orders[j] for j in range(k)) for i in keep]
    return factors, to_new, gens


class FiniteAbelianGroup:
    """A finite abelian group written additively, with a cyclic decomposition."""

    def __init__(self, labels, add, zero: int):
        self.labels = list(labels)
        self.add = [list(r) for r in add]
        self.zero = zero
        n = len(self.labels)
        self.neg = [next(j for j in range(n) if self.add[i][j] == zero) for i in range(n)]
        self._decomp = None

    @classmethod
    def cyclic_product(cls, orders: Sequence[int]) -> "FiniteAbelianGroup":
        elems = list(itertools.product(*[range(d) for d in orders]))
        index = {v: i for i, v in enumerate(elems)}
        add = [[index[tuple((a + b) % d for a, b, d in zip(u, v, orders))] for v in elems] for u in elems]
        return cls(["(" + ",".join(map(str, v)) + ")" for v in elems], add, 0)

    @property
    def order(self) -> int:
        return len(self.labels)

    def __len__(self):
        return len(self.labels)

    def axiom_problems(self) -> list[str]:
        n, add = self.order, self.add
        out = []
        for a in range(n):
            if add[a][self.zero] != a:
                out.append(f"zero law fails at {self.labels[a]}")
            for b in range(n):
                if add[a][b] != add[b][a]:
                    out.append(f"{self.labels[a]}+{self.labels[b]} not commutative")
                for c in range(n):
                    if add[add[a][b]][c] != add[a][add[b][c]]:
                        out.append("associativity fails")
                        return out
        return out

    def sub(self, a: int, b: int) -> int:
        return self.add[a][self.neg[b]]

    def scalar(self, k: int, a: int) -> int:
        k %= self.element_order(a)
        acc = self.zero
        for _ in range(k):
            acc = self.add[acc][a]
        return acc

    def element_order(self, a: int) -> int:
        k, acc = 1, a
        while acc != self.zero:
            acc = self.add[acc][a]
            k += 1
        return k

    def _decompose(self):
        # greedy generating set with triangular relations, then Smith form
        normal = {self.zero: ()}
        gens, rel_rows = [], []
        for e in range(self.order):
            if e in normal:
                continue
            m, acc = 1, e
            while acc not in normal:
                acc = self.add[acc][e]
                m += 1
            c = normal[acc]
            k = len(gens)
            rel_rows.append([-c[j] for j in range(k)] + [m])
            new = {}
            for x, cx in normal.items():
                y = x
                for j in range(m):
                    new[y] = cx + (j,)
                    y = self.add[y][e]
            normal = new
            gens.append(e)
        k = len(gens)
        rel = [r + [0] * (k - len(r)) for r in rel_rows]
        if k == 0:
            self._decomp = ((), {self.zero: ()}, [])
            return
        U, D, V, Ui, Vi = smith_normal_form(rel)
        d = [D[i][i] for i in range(k)]
        keep = [i for i in range(k) if d[i] != 1]
        coords = {}
        for x, cx in normal.items():
            y = [sum(cx[j] * V[j][i] for j in range(k)) for i in range(k)]
            coords[x] = tuple(y[i] % d[i] for i in keep)
        new_gens = []
        for i in keep:
            acc = self.zero
            for j in range(k):
                acc = self.add[acc][self.scalar(Vi[i][j], gens[j])]
            new_gens.append(acc)
        self._decomp = (tuple(d[i] for i in keep), coords, new_gens)

    @property
    def invariant_factors(self) -> tuple:
        if self._decomp is None:
            self._decompose()
        return self._decomp[0]

    @property
    def generators(self) -> list[int]:
        if self._decomp is None:
            self._decompose()
        return self._decomp[2]

    def coords(self, a: int) -> tuple:
        if self._decomp is None:
            self._decompose()
        return self._decomp[1][a]

    def element(self, coords: Sequence[int]) -> int:
        if self._decomp is None:
            self._decompose()
        if not hasattr(self, "_by_coords"):
            self._by_coords = {c: x for x, c in self._decomp[1].items()}
        return self._by_coords[tuple(c % d for c, d in zip(coords, self.invariant_factors))]

    def automorphisms(self) -> list[tuple]:
        """All automorphisms as permutations of element indices, identity first."""
        d = self.invariant_factors
        gens = self.generators
        candidates = [[h for h in range(self.order) if d[i] % self.element_order(h) == 0]
                      for i in range(len(d))]
        out = []
        for images in itertools.product(*candidates):
            perm = []
            for x in range(self.order):
                acc = self.zero
                for c, h in zip(self.coords(x), images):
                    acc = self.add[acc][self.scalar(c, h)]
                perm.append(acc)
            if len(set(perm)) == self.order:
                out.append(tuple(perm))
        out.sort(key=lambda p: (p != tuple(range(self.order)), p))
        return out

    @property
    def exponent(self) -> int:
        f = self.invariant_factors
        return f[-1] if f else 1


def invariant_factors_of(orders: Sequence[int]) -> tuple:
    """Invariant factors of ⊕ℤ/oⱼ."""
    return canonical_decomposition([o for o in orders if o != 1])[0]
