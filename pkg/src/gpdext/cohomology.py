"""Groupoid cochains C^n(K, E), the coboundary, and H^n by two independent backends.

Conventions: a K-action on E satisfies act(h)∘act(g) = act(gh) for composable g, h
(``"A1"``); the coboundary twists its first term by act(g₁)⁻¹. With the flipped
convention act(g)∘act(h) = act(gh) and the first term uses act(g₁) directly.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import gcd
from typing import Iterator, Optional, Sequence

import numpy as np

from .abelian import FiniteAbelianGroup, canonical_decomposition, diagonalize_mod
from .core import FiniteGroupoid, StrictMorphism

CONVENTIONS = ("A1", "flipped")
DEFAULT_COHOMOLOGY_CAP = 1 << 16


class CohomologyError(Exception):
    pass


class DegreeMismatch(CohomologyError):
    pass


class NotABand(CohomologyError):
    pass


class CapExceeded(CohomologyError):
    pass


class NotACocycle(CohomologyError):
    pass


class BackendDisagreement(CohomologyError):
    pass


# --------------------------------------------------------------------------
# tuples and modules

def composable_tuples(K: FiniteGroupoid, n: int, normalized: bool = False) -> list[tuple]:
    """K^[n] in canonical order; degree 0 gives 1-tuples of objects."""
    if n < 0:
        raise DegreeMismatch("negative degree")
    key = ("tuples", n, normalized)
    if key in K.cache:
        return K.cache[key]
    if n == 0:
        out = [(x,) for x in range(K.n0)]
    else:
        ids = K.identity_set()
        first = [g for g in range(K.n1) if not (normalized and g in ids)]
        out = [(g,) for g in first]
        for _ in range(n - 1):
            out = [t + (h,) for t in out for h in K.out[K.tgt[t[-1]]]
                   if not (normalized and h in ids)]
    K.cache[key] = out
    return out


def tuple_index(K: FiniteGroupoid, n: int, normalized: bool = False) -> dict:
    key = ("tuple_index", n, normalized)
    if key not in K.cache:
        K.cache[key] = {t: i for i, t in enumerate(composable_tuples(K, n, normalized))}
    return K.cache[key]


def _invert_perm(p) -> tuple:
    out = [0] * len(p)
    for i, j in enumerate(p):
        out[j] = i
    return tuple(out)


@dataclass
class KModule:
    """An abelian group E with a K-action given as one automorphism (permutation) per arrow."""
    K: FiniteGroupoid
    E: FiniteAbelianGroup
    action: list
    convention: str = "A1"

    def __post_init__(self):
        if self.convention not in CONVENTIONS:
            raise ValueError(f"convention must be one of {CONVENTIONS}")
        self.action = [tuple(p) for p in self.action]
        if self.convention == "A1":
            self.twist = [_invert_perm(p) for p in self.action]
        else:
            self.twist = list(self.action)

    def problems(self) -> list[str]:
        K, E = self.K, self.E
        out = []
        n = E.order
        for g, p in enumerate(self.action):
            if sorted(p) != list(range(n)):
                out.append(f"action of {K.arrows[g]} is not a bijection")
                continue
            if any(p[E.add[a][b]] != E.add[p[a]][p[b]] for a in range(n) for b in range(n)):
                out.append(f"action of {K.arrows[g]} is not additive")
        for x in range(K.n0):
            if self.action[K.unit[x]] != tuple(range(n)):
                out.append(f"identity at {K.objects[x]} acts nontrivially")
        for g in range(K.n1):
            for h in K.out[K.tgt[g]]:
                gh = K.mul[g][h]
                first, second = (g, h) if self.convention == "A1" else (h, g)
                comp = tuple(self.action[second][self.action[first][a]] for a in range(n))
                if comp != self.action[gh]:
                    out.append(f"composition law fails at ({K.arrows[g]},{K.arrows[h]})")
        return out


def trivial_module(K: FiniteGroupoid, E: FiniteAbelianGroup, convention: str = "A1") -> KModule:
    ident = tuple(range(E.order))
    return KModule(K, E, [ident] * K.n1, convention)


# --------------------------------------------------------------------------
# cochains

@dataclass(frozen=True)
class Cochain:
    degree: int
    values: tuple
    normalized: bool = False


def zero_cochain(m: KModule, n: int, normalized: bool = False) -> Cochain:
    return Cochain(n, (m.E.zero,) * len(composable_tuples(m.K, n, normalized)), normalized)


def cochain_from_function(m: KModule, n: int, fn, normalized: bool = False) -> Cochain:
    return Cochain(n, tuple(fn(t) for t in composable_tuples(m.K, n, normalized)), normalized)


def add_cochains(m: KModule, a: Cochain, b: Cochain) -> Cochain:
    if a.degree != b.degree or a.normalized != b.normalized:
        raise DegreeMismatch("cochains of different degree or flavour")
    return Cochain(a.degree, tuple(m.E.add[x][y] for x, y in zip(a.values, b.values)), a.normalized)


def neg_cochain(m: KModule, a: Cochain) -> Cochain:
    return Cochain(a.degree, tuple(m.E.neg[x] for x in a.values), a.normalized)


def scale_cochain(m: KModule, k: int, a: Cochain) -> Cochain:
    return Cochain(a.degree, tuple(m.E.scalar(k, x) for x in a.values), a.normalized)


def evaluate(m: KModule, c: Cochain, t: tuple) -> int:
    idx = tuple_index(m.K, c.degree, c.normalized)
    i = idx.get(t)
    if i is None:
        if c.normalized and c.degree > 0:
            return m.E.zero
        raise KeyError(t)
    return c.values[i]


def coboundary(m: KModule, c: Cochain) -> Cochain:
    """dc(g₁…g_{n+1}) = act(g₁)⁻¹ c(g₂…) + Σ(−1)ⁱ c(…gᵢg_{i+1}…) + (−1)^{n+1} c(g₁…g_n)."""
    K, E = m.K, m.E
    n = c.degree
    tuples = composable_tuples(K, n, c.normalized)
    if len(c.values) != len(tuples):
        raise DegreeMismatch(f"cochain has {len(c.values)} values but K^[{n}] has {len(tuples)}")
    add, neg = E.add, E.neg
    vals = []
    for t in composable_tuples(K, n + 1, c.normalized):
        g1 = t[0]
        if n == 0:
            v = add[m.twist[g1][evaluate(m, c, (K.tgt[g1],))]][neg[evaluate(m, c, (K.src[g1],))]]
        else:
            v = m.twist[g1][evaluate(m, c, t[1:])]
            for i in range(1, n + 1):
                merged = t[:i - 1] + (K.mul[t[i - 1]][t[i]],) + t[i + 1:]
                x = evaluate(m, c, merged)
                v = add[v][x if i % 2 == 0 else neg[x]]
            x = evaluate(m, c, t[:-1])
            v = add[v][x if (n + 1) % 2 == 0 else neg[x]]
        vals.append(v)
    return Cochain(n + 1, tuple(vals), c.normalized)


def is_cocycle(m: KModule, c: Cochain) -> bool:
    return all(v == m.E.zero for v in coboundary(m, c).values)


# --------------------------------------------------------------------------
# cohomology groups

class CohomologyGroup:
    """H^n with a cyclic decomposition, representative cocycles and a class test."""

    def __init__(self, module: KModule, degree: int, normalized: bool, backend: str,
                 invariant_factors: tuple, generators: list[Cochain], solver):
        self.module = module
        self.degree = degree
        self.normalized = normalized
        self.backend = backend
        self.invariant_factors = tuple(invariant_factors)
        self.generators = generators
        self._solver = solver

    def __repr__(self):
        return f"H^{self.degree}[{self.backend}] ≅ {describe_group(self.invariant_factors)}"

    @property
    def order(self) -> int:
        out = 1
        for d in self.invariant_factors:
            out *= d
        return out

    def _check(self, z: Cochain):
        if z.degree != self.degree or z.normalized != self.normalized:
            raise DegreeMismatch(f"expected a degree-{self.degree} cochain "
                                 f"({'normalized' if self.normalized else 'unnormalized'})")
        if not is_cocycle(self.module, z):
            raise NotACocycle("dz ≠ 0")

    def coordinates(self, z: Cochain) -> tuple:
        self._check(z)
        return self._solver.coordinates(z)

    def witness(self, z: Cochain) -> Optional[Cochain]:
        """A cochain c with dc = z, or None if the class of z is nonzero."""
        self._check(z)
        if any(self._solver.coordinates(z)):
            return None
        if self.degree == 0:
            return None
        c = self._solver.witness(z)
        assert coboundary(self.module, c) == z, "coboundary solve produced a wrong witness"
        return c

    def representative(self, coords: Sequence[int]) -> Cochain:
        m = self.module
        acc = zero_cochain(m, self.degree, self.normalized)
        for k, g in zip(coords, self.generators):
            acc = add_cochains(m, acc, scale_cochain(m, k, g))
        return acc

    def elements(self) -> Iterator[tuple]:
        return itertools.product(*[range(d) for d in self.invariant_factors])


def describe_group(factors: Sequence[int]) -> str:
    return " × ".join(f"Z/{d}" for d in factors) if factors else "0"


def class_of(m: KModule, H: CohomologyGroup, z: Cochain):
    """Coordinates of [z], plus a witness c with dc = z when the class is zero."""
    coords = H.coordinates(z)
    return coords, (H.witness(z) if not any(coords) else None)


class _ExhaustiveSolver:
    def __init__(self, m: KModule, n: int, normalized: bool, cap: int):
        E = m.E
        tn = composable_tuples(m.K, n, normalized)
        tp = composable_tuples(m.K, n - 1, normalized) if n > 0 else None
        size_n = E.order ** len(tn)
        size_p = E.order ** len(tp) if tp is not None else 1
        if size_n > cap or size_p > cap:
            raise CapExceeded(f"exhaustive enumeration needs {max(size_n, size_p)} cochains (cap {cap})")
        self.m, self.n = m, n
        cocycles = []
        for vals in itertools.product(range(E.order), repeat=len(tn)):
            c = Cochain(n, vals, normalized)
            if is_cocycle(m, c):
                cocycles.append(vals)
        self.preimage = {}
        if n > 0:
            for vals in itertools.product(range(E.order), repeat=len(tp)):
                b = coboundary(m, Cochain(n - 1, vals, normalized)).values
                self.preimage.setdefault(b, vals)
        else:
            self.preimage[(E.zero,) * len(tn)] = ()
        bounds = list(self.preimage)
        self.coset = {}
        reps = []
        for z in cocycles:
            if z in self.coset:
                continue
            cid = len(reps)
            reps.append(z)
            for b in bounds:
                self.coset[tuple(E.add[x][y] for x, y in zip(z, b))] = cid
        add = [[self.coset[tuple(E.add[x][y] for x, y in zip(a, b))] for b in reps] for a in reps]
        self.quotient = FiniteAbelianGroup([str(i) for i in range(len(reps))], add, 0)
        self.reps = reps
        self.normalized = normalized

    def coordinates(self, z: Cochain) -> tuple:
        return self.quotient.coords(self.coset[z.values])

    def witness(self, z: Cochain) -> Cochain:
        return Cochain(self.n - 1, self.preimage[z.values], self.normalized)

    def generators(self) -> list[Cochain]:
        return [Cochain(self.n, self.reps[g], self.normalized) for g in self.quotient.generators]


def _action_matrix(E: FiniteAbelianGroup, perm) -> np.ndarray:
    k = len(E.invariant_factors)
    M = np.zeros((k, k), dtype=np.int64)
    for j, g in enumerate(E.generators):
        M[:, j] = E.coords(perm[g])
    return M


def coboundary_matrix(m: KModule, n: int, normalized: bool = False) -> np.ndarray:
    """Integer matrix of d: C^n → C^{n+1} on cyclic-decomposition coordinates."""
    K, E = m.K, m.E
    k = len(E.invariant_factors)
    rows = composable_tuples(K, n + 1, normalized)
    cols = tuple_index(K, n, normalized)
    D = np.zeros((len(rows) * k, len(cols) * k), dtype=np.int64)
    if k == 0:
        return D
    eye = np.eye(k, dtype=np.int64)
    twist = {}

    def put(r, t, block):
        j = cols.get(t)
        if j is not None:
            D[r * k:(r + 1) * k, j * k:(j + 1) * k] += block

    for r, t in enumerate(rows):
        g1 = t[0]
        if g1 not in twist:
            twist[g1] = _action_matrix(E, m.twist[g1])
        if n == 0:
            put(r, (K.tgt[g1],), twist[g1])
            put(r, (K.src[g1],), -eye)
            continue
        put(r, t[1:], twist[g1])
        for i in range(1, n + 1):
            merged = t[:i - 1] + (K.mul[t[i - 1]][t[i]],) + t[i + 1:]
            put(r, merged, eye if i % 2 == 0 else -eye)
        put(r, t[:-1], eye if (n + 1) % 2 == 0 else -eye)
    return D


class _SNFSolver:
    """Kernel/image computation over ℤ/N, N the exponent of E.

    Cocycle lattice K̄ = ker(d) in (ℤ/N)^m, boundary lattice R̄ = im d + moduli,
    and H = K̄/R̄ read off from two diagonalizations.
    """

    def __init__(self, m: KModule, n: int, normalized: bool):
        E = m.E
        self.m, self.n, self.normalized = m, n, normalized
        d = list(E.invariant_factors)
        k = len(d)
        self.k = k
        N = d[-1] if d else 1
        self.N = N
        tn = composable_tuples(m.K, n, normalized)
        mn = len(tn) * k
        self.mn = mn
        if k == 0 or mn == 0:
            self.factors, self.gens, self.trivial = (), [], True
            self.mp = len(composable_tuples(m.K, n - 1, normalized)) * k if n > 0 else 0
            return
        self.trivial = False
        moduli = np.array(d * len(tn), dtype=np.int64)
        Dn = coboundary_matrix(m, n, normalized)
        row_mod = np.array(d * (Dn.shape[0] // k), dtype=np.int64)
        Dscaled = (Dn * (N // row_mod)[:, None]) % N
        if Dscaled.shape[0] == 0:
            Dscaled = np.zeros((1, mn), dtype=np.int64)
        _, diag, V = diagonalize_mod(Dscaled, N, track_v=True)
        fac = np.ones(mn, dtype=np.int64)
        for j, dj in enumerate(diag):
            fac[j] = N // gcd(dj, N)
        gens_k = (V * fac[None, :]) % N
        if n > 0:
            Dp = coboundary_matrix(m, n - 1, normalized)
        else:
            Dp = np.zeros((mn, 0), dtype=np.int64)
        self.mp = Dp.shape[1]
        R = np.concatenate([Dp % N, np.diag(moduli)], axis=1)
        UR, eps, VR = diagonalize_mod(R, N, track_u=True, track_v=True)
        q = np.full(mn, N, dtype=np.int64)
        for i, e in enumerate(eps):
            q[i] = gcd(e, N)
        self.UR, self.eps, self.VR, self.q = UR, eps, VR, q
        self.rows = np.nonzero(q > 1)[0]
        X = self._embed(gens_k)
        UX, delta, VX = diagonalize_mod(X, N, track_u=True, track_v=True)
        self.UX, self.delta = UX, delta
        orders, hgens, self.slots = [], [], []
        for j, dj in enumerate(delta):
            o = N // gcd(dj, N)
            if o > 1:
                orders.append(o)
                hgens.append((gens_k @ VX[:, j]) % N)
                self.slots.append(j)
        self.orders = orders
        self.factors, self.to_new, new = canonical_decomposition(orders)
        self.gens = []
        for vec in new:
            acc = np.zeros(mn, dtype=np.int64)
            for c, h in zip(vec, hgens):
                acc = (acc + c * h) % N
            self.gens.append(acc)

    def _embed(self, cols: np.ndarray) -> np.ndarray:
        Y = (self.UR @ cols) % self.N
        q = self.q[self.rows]
        return ((Y[self.rows] % q[:, None]) * (self.N // q)[:, None]) % self.N

    def to_vector(self, c: Cochain) -> np.ndarray:
        E = self.m.E
        return np.array([x for v in c.values for x in E.coords(v)], dtype=np.int64)

    def to_cochain(self, vec, degree: int) -> Cochain:
        E, k = self.m.E, self.k
        d = E.invariant_factors
        vals = tuple(E.element([int(vec[i * k + j]) % d[j] for j in range(k)])
                     for i in range(len(vec) // k)) if k else \
            (E.zero,) * len(composable_tuples(self.m.K, degree, self.normalized))
        return Cochain(degree, vals, self.normalized)

    def generators(self) -> list[Cochain]:
        return [self.to_cochain(g, self.n) for g in self.gens]

    def coordinates(self, z: Cochain) -> tuple:
        if self.trivial or not self.orders:
            return ()
        N = self.N
        y = self._embed(self.to_vector(z)[:, None])[:, 0]
        w = (self.UX @ y) % N
        old = []
        for o, j in zip(self.orders, self.slots):
            g = gcd(self.delta[j], N)
            assert w[j] % g == 0, "cocycle outside the computed kernel"
            old.append((int(w[j]) // g * pow(self.delta[j] // g, -1, o)) % o)
        return self.to_new(old)

    def witness(self, z: Cochain) -> Cochain:
        if self.trivial:
            return zero_cochain(self.m, self.n - 1, self.normalized)
        N = self.N
        x = self.to_vector(z)
        ux = (self.UR @ x) % N
        w = np.zeros(self.VR.shape[0], dtype=np.int64)
        for i, e in enumerate(self.eps):
            g = gcd(e, N)
            assert ux[i] % g == 0
            if e % N:
                w[i] = (int(ux[i]) // g * pow(e // g, -1, N // g)) % (N // g)
        assert not ux[len(self.eps):].any()
        y = (self.VR @ w) % N
        return self.to_cochain(y[:self.mp], self.n - 1)


def cohomology(m: KModule, n: int, backend: str = "snf", normalized: bool = False,
               cap: int = DEFAULT_COHOMOLOGY_CAP) -> CohomologyGroup:
    """H^n(K, E). ``backend`` is ``snf``, ``exhaustive`` or ``both`` (cross-checked)."""
    if n < 0:
        raise DegreeMismatch("negative degree")
    key = ("H", id(m), n, normalized, backend, cap)
    cache = m.K.cache.setdefault("cohomology", {})
    if key in cache and cache[key].module is m:
        return cache[key]
    if backend == "both":
        H = cohomology(m, n, "snf", normalized, cap)
        Hx = cohomology(m, n, "exhaustive", normalized, cap)
        problems = compare_backends(H, Hx)
        if problems:
            raise BackendDisagreement("; ".join(problems))
        cache[key] = H
        return H
    if backend == "snf":
        solver = _SNFSolver(m, n, normalized)
        H = CohomologyGroup(m, n, normalized, "snf", solver.factors, solver.generators(), solver)
    elif backend == "exhaustive":
        solver = _ExhaustiveSolver(m, n, normalized, cap)
        H = CohomologyGroup(m, n, normalized, "exhaustive", solver.quotient.invariant_factors,
                            solver.generators(), solver)
    else:
        raise ValueError(f"unknown backend {backend!r}")
    cache[key] = H
    return H


def compare_backends(H1: CohomologyGroup, H2: CohomologyGroup, samples: Optional[list] = None) -> list[str]:
    """Isomorphism type plus consistency of class coordinates on generators and sums."""
    out = []
    if H1.invariant_factors != H2.invariant_factors:
        return [f"groups differ: {describe_group(H1.invariant_factors)} vs {describe_group(H2.invariant_factors)}"]
    m = H1.module
    zs = list(samples or [])
    for coords in H1.elements():
        zs.append(H1.representative(coords))
    for coords in H2.elements():
        zs.append(H2.representative(coords))
    c1 = [H1.coordinates(z) for z in zs]
    c2 = [H2.coordinates(z) for z in zs]
    pairing = {}
    for a, b in zip(c1, c2):
        if pairing.setdefault(a, b) != b:
            out.append(f"class {a} maps to two classes")
            break
    if len(set(pairing.values())) != len(pairing):
        out.append("class correspondence is not injective")
    for i in range(len(zs)):
        for j in range(i, len(zs)):
            s = add_cochains(m, zs[i], zs[j])
            if pairing.get(H1.coordinates(s)) != H2.coordinates(s):
                out.append("class correspondence is not additive")
                return out
    return out


# --------------------------------------------------------------------------
# the induced action on Z_A

def induced_action(A: FiniteGroupoid, lam: Sequence[StrictMorphism], K: FiniteGroupoid,
                   convention: str = "A1", check: bool = True) -> KModule:
    """K acting on Z_A by Λ_ξ(σ)(a) = Λ_ξ¹(σ(Λ_ξ⁰⁻¹(a)))."""
    from .autalg import center, coarse_saut
    cen = center(A)
    if check:
        co = coarse_saut(A)
        saut = co.saut
        cls = [co.proj[saut.find(f)] for f in lam]
        for x in range(K.n0):
            if lam[K.unit[x]].key != (tuple(range(A.n0)), tuple(range(A.n1))):
                raise NotABand(f"lifting is not the identity at 1_{K.objects[x]}")
        for g in range(K.n1):
            for h in K.out[K.tgt[g]]:
                if co.mul[cls[g]][cls[h]] != cls[K.mul[g][h]]:
                    raise NotABand(f"coarse classes do not compose at ({K.arrows[g]},{K.arrows[h]})")
    action = []
    for f in lam:
        back = [0] * A.n0
        for a, b in enumerate(f.f0):
            back[b] = a
        perm = [cen.index[tuple(f.f1[s[back[a]]] for a in range(A.n0))] for s in cen.sections]
        action.append(perm)
    if convention == "flipped":
        action = [_invert_perm(p) for p in action]
    return KModule(K, cen.group, action, convention)


def all_modules(K: FiniteGroupoid, E: FiniteAbelianGroup, limit: Optional[int] = None) -> list[KModule]:
    """K-module structures on E, as functors K → B(Aut E) (A1 convention)."""
    from .catalog import permutation_group
    from .search import search_functors
    B = permutation_group(E.automorphisms())
    perms = sorted(E.automorphisms())
    return [KModule(K, E, [perms[v] for v in F.f1])
            for F in search_functors(K, B, limit=limit)]
