"""Generalized cocycles (Λ, Ω), the product extension A⋊_{Λ,Ω}K, the obstruction Ξ, and classification.

Arrow (α, ξ) of a product bundle over A and K sits at index α·|K¹| + ξ, object (a, x)
at a·|K⁰| + x (the layout of ``catalog.product_groupoid``). Automorphisms compose
left to right, so Λ_{ξη}⁻¹Λ_ηΛ_ξ means "Λ_ξ, then Λ_η, then Λ_{ξη}⁻¹".
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Iterator, NamedTuple, Optional, Sequence

from .autalg import DEFAULT_SAUT_CAP, center, coarse_saut, enumerate_saut
from .catalog import group_groupoid
from .cohomology import (Cochain, CohomologyGroup, KModule, coboundary, cohomology,
                         composable_tuples, evaluate, induced_action, is_cocycle)
from .core import (FiniteGroupoid, NaturalTransformation, OpenCover, StrictMorphism, check_axioms,
                   common_refinement, identity_morphism, refine, refinement_map)
from .search import natural_transformations, search_functors


class ExtensionError(Exception):
    def __init__(self, message: str = "", witness=None):
        super().__init__(message)
        self.witness = witness


class NoNaturalTransformation(ExtensionError):
    pass


class MalformedCocycle(ExtensionError):
    """Λ or Ω fails the structural requirements (naturality, normalization, shapes)."""


class CocycleViolation(ExtensionError):
    pass


class NotAProductBundle(ExtensionError):
    pass


class PreActionNotAutomorphism(ExtensionError):
    pass


class NotCentral(ExtensionError):
    pass


class NotInvariant(ExtensionError):
    pass


class ObstructionNonzero(ExtensionError):
    def __init__(self, coords):
        super().__init__(f"obstruction class {tuple(coords)} is nonzero", tuple(coords))
        self.coords = tuple(coords)


class Obstructed(ObstructionNonzero):
    pass


class BandMismatch(ExtensionError):
    pass


class ShapeMismatch(ExtensionError):
    pass


class DifferentBase(ExtensionError):
    pass


class Violation(NamedTuple):
    kind: str
    where: tuple
    message: str


# --------------------------------------------------------------------------
# bands and liftings

@dataclass(frozen=True)
class Band:
    """Coarse-SAut class per arrow of K (indices into ``coarse_saut(A).reps``)."""
    K: FiniteGroupoid = field(compare=False, repr=False)
    values: tuple


def check_band(A: FiniteGroupoid, band: Band) -> list[Violation]:
    """Identity and composition laws of a band; empty list when valid."""
    K, v = band.K, band.values
    co = coarse_saut(A)
    out = []
    if len(v) != K.n1:
        return [Violation("shape", (), f"band has {len(v)} values for {K.n1} arrows")]
    for g, c in enumerate(v):
        if not 0 <= c < co.order:
            out.append(Violation("range", (g,), f"class {c} out of range at {K.arrows[g]}"))
    if out:
        return out
    for x in range(K.n0):
        if v[K.unit[x]] != co.identity:
            out.append(Violation("identity", (K.unit[x],), f"band at 1_{K.objects[x]} is not the identity class"))
    for g in range(K.n1):
        for h in K.out[K.tgt[g]]:
            if co.mul[v[g]][v[h]] != v[K.mul[g][h]]:
                out.append(Violation("composition", (g, h),
                                     f"classes do not compose at ({K.arrows[g]},{K.arrows[h]})"))
    return out


def trivial_band(K: FiniteGroupoid) -> Band:
    return Band(K, (0,) * K.n1)


def enumerate_bands(A: FiniteGroupoid, K: FiniteGroupoid, limit: Optional[int] = None) -> list[Band]:
    """All bands K → B(coarse SAut(A)), in canonical order (trivial band first)."""
    co = coarse_saut(A)
    B = group_groupoid([str(i) for i in range(co.order)], co.mul)
    return [Band(K, F.f1) for F in search_functors(K, B, limit=limit)]


def liftings(A: FiniteGroupoid, band: Band) -> Iterator[tuple]:
    """Every lifting as a tuple of SAut⁰ indices; identity arrows map to the identity."""
    co = coarse_saut(A)
    K = band.K
    ids = K.identity_set()
    choices = [[0] if g in ids else co.cosets[band.values[g]] for g in range(K.n1)]
    return itertools.product(*choices)


def count_liftings(A: FiniteGroupoid, band: Band) -> int:
    co = coarse_saut(A)
    ids = band.K.identity_set()
    n = 1
    for g, c in enumerate(band.values):
        if g not in ids:
            n *= len(co.cosets[c])
    return n


def lam_from_indices(A: FiniteGroupoid, indices: Sequence[int]) -> tuple:
    saut = enumerate_saut(A)
    return tuple(saut.autos[i] for i in indices)


# --------------------------------------------------------------------------
# generalized cocycles

class _Ops:
    """Array views of Λ, Λ⁻¹ and the composites M = Λ_{ξη}⁻¹Λ_ηΛ_ξ, P = Λ_{ξη}⁻¹Λ_η."""

    def __init__(self, A: FiniteGroupoid, K: FiniteGroupoid, lam: Sequence[StrictMorphism]):
        self.A, self.K = A, K
        self.f0 = [l.f0 for l in lam]
        self.f1 = [l.f1 for l in lam]
        self.g0, self.g1 = [], []
        for l in lam:
            b0 = [0] * A.n0
            for a, b in enumerate(l.f0):
                b0[b] = a
            b1 = [0] * A.n1
            for a, b in enumerate(l.f1):
                b1[b] = a
            self.g0.append(tuple(b0))
            self.g1.append(tuple(b1))
        self._M: dict = {}
        self._P: dict = {}

    def M(self, xi: int, eta: int):
        key = (xi, eta)
        if key not in self._M:
            k = self.K.mul[xi][eta]
            f0, f1, g0, g1 = self.f0, self.f1, self.g0, self.g1
            m0 = tuple(g0[k][f0[eta][f0[xi][a]]] for a in range(self.A.n0))
            m1 = tuple(g1[k][f1[eta][f1[xi][a]]] for a in range(self.A.n1))
            self._M[key] = (m0, m1)
        return self._M[key]

    def P(self, xi: int, eta: int):
        key = (xi, eta)
        if key not in self._P:
            k = self.K.mul[xi][eta]
            p0 = tuple(self.g0[k][self.f0[eta][a]] for a in range(self.A.n0))
            p1 = tuple(self.g1[k][self.f1[eta][a]] for a in range(self.A.n1))
            self._P[key] = (p0, p1)
        return self._P[key]

    def ob(self, word: Sequence[tuple[int, int]], a: int) -> int:
        """Apply a written operator word (rightmost first); each letter is (arrow, ±1)."""
        for g, s in reversed(word):
            a = self.f0[g][a] if s > 0 else self.g0[g][a]
        return a


class GeneralizedCocycle:
    """A pair (Λ, Ω): Λ one strict automorphism per K-arrow, Ω(ξ, η) a section of A-arrows.

    ``omega`` maps composable pairs (ξ, η) to tuples indexed by A-objects; pairs with an
    identity argument may be omitted and are filled with units.
    """

    def __init__(self, A: FiniteGroupoid, K: FiniteGroupoid, lam: Sequence[StrictMorphism],
                 omega: dict, *, check: bool = True):
        self.A, self.K = A, K
        self.lam = tuple(lam)
        units = tuple(A.unit)
        full = {}
        for xi in range(K.n1):
            for eta in K.out[K.tgt[xi]]:
                v = omega.get((xi, eta))
                full[(xi, eta)] = tuple(v) if v is not None else units
        self.omega = full
        self.ops = _Ops(A, K, self.lam)
        if check:
            problems = self.structure_problems()
            if problems:
                raise MalformedCocycle(problems[0].message, problems[0])

    @classmethod
    def from_entries(cls, A, K, lam, entries: dict, **kw) -> "GeneralizedCocycle":
        """Build from a flat map (ξ, η, a) → arrow."""
        omega: dict = {}
        for (xi, eta, a), v in entries.items():
            omega.setdefault((xi, eta), list(A.unit))[a] = v
        return cls(A, K, lam, omega, **kw)

    def __eq__(self, other):
        return (isinstance(other, GeneralizedCocycle) and self.A is other.A and self.K is other.K
                and self.key == other.key)

    def __hash__(self):
        return hash(self.key)

    @property
    def key(self) -> tuple:
        return (tuple(l.key for l in self.lam), tuple(sorted(self.omega.items())))

    def __repr__(self):
        return f"GeneralizedCocycle(|K¹|={self.K.n1}, |A¹|={self.A.n1})"

    def Omega(self, xi: int, eta: int, a: int) -> int:
        return self.omega[(xi, eta)][a]

    def lam_indices(self) -> tuple:
        saut = enumerate_saut(self.A)
        return tuple(saut.find(l) for l in self.lam)

    def band(self) -> Band:
        co = coarse_saut(self.A)
        return Band(self.K, tuple(co.proj[i] for i in self.lam_indices()))

    def omega_entries(self, skip_identities: bool = True) -> dict:
        ids = self.K.identity_set()
        return {(x, y, a): v for (x, y), sec in self.omega.items()
                if not (skip_identities and (x in ids or y in ids))
                for a, v in enumerate(sec)}

    def omega_transformation(self, xi: int, eta: int) -> NaturalTransformation:
        m0, m1 = self.ops.M(xi, eta)
        M = StrictMorphism(self.A, self.A, m0, m1)
        return NaturalTransformation(identity_morphism(self.A), M, self.omega[(xi, eta)])

    def structure_problems(self) -> list[Violation]:
        A, K = self.A, self.K
        out = []
        if len(self.lam) != K.n1:
            return [Violation("shape", (), f"Λ has {len(self.lam)} entries for {K.n1} arrows")]
        ident = (tuple(range(A.n0)), tuple(range(A.n1)))
        for g, l in enumerate(self.lam):
            if l.dom is not A or l.cod is not A or not l.is_functor() or not l.is_bijective():
                out.append(Violation("lambda", (g,), f"Λ at {K.arrows[g]} is not a strict automorphism"))
        for x in range(K.n0):
            if self.lam[K.unit[x]].key != ident:
                out.append(Violation("lambda", (K.unit[x],), f"Λ at 1_{K.objects[x]} is not the identity"))
        if out:
            return out
        ids = K.identity_set()
        for (xi, eta), sec in self.omega.items():
            m0, m1 = self.ops.M(xi, eta)
            if len(sec) != A.n0:
                out.append(Violation("shape", (xi, eta), "Ω section has the wrong length"))
                continue
            if (xi in ids or eta in ids) and sec != tuple(A.unit):
                out.append(Violation("normalization", (xi, eta),
                                     f"Ω({K.arrows[xi]},{K.arrows[eta]}) is not the unit section"))
            for a, w in enumerate(sec):
                if not 0 <= w < A.n1 or A.src[w] != a or A.tgt[w] != m0[a]:
                    out.append(Violation("endpoints", (xi, eta, a),
                                         f"Ω({K.arrows[xi]},{K.arrows[eta]},{A.objects[a]}) has wrong endpoints"))
                    break
            else:
                for al in range(A.n1):
                    if A.mul[sec[A.src[al]]][m1[al]] != A.mul[al][sec[A.tgt[al]]]:
                        out.append(Violation("naturality", (xi, eta, al),
                                             f"Ω({K.arrows[xi]},{K.arrows[eta]}) is not natural at {A.arrows[al]}"))
                        break
        return out


def cocycle_condition_holds(gc: GeneralizedCocycle, xi: int, eta: int, zeta: int, a: int) -> bool:
    """Ω(ξ,η,a)·Ω(ξη,ζ,a₄) = Λ_ξ⁻¹(Ω(η,ζ,a₁))·Ω(ξ,ηζ,a₅)."""
    A, K, o = gc.A, gc.K, gc.ops
    om = gc.omega
    xe, ez = K.mul[xi][eta], K.mul[eta][zeta]
    a1 = o.f0[xi][a]
    a4 = o.M(xi, eta)[0][a]
    a5 = o.ob([(xi, -1), (ez, -1), (zeta, 1), (eta, 1), (xi, 1)], a)
    lhs = A.mul[om[(xi, eta)][a]][om[(xe, zeta)][a4]]
    rhs = A.mul[o.g1[xi][om[(eta, zeta)][a1]]][om[(xi, ez)][a5]]
    return lhs == rhs


def check_generalized_cocycle(gc: GeneralizedCocycle, limit: Optional[int] = None) -> list[Violation]:
    """Every failure of the cocycle condition (canonical order), then of its inverse-pair case."""
    A, K, o = gc.A, gc.K, gc.ops
    out = gc.structure_problems()
    if out:
        return out
    for (xi, eta, zeta) in composable_tuples(K, 3):
        for a in range(A.n0):
            if not cocycle_condition_holds(gc, xi, eta, zeta, a):
                out.append(Violation("cocycle", (xi, eta, zeta, a),
                                     f"cocycle condition fails at ({K.arrows[xi]},{K.arrows[eta]},"
                                     f"{K.arrows[zeta]}; {A.objects[a]})"))
                if limit and len(out) >= limit:
                    return out
    for xi in range(K.n1):
        xinv = K.inv[xi]
        for a in range(A.n0):
            if gc.omega[(xi, xinv)][a] != o.g1[xi][gc.omega[(xinv, xi)][o.f0[xi][a]]]:
                out.append(Violation("inverse-pair", (xi, a),
                                     f"Ω({K.arrows[xi]},{K.arrows[xinv]}) mismatch at {A.objects[a]}"))
                if limit and len(out) >= limit:
                    return out
    return out


def is_generalized_cocycle(gc: GeneralizedCocycle) -> bool:
    return not check_generalized_cocycle(gc, limit=1)


def lift_band(A: FiniteGroupoid, band: Band) -> GeneralizedCocycle:
    """Canonical lifting: least automorphism per class and least 2-cell id ⇒ Λ_{ξη}⁻¹Λ_ηΛ_ξ."""
    if check_band(A, band):
        raise BandMismatch("not a band", check_band(A, band)[0])
    co = coarse_saut(A)
    K = band.K
    ids = K.identity_set()
    lam = lam_from_indices(A, [0 if g in ids else co.reps[c] for g, c in enumerate(band.values)])
    return _least_cofactor(A, K, lam)


def _cofactor_choices(A, K, lam, ops: _Ops, xi, eta) -> list[tuple]:
    m0, m1 = ops.M(xi, eta)
    M = StrictMorphism(A, A, m0, m1)
    return [r.sigma for r in natural_transformations(identity_morphism(A), M)]


def _least_cofactor(A, K, lam) -> GeneralizedCocycle:
    ops = _Ops(A, K, lam)
    ids = K.identity_set()
    omega = {}
    for xi in range(K.n1):
        for eta in K.out[K.tgt[xi]]:
            if xi in ids or eta in ids:
                continue
            ch = _cofactor_choices(A, K, lam, ops, xi, eta)
            if not ch:
                raise NoNaturalTransformation(f"no 2-cell id ⇒ Λ⁻¹ΛΛ at ({K.arrows[xi]},{K.arrows[eta]})")
            omega[(xi, eta)] = ch[0]
    return GeneralizedCocycle(A, K, lam, omega)


def random_cofactor(A: FiniteGroupoid, K: FiniteGroupoid, lam, rng: random.Random) -> GeneralizedCocycle:
    """Λ with a uniformly random natural-transformation family Ω (no cocycle condition)."""
    ops = _Ops(A, K, lam)
    ids = K.identity_set()
    omega = {}
    for xi in range(K.n1):
        for eta in K.out[K.tgt[xi]]:
            if xi in ids or eta in ids:
                continue
            ch = _cofactor_choices(A, K, lam, ops, xi, eta)
            if not ch:
                raise NoNaturalTransformation("Λ does not lift a band")
            omega[(xi, eta)] = rng.choice(ch)
    return GeneralizedCocycle(A, K, lam, omega)


def search_cocycles(A: FiniteGroupoid, K: FiniteGroupoid, lam, limit: Optional[int] = None
                    ) -> Iterator[GeneralizedCocycle]:
    """Every Ω making (Λ, Ω) a generalized cocycle, by backtracking with forward checks."""
    ops = _Ops(A, K, lam)
    ids = K.identity_set()
    pairs = [(x, y) for x in range(K.n1) if x not in ids for y in K.out[K.tgt[x]] if y not in ids]
    var = {p: i for i, p in enumerate(pairs)}
    domains = [_cofactor_choices(A, K, lam, ops, x, y) for x, y in pairs]
    if any(not d for d in domains):
        return
    units = tuple(A.unit)
    omega = {(x, y): units for x in range(K.n1) for y in K.out[K.tgt[x]]}
    probe = GeneralizedCocycle(A, K, lam, {}, check=False)
    probe.omega = omega
    probe.ops = ops
    triggers: list[list[tuple]] = [[] for _ in pairs]
    for xi, eta, zeta in composable_tuples(K, 3, normalized=True):
        deps = [var.get(p) for p in ((xi, eta), (K.mul[xi][eta], zeta), (eta, zeta), (xi, K.mul[eta][zeta]))]
        deps = [d for d in deps if d is not None]
        triggers[max(deps)].append((xi, eta, zeta))
    count = 0

    def rec(i):
        nonlocal count
        if i == len(pairs):
            yield GeneralizedCocycle(A, K, lam, dict(omega), check=False)
            count += 1
            return
        for val in domains[i]:
            omega[pairs[i]] = val
            if all(cocycle_condition_holds(probe, x, y, z, a)
                   for x, y, z in triggers[i] for a in range(A.n0)):
                yield from rec(i + 1)
                if limit is not None and count >= limit:
                    return
        omega[pairs[i]] = units

    yield from rec(0)


def all_cocycles(A: FiniteGroupoid, band: Band, limit: Optional[int] = None) -> Iterator[GeneralizedCocycle]:
    """Generalized cocycles over every lifting of ``band``."""
    n = 0
    for idx in liftings(A, band):
        for gc in search_cocycles(A, band.K, lam_from_indices(A, idx)):
            yield gc
            n += 1
            if limit is not None and n >= limit:
                return


# --------------------------------------------------------------------------
# product bundles

@dataclass
class ExtensionGroupoid:
    """A product bundle G over K with fiber A, in the (α, ξ) layout."""
    G: FiniteGroupoid
    A: FiniteGroupoid
    K: FiniteGroupoid
    cocycle: Optional[GeneralizedCocycle] = None

    def pair(self, g: int) -> tuple[int, int]:
        return divmod(g, self.K.n1)

    def arrow(self, alpha: int, xi: int) -> int:
        return alpha * self.K.n1 + xi

    def obj(self, a: int, x: int) -> int:
        return a * self.K.n0 + x

    @property
    def phi(self) -> StrictMorphism:
        n0, n1 = self.K.n0, self.K.n1
        return StrictMorphism(self.G, self.K, [o % n0 for o in range(self.G.n0)],
                              [g % n1 for g in range(self.G.n1)])

    def kernel_arrows(self) -> list[int]:
        ids = self.K.identity_set()
        return [g for g in range(self.G.n1) if g % self.K.n1 in ids]

    def fiber_embedding(self, x: int) -> StrictMorphism:
        """α ↦ (α, 1_x), the inclusion of A as the kernel fiber over x."""
        u = self.K.unit[x]
        return StrictMorphism(self.A, self.G, [self.obj(a, x) for a in range(self.A.n0)],
                              [self.arrow(al, u) for al in range(self.A.n1)])


def _bundle_names(A: FiniteGroupoid, K: FiniteGroupoid):
    objects = [f"{a}|{x}" for a in A.objects for x in K.objects]
    arrows = [f"{al}|{xi}" for al in A.arrows for xi in K.arrows]
    return objects, arrows


def build_extension(gc: GeneralizedCocycle, *, check: bool = True) -> ExtensionGroupoid:
    """A⋊_{Λ,Ω}K with (α,ξ)·(β,η) = (Ω(ξ,η,sα)·Λ_{ξη}⁻¹Λ_ηΛ_ξ(α)·Λ_{ξη}⁻¹Λ_η(β), ξη)."""
    A, K, o = gc.A, gc.K, gc.ops
    if check:
        bad = check_generalized_cocycle(gc, limit=1)
        if bad:
            raise CocycleViolation(bad[0].message, bad[0])
    n0, n1 = K.n0, K.n1
    N = A.n1 * n1
    src = [A.src[al] * n0 + K.src[xi] for al in range(A.n1) for xi in range(n1)]
    tgt = [o.f0[xi][A.tgt[al]] * n0 + K.tgt[xi] for al in range(A.n1) for xi in range(n1)]
    mul = [[-1] * N for _ in range(N)]
    for xi in range(n1):
        f0 = o.f0[xi]
        for eta in K.out[K.tgt[xi]]:
            xe = K.mul[xi][eta]
            m1 = o.M(xi, eta)[1]
            p1 = o.P(xi, eta)[1]
            om = gc.omega[(xi, eta)]
            for al in range(A.n1):
                left = A.mul[om[A.src[al]]][m1[al]]
                row = mul[al * n1 + xi]
                for be in A.out[f0[A.tgt[al]]]:
                    row[be * n1 + eta] = A.mul[left][p1[be]] * n1 + xe
    inv = []
    for al in range(A.n1):
        for xi in range(n1):
            xinv = K.inv[xi]
            w = gc.omega[(xi, xinv)][A.src[al]]
            inv.append(A.mul[o.f1[xi][A.inv[al]]][o.g1[xinv][A.inv[w]]] * n1 + xinv)
    unit = [A.unit[a] * n1 + K.unit[x] for a in range(A.n0) for x in range(n0)]
    objects, arrows = _bundle_names(A, K)
    G = FiniteGroupoid(objects, arrows, src, tgt, mul, unit, inv, check=check)
    return ExtensionGroupoid(G, A, K, gc)


def check_product_bundle(G: FiniteGroupoid, A: FiniteGroupoid, K: FiniteGroupoid) -> list[str]:
    """Product-bundle axioms in the (α, ξ) layout, kernel fibers equal to A, and groupoid axioms."""
    n0, n1 = K.n0, K.n1
    if G.n0 != A.n0 * n0 or G.n1 != A.n1 * n1:
        return [f"expected {A.n0 * n0} objects and {A.n1 * n1} arrows, got {G.n0} and {G.n1}"]
    out = [str(v) for v in check_axioms(G, limit=3)]
    if out:
        return out
    for al in range(A.n1):
        for xi in range(n1):
            g = al * n1 + xi
            if G.src[g] != A.src[al] * n0 + K.src[xi]:
                out.append(f"source of ({A.arrows[al]},{K.arrows[xi]}) is not (s α, s ξ)")
            if G.tgt[g] % n0 != K.tgt[xi]:
                out.append(f"target of ({A.arrows[al]},{K.arrows[xi]}) does not lie over t ξ")
    for a in range(A.n0):
        for x in range(n0):
            if G.unit[a * n0 + x] != A.unit[a] * n1 + K.unit[x]:
                out.append(f"unit at ({A.objects[a]},{K.objects[x]}) is not (1_a, 1_x)")
    for x in range(n0):
        u = K.unit[x]
        for al in range(A.n1):
            g = al * n1 + u
            if G.tgt[g] != A.tgt[al] * n0 + x:
                out.append(f"target of ({A.arrows[al]},1_{K.objects[x]}) is not (t α, x)")
            for be in A.out[A.tgt[al]]:
                if G.mul[g][be * n1 + u] != A.mul[al][be] * n1 + u:
                    out.append(f"kernel product ({A.arrows[al]},{A.arrows[be]}) over {K.objects[x]} differs from A")
    if out:
        return out[:10]
    for g in range(G.n1):
        for h in G.out[G.tgt[g]]:
            if G.mul[g][h] % n1 != K.mul[g % n1][h % n1]:
                out.append(f"projection is not multiplicative at ({G.arrows[g]},{G.arrows[h]})")
                return out
    return out


def as_product_bundle(G: FiniteGroupoid, A: FiniteGroupoid, K: FiniteGroupoid) -> FiniteGroupoid:
    """Reindex a groupoid whose ids are ``a|x`` and ``α|ξ`` into the canonical (α, ξ) layout."""
    objects, arrows = _bundle_names(A, K)
    try:
        po = [G.obj_index[n] for n in objects]
        pa = [G.arrow_index[n] for n in arrows]
    except KeyError as e:
        raise NotAProductBundle(f"missing product-labelled id {e.args[0]!r}") from None
    if len(po) != G.n0 or len(pa) != G.n1:
        raise NotAProductBundle("extra objects or arrows beyond A⁰×K⁰ / A¹×K¹")
    back_o = {old: new for new, old in enumerate(po)}
    back_a = {old: new for new, old in enumerate(pa)}
    mul = [[-1 if G.mul[pa[i]][pa[j]] < 0 else back_a[G.mul[pa[i]][pa[j]]] for j in range(G.n1)]
           for i in range(G.n1)]
    return FiniteGroupoid(objects, arrows, [back_o[G.src[g]] for g in pa], [back_o[G.tgt[g]] for g in pa],
                          mul, [back_a[G.unit[x]] for x in po], [back_a[G.inv[g]] for g in pa], check=False)


def extract_cocycle(G: FiniteGroupoid, A: FiniteGroupoid, K: FiniteGroupoid) -> GeneralizedCocycle:
    """Pre-action map and cofactor of a product bundle."""
    problems = check_product_bundle(G, A, K)
    if problems:
        raise NotAProductBundle(problems[0], problems)
    n0, n1 = K.n0, K.n1
    lam = []
    for xi in range(n1):
        x = K.src[xi]
        f0 = [G.tgt[A.unit[a] * n1 + xi] // n0 for a in range(A.n0)]
        f1 = []
        for al in range(A.n1):
            g = G.product(G.inv[A.unit[A.src[al]] * n1 + xi], al * n1 + K.unit[x], A.unit[A.tgt[al]] * n1 + xi)
            f1.append(g // n1)
        L = StrictMorphism(A, A, f0, f1)
        if not L.is_functor() or not L.is_bijective():
            raise PreActionNotAutomorphism(f"Λ at {K.arrows[xi]} is not a strict automorphism", xi)
        lam.append(L)
    ops = _Ops(A, K, lam)
    omega = {}
    for xi in range(n1):
        for eta in K.out[K.tgt[xi]]:
            xe = K.mul[xi][eta]
            m0 = ops.M(xi, eta)[0]
            sec = []
            for a in range(A.n0):
                g = G.product(A.unit[a] * n1 + xi, A.unit[ops.f0[xi][a]] * n1 + eta,
                              G.inv[A.unit[m0[a]] * n1 + xe])
                sec.append(g // n1)
            omega[(xi, eta)] = tuple(sec)
    return GeneralizedCocycle(A, K, lam, omega)


@dataclass
class RoundTrip:
    cocycle: GeneralizedCocycle
    rebuilt: ExtensionGroupoid
    iso: StrictMorphism


def extension_round_trip(G: FiniteGroupoid, A: FiniteGroupoid, K: FiniteGroupoid) -> RoundTrip:
    """The explicit isomorphism G ≅ A⋊_{Λ,Ω}K, verified arrow by arrow."""
    gc = extract_cocycle(G, A, K)
    H = build_extension(gc)
    n0, n1 = K.n0, K.n1
    f1 = []
    for g in range(G.n1):
        xi = g % n1
        b = G.tgt[g] // n0
        a = gc.ops.g0[xi][b]
        k = G.mul[g][G.inv[A.unit[a] * n1 + xi]]
        f1.append((k // n1) * n1 + xi)
    iso = StrictMorphism(G, H.G, list(range(G.n0)), f1)
    if not iso.is_functor() or not iso.is_bijective():
        raise ExtensionError("round-trip map is not an isomorphism", iso.problems()[:3])
    for g in range(G.n1):
        al, xi = divmod(g, n1)
        if K.is_identity(xi) and f1[g] != g:
            raise ExtensionError("round-trip map moves a kernel arrow", g)
        back = G.mul[al * n1 + K.unit[K.src[xi]]][A.unit[A.tgt[al]] * n1 + xi]
        if iso.f1[back] != g:
            raise ExtensionError("inverse arrow map disagrees", g)
    return RoundTrip(gc, H, iso)


# --------------------------------------------------------------------------
# the obstruction

def _inv(A, g):
    return A.inv[g]


@dataclass
class ObstructionCocycle:
    cocycle: GeneralizedCocycle
    module: KModule
    values: dict  # (ξ, η, ζ) → section a ↦ Ξ(ξ,η,ζ)(a)
    variants: dict  # name → same shape as values

    def is_identity(self) -> bool:
        units = tuple(self.cocycle.A.unit)
        return all(v == units for v in self.values.values())

    def cochain(self, normalized: bool = True) -> Cochain:
        cen = center(self.cocycle.A)
        tuples = composable_tuples(self.cocycle.K, 3, normalized)
        return Cochain(3, tuple(cen.index[self.values[t]] for t in tuples), normalized)

    def variant_mismatches(self) -> list[tuple]:
        return [(name, t) for name, vals in self.variants.items()
                for t, sec in vals.items() if sec != self.values[t]]


def obstruction(gc: GeneralizedCocycle, check: bool = True) -> ObstructionCocycle:
    """Ξ(ξ,η,ζ)(a) = Ω(ξ,η,a)·Ω(ξη,ζ,a₄)·Ω(ξ,ηζ,a₅)⁻¹·Λ_ξ⁻¹(Ω(η,ζ,a₁)⁻¹) and its cyclic variants."""
    A, K, o, om = gc.A, gc.K, gc.ops, gc.omega
    if check:
        bad = gc.structure_problems()
        if bad:
            raise MalformedCocycle(bad[0].message, bad[0])
    cen = center(A)
    mul, inv = A.mul, A.inv
    values, v1, v2, v3 = {}, {}, {}, {}
    for t in composable_tuples(K, 3):
        xi, eta, zeta = t
        xe, ez = K.mul[xi][eta], K.mul[eta][zeta]
        xez = K.mul[xe][zeta]
        X, X1, X2, X3 = [], [], [], []
        for a in range(A.n0):
            a1 = o.f0[xi][a]
            a4 = o.M(xi, eta)[0][a]
            a5 = o.ob([(xi, -1), (ez, -1), (zeta, 1), (eta, 1), (xi, 1)], a)
            X.append(A.product(om[(xi, eta)][a], om[(xe, zeta)][a4], inv[om[(xi, ez)][a5]],
                               o.g1[xi][inv[om[(eta, zeta)][a1]]]))
            X1.append(A.product(
                om[(xe, zeta)][a],
                inv[om[(xi, ez)][o.ob([(xi, -1), (ez, -1), (zeta, 1), (xe, 1)], a)]],
                o.g1[xi][inv[om[(eta, zeta)][o.ob([(eta, -1), (xe, 1)], a)]]],
                om[(xi, eta)][o.ob([(xi, -1), (eta, -1), (xe, 1)], a)]))
            X2.append(A.product(
                inv[om[(xi, ez)][o.ob([(xi, -1), (ez, -1), (xez, 1)], a)]],
                o.g1[xi][inv[om[(eta, zeta)][o.ob([(eta, -1), (zeta, -1), (xez, 1)], a)]]],
                om[(xi, eta)][o.ob([(xi, -1), (eta, -1), (zeta, -1), (xez, 1)], a)],
                om[(xe, zeta)][o.ob([(xe, -1), (zeta, -1), (xez, 1)], a)]))
            X3.append(A.product(
                o.g1[xi][inv[om[(eta, zeta)][o.ob([(eta, -1), (zeta, -1), (ez, 1), (xi, 1)], a)]]],
                om[(xi, eta)][o.ob([(xi, -1), (eta, -1), (zeta, -1), (ez, 1), (xi, 1)], a)],
                om[(xe, zeta)][o.ob([(xe, -1), (zeta, -1), (ez, 1), (xi, 1)], a)],
                inv[om[(xi, ez)][a]]))
        values[t], v1[t], v2[t], v3[t] = tuple(X), tuple(X1), tuple(X2), tuple(X3)
        sec = values[t]
        for a, z in enumerate(sec):
            if A.src[z] != a or A.tgt[z] != a or any(mul[z][h] != mul[h][z] for h in A.loops(a)):
                raise NotCentral(f"Ξ({K.arrows[xi]},{K.arrows[eta]},{K.arrows[zeta]}) not central at "
                                 f"{A.objects[a]}", (t, a))
        if sec not in cen.index:
            raise NotInvariant(f"Ξ({K.arrows[xi]},{K.arrows[eta]},{K.arrows[zeta]}) is not A-invariant", t)
    module = induced_action(A, gc.lam, K, check=False)
    return ObstructionCocycle(gc, module, values, {"Xi1": v1, "Xi2": v2, "Xi3": v3})


def obstruction_class(obs: ObstructionCocycle, backend: str = "snf") -> tuple[tuple, CohomologyGroup]:
    H3 = cohomology(obs.module, 3, backend, normalized=True)
    return H3.coordinates(obs.cochain(normalized=True)), H3


def apply_central(gc: GeneralizedCocycle, c: Cochain) -> GeneralizedCocycle:
    """Ω'(ξ,η,a) = c(ξ,η)(a)·Ω(ξ,η,a) for a Z_A-valued 2-cochain c."""
    A, K = gc.A, gc.K
    cen = center(A)
    m = induced_action(A, gc.lam, K, check=False)
    omega = {}
    for (xi, eta), sec in gc.omega.items():
        z = cen.sections[evaluate(m, c, (xi, eta))]
        omega[(xi, eta)] = tuple(A.mul[z[a]][w] for a, w in enumerate(sec))
    return GeneralizedCocycle(A, K, gc.lam, omega)


def trivialize_obstruction(gc: GeneralizedCocycle, obs: Optional[ObstructionCocycle] = None,
                           backend: str = "snf") -> tuple[Cochain, GeneralizedCocycle]:
    """A normalized 2-cochain c with dc = Ξ, and the generalized cocycle (Λ, c·Ω)."""
    obs = obs or obstruction(gc)
    coords, H3 = obstruction_class(obs, backend)
    if any(coords):
        raise ObstructionNonzero(coords)
    z = obs.cochain(normalized=True)
    if all(v == obs.module.E.zero for v in z.values):
        c = Cochain(2, (obs.module.E.zero,) * len(composable_tuples(gc.K, 2, True)), True)
        return c, gc
    c = H3.witness(z)
    fixed = apply_central(gc, c)
    bad = check_generalized_cocycle(fixed, limit=1)
    if bad:
        raise ExtensionError("c·Ω is not a generalized cocycle", bad[0])
    return c, fixed


# --------------------------------------------------------------------------
# equivalence

def _same_band(gc1: GeneralizedCocycle, gc2: GeneralizedCocycle):
    if gc1.A is not gc2.A or gc1.K is not gc2.K:
        if (gc1.A.n1, gc1.K.n1, gc1.A.n0, gc1.K.n0) != (gc2.A.n1, gc2.K.n1, gc2.A.n0, gc2.K.n0):
            raise ShapeMismatch("cocycles live over different groupoids")
        raise BandMismatch("cocycles must share the same A and K objects")
    if gc1.band() != gc2.band():
        raise BandMismatch("cocycles have different bands")


def equivalence_condition(gc1: GeneralizedCocycle, gc2: GeneralizedCocycle, xi: int, eta: int,
                          r_xi, r_eta, r_xe) -> bool:
    """Ω'(ξ,η) = Ω(ξ,η) ⊙ [ρ(ξη)^{⊛,−1} ⊛ ρ(η) ⊛ ρ(ξ)] with ρ(ξ): Λ_ξ ⇒ Λ'_ξ."""
    A = gc1.A
    o1, o2 = gc1.ops, gc2.ops
    xe = gc1.K.mul[xi][eta]
    om1, om2 = gc1.omega[(xi, eta)], gc2.omega[(xi, eta)]
    mul = A.mul
    for a in range(A.n0):
        la = o2.f0[xi][a]
        x = mul[o1.f1[eta][r_xi[a]]][r_eta[la]]
        b = o2.f0[eta][la]
        h = A.inv[o1.g1[xe][r_xe[o2.g0[xe][b]]]]
        y = mul[o1.g1[xe][x]][h]
        if om2[a] != mul[om1[a]][y]:
            return False
    return True


def cocycle_equivalent(gc1: GeneralizedCocycle, gc2: GeneralizedCocycle, *, gauge_fix: bool = True
                       ) -> Optional[list[NaturalTransformation]]:
    """A witness family ρ(ξ): Λ_ξ ⇒ Λ'_ξ, or None when no such family exists.

    With ``gauge_fix`` the components on a spanning tree of each connected component are
    pinned to their least candidate: composing a fiber isomorphism with conjugation by a
    Z_A-valued function on objects moves them through their whole Z_A-torsor.
    """
    _same_band(gc1, gc2)
    K, A = gc1.K, gc1.A
    ids = K.identity_set()
    units = tuple(A.unit)
    cands = []
    for xi in range(K.n1):
        if xi in ids:
            cands.append([units])
        else:
            cands.append([r.sigma for r in natural_transformations(gc1.lam[xi], gc2.lam[xi])])
    if any(not c for c in cands):
        return None
    rho: list = [None] * K.n1
    trail: list[int] = []

    def ok(x, y):
        return equivalence_condition(gc1, gc2, x, y, rho[x], rho[y], rho[K.mul[x][y]])

    def assign(xi, val) -> bool:
        stack = [(xi, val)]
        while stack:
            g, v = stack.pop()
            if rho[g] is not None:
                if rho[g] != v:
                    return False
                continue
            rho[g] = v
            trail.append(g)
            pairs = [(g, h) for h in K.out[K.tgt[g]] if rho[h] is not None]
            pairs += [(h, g) for h in K.into[K.src[g]] if rho[h] is not None]
            for x, y in pairs:
                p = K.mul[x][y]
                if rho[p] is not None:
                    if not ok(x, y):
                        return False
                else:
                    forced = [c for c in cands[p]
                              if equivalence_condition(gc1, gc2, x, y, rho[x], rho[y], c)]
                    if len(forced) != 1:
                        return False
                    stack.append((p, forced[0]))
        return True

    def undo(mark):
        while len(trail) > mark:
            rho[trail.pop()] = None

    for x in range(K.n0):
        if not assign(K.unit[x], units):
            return None
    if gauge_fix:
        for comp in K.components():
            for y, h in K.connecting_arrows(comp[0]).items():
                if h not in ids and not assign(h, cands[h][0]):
                    return None

    def rec():
        try:
            g = rho.index(None)
        except ValueError:
            return True
        for c in cands[g]:
            mark = len(trail)
            if assign(g, c) and rec():
                return True
            undo(mark)
        return False

    if not rec():
        return None
    return [NaturalTransformation(gc1.lam[g], gc2.lam[g], rho[g]) for g in range(K.n1)]


def extensions_isomorphic(E1: ExtensionGroupoid, E2: ExtensionGroupoid) -> Optional[StrictMorphism]:
    """A fiber-preserving isomorphism (identity on objects, over id_K, identity on the kernel)."""
    if (E1.A.n0, E1.A.n1, E1.K.n0, E1.K.n1) != (E2.A.n0, E2.A.n1, E2.K.n0, E2.K.n1):
        raise ShapeMismatch("extensions have different fibers or bases")
    n1 = E1.K.n1
    fixed = {g: g for g in E1.kernel_arrows()}
    return next(search_functors(E1.G, E2.G, bijective=True, object_map=tuple(range(E1.G.n0)),
                                fixed=fixed, allowed=lambda g, v: g % n1 == v % n1, limit=1), None)


def groupoids_isomorphic(E1: ExtensionGroupoid, E2: ExtensionGroupoid) -> Optional[StrictMorphism]:
    """Diagnostic only: any groupoid isomorphism, ignoring the bundle structure."""
    from .search import find_isomorphism
    return find_isomorphism(E1.G, E2.G)


# --------------------------------------------------------------------------
# classification

VERIFY_CAPS = {"K1": 6, "A1": 6, "ZA": 4}
MAX_VERIFY_LIFTINGS = 64


@dataclass
class ExtensionClass:
    coords: tuple
    cocycle: GeneralizedCocycle
    extension: ExtensionGroupoid


@dataclass
class ClassificationResult:
    band: Band
    reference: GeneralizedCocycle
    H2: CohomologyGroup
    classes: list[ExtensionClass]
    verification: dict = field(default_factory=dict)

    @property
    def count(self) -> int:
        return len(self.classes)


def class_of_cocycle(result: ClassificationResult, gc: GeneralizedCocycle) -> Optional[int]:
    """Index of the unique class equivalent to ``gc``."""
    hits = [i for i, c in enumerate(result.classes) if cocycle_equivalent(c.cocycle, gc) is not None]
    if len(hits) > 1:
        raise ExtensionError("cocycle equivalent to several classes", hits)
    return hits[0] if hits else None


def classify(A: FiniteGroupoid, band: Band, *, backend: str = "snf", verify: bool = True,
             max_liftings: int = MAX_VERIFY_LIFTINGS) -> ClassificationResult:
    """One extension per class of H²_Λ̄(K, Z_A), via [c] ↦ A⋊_{Λ₀, cΩ₀}K."""
    bad = check_band(A, band)
    if bad:
        raise BandMismatch(bad[0].message, bad[0])
    K = band.K
    gc0 = lift_band(A, band)
    obs = obstruction(gc0)
    coords, _ = obstruction_class(obs, backend)
    if any(coords):
        raise Obstructed(coords)
    _, ref = trivialize_obstruction(gc0, obs, backend)
    m = induced_action(A, ref.lam, K)
    H2 = cohomology(m, 2, backend, normalized=True)
    classes = []
    for c in H2.elements():
        z = H2.representative(c)
        gc = apply_central(ref, z)
        classes.append(ExtensionClass(tuple(c), gc, build_extension(gc)))
    result = ClassificationResult(band, ref, H2, classes)
    cen = center(A)
    in_caps = K.n1 <= VERIFY_CAPS["K1"] and A.n1 <= VERIFY_CAPS["A1"] and cen.order <= VERIFY_CAPS["ZA"]
    if verify and in_caps:
        result.verification = verify_classification(result, max_liftings)
    else:
        result.verification = {"performed": False}
    return result


def verify_classification(result: ClassificationResult, max_liftings: int = MAX_VERIFY_LIFTINGS) -> dict:
    """Pairwise non-equivalence of the emitted classes and completeness against exhaustive search."""
    A, band = result.reference.A, result.band
    cls = result.classes
    pairwise = all(cocycle_equivalent(cls[i].cocycle, cls[j].cocycle) is None
                   for i in range(len(cls)) for j in range(i + 1, len(cls)))
    n_lift = count_liftings(A, band)
    if n_lift <= max_liftings:
        lifts = list(liftings(A, band))
        scope = "all liftings"
    else:
        lifts = [result.reference.lam_indices()]
        scope = "reference lifting"
    found = 0
    complete = True
    for idx in lifts:
        for gc in search_cocycles(A, band.K, lam_from_indices(A, idx)):
            found += 1
            hits = sum(cocycle_equivalent(c.cocycle, gc) is not None for c in cls)
            if hits != 1:
                complete = False
                break
        if not complete:
            break
    return {"performed": True, "pairwise_inequivalent": pairwise, "exhaustive_complete": complete,
            "cocycles_searched": found, "search_scope": scope}


# --------------------------------------------------------------------------
# refinements

def pullback_cocycle(gc: GeneralizedCocycle, F: StrictMorphism) -> GeneralizedCocycle:
    """Λ∘F¹ and Ω∘(F¹, F¹, id) over the domain of F."""
    if F.cod is not gc.K:
        raise DifferentBase("functor does not land in the cocycle's base")
    Kp = F.dom
    lam = [gc.lam[F.f1[g]] for g in range(Kp.n1)]
    omega = {(x, y): gc.omega[(F.f1[x], F.f1[y])] for x in range(Kp.n1) for y in Kp.out[Kp.tgt[x]]}
    return GeneralizedCocycle(gc.A, Kp, lam, omega)


def pullback_bundle(E: ExtensionGroupoid, F: StrictMorphism) -> ExtensionGroupoid:
    """The strict pullback F*G over dom F, written back in the (α, ξ') layout."""
    K, Kp, A, G = E.K, F.dom, E.A, E.G
    n0, n1, m0, m1 = K.n0, K.n1, Kp.n0, Kp.n1
    N = A.n1 * m1
    src = [(G.src[al * n1 + F.f1[xi]] // n0) * m0 + Kp.src[xi] for al in range(A.n1) for xi in range(m1)]
    tgt = [(G.tgt[al * n1 + F.f1[xi]] // n0) * m0 + Kp.tgt[xi] for al in range(A.n1) for xi in range(m1)]
    mul = [[-1] * N for _ in range(N)]
    for al in range(A.n1):
        for xi in range(m1):
            g = al * n1 + F.f1[xi]
            row = mul[al * m1 + xi]
            for eta in Kp.out[Kp.tgt[xi]]:
                for be in range(A.n1):
                    h = be * n1 + F.f1[eta]
                    p = G.mul[g][h]
                    if p >= 0:
                        row[be * m1 + eta] = (p // n1) * m1 + Kp.mul[xi][eta]
    inv = [(G.inv[al * n1 + F.f1[xi]] // n1) * m1 + Kp.inv[xi] for al in range(A.n1) for xi in range(m1)]
    unit = [A.unit[a] * m1 + Kp.unit[x] for a in range(A.n0) for x in range(m0)]
    objects, arrows = _bundle_names(A, Kp)
    H = FiniteGroupoid(objects, arrows, src, tgt, mul, unit, inv)
    return ExtensionGroupoid(H, A, Kp)


def refine_cocycle(gc: GeneralizedCocycle, U: OpenCover):
    """(K[U], q_U, q_U*gc)."""
    KU, q = refine(gc.K, U)
    return KU, q, pullback_cocycle(gc, q)


def _refinement_base(KU: FiniteGroupoid):
    data = KU.cache.get("refinement")
    if data is None:
        raise DifferentBase("groupoid is not a refinement groupoid")
    return data[0], data[1]


@dataclass
class RefinementVerdict:
    equivalent: bool
    cover: OpenCover
    refined_base: FiniteGroupoid
    witness: Optional[list]


def equivalent_over_refinements(gc1: GeneralizedCocycle, gc2: GeneralizedCocycle) -> RefinementVerdict:
    """Pull both cocycles back to the common refinement W of their covers and compare there."""
    K1, U = _refinement_base(gc1.K)
    K2, V = _refinement_base(gc2.K)
    if K1 is not K2:
        raise DifferentBase("covers refine different groupoids")
    W = common_refinement(U, V)
    KW, _ = refine(K1, W)
    p1 = pullback_cocycle(gc1, refinement_map(K1, W, U, KW, gc1.K))
    p2 = pullback_cocycle(gc2, refinement_map(K1, W, V, KW, gc2.K))
    rho = cocycle_equivalent(p1, p2)
    return RefinementVerdict(rho is not None, W, KW, rho)
