"""Finite groupoids, strict morphisms, natural transformations and refinements.

Arrows compose left to right: ``g·h`` is defined when ``tgt(g) == src(h)``.
Functor composition ``compose_morphisms(f, g)`` means "apply f, then g".
Everything is stored by integer index; names are only for I/O.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

MAX_REPORTED = 25


class GroupoidError(Exception):
    """Base class for structural errors."""

    def __init__(self, message: str = "", arrows: tuple = ()):
        super().__init__(message)
        self.arrows = tuple(arrows)

    @property
    def kind(self) -> str:
        return type(self).__name__


class MalformedGroupoid(GroupoidError):
    pass


class CompositionDomainError(GroupoidError):
    pass


class AssociativityViolation(GroupoidError):
    pass


class UnitViolation(GroupoidError):
    pass


class InverseViolation(GroupoidError):
    pass


class GroupoidValidationError(GroupoidError):
    def __init__(self, violations: Sequence[GroupoidError]):
        self.violations = list(violations)
        kinds = sorted({v.kind for v in self.violations})
        super().__init__(f"{len(self.violations)} violation(s): {', '.join(kinds)}")


class DomainMismatch(GroupoidError):
    pass


class CompositionMismatch(GroupoidError):
    pass


class InvalidCover(GroupoidError):
    pass


class NotAFunctor(GroupoidError):
    pass


class NotNatural(GroupoidError):
    pass


class FiniteGroupoid:
    """A finite groupoid given by dense tables.

    ``mul[g][h]`` is the index of ``g·h`` or -1 when the pair is not composable.
    """

    def __init__(self, objects, arrows, src, tgt, mul, unit, inv, *, check: bool = True):
        self.objects = tuple(objects)
        self.arrows = tuple(arrows)
        self.src = tuple(src)
        self.tgt = tuple(tgt)
        self.mul = [list(row) for row in mul]
        self.unit = tuple(unit)
        self.inv = tuple(inv)
        self.obj_index = {name: i for i, name in enumerate(self.objects)}
        self.arrow_index = {name: i for i, name in enumerate(self.arrows)}
        n0 = len(self.objects)
        self.out: list[list[int]] = [[] for _ in range(n0)]
        self.into: list[list[int]] = [[] for _ in range(n0)]
        self._hom: dict[tuple[int, int], list[int]] = {}
        ok_index = all(0 <= s < n0 for s in self.src) and all(0 <= t < n0 for t in self.tgt)
        if ok_index and len(self.src) == len(self.arrows) == len(self.tgt):
            for g, (s, t) in enumerate(zip(self.src, self.tgt)):
                self.out[s].append(g)
                self.into[t].append(g)
                self._hom.setdefault((s, t), []).append(g)
        self.cache: dict = {}
        if check:
            violations = check_axioms(self)
            if violations:
                raise GroupoidValidationError(violations)

    @classmethod
    def from_products(cls, objects, arrows, src, tgt, products: dict, unit, inv, *, check=True):
        n = len(arrows)
        mul = [[-1] * n for _ in range(n)]
        for (g, h), k in products.items():
            mul[g][h] = k
        return cls(objects, arrows, src, tgt, mul, unit, inv, check=check)

    def __repr__(self):
        return f"FiniteGroupoid({len(self.objects)} objects, {len(self.arrows)} arrows)"

    @property
    def n0(self) -> int:
        return len(self.objects)

    @property
    def n1(self) -> int:
        return len(self.arrows)

    def compose(self, g: int, h: int) -> int:
        k = self.mul[g][h]
        if k < 0:
            raise CompositionDomainError(
                f"{self.arrows[g]}·{self.arrows[h]} is not composable", (g, h))
        return k

    def product(self, *arrows: int) -> int:
        acc = arrows[0]
        for h in arrows[1:]:
            acc = self.compose(acc, h)
        return acc

    def hom(self, x: int, y: int) -> list[int]:
        return self._hom.get((x, y), [])

    def loops(self, x: int) -> list[int]:
        return self.hom(x, x)

    def is_identity(self, g: int) -> bool:
        return self.unit[self.src[g]] == g

    def identity_set(self) -> frozenset:
        return frozenset(self.unit)

    def components(self) -> list[list[int]]:
        """Connected components as sorted object lists, ordered by least object."""
        parent = list(range(self.n0))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for g in range(self.n1):
            a, b = find(self.src[g]), find(self.tgt[g])
            if a != b:
                parent[max(a, b)] = min(a, b)
        comps: dict[int, list[int]] = {}
        for x in range(self.n0):
            comps.setdefault(find(x), []).append(x)
        return [comps[r] for r in sorted(comps)]

    def connecting_arrows(self, base: int) -> dict[int, int]:
        """For each object y in the component of ``base``, one arrow base→y (BFS tree)."""
        tree = {base: self.unit[base]}
        frontier = [base]
        while frontier:
            nxt = []
            for x in frontier:
                for g in self.out[x]:
                    y = self.tgt[g]
                    if y not in tree:
                        tree[y] = self.mul[tree[x]][g]
                        nxt.append(y)
            frontier = nxt
        return tree


def check_axioms(G: FiniteGroupoid, limit: int = MAX_REPORTED) -> list[GroupoidError]:
    """Return every violated groupoid axiom (at most ``limit`` per kind)."""
    found: list[GroupoidError] = []
    counts: dict[type, int] = {}

    def report(err: GroupoidError):
        c = counts.get(type(err), 0)
        if c < limit:
            found.append(err)
        counts[type(err)] = c + 1

    n0, n1 = G.n0, G.n1
    if not (len(G.src) == len(G.tgt) == n1 and len(G.unit) == n0 and len(G.inv) == n1
            and len(G.mul) == n1 and all(len(r) == n1 for r in G.mul)):
        return [MalformedGroupoid("table sizes do not match the object/arrow counts")]
    bad = [g for g in range(n1) if not (0 <= G.src[g] < n0 and 0 <= G.tgt[g] < n0 and 0 <= G.inv[g] < n1)]
    bad += [x for x in range(n0) if not 0 <= G.unit[x] < n1]
    if bad:
        return [MalformedGroupoid("index out of range", tuple(bad))]
    for g in range(n1):
        row = G.mul[g]
        for h in range(n1):
            k = row[h]
            composable = G.tgt[g] == G.src[h]
            if composable != (k >= 0) or k >= n1:
                report(CompositionDomainError(
                    f"{G.arrows[g]},{G.arrows[h]}: composable={composable} but product "
                    f"{'defined' if k >= 0 else 'undefined'}", (g, h)))
            elif composable and (G.src[k] != G.src[g] or G.tgt[k] != G.tgt[h]):
                report(CompositionDomainError(
                    f"{G.arrows[g]}·{G.arrows[h]} has wrong endpoints", (g, h)))
    if counts.get(CompositionDomainError):
        return found
    for x in range(n0):
        u = G.unit[x]
        if G.src[u] != x or G.tgt[u] != x:
            report(UnitViolation(f"unit at {G.objects[x]} is not a loop there", (u,)))
    if counts.get(UnitViolation):
        return found
    for g in range(n1):
        if G.mul[G.unit[G.src[g]]][g] != g or G.mul[g][G.unit[G.tgt[g]]] != g:
            report(UnitViolation(f"unit law fails for {G.arrows[g]}", (g,)))
        gi = G.inv[g]
        if G.src[gi] != G.tgt[g] or G.tgt[gi] != G.src[g]:
            report(InverseViolation(f"inverse of {G.arrows[g]} has wrong endpoints", (g, gi)))
        elif G.mul[g][gi] != G.unit[G.src[g]] or G.mul[gi][g] != G.unit[G.tgt[g]]:
            report(InverseViolation(f"{G.arrows[g]}·{G.arrows[gi]} is not a unit", (g, gi)))
    mul, out, tgt = G.mul, G.out, G.tgt
    for g in range(n1):
        mg = mul[g]
        for h in out[tgt[g]]:
            gh, mh = mg[h], mul[h]
            mgh = mul[gh]
            for k in out[tgt[h]]:
                if mgh[k] != mg[mh[k]]:
                    report(AssociativityViolation(
                        f"({G.arrows[g]}·{G.arrows[h]})·{G.arrows[k]} differs from "
                        f"{G.arrows[g]}·({G.arrows[h]}·{G.arrows[k]})", (g, h, k)))
    return found


def validate_groupoid(candidate) -> FiniteGroupoid:
    """Validate raw groupoid data (JSON-shaped dict or an unchecked groupoid).

    Raises GroupoidValidationError carrying the list of violated axioms.
    """
    if isinstance(candidate, FiniteGroupoid):
        G = candidate
    else:
        from .serialize import groupoid_from_dict
        G = groupoid_from_dict(candidate, check=False)
    violations = check_axioms(G)
    if violations:
        raise GroupoidValidationError(violations)
    return G


# --------------------------------------------------------------------------
# strict morphisms

class StrictMorphism:
    __slots__ = ("dom", "cod", "f0", "f1", "_key")

    def __init__(self, dom: FiniteGroupoid, cod: FiniteGroupoid, f0, f1):
        self.dom = dom
        self.cod = cod
        self.f0 = tuple(f0)
        self.f1 = tuple(f1)
        self._key = (self.f0, self.f1)

    @property
    def key(self):
        return self._key

    def __eq__(self, other):
        return (isinstance(other, StrictMorphism) and self.dom is other.dom
                and self.cod is other.cod and self._key == other._key)

    def __hash__(self):
        return hash(self._key)

    def __lt__(self, other):
        return self._key < other._key

    def __repr__(self):
        return f"StrictMorphism(f0={self.f0}, f1={self.f1})"

    def problems(self) -> list[str]:
        A, B = self.dom, self.cod
        out = []
        if len(self.f0) != A.n0 or len(self.f1) != A.n1:
            return ["map sizes do not match the domain"]
        for g in range(A.n1):
            fg = self.f1[g]
            if B.src[fg] != self.f0[A.src[g]] or B.tgt[fg] != self.f0[A.tgt[g]]:
                out.append(f"arrow {A.arrows[g]}: endpoints not preserved")
        if out:
            return out
        for x in range(A.n0):
            if self.f1[A.unit[x]] != B.unit[self.f0[x]]:
                out.append(f"unit at {A.objects[x]} not preserved")
        for g in range(A.n1):
            for h in A.out[A.tgt[g]]:
                if self.f1[A.mul[g][h]] != B.mul[self.f1[g]][self.f1[h]]:
                    out.append(f"product {A.arrows[g]}·{A.arrows[h]} not preserved")
        return out

    def is_functor(self) -> bool:
        return not self.problems()

    def is_bijective(self) -> bool:
        return (len(set(self.f0)) == self.cod.n0 == self.dom.n0
                and len(set(self.f1)) == self.cod.n1 == self.dom.n1)

    def inverse(self) -> "StrictMorphism":
        if not self.is_bijective():
            raise DomainMismatch("morphism is not bijective")
        f0 = [0] * self.cod.n0
        f1 = [0] * self.cod.n1
        for x, y in enumerate(self.f0):
            f0[y] = x
        for g, h in enumerate(self.f1):
            f1[h] = g
        return StrictMorphism(self.cod, self.dom, f0, f1)


def identity_morphism(G: FiniteGroupoid) -> StrictMorphism:
    return StrictMorphism(G, G, range(G.n0), range(G.n1))


def compose_morphisms(f: StrictMorphism, g: StrictMorphism, *, debug: bool = False) -> StrictMorphism:
    """Apply ``f`` then ``g`` (the composite g∘f)."""
    if f.cod is not g.dom:
        raise DomainMismatch("codomain of the first morphism is not the domain of the second")
    h = StrictMorphism(f.dom, g.cod, [g.f0[y] for y in f.f0], [g.f1[b] for b in f.f1])
    if debug and not h.is_functor():
        raise NotAFunctor("; ".join(h.problems()[:3]))
    return h


# --------------------------------------------------------------------------
# natural transformations

class NaturalTransformation:
    """A 2-cell source ⇒ target; ``sigma[x]`` is an arrow source(x) → target(x)."""
    __slots__ = ("source", "target", "sigma")

    def __init__(self, source: StrictMorphism, target: StrictMorphism, sigma):
        self.source = source
        self.target = target
        self.sigma = tuple(sigma)

    def __eq__(self, other):
        return (isinstance(other, NaturalTransformation) and self.source == other.source
                and self.target == other.target and self.sigma == other.sigma)

    def __hash__(self):
        return hash((self.source.key, self.target.key, self.sigma))

    def __repr__(self):
        return f"NaturalTransformation(sigma={self.sigma})"

    def __call__(self, x: int) -> int:
        return self.sigma[x]

    def problems(self) -> list[str]:
        f, g = self.source, self.target
        A, B = f.dom, f.cod
        if g.dom is not A or g.cod is not B:
            return ["source and target functors have different domains or codomains"]
        out = []
        for x in range(A.n0):
            s = self.sigma[x]
            if B.src[s] != f.f0[x] or B.tgt[s] != g.f0[x]:
                out.append(f"component at {A.objects[x]} has wrong endpoints")
        if out:
            return out
        for a in range(A.n1):
            x, y = A.src[a], A.tgt[a]
            if B.mul[f.f1[a]][self.sigma[y]] != B.mul[self.sigma[x]][g.f1[a]]:
                out.append(f"naturality fails at {A.arrows[a]}")
        return out

    def is_natural(self) -> bool:
        return not self.problems()


def identity_transformation(f: StrictMorphism) -> NaturalTransformation:
    return NaturalTransformation(f, f, [f.cod.unit[y] for y in f.f0])


def vertical_compose(r1: NaturalTransformation, r2: NaturalTransformation) -> NaturalTransformation:
    """(r1⊙r2)(a) = r1(a)·r2(a) for r1: f⇒g, r2: g⇒h."""
    if r1.target != r2.source:
        raise CompositionMismatch("target of the first 2-cell is not the source of the second")
    B = r1.source.cod
    return NaturalTransformation(r1.source, r2.target,
                                 [B.mul[p][q] for p, q in zip(r1.sigma, r2.sigma)])


def vertical_inverse(r: NaturalTransformation) -> NaturalTransformation:
    B = r.source.cod
    return NaturalTransformation(r.target, r.source, [B.inv[p] for p in r.sigma])


def horizontal_compose(r3: NaturalTransformation, r1: NaturalTransformation) -> NaturalTransformation:
    """For r1: f⇒g (A→B) and r3: k⇒j (B→C), the 2-cell k∘f ⇒ j∘g.

    (r3⊛r1)(a) = k¹(r1(a)) · r3(g⁰(a)).
    """
    f, g, k, j = r1.source, r1.target, r3.source, r3.target
    if f.cod is not k.dom:
        raise CompositionMismatch("2-cells are not horizontally composable")
    C = k.cod
    sigma = [C.mul[k.f1[r1.sigma[a]]][r3.sigma[g.f0[a]]] for a in range(f.dom.n0)]
    return NaturalTransformation(compose_morphisms(f, k), compose_morphisms(g, j), sigma)


def horizontal_inverse(r: NaturalTransformation) -> NaturalTransformation:
    """Inverse under ⊛ of a 2-cell between automorphisms L1 ⇒ L2.

    Returns the 2-cell L1⁻¹ ⇒ L2⁻¹ with value (L1⁻¹(r(L2⁻¹(a))))⁻¹.
    """
    l1i, l2i = r.source.inverse(), r.target.inverse()
    A = r.source.dom
    sigma = [A.inv[l1i.f1[r.sigma[l2i.f0[a]]]] for a in range(A.n0)]
    return NaturalTransformation(l1i, l2i, sigma)


# --------------------------------------------------------------------------
# covers and refinement groupoids

@dataclass(frozen=True)
class OpenCover:
    subsets: tuple[tuple[int, ...], ...]
    labels: tuple[str, ...]

    def __len__(self):
        return len(self.subsets)


def make_cover(K: FiniteGroupoid, subsets: Iterable[Iterable], labels=None) -> OpenCover:
    """Build a cover from object indices or names; subsets keep canonical object order."""
    subs = []
    for i, s in enumerate(subsets):
        idx = []
        for x in s:
            if isinstance(x, str):
                if x not in K.obj_index:
                    raise InvalidCover(f"subset {i}: unknown object {x!r}")
                x = K.obj_index[x]
            if not 0 <= x < K.n0:
                raise InvalidCover(f"subset {i}: object index {x} out of range")
            idx.append(x)
        if not idx:
            raise InvalidCover(f"subset {i} is empty")
        if len(set(idx)) != len(idx):
            raise InvalidCover(f"subset {i} repeats an object")
        subs.append(tuple(sorted(idx)))
    covered = set().union(*subs) if subs else set()
    if covered != set(range(K.n0)):
        missing = sorted(set(range(K.n0)) - covered)
        raise InvalidCover(f"objects not covered: {[K.objects[m] for m in missing]}")
    if labels is None:
        labels = [str(i) for i in range(len(subs))]
    labels = tuple(labels)
    if len(labels) != len(subs) or len(set(labels)) != len(labels):
        raise InvalidCover("cover labels must be distinct, one per subset")
    return OpenCover(tuple(subs), labels)


def trivial_cover(K: FiniteGroupoid) -> OpenCover:
    return make_cover(K, [list(range(K.n0))] if K.n0 else [])


def refine(K: FiniteGroupoid, U: OpenCover) -> tuple[FiniteGroupoid, StrictMorphism]:
    """The refinement groupoid K[U] and its projection q_U: K[U] → K."""
    if any(not s for s in U.subsets):
        raise InvalidCover("empty subset")
    if (set().union(*U.subsets) if U.subsets else set()) != set(range(K.n0)):
        raise InvalidCover("cover does not cover the object set")
    pts = [(i, x) for i, s in enumerate(U.subsets) for x in s]
    names = [f"{U.labels[i]}:{K.objects[x]}" for i, x in pts]
    arrows, src, tgt, q1 = [], [], [], []
    index = {}
    for p, (i, x) in enumerate(pts):
        for r, (j, y) in enumerate(pts):
            for g in K.hom(x, y):
                index[(p, g, r)] = len(arrows)
                arrows.append(f"{names[p]}|{K.arrows[g]}|{names[r]}")
                src.append(p)
                tgt.append(r)
                q1.append(g)
    n = len(arrows)
    mul = [[-1] * n for _ in range(n)]
    inv = [0] * n
    starting: list[list[tuple[int, int, int]]] = [[] for _ in pts]
    for (p, g, r), a in index.items():
        starting[p].append((g, r, a))
    for (p, g, r), a in index.items():
        inv[a] = index[(r, K.inv[g], p)]
        row = mul[a]
        for h, s, b in starting[r]:
            row[b] = index[(p, K.mul[g][h], s)]
    unit = [index[(p, K.unit[x], p)] for p, (_, x) in enumerate(pts)]
    KU = FiniteGroupoid(names, arrows, src, tgt, mul, unit, inv, check=False)
    KU.cache["refinement"] = (K, U, tuple(pts), tuple(q1), index)
    q = StrictMorphism(KU, K, [x for _, x in pts], q1)
    return KU, q


def refinement_map(K: FiniteGroupoid, W: OpenCover, U: OpenCover,
                   KW: FiniteGroupoid, KU: FiniteGroupoid) -> StrictMorphism:
    """The functor K[W] → K[U] induced by sending each W-subset to the least U-subset containing it."""
    iota = []
    for b, w in enumerate(W.subsets):
        cands = [i for i, u in enumerate(U.subsets) if set(w) <= set(u)]
        if not cands:
            raise InvalidCover(f"subset {W.labels[b]} is not contained in any subset of the coarser cover")
        iota.append(cands[0])
    _, _, pts_w, base_w, _ = KW.cache["refinement"]
    _, _, pts_u, _, index_u = KU.cache["refinement"]
    where_u = {pt: p for p, pt in enumerate(pts_u)}
    f0 = [where_u[(iota[b], x)] for b, x in pts_w]
    f1 = [index_u[(f0[KW.src[a]], base_w[a], f0[KW.tgt[a]])] for a in range(KW.n1)]
    return StrictMorphism(KW, KU, f0, f1)


def common_refinement(U: OpenCover, V: OpenCover) -> OpenCover:
    """Nonempty pairwise intersections U_i ∩ V_j, labelled lexicographically by (i, j)."""
    subs, labels = [], []
    for i, u in enumerate(U.subsets):
        for j, v in enumerate(V.subsets):
            w = tuple(x for x in u if x in set(v))
            if w:
                subs.append(w)
                labels.append(f"{U.labels[i]}&{V.labels[j]}")
    return OpenCover(tuple(subs), tuple(labels))


def is_equivalence(F: StrictMorphism) -> tuple[bool, str]:
    """Full, faithful and essentially surjective (the finite-case criterion)."""
    A, B = F.dom, F.cod
    for x in range(A.n0):
        for y in range(A.n0):
            imgs = [F.f1[g] for g in A.hom(x, y)]
            if len(set(imgs)) != len(imgs):
                return False, f"not faithful on hom({A.objects[x]},{A.objects[y]})"
            if len(imgs) != len(B.hom(F.f0[x], F.f0[y])):
                return False, f"not full on hom({A.objects[x]},{A.objects[y]})"
    hit = set(F.f0)
    for comp in B.components():
        if not hit.intersection(comp) and comp:
            return False, f"object {B.objects[comp[0]]} not in the essential image"
    return True, "equivalence"
