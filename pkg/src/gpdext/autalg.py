"""Isotropy, centers, strict automorphisms, the group N_A and coarse SAut."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .abelian import FiniteAbelianGroup
from .core import (FiniteGroupoid, GroupoidError, NaturalTransformation, StrictMorphism,
                   compose_morphisms, horizontal_compose, identity_morphism,
                   identity_transformation, vertical_compose)
from .search import automorphisms, natural_transformations

DEFAULT_SAUT_CAP = 12
DEFAULT_AUTO_COUNT_CAP = 50_000


class UnknownObject(GroupoidError):
    pass


class SizeCapExceeded(GroupoidError):
    pass


@dataclass(frozen=True)
class IsotropyGroup:
    groupoid: FiniteGroupoid
    base: int
    elements: tuple

    def mul(self, g: int, h: int) -> int:
        return self.groupoid.mul[g][h]

    @property
    def order(self) -> int:
        return len(self.elements)


def _object(A: FiniteGroupoid, x) -> int:
    if isinstance(x, str):
        if x not in A.obj_index:
            raise UnknownObject(f"no object named {x!r}")
        return A.obj_index[x]
    if not 0 <= x < A.n0:
        raise UnknownObject(f"object index {x} out of range")
    return x


def isotropy(A: FiniteGroupoid, x) -> IsotropyGroup:
    x = _object(A, x)
    return IsotropyGroup(A, x, tuple(A.loops(x)))


def isotropy_center(A: FiniteGroupoid, x: int) -> list[int]:
    loops = A.loops(x)
    return [g for g in loops if all(A.mul[g][h] == A.mul[h][g] for h in loops)]


def center_object_space(A: FiniteGroupoid) -> tuple[FiniteGroupoid, list[tuple[int, int]]]:
    """The action groupoid ZA with objects (a, g), g ∈ ZΓ_a, and arrows h: (a,g) → (b, h⁻¹gh)."""
    pts = [(a, g) for a in range(A.n0) for g in isotropy_center(A, a)]
    where = {p: i for i, p in enumerate(pts)}
    arrows, src, tgt, base = [], [], [], []
    index = {}
    for i, (a, g) in enumerate(pts):
        for h in A.out[a]:
            j = where[(A.tgt[h], A.product(A.inv[h], g, h))]
            index[(h, i)] = len(arrows)
            arrows.append(f"{A.arrows[h]}@{A.objects[a]}:{A.arrows[g]}")
            src.append(i)
            tgt.append(j)
            base.append(h)
    n = len(arrows)
    mul = [[-1] * n for _ in range(n)]
    for (h, i), p in index.items():
        j = tgt[p]
        a_j = pts[j][0]
        for h2 in A.out[a_j]:
            mul[p][index[(h2, j)]] = index[(A.mul[h][h2], i)]
    unit = [index[(A.unit[a], i)] for i, (a, _) in enumerate(pts)]
    inv = [index[(A.inv[base[p]], tgt[p])] for p in range(n)]
    names = [f"{A.objects[a]}:{A.arrows[g]}" for a, g in pts]
    return FiniteGroupoid(names, arrows, src, tgt, mul, unit, inv), pts


@dataclass
class Center:
    """Z_A as raw sections and as an abstract additive group."""
    groupoid: FiniteGroupoid
    sections: list[tuple]
    index: dict
    group: FiniteAbelianGroup

    def element(self, section) -> int:
        return self.index[tuple(section)]

    def mul(self, s1, s2) -> tuple:
        A = self.groupoid
        return tuple(A.mul[p][q] for p, q in zip(s1, s2))

    @property
    def identity(self) -> tuple:
        return tuple(self.groupoid.unit)

    @property
    def order(self) -> int:
        return len(self.sections)


def is_central_section(A: FiniteGroupoid, values) -> bool:
    for a in range(A.n0):
        z = values[a]
        if A.src[z] != a or A.tgt[z] != a:
            return False
        if any(A.mul[z][h] != A.mul[h][z] for h in A.loops(a)):
            return False
    return all(A.product(A.inv[h], values[A.src[h]], h) == values[A.tgt[h]] for h in range(A.n1))


def center(A: FiniteGroupoid) -> Center:
    cached = A.cache.get("center")
    if cached is not None:
        return cached
    per_comp = []
    for comp in A.components():
        b = comp[0]
        tree = A.connecting_arrows(b)
        opts = []
        for z in isotropy_center(A, b):
            opts.append({y: A.product(A.inv[h], z, h) for y, h in tree.items()})
        per_comp.append(opts)
    sections = []
    for choice in itertools.product(*per_comp):
        vals = [0] * A.n0
        for part in choice:
            for y, z in part.items():
                vals[y] = z
        sections.append(tuple(vals))
    sections.sort()
    for s in sections:
        assert is_central_section(A, s), "transported central value is not invariant"
    index = {s: i for i, s in enumerate(sections)}
    add = [[index[tuple(A.mul[p][q] for p, q in zip(s1, s2))] for s2 in sections] for s1 in sections]
    labels = ["[" + ",".join(A.arrows[g] for g in s) + "]" for s in sections]
    grp = FiniteAbelianGroup(labels, add, index[tuple(A.unit)])
    c = Center(A, sections, index, grp)
    A.cache["center"] = c
    return c


def brute_force_center(A: FiniteGroupoid) -> list[tuple]:
    """All central invariant sections by enumerating every loop choice per object."""
    choices = [A.loops(a) for a in range(A.n0)]
    return sorted(s for s in itertools.product(*choices) if is_central_section(A, s))


# --------------------------------------------------------------------------
# strict automorphisms

@dataclass
class SAutGroupoid:
    """Strict automorphisms (objects) of A and the 2-cells between them (arrows)."""
    A: FiniteGroupoid
    autos: list[StrictMorphism]
    index: dict
    mul: list[list[int]]  # mul[i][j]: apply autos[i], then autos[j]
    inv: list[int]
    _arrows: list = field(default=None, repr=False)

    @property
    def order(self) -> int:
        return len(self.autos)

    def find(self, f: StrictMorphism) -> int:
        return self.index[f.key]

    def then(self, i: int, j: int) -> int:
        return self.mul[i][j]

    @property
    def arrows(self) -> list[tuple[int, int, NaturalTransformation]]:
        if self._arrows is None:
            out = []
            for i, f in enumerate(self.autos):
                for j, g in enumerate(self.autos):
                    out += [(i, j, r) for r in natural_transformations(f, g)]
            self._arrows = out
        return self._arrows

    def arrow_groupoid(self) -> FiniteGroupoid:
        """SAut(A) as a FiniteGroupoid, vertical composition as multiplication."""
        arrs = self.arrows
        index = {(i, j, r.sigma): k for k, (i, j, r) in enumerate(arrs)}
        by_src: dict[int, list[int]] = {}
        for k, (i, _, _) in enumerate(arrs):
            by_src.setdefault(i, []).append(k)
        n = len(arrs)
        mul = [[-1] * n for _ in range(n)]
        inv = [0] * n
        for k, (i, j, r) in enumerate(arrs):
            for k2 in by_src.get(j, []):
                _, l, r2 = arrs[k2]
                mul[k][k2] = index[(i, l, vertical_compose(r, r2).sigma)]
            inv[k] = index[(j, i, tuple(self.A.inv[s] for s in r.sigma))]
        unit = [index[(i, i, identity_transformation(f).sigma)] for i, f in enumerate(self.autos)]
        names = [f"a{i}" for i in range(self.order)]
        return FiniteGroupoid(names, [f"{i}=>{j}:{r.sigma}" for i, j, r in arrs],
                              [i for i, _, _ in arrs], [j for _, j, _ in arrs], mul, unit, inv)


def enumerate_saut(A: FiniteGroupoid, size_cap: int = DEFAULT_SAUT_CAP,
                   count_cap: int = DEFAULT_AUTO_COUNT_CAP) -> SAutGroupoid:
    # caps gate the first computation only; later callers reuse the cached enumeration
    key = "saut"
    if key in A.cache:
        return A.cache[key]
    if A.n1 > size_cap:
        raise SizeCapExceeded(f"|A¹| = {A.n1} exceeds the automorphism search cap {size_cap}")
    autos = automorphisms(A, limit=count_cap + 1)
    if len(autos) > count_cap:
        raise SizeCapExceeded(f"more than {count_cap} strict automorphisms")
    index = {f.key: i for i, f in enumerate(autos)}
    mul = [[index[compose_morphisms(f, g).key] for g in autos] for f in autos]
    inv = [index[f.inverse().key] for f in autos]
    s = SAutGroupoid(A, autos, index, mul, inv)
    A.cache[key] = s
    return s


# --------------------------------------------------------------------------
# N_A

def t_saut(A: FiniteGroupoid, sigma) -> StrictMorphism:
    """The automorphism f with f⁰ = t∘σ and f¹(g) = σ(src g)⁻¹·g·σ(tgt g)."""
    f0 = [A.tgt[s] for s in sigma]
    f1 = [A.product(A.inv[sigma[A.src[g]]], g, sigma[A.tgt[g]]) for g in range(A.n1)]
    return StrictMorphism(A, A, f0, f1)


def star(A: FiniteGroupoid, gamma, sigma) -> tuple:
    """(γ⊛σ)(x) = σ(x)·γ(t(σ(x))): apply σ first, then γ."""
    return tuple(A.mul[s][gamma[A.tgt[s]]] for s in sigma)


def n_inverse(A: FiniteGroupoid, sigma) -> tuple:
    """σ⁻¹(x) = σ((t∘σ)⁻¹(x))⁻¹."""
    back = {A.tgt[s]: x for x, s in enumerate(sigma)}
    return tuple(A.inv[sigma[back[x]]] for x in range(A.n0))


@dataclass
class NAGroup:
    A: FiniteGroupoid
    elements: list[tuple]
    index: dict
    mul: list[list[int]]  # mul[i][j] = elements[i] ⊛ elements[j]
    inv: list[int]
    t_image: list[int]  # SAut⁰ index of t_saut(element)
    identity: int

    @property
    def order(self) -> int:
        return len(self.elements)

    def by_target(self) -> dict[int, list[int]]:
        out: dict[int, list[int]] = {}
        for i, f in enumerate(self.t_image):
            out.setdefault(f, []).append(i)
        return out


def n_sections(A: FiniteGroupoid) -> list[tuple]:
    """Sections σ with s∘σ = id and t∘σ bijective, in canonical order."""
    out = []
    sigma = [0] * A.n0
    used = set()

    def rec(x):
        if x == A.n0:
            out.append(tuple(sigma))
            return
        for g in A.out[x]:
            y = A.tgt[g]
            if y in used:
                continue
            used.add(y)
            sigma[x] = g
            rec(x + 1)
            used.discard(y)

    rec(0)
    return out


def n_group(A: FiniteGroupoid, saut: SAutGroupoid = None, size_cap: int = DEFAULT_SAUT_CAP) -> NAGroup:
    if "n_group" in A.cache:
        return A.cache["n_group"]
    saut = saut or enumerate_saut(A, size_cap)
    elems = n_sections(A)
    index = {s: i for i, s in enumerate(elems)}
    mul = [[index[star(A, g, s)] for s in elems] for g in elems]
    inv = [index[n_inverse(A, s)] for s in elems]
    t_img = [saut.find(t_saut(A, s)) for s in elems]
    ng = NAGroup(A, elems, index, mul, inv, t_img, index[tuple(A.unit)])
    A.cache["n_group"] = ng
    return ng


# --------------------------------------------------------------------------
# coarse SAut

@dataclass
class CoarseSAut:
    """SAut⁰ / Im t_saut with least coset representatives; mul[a][b] is "a then b"."""
    saut: SAutGroupoid
    image: frozenset
    cosets: list[list[int]]
    reps: list[int]
    proj: list[int]
    mul: list[list[int]]
    inv: list[int]

    @property
    def order(self) -> int:
        return len(self.reps)

    identity = 0


def coarse_saut(A: FiniteGroupoid, size_cap: int = DEFAULT_SAUT_CAP) -> CoarseSAut:
    if "coarse" in A.cache:
        return A.cache["coarse"]
    saut = enumerate_saut(A, size_cap)
    ng = n_group(A, saut)
    image = frozenset(ng.t_image)
    proj = [-1] * saut.order
    cosets, reps = [], []
    for f in range(saut.order):
        if proj[f] >= 0:
            continue
        coset = sorted({saut.mul[f][h] for h in image})
        for g in coset:
            proj[g] = len(cosets)
        cosets.append(coset)
        reps.append(coset[0])
    mul = [[proj[saut.mul[r][s]] for s in reps] for r in reps]
    inv = [proj[saut.inv[r]] for r in reps]
    c = CoarseSAut(saut, image, cosets, reps, proj, mul, inv)
    A.cache["coarse"] = c
    return c


def automorphism_data(A: FiniteGroupoid, size_cap: int = DEFAULT_SAUT_CAP):
    saut = enumerate_saut(A, size_cap)
    return saut, n_group(A, saut), coarse_saut(A, size_cap), center(A)


# --------------------------------------------------------------------------
# checks of the exact sequence and the semidirect decomposition

def exactness_report(A: FiniteGroupoid, size_cap: int = DEFAULT_SAUT_CAP) -> dict[str, bool]:
    """Checks 1 → Z_A → N_A → SAut⁰ → coarse SAut → 1 node by node."""
    saut, ng, coarse, cen = automorphism_data(A, size_cap)
    ident = saut.find(identity_morphism(A))
    z_sections = set(cen.sections)
    kernel_t = {ng.elements[i] for i in range(ng.order) if ng.t_image[i] == ident}
    image = set(ng.t_image)
    rep = {}
    rep["center_in_n"] = z_sections <= set(ng.elements)
    rep["kernel_t_is_center"] = kernel_t == z_sections
    rep["t_is_homomorphism"] = all(
        ng.t_image[ng.mul[g][s]] == saut.mul[ng.t_image[s]][ng.t_image[g]]
        for g in range(ng.order) for s in range(ng.order))
    rep["kernel_pi_is_image"] = {f for f in range(saut.order) if coarse.proj[f] == coarse.proj[ident]} == image
    rep["pi_surjective"] = set(coarse.proj) == set(range(coarse.order))
    rep["image_normal"] = all(saut.mul[saut.mul[saut.inv[h]][f]][h] in image
                              for h in range(saut.order) for f in image)
    stab_id = {s for s in range(ng.order) if saut.mul[ident][ng.t_image[s]] == ident}
    rep["stabilizers_equal_center"] = all(
        {s for s in range(ng.order) if saut.mul[f][ng.t_image[s]] == f} == stab_id
        for f in range(saut.order)) and {ng.elements[s] for s in stab_id} == z_sections
    rep["n_group_axioms"] = all(
        ng.mul[ng.mul[a][b]][c] == ng.mul[a][ng.mul[b][c]]
        for a in range(ng.order) for b in range(ng.order) for c in range(ng.order)
    ) and all(ng.mul[a][ng.inv[a]] == ng.identity == ng.mul[ng.inv[a]][a] for a in range(ng.order))
    return rep


def semidirect_check(A: FiniteGroupoid, size_cap: int = DEFAULT_SAUT_CAP) -> bool:
    """Verify SAut(A) ≅ SAut⁰ ⋉ N_A through the explicit maps φ and ψ."""
    saut, ng, _, _ = automorphism_data(A, size_cap)
    idA = identity_morphism(A)
    arrs = saut.arrows
    # action groupoid arrows: (g, β) : g → t(β)∘g
    def act_target(g, b):
        return saut.mul[g][ng.t_image[b]]

    def phi(i, j, r):
        f = saut.autos[i]
        beta = horizontal_compose(r, identity_transformation(f.inverse()))
        if beta.source != idA:
            return None
        return (i, ng.index.get(beta.sigma))

    def psi(g, b):
        gf = saut.autos[g]
        beta = NaturalTransformation(idA, saut.autos[ng.t_image[b]], ng.elements[b])
        r = horizontal_compose(beta, identity_transformation(gf))
        return (g, saut.find(r.target), r.sigma)

    images = {}
    for i, j, r in arrs:
        im = phi(i, j, r)
        if im is None or im[1] is None or act_target(*im) != j:
            return False
        images[(i, j, r.sigma)] = im
        if psi(*im) != (i, j, r.sigma):
            return False
    if len(set(images.values())) != len(arrs) or len(arrs) != saut.order * ng.order:
        return False
    for g in range(saut.order):
        for b in range(ng.order):
            i, j, sig = psi(g, b)
            if images.get((i, j, sig)) != (g, b):
                return False
    # functoriality: vertical composition ↦ action-groupoid composition (β then β')
    by_src: dict[int, list] = {}
    for i, j, r in arrs:
        by_src.setdefault(i, []).append((j, r))
    for i, j, r in arrs:
        g, b = images[(i, j, r.sigma)]
        for l, r2 in by_src[j]:
            _, b2 = images[(j, l, r2.sigma)]
            comp = vertical_compose(r, r2)
            if images[(i, l, comp.sigma)] != (g, ng.mul[b2][b]):
                return False
    return True
