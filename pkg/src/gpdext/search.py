"""Backtracking searches for functors, isomorphisms and 2-cells."""
from __future__ import annotations

import itertools
from typing import Callable, Iterator, Optional

from .core import FiniteGroupoid, NaturalTransformation, StrictMorphism


def _profile(G: FiniteGroupoid, x: int, comp_size: dict) -> tuple:
    return (len(G.loops(x)), len(G.out[x]), comp_size[x])


def _component_sizes(G: FiniteGroupoid) -> dict:
    sizes = {}
    for comp in G.components():
        for x in comp:
            sizes[x] = len(comp)
    return sizes


def object_maps(G: FiniteGroupoid, H: FiniteGroupoid, bijective: bool) -> Iterator[tuple]:
    """Object maps that can underlie a functor (bijections when ``bijective``)."""
    n = G.n0
    if bijective and (n != H.n0 or G.n1 != H.n1):
        return
    if bijective:
        sg, sh = _component_sizes(G), _component_sizes(H)
        prof_g = [_profile(G, x, sg) for x in range(n)]
        prof_h = [_profile(H, y, sh) for y in range(H.n0)]
    f0 = [-1] * n
    taken = set()

    def rec(x):
        if x == n:
            yield tuple(f0)
            return
        for y in range(H.n0):
            if bijective and (y in taken or prof_g[x] != prof_h[y]):
                continue
            ok = True
            for z in range(x):
                for a, b in ((x, z), (z, x)):
                    na = len(G.hom(a, b))
                    fa, fb = (y, f0[z]) if a == x else (f0[z], y)
                    nb = len(H.hom(fa, fb))
                    if (bijective and na != nb) or (na and not nb):
                        ok = False
                        break
                if not ok:
                    break
            if not ok:
                continue
            f0[x] = y
            taken.add(y)
            yield from rec(x + 1)
            taken.discard(y)
            f0[x] = -1

    yield from rec(0)


class _ArrowSearch:
    """Arrow-map search for a fixed object map, with functoriality propagation."""

    def __init__(self, G, H, f0, bijective, allowed):
        self.G, self.H, self.f0 = G, H, f0
        self.bijective = bijective
        self.allowed = allowed
        self.f1 = [-1] * G.n1
        self.used: dict[int, int] = {}
        self.trail: list[int] = []

    def assign(self, g: int, v: int) -> bool:
        G, H, f0, f1 = self.G, self.H, self.f0, self.f1
        stack = [(g, v)]
        while stack:
            g, v = stack.pop()
            cur = f1[g]
            if cur >= 0:
                if cur != v:
                    return False
                continue
            if H.src[v] != f0[G.src[g]] or H.tgt[v] != f0[G.tgt[g]]:
                return False
            if self.allowed is not None and not self.allowed(g, v):
                return False
            if self.bijective:
                if v in self.used:
                    return False
                self.used[v] = g
            f1[g] = v
            self.trail.append(g)
            stack.append((G.inv[g], H.inv[v]))
            mg = G.mul[g]
            hv = H.mul[v]
            for h in G.out[G.tgt[g]]:
                if f1[h] >= 0:
                    stack.append((mg[h], hv[f1[h]]))
            for h in G.into[G.src[g]]:
                if f1[h] >= 0:
                    stack.append((G.mul[h][g], H.mul[f1[h]][v]))
        return True

    def undo(self, mark: int):
        while len(self.trail) > mark:
            g = self.trail.pop()
            if self.bijective:
                del self.used[self.f1[g]]
            self.f1[g] = -1

    def run(self, fixed: dict) -> Iterator[tuple]:
        G, H = self.G, self.H
        for x in range(G.n0):
            if not self.assign(G.unit[x], H.unit[self.f0[x]]):
                return
        for g, v in fixed.items():
            if not self.assign(g, v):
                return
        yield from self._rec(0)

    def _rec(self, start: int) -> Iterator[tuple]:
        f1 = self.f1
        g = start
        while g < len(f1) and f1[g] >= 0:
            g += 1
        if g == len(f1):
            yield tuple(f1)
            return
        G, H = self.G, self.H
        for v in H.hom(self.f0[G.src[g]], self.f0[G.tgt[g]]):
            mark = len(self.trail)
            if self.assign(g, v):
                yield from self._rec(g + 1)
            self.undo(mark)


def search_functors(G: FiniteGroupoid, H: FiniteGroupoid, *, bijective: bool = False,
                    object_map: Optional[tuple] = None, fixed: Optional[dict] = None,
                    allowed: Optional[Callable[[int, int], bool]] = None,
                    limit: Optional[int] = None) -> Iterator[StrictMorphism]:
    """Enumerate functors G → H in canonical order.

    ``fixed`` pins some arrow images, ``allowed(g, v)`` filters candidate images,
    ``bijective`` restricts to isomorphisms.
    """
    maps = [tuple(object_map)] if object_map is not None else object_maps(G, H, bijective)
    count = 0
    for f0 in maps:
        if bijective and len(set(f0)) != len(f0):
            continue
        for f1 in _ArrowSearch(G, H, f0, bijective, allowed).run(fixed or {}):
            yield StrictMorphism(G, H, f0, f1)
            count += 1
            if limit is not None and count >= limit:
                return


def find_isomorphism(G: FiniteGroupoid, H: FiniteGroupoid, **kw) -> Optional[StrictMorphism]:
    return next(search_functors(G, H, bijective=True, limit=1, **kw), None)


def automorphisms(A: FiniteGroupoid, limit: Optional[int] = None) -> list[StrictMorphism]:
    return sorted(search_functors(A, A, bijective=True, limit=limit))


def natural_transformations(f: StrictMorphism, g: StrictMorphism) -> list[NaturalTransformation]:
    """All 2-cells f ⇒ g, sorted by their component tuples."""
    A, B = f.dom, f.cod
    per_comp = []
    for comp in A.components():
        base = comp[0]
        tree = A.connecting_arrows(base)
        arrows = [a for x in comp for a in A.out[x]]
        options = []
        for s in B.hom(f.f0[base], g.f0[base]):
            vals = {}
            for y, h in tree.items():
                vals[y] = B.mul[B.mul[B.inv[f.f1[h]]][s]][g.f1[h]]
            if all(B.mul[f.f1[a]][vals[A.tgt[a]]] == B.mul[vals[A.src[a]]][g.f1[a]] for a in arrows):
                options.append(vals)
        per_comp.append(options)
    out = []
    for choice in itertools.product(*per_comp):
        sigma = [0] * A.n0
        for vals in choice:
            for y, s in vals.items():
                sigma[y] = s
        out.append(NaturalTransformation(f, g, sigma))
    out.sort(key=lambda r: r.sigma)
    return out
