"""JSON formats for groupoids, morphisms, covers, bands, cocycles and cochains.

Identifiers are strings; file order of objects and arrows is the canonical order.
Saved files use sorted keys and two-space indentation so output is byte-stable.
"""
from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Optional

from .core import FiniteGroupoid, OpenCover, StrictMorphism, make_cover


class ParseError(ValueError):
    """Input that cannot be read, with the offending field (and line, if known)."""

    def __init__(self, message: str, locus: str = "", line: Optional[int] = None):
        self.message = message
        self.locus = locus
        self.line = line
        where = locus + (f" (line {line})" if line else "")
        super().__init__(f"{where}: {message}" if where else message)


def _no_duplicates(pairs):
    out = {}
    for k, v in pairs:
        if k in out:
            raise ParseError(f"duplicate key {k!r}")
        out[k] = v
    return out


def loads(text: str) -> Any:
    try:
        return json.loads(text, object_pairs_hook=_no_duplicates)
    except json.JSONDecodeError as e:
        raise ParseError(e.msg, "json", e.lineno) from None


def load_json(path) -> Any:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise ParseError(str(e), str(path)) from None
    try:
        return loads(text)
    except ParseError as e:
        raise ParseError(e.message, f"{path}:{e.locus}" if e.locus != "json" else str(path), e.line) from None


def dumps(obj: Any) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def save_json(obj: Any, path) -> Path:
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    p.write_text(dumps(obj), encoding="utf-8")
    return p


def _ident(v, locus: str) -> str:
    if isinstance(v, bool) or not isinstance(v, (str, int)):
        raise ParseError(f"identifier must be a string, got {v!r}", locus)
    return str(v)


def _field(raw: dict, key: str, kind, locus: str):
    if not isinstance(raw, dict):
        raise ParseError("expected a JSON object", locus)
    if key not in raw:
        raise ParseError("missing field", f"{locus}.{key}" if locus else key)
    v = raw[key]
    if not isinstance(v, kind):
        raise ParseError(f"expected {kind.__name__}", f"{locus}.{key}" if locus else key)
    return v


def _lookup(index: dict, v, locus: str, what: str) -> int:
    k = _ident(v, locus)
    if k not in index:
        raise ParseError(f"unknown {what} {k!r}", locus)
    return index[k]


# --------------------------------------------------------------------------
# groupoids

def groupoid_from_dict(raw: dict, *, check: bool = True) -> FiniteGroupoid:
    objects = [_ident(o, f"objects[{i}]") for i, o in enumerate(_field(raw, "objects", list, ""))]
    oidx = {}
    for i, o in enumerate(objects):
        if o in oidx:
            raise ParseError(f"duplicate object {o!r}", f"objects[{i}]")
        oidx[o] = i
    arrows, src, tgt, aidx = [], [], [], {}
    for i, a in enumerate(_field(raw, "arrows", list, "")):
        loc = f"arrows[{i}]"
        name = _ident(_field(a, "id", (str, int), loc), f"{loc}.id")
        if name in aidx:
            raise ParseError(f"duplicate arrow {name!r}", loc)
        aidx[name] = i
        arrows.append(name)
        src.append(_lookup(oidx, _field(a, "src", (str, int), loc), f"{loc}.src", "object"))
        tgt.append(_lookup(oidx, _field(a, "tgt", (str, int), loc), f"{loc}.tgt", "object"))
    unit_raw = _field(raw, "unit", dict, "")
    unit = []
    for o in objects:
        if o not in unit_raw:
            raise ParseError(f"missing unit for object {o!r}", "unit")
        unit.append(_lookup(aidx, unit_raw[o], f"unit.{o}", "arrow"))
    extra = set(unit_raw) - set(objects)
    if extra:
        raise ParseError(f"unit given for unknown objects {sorted(extra)}", "unit")
    inv_raw = _field(raw, "inverse", dict, "")
    inv = []
    for a in arrows:
        if a not in inv_raw:
            raise ParseError(f"missing inverse for arrow {a!r}", "inverse")
        inv.append(_lookup(aidx, inv_raw[a], f"inverse.{a}", "arrow"))
    extra = set(inv_raw) - set(arrows)
    if extra:
        raise ParseError(f"inverse given for unknown arrows {sorted(extra)}", "inverse")
    n = len(arrows)
    mul = [[-1] * n for _ in range(n)]
    for i, entry in enumerate(_field(raw, "compose", list, "")):
        loc = f"compose[{i}]"
        if not isinstance(entry, list) or len(entry) != 3:
            raise ParseError("expected [g, h, gh]", loc)
        g, h, k = (_lookup(aidx, v, loc, "arrow") for v in entry)
        if tgt[g] != src[h]:
            raise ParseError(f"{arrows[g]},{arrows[h]} are not composable", loc)
        if mul[g][h] >= 0:
            raise ParseError(f"duplicate product for ({arrows[g]},{arrows[h]})", loc)
        mul[g][h] = k
    for g in range(n):
        for h in range(n):
            if tgt[g] == src[h] and mul[g][h] < 0:
                raise ParseError(f"missing product for ({arrows[g]},{arrows[h]})", "compose")
    return FiniteGroupoid(objects, arrows, src, tgt, mul, unit, inv, check=check)


def groupoid_to_dict(G: FiniteGroupoid) -> dict:
    return {
        "objects": list(G.objects),
        "arrows": [{"id": G.arrows[g], "src": G.objects[G.src[g]], "tgt": G.objects[G.tgt[g]]}
                   for g in range(G.n1)],
        "unit": {G.objects[x]: G.arrows[G.unit[x]] for x in range(G.n0)},
        "inverse": {G.arrows[g]: G.arrows[G.inv[g]] for g in range(G.n1)},
        "compose": [[G.arrows[g], G.arrows[h], G.arrows[G.mul[g][h]]]
                    for g in range(G.n1) for h in G.out[G.tgt[g]]],
    }


def load_groupoid(path, *, check: bool = True) -> FiniteGroupoid:
    raw = load_json(path)
    try:
        return groupoid_from_dict(raw, check=check)
    except ParseError as e:
        raise ParseError(e.message, f"{path}:{e.locus}" if e.locus else str(path), e.line) from None


# --------------------------------------------------------------------------
# morphisms and covers

def morphism_from_dict(raw: dict, dom: FiniteGroupoid, cod: FiniteGroupoid) -> StrictMorphism:
    f0_raw, f1_raw = _field(raw, "f0", dict, ""), _field(raw, "f1", dict, "")
    f0 = []
    for o in dom.objects:
        if o not in f0_raw:
            raise ParseError(f"missing image of object {o!r}", "f0")
        f0.append(_lookup(cod.obj_index, f0_raw[o], f"f0.{o}", "object"))
    f1 = []
    for a in dom.arrows:
        if a not in f1_raw:
            raise ParseError(f"missing image of arrow {a!r}", "f1")
        f1.append(_lookup(cod.arrow_index, f1_raw[a], f"f1.{a}", "arrow"))
    for key, known in (("f0", dom.obj_index), ("f1", dom.arrow_index)):
        extra = set(raw[key]) - set(known)
        if extra:
            raise ParseError(f"unknown entries {sorted(extra)}", key)
    return StrictMorphism(dom, cod, f0, f1)


def morphism_to_dict(f: StrictMorphism) -> dict:
    return {"f0": {f.dom.objects[x]: f.cod.objects[y] for x, y in enumerate(f.f0)},
            "f1": {f.dom.arrows[g]: f.cod.arrows[h] for g, h in enumerate(f.f1)}}


def cover_from_dict(raw: dict, K: FiniteGroupoid) -> OpenCover:
    subsets = _field(raw, "subsets", list, "")
    for i, s in enumerate(subsets):
        if not isinstance(s, list):
            raise ParseError("expected a list of object ids", f"subsets[{i}]")
    labels = raw.get("labels")
    return make_cover(K, [[_ident(o, f"subsets[{i}]") for o in s] for i, s in enumerate(subsets)], labels)


def cover_to_dict(U: OpenCover, K: FiniteGroupoid) -> dict:
    return {"subsets": [[K.objects[x] for x in s] for s in U.subsets], "labels": list(U.labels)}


# --------------------------------------------------------------------------
# bands, cocycles, cochains

def band_from_dict(raw: dict, K: FiniteGroupoid) -> list[int]:
    vals = _field(raw, "band", dict, "")
    out = []
    for a in K.arrows:
        if a not in vals:
            raise ParseError(f"missing band value for arrow {a!r}", "band")
        v = vals[a]
        if not isinstance(v, int) or isinstance(v, bool) or v < 0:
            raise ParseError("band value must be a coarse-class index", f"band.{a}")
        out.append(v)
    extra = set(vals) - set(K.arrows)
    if extra:
        raise ParseError(f"unknown arrows {sorted(extra)}", "band")
    return out


def band_to_dict(values, K: FiniteGroupoid) -> dict:
    return {"band": {K.arrows[g]: int(v) for g, v in enumerate(values)}}


def cocycle_from_dict(raw: dict, A: FiniteGroupoid, K: FiniteGroupoid):
    """Return (lambda as SAut indices per K-arrow, omega dict (ξ, η, a) → A-arrow).

    Entries with an identity argument may be omitted (they are forced to units).
    """
    lam_raw = _field(raw, "lambda", dict, "")
    lam = []
    for a in K.arrows:
        if a not in lam_raw:
            raise ParseError(f"missing automorphism for arrow {a!r}", "lambda")
        v = lam_raw[a]
        if not isinstance(v, int) or isinstance(v, bool) or v < 0:
            raise ParseError("expected an automorphism index", f"lambda.{a}")
        lam.append(v)
    extra = set(lam_raw) - set(K.arrows)
    if extra:
        raise ParseError(f"unknown arrows {sorted(extra)}", "lambda")
    omega = {}
    for i, entry in enumerate(_field(raw, "omega", list, "")):
        loc = f"omega[{i}]"
        if not isinstance(entry, list) or len(entry) != 4:
            raise ParseError("expected [xi, eta, a, arrow]", loc)
        xi = _lookup(K.arrow_index, entry[0], loc, "base arrow")
        eta = _lookup(K.arrow_index, entry[1], loc, "base arrow")
        a = _lookup(A.obj_index, entry[2], loc, "fiber object")
        val = _lookup(A.arrow_index, entry[3], loc, "fiber arrow")
        if K.tgt[xi] != K.src[eta]:
            raise ParseError(f"{K.arrows[xi]},{K.arrows[eta]} are not composable", loc)
        if (xi, eta, a) in omega:
            raise ParseError("duplicate entry", loc)
        omega[(xi, eta, a)] = val
    ids = K.identity_set()
    for xi in range(K.n1):
        for eta in K.out[K.tgt[xi]]:
            if xi in ids or eta in ids:
                continue
            for a in range(A.n0):
                if (xi, eta, a) not in omega:
                    raise ParseError(f"missing value at ({K.arrows[xi]},{K.arrows[eta]},{A.objects[a]})",
                                     "omega")
    return lam, omega


def cocycle_to_dict(lam_indices, omega: dict, A: FiniteGroupoid, K: FiniteGroupoid) -> dict:
    return {
        "lambda": {K.arrows[g]: int(i) for g, i in enumerate(lam_indices)},
        "omega": [[K.arrows[x], K.arrows[y], A.objects[a], A.arrows[v]]
                  for (x, y, a), v in sorted(omega.items())],
    }


def cochain_to_dict(c, K: FiniteGroupoid, labels) -> dict:
    from .cohomology import composable_tuples
    tuples = composable_tuples(K, c.degree, c.normalized)
    names = K.objects if c.degree == 0 else K.arrows
    return {
        "degree": c.degree,
        "normalized": c.normalized,
        "values": [{"tuple": [names[i] for i in t], "value": labels[v]} for t, v in zip(tuples, c.values)],
    }


def cochain_from_dict(raw: dict, K: FiniteGroupoid, labels):
    from .cohomology import Cochain, composable_tuples
    degree = _field(raw, "degree", int, "")
    normalized = bool(raw.get("normalized", False))
    tuples = composable_tuples(K, degree, normalized)
    names = K.obj_index if degree == 0 else K.arrow_index
    lidx = {str(l): i for i, l in enumerate(labels)}
    got = {}
    for i, entry in enumerate(_field(raw, "values", list, "")):
        loc = f"values[{i}]"
        t = tuple(_lookup(names, v, loc, "tuple entry") for v in _field(entry, "tuple", list, loc))
        if t in got:
            raise ParseError("duplicate tuple", loc)
        got[t] = _lookup(lidx, _field(entry, "value", (str, int), loc), loc, "value")
    missing = [t for t in tuples if t not in got]
    if missing or len(got) != len(tuples):
        raise ParseError(f"cochain must list exactly the {len(tuples)} composable tuples", "values")
    return Cochain(degree, tuple(got[t] for t in tuples), normalized)
