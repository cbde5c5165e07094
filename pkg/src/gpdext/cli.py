"""Command line front end: ``gpdext <command> [options]``.

Every command writes ``<out>/<command>.report.json`` plus witness files under ``<out>/<command>/``.
Exit status is 0 on success, 1 on a negative mathematical verdict (a witness is attached) and
2 on an input error.
"""
from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional

from . import __version__
from .abelian import FiniteAbelianGroup
from .autalg import SizeCapExceeded, center, coarse_saut, enumerate_saut
from .cohomology import (CapExceeded as CohomologyCapExceeded, CohomologyError, cohomology,
                         induced_action, trivial_module)
from .config import ConfigError, RunConfig, parse_bool
from .core import (FiniteGroupoid, GroupoidError, check_axioms, is_equivalence, refine)
from .extension import (Band, CocycleViolation, ExtensionError, GeneralizedCocycle, NotAProductBundle,
                        Obstructed, ObstructionNonzero, PreActionNotAutomorphism, as_product_bundle,
                        build_extension, check_band, check_generalized_cocycle, check_product_bundle,
                        class_of_cocycle, classify, cocycle_equivalent, count_liftings,
                        equivalent_over_refinements, extension_round_trip, lam_from_indices, lift_band,
                        obstruction, obstruction_class, refine_cocycle, trivial_band, trivialize_obstruction)
from .oracle import CapExceeded as CensusCapExceeded, census_extensions
from .serialize import (ParseError, band_from_dict, cochain_to_dict, cocycle_from_dict, cocycle_to_dict,
                        cover_from_dict, dumps, groupoid_to_dict, load_groupoid, load_json,
                        morphism_to_dict, save_json)

TOOL = "gpdext"


class UnknownCommand(Exception):
    pass


class InputError(Exception):
    """Bad input that is not a parse error (inconsistent files, caps, invalid band)."""

    def __init__(self, message: str, details=None):
        super().__init__(message)
        self.details = details


class Negative(Exception):
    """A mathematical negative verdict; ``result`` carries the witness."""

    def __init__(self, result: dict):
        super().__init__(result.get("verdict", "negative"))
        self.result = result


@dataclass
class Context:
    command: str
    args: argparse.Namespace
    cfg: RunConfig
    files: list[str] = field(default_factory=list)

    @property
    def out(self) -> Path:
        return Path(self.cfg.out)

    def write(self, name: str, obj) -> str:
        rel = f"{self.command}/{name}"
        save_json(obj, self.out / rel)
        self.files.append(rel)
        return rel


# --------------------------------------------------------------------------
# loading helpers

def _groupoid(path: Optional[str], what: str) -> FiniteGroupoid:
    if not path:
        raise InputError(f"--{what} is required")
    G = load_groupoid(path, check=False)
    bad = check_axioms(G)
    if bad:
        raise InputError(f"{path} is not a groupoid", [_violation(v, G) for v in bad])
    return G


def _violation(err: GroupoidError, G: FiniteGroupoid) -> dict:
    return {"kind": err.kind, "arrows": [G.arrows[g] for g in err.arrows if 0 <= g < G.n1],
            "message": str(err)}


def _fiber(ctx: Context) -> FiniteGroupoid:
    A = _groupoid(ctx.args.groupoid, "groupoid")
    enumerate_saut(A, ctx.cfg.cap_saut)
    return A


def _band(ctx: Context, A: FiniteGroupoid, K: FiniteGroupoid) -> Band:
    if getattr(ctx.args, "band", None):
        return Band(K, tuple(band_from_dict(load_json(ctx.args.band), K)))
    return trivial_band(K)


def _valid_band(ctx: Context, A, K) -> Band:
    band = _band(ctx, A, K)
    bad = check_band(A, band)
    if bad:
        raise InputError("invalid band", [_viol(v, K) for v in bad])
    return band


def _cocycle(path: str, A: FiniteGroupoid, K: FiniteGroupoid) -> GeneralizedCocycle:
    lam_idx, entries = cocycle_from_dict(load_json(path), A, K)
    saut = enumerate_saut(A)
    for g, i in enumerate(lam_idx):
        if i >= saut.order:
            raise ParseError(f"automorphism index {i} out of range (|SAut⁰| = {saut.order})",
                             f"lambda.{K.arrows[g]}")
    gc = GeneralizedCocycle.from_entries(A, K, lam_from_indices(A, lam_idx), entries, check=False)
    bad = gc.structure_problems()
    if bad:
        raise InputError(f"{path}: {bad[0].message}", [_viol(v, K, A) for v in bad])
    return gc


_A_SLOTS = {"cocycle": {3: "obj"}, "inverse-pair": {1: "obj"}, "endpoints": {2: "obj"},
            "naturality": {2: "arrow"}}


def _viol(v, K: FiniteGroupoid, A: Optional[FiniteGroupoid] = None) -> dict:
    slots = _A_SLOTS.get(v.kind, {})
    where = []
    for i, x in enumerate(v.where):
        kind = slots.get(i) if A is not None else None
        if kind == "obj":
            where.append(A.objects[x])
        elif kind == "arrow":
            where.append(A.arrows[x])
        else:
            where.append(K.arrows[x] if 0 <= x < K.n1 else x)
    return {"kind": v.kind, "where": where, "message": v.message}


def _cocycle_dict(gc: GeneralizedCocycle) -> dict:
    return cocycle_to_dict(gc.lam_indices(), gc.omega_entries(), gc.A, gc.K)


def _cochain_file(ctx: Context, name: str, c, K, labels) -> str:
    return ctx.write(name, cochain_to_dict(c, K, labels))


def _generators(n: int, mul, identity: int) -> list[int]:
    """Greedy generating set in canonical order."""
    seen = {identity}
    gens = []
    for g in range(n):
        if g in seen:
            continue
        gens.append(g)
        frontier = list(seen)
        while frontier:
            nxt = []
            for x in frontier:
                for s in gens:
                    y = mul[x][s]
                    if y not in seen:
                        seen.add(y)
                        nxt.append(y)
            frontier = nxt
    return gens


def _decomposition(n: int, mul, identity: int) -> Optional[list[int]]:
    if any(mul[a][b] != mul[b][a] for a in range(n) for b in range(n)):
        return None
    return list(FiniteAbelianGroup([str(i) for i in range(n)], mul, identity).invariant_factors)


# --------------------------------------------------------------------------
# commands

def cmd_validate(ctx: Context) -> dict:
    if not ctx.args.groupoid:
        raise InputError("--groupoid is required")
    G = load_groupoid(ctx.args.groupoid, check=False)
    bad = check_axioms(G)
    if bad:
        raise InputError("groupoid axioms violated", [_violation(v, G) for v in bad])
    return {"valid": True, "objects": G.n0, "arrows": G.n1, "components": len(G.components())}


def cmd_center(ctx: Context) -> dict:
    A = _groupoid(ctx.args.groupoid, "groupoid")
    cen = center(A)
    E = cen.group
    gens = [cen.sections[g] for g in E.generators]
    return {"group_order": cen.order, "decomposition": list(E.invariant_factors),
            "generators": [{A.objects[a]: A.arrows[z] for a, z in enumerate(s)} for s in gens],
            "elements": list(E.labels)}


def cmd_aut(ctx: Context) -> dict:
    A = _fiber(ctx)
    saut = enumerate_saut(A)
    return {"group_order": saut.order,
            "generators": _generators(saut.order, saut.mul, 0),
            "decomposition": _decomposition(saut.order, saut.mul, 0),
            "automorphisms": [dict(index=i, **morphism_to_dict(f)) for i, f in enumerate(saut.autos)]}


def cmd_coarse_aut(ctx: Context) -> dict:
    A = _fiber(ctx)
    co = coarse_saut(A)
    return {"group_order": co.order,
            "generators": _generators(co.order, co.mul, 0),
            "decomposition": _decomposition(co.order, co.mul, 0),
            "representatives": co.reps, "cosets": co.cosets, "multiplication": co.mul,
            "inner_image": sorted(co.image)}


def cmd_cohomology(ctx: Context) -> dict:
    a, cfg = ctx.args, ctx.cfg
    K = _groupoid(a.base, "base")
    if a.trivial:
        try:
            orders = [int(x) for x in a.trivial.split(",") if x.strip()]
        except ValueError:
            raise InputError("--trivial expects comma-separated cyclic orders") from None
        if not orders or any(d < 2 for d in orders):
            raise InputError("--trivial expects orders ≥ 2")
        m = trivial_module(K, FiniteAbelianGroup.cyclic_product(orders), cfg.convention)
        coefficients = {"trivial": orders}
    elif a.groupoid:
        A = _fiber(ctx)
        band = _valid_band(ctx, A, K)
        gc = lift_band(A, band)
        m = induced_action(A, gc.lam, K, cfg.convention)
        coefficients = {"center_of": a.groupoid, "band": list(band.values)}
    else:
        raise InputError("give --trivial ORDERS or --groupoid A.json [--band]")
    H = cohomology(m, a.degree, cfg.backend, cfg.normalized, cfg.cap_cohomology)
    files = [_cochain_file(ctx, f"generator_{i}.cochain.json", z, K, m.E.labels)
             for i, z in enumerate(H.generators)]
    return {"degree": a.degree, "invariant_factors": list(H.invariant_factors), "order": H.order,
            "coefficients": coefficients, "generator_files": files}


def cmd_band_check(ctx: Context) -> dict:
    A = _fiber(ctx)
    K = _groupoid(ctx.args.base, "base")
    band = _band(ctx, A, K)
    bad = check_band(A, band)
    if bad:
        raise Negative({"valid": False, "violations": [_viol(v, K) for v in bad]})
    return {"valid": True, "band": list(band.values), "liftings": count_liftings(A, band)}


def cmd_lift(ctx: Context) -> dict:
    A = _fiber(ctx)
    K = _groupoid(ctx.args.base, "base")
    band = _valid_band(ctx, A, K)
    gc = lift_band(A, band)
    f = ctx.write("lift.cocycle.json", _cocycle_dict(gc))
    return {"band": list(band.values), "lambda": list(gc.lam_indices()), "liftings": count_liftings(A, band),
            "satisfies_cocycle_condition": not check_generalized_cocycle(gc, limit=1), "cocycle_file": f}


def _fiber_base_cocycle(ctx: Context, attr: str = "cocycle"):
    A = _fiber(ctx)
    K = _groupoid(ctx.args.base, "base")
    path = getattr(ctx.args, attr, None)
    if not path:
        raise InputError(f"--{attr} is required")
    return A, K, _cocycle(path, A, K)


def cmd_check_cocycle(ctx: Context) -> dict:
    A, K, gc = _fiber_base_cocycle(ctx)
    bad = check_generalized_cocycle(gc, limit=1)
    if bad:
        raise Negative({"valid": False, "violation": _viol(bad[0], K, A)})
    return {"valid": True, "band": list(gc.band().values)}


def cmd_build(ctx: Context) -> dict:
    A, K, gc = _fiber_base_cocycle(ctx)
    try:
        E = build_extension(gc)
    except CocycleViolation as e:
        raise Negative({"built": False, "violation": _viol(e.witness, K, A)}) from None
    problems = check_product_bundle(E.G, A, K)
    f = ctx.write("extension.groupoid.json", groupoid_to_dict(E.G))
    return {"built": True, "objects": E.G.n0, "arrows": E.G.n1, "product_bundle_problems": problems,
            "groupoid_file": f}


def cmd_extract(ctx: Context) -> dict:
    A = _fiber(ctx)
    K = _groupoid(ctx.args.base, "base")
    G = _groupoid(ctx.args.total, "total")
    try:
        Gp = as_product_bundle(G, A, K)
        rt = extension_round_trip(Gp, A, K)
    except (NotAProductBundle, PreActionNotAutomorphism) as e:
        detail = e.witness if isinstance(e.witness, list) else [str(e)]
        raise Negative({"product_bundle": False, "problems": detail}) from None
    f = ctx.write("extracted.cocycle.json", _cocycle_dict(rt.cocycle))
    g = ctx.write("round_trip.morphism.json", morphism_to_dict(rt.iso))
    return {"product_bundle": True, "band": list(rt.cocycle.band().values),
            "satisfies_cocycle_condition": not check_generalized_cocycle(rt.cocycle, limit=1),
            "cocycle_file": f, "isomorphism_file": g}


def _source_cocycle(ctx: Context):
    if ctx.args.cocycle:
        return _fiber_base_cocycle(ctx)
    A = _fiber(ctx)
    K = _groupoid(ctx.args.base, "base")
    return A, K, lift_band(A, _valid_band(ctx, A, K))


def cmd_obstruction(ctx: Context) -> dict:
    A, K, gc = _source_cocycle(ctx)
    obs = obstruction(gc)
    coords, H3 = obstruction_class(obs, ctx.cfg.backend)
    labels = obs.module.E.labels
    xi = _cochain_file(ctx, "xi.cochain.json", obs.cochain(True), K, labels)
    result = {"class": list(coords), "H3": list(H3.invariant_factors), "xi_is_identity": obs.is_identity(),
              "cyclic_variants_agree": not obs.variant_mismatches(), "xi_file": xi}
    if any(coords):
        result["verdict"] = "obstructed"
        raise Negative(result)
    c, _ = trivialize_obstruction(gc, obs, ctx.cfg.backend)
    result["witness_file"] = _cochain_file(ctx, "c.cochain.json", c, K, labels)
    result["verdict"] = "class = 0, witness c attached"
    return result


def cmd_trivialize(ctx: Context) -> dict:
    A, K, gc = _source_cocycle(ctx)
    obs = obstruction(gc)
    try:
        c, fixed = trivialize_obstruction(gc, obs, ctx.cfg.backend)
    except ObstructionNonzero as e:
        raise Negative({"verdict": "obstructed", "class": list(e.args[0])}) from None
    labels = obs.module.E.labels
    return {"c_file": _cochain_file(ctx, "c.cochain.json", c, K, labels),
            "cocycle_file": ctx.write("trivialized.cocycle.json", _cocycle_dict(fixed)),
            "satisfies_cocycle_condition": not check_generalized_cocycle(fixed, limit=1)}


def _rho_dict(rho, A, K) -> dict:
    return {K.arrows[g]: {A.objects[a]: A.arrows[s] for a, s in enumerate(r.sigma)} for g, r in enumerate(rho)}


def cmd_equivalent(ctx: Context) -> dict:
    A, K, gc1 = _fiber_base_cocycle(ctx)
    if not ctx.args.other:
        raise InputError("--other is required")
    gc2 = _cocycle(ctx.args.other, A, K)
    for gc in (gc1, gc2):
        bad = check_generalized_cocycle(gc, limit=1)
        if bad:
            raise InputError("input is not a generalized cocycle", [_viol(bad[0], K, A)])
    if gc1.band() != gc2.band():
        raise Negative({"equivalent": False, "reason": "different bands",
                        "bands": [list(gc1.band().values), list(gc2.band().values)]})
    rho = cocycle_equivalent(gc1, gc2)
    if rho is None:
        res = classify(A, gc1.band(), backend=ctx.cfg.backend, verify=False)
        coords = [list(res.classes[i].coords) for i in (class_of_cocycle(res, gc1), class_of_cocycle(res, gc2))]
        raise Negative({"equivalent": False, "reason": "no 2-cell family ρ satisfies the equivalence condition",
                        "class_coordinates": coords})
    return {"equivalent": True, "witness_file": ctx.write("rho.json", _rho_dict(rho, A, K))}


def cmd_classify(ctx: Context) -> dict:
    A = _fiber(ctx)
    K = _groupoid(ctx.args.base, "base")
    band = _valid_band(ctx, A, K)
    try:
        res = classify(A, band, backend=ctx.cfg.backend)
    except Obstructed as e:
        raise Negative({"verdict": "obstructed", "class": list(e.args[0])}) from None
    classes = []
    for i, c in enumerate(res.classes):
        classes.append({"coords": list(c.coords),
                        "cocycle_file": ctx.write(f"class_{i}.cocycle.json", _cocycle_dict(c.cocycle)),
                        "groupoid_file": ctx.write(f"class_{i}.groupoid.json", groupoid_to_dict(c.extension.G))})
    return {"band": list(band.values), "H2": list(res.H2.invariant_factors), "count": res.count,
            "classes": classes, "verification": res.verification}


def cmd_refine(ctx: Context) -> dict:
    K = _groupoid(ctx.args.base, "base")
    if not ctx.args.cover:
        raise InputError("--cover is required")
    U = cover_from_dict(load_json(ctx.args.cover), K)
    KU, q = refine(K, U)
    ok, why = is_equivalence(q)
    return {"objects": KU.n0, "arrows": KU.n1, "q_is_equivalence": ok, "detail": why,
            "groupoid_file": ctx.write("refined.groupoid.json", groupoid_to_dict(KU)),
            "projection_file": ctx.write("q.morphism.json", morphism_to_dict(q))}


def cmd_refine_pullback(ctx: Context) -> dict:
    A, K, gc = _fiber_base_cocycle(ctx)
    if not ctx.args.cover:
        raise InputError("--cover is required")
    U = cover_from_dict(load_json(ctx.args.cover), K)
    KU, q, gcU = refine_cocycle(gc, U)
    result = {"refined_objects": KU.n0, "refined_arrows": KU.n1,
              "still_cocycle": not check_generalized_cocycle(gcU, limit=1),
              "base_file": ctx.write("refined.groupoid.json", groupoid_to_dict(KU)),
              "cocycle_file": ctx.write("pullback.cocycle.json", _cocycle_dict(gcU))}
    if ctx.args.other:
        gc2 = _cocycle(ctx.args.other, A, K)
        V = cover_from_dict(load_json(ctx.args.cover2), K) if ctx.args.cover2 else U
        _, _, gcV = refine_cocycle(gc2, V)
        verdict = equivalent_over_refinements(gcU, gcV)
        base = cocycle_equivalent(gc, gc2) is not None if gc.band() == gc2.band() else False
        result.update({"equivalent_on_common_refinement": verdict.equivalent,
                       "equivalent_on_base": base, "stable": verdict.equivalent == base})
        if not verdict.equivalent:
            result["verdict"] = "not equivalent on the common refinement"
            raise Negative(result)
        result["witness_file"] = ctx.write("rho.json", _rho_dict(verdict.witness, A, verdict.refined_base))
    if not result["still_cocycle"]:
        raise Negative(result)
    return result


def cmd_census(ctx: Context) -> dict:
    A = _fiber(ctx)
    K = _groupoid(ctx.args.base, "base")
    band = _valid_band(ctx, A, K).values if ctx.args.band else None
    res = census_extensions(A, K, band, cap=ctx.cfg.cap_census)
    classes = []
    for i, cl in enumerate(res.classes):
        G = res.structures[cl[0]]
        classes.append({"size": len(cl), "band": list(res.bands[cl[0]]),
                        "groupoid_file": ctx.write(f"class_{i}.groupoid.json", groupoid_to_dict(G))})
    return {"band_filter": list(band) if band is not None else None, "structures": res.n_structures,
            "count": res.n_classes, "classes": classes}


COMMANDS: dict[str, Callable[[Context], dict]] = {
    "validate": cmd_validate,
    "center": cmd_center,
    "aut": cmd_aut,
    "coarse-aut": cmd_coarse_aut,
    "cohomology": cmd_cohomology,
    "band-check": cmd_band_check,
    "lift": cmd_lift,
    "check-cocycle": cmd_check_cocycle,
    "build": cmd_build,
    "extract": cmd_extract,
    "obstruction": cmd_obstruction,
    "trivialize": cmd_trivialize,
    "equivalent": cmd_equivalent,
    "classify": cmd_classify,
    "refine": cmd_refine,
    "refine-pullback": cmd_refine_pullback,
    "census": cmd_census,
}

INPUT_ERRORS = (ParseError, InputError, ConfigError, SizeCapExceeded, CohomologyCapExceeded,
                CensusCapExceeded, GroupoidError, CohomologyError, ExtensionError)


def dispatch(command: str, args: argparse.Namespace, cfg: RunConfig) -> tuple[int, dict]:
    """Run one command; returns (exit status, report) and writes the report file."""
    if command not in COMMANDS:
        raise UnknownCommand(command)
    ctx = Context(command, args, cfg)
    status, body = 0, {}
    try:
        body = COMMANDS[command](ctx)
        outcome = "ok"
    except Negative as e:
        status, body, outcome = 1, e.result, "negative"
    except INPUT_ERRORS as e:
        status, outcome = 2, "input-error"
        body = {"error": type(e).__name__, "message": str(e)}
        details = getattr(e, "details", None)
        if details:
            body["details"] = details
    report = {"tool": TOOL, "version": __version__, "command": command, "config": cfg.flags(),
              "inputs": _inputs(args), "status": outcome, "result": body, "files": sorted(ctx.files)}
    save_json(report, ctx.out / f"{command}.report.json")
    return status, report


def _inputs(args: argparse.Namespace) -> dict:
    keep = ("groupoid", "base", "total", "band", "cocycle", "other", "cover", "cover2", "degree", "trivial")
    return {k: getattr(args, k) for k in keep if getattr(args, k, None) is not None}


# --------------------------------------------------------------------------
# argument parsing

def _bool_arg(text: str) -> bool:
    try:
        return parse_bool(text)
    except ConfigError as e:
        raise argparse.ArgumentTypeError(str(e)) from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--cap-saut", type=int)
    common.add_argument("--cap-cohomology", type=int)
    common.add_argument("--cap-census", type=int)
    common.add_argument("--backend", choices=("snf", "exhaustive", "both"))
    common.add_argument("--normalized", type=_bool_arg, metavar="true|false")
    common.add_argument("--convention", choices=("A1", "flipped"))
    common.add_argument("--seed", type=int)
    common.add_argument("--out", help="output directory for reports and witness files")
    common.add_argument("-v", "--verbose", action="count", default=None, dest="verbosity")

    parser = argparse.ArgumentParser(prog=TOOL, description="Finite groupoid extension engine.")
    parser.add_argument("--version", action="version", version=f"{TOOL} {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="command")

    def add(name, help_, *opts):
        p = sub.add_parser(name, help=help_, parents=[common])
        for o in opts:
            p.add_argument(f"--{o}")
        return p

    add("validate", "check groupoid axioms", "groupoid")
    add("center", "the center Z_A", "groupoid")
    add("aut", "strict automorphisms SAut⁰(A)", "groupoid")
    add("coarse-aut", "coarse SAut(A)", "groupoid")
    p = add("cohomology", "H^n of K with trivial or Z_A coefficients", "base", "groupoid", "band", "trivial")
    p.add_argument("--degree", type=int, required=True)
    add("band-check", "check a band K → coarse SAut(A)", "groupoid", "base", "band")
    add("lift", "canonical lifting of a band", "groupoid", "base", "band")
    add("check-cocycle", "check the generalized cocycle condition", "groupoid", "base", "cocycle")
    add("build", "build the extension groupoid of a cocycle", "groupoid", "base", "cocycle")
    add("extract", "extract (Λ, Ω) from a product bundle", "groupoid", "base", "total")
    add("obstruction", "obstruction class in H³", "groupoid", "base", "cocycle", "band")
    add("trivialize", "correct Ω by a 2-cochain so that Ξ vanishes", "groupoid", "base", "cocycle", "band")
    add("equivalent", "decide equivalence of two cocycles", "groupoid", "base", "cocycle", "other")
    add("classify", "all extensions with a given band", "groupoid", "base", "band")
    add("refine", "refinement groupoid K[U]", "base", "cover")
    add("refine-pullback", "pull cocycles back to refinements", "groupoid", "base", "cocycle", "cover",
        "other", "cover2")
    add("census", "brute-force census of product extensions", "groupoid", "base", "band")
    return parser


def config_from_args(args: argparse.Namespace, env=None) -> RunConfig:
    cfg = RunConfig.from_env(env)
    return cfg.override(cap_saut=args.cap_saut, cap_cohomology=args.cap_cohomology,
                        cap_census=args.cap_census, backend=args.backend, normalized=args.normalized,
                        convention=args.convention, seed=args.seed, out=args.out, verbosity=args.verbosity)


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if not args.command:
        parser.print_help(sys.stderr)
        return 2
    try:
        cfg = config_from_args(args)
    except ConfigError as e:
        print(f"{TOOL}: {e}", file=sys.stderr)
        return 2
    status, report = dispatch(args.command, args, cfg)
    print(f"{args.command}: {report['status']} -> {Path(cfg.out) / (args.command + '.report.json')}")
    if cfg.verbosity:
        sys.stdout.write(dumps(report))
    return status


if __name__ == "__main__":
    sys.exit(main())
