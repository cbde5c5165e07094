import itertools

import pytest
from hypothesis import given, strategies as st

from gpdext import catalog
from gpdext.autalg import enumerate_saut, n_group, star
from gpdext.core import (AssociativityViolation, CompositionDomainError, CompositionMismatch, DomainMismatch,
                         FiniteGroupoid, GroupoidValidationError, InverseViolation, InvalidCover,
                         NaturalTransformation, StrictMorphism, UnitViolation, check_axioms,
                         common_refinement, compose_morphisms, horizontal_compose, horizontal_inverse,
                         identity_morphism, identity_transformation, is_equivalence, make_cover, refine,
                         refinement_map, validate_groupoid, vertical_compose, vertical_inverse)
from gpdext.search import find_isomorphism, natural_transformations
from gpdext.serialize import groupoid_to_dict


def test_validate_group_and_pair_groupoid():
    assert validate_groupoid(catalog.named("Z2")).n1 == 2
    P = validate_groupoid(catalog.pair_groupoid(3))
    assert (P.n0, P.n1) == (3, 9)
    assert P.mul[P.arrow_index["(0,1)"]][P.arrow_index["(1,2)"]] == P.arrow_index["(0,2)"]


def test_validate_corrupted_table_reports_unit_or_inverse():
    raw = groupoid_to_dict(catalog.named("Z2"))
    raw["compose"] = [[g, h, "1" if (g, h) == ("1", "1") else k] for g, h, k in raw["compose"]]
    with pytest.raises(GroupoidValidationError) as exc:
        validate_groupoid(raw)
    kinds = {type(v) for v in exc.value.violations}
    assert kinds & {UnitViolation, InverseViolation}
    assert all(v.arrows for v in exc.value.violations)


def test_validation_error_kinds():
    G = catalog.named("Z3")
    mul = [row[:] for row in G.mul]
    mul[1][1] = 1
    bad = FiniteGroupoid(G.objects, G.arrows, G.src, G.tgt, mul, G.unit, G.inv, check=False)
    assert any(isinstance(v, (AssociativityViolation, InverseViolation)) for v in check_axioms(bad))
    P = catalog.pair_groupoid(2)
    mul = [row[:] for row in P.mul]
    mul[0][2] = 1 if mul[0][2] < 0 else -1
    broken = FiniteGroupoid(P.objects, P.arrows, P.src, P.tgt, mul, P.unit, P.inv, check=False)
    assert isinstance(check_axioms(broken)[0], CompositionDomainError)


def test_empty_groupoid_is_valid():
    E = validate_groupoid(catalog.empty_groupoid())
    assert (E.n0, E.n1) == (0, 0)
    assert refine(E, make_cover(E, []))[0].n0 == 0


@pytest.mark.parametrize("name", catalog.SMALL + ("S3", "D4", "Q8", "pair3", "Z2+pair2"))
def test_catalog_is_valid(name):
    assert check_axioms(catalog.named(name)) == []


def test_compose_with_identity():
    V = catalog.named("V4")
    for f in enumerate_saut(V).autos:
        idV = identity_morphism(V)
        assert compose_morphisms(idV, f) == f
        assert compose_morphisms(f, idV) == f


def test_swap_squared_is_identity():
    V = catalog.named("V4")
    # V4 arrows are named by bit pairs "ab"; swap the two bits
    swap = StrictMorphism(V, V, [0], [V.arrow_index[n[::-1]] for n in V.arrows])
    assert swap.is_functor() and swap != identity_morphism(V)
    assert compose_morphisms(swap, swap, debug=True) == identity_morphism(V)


def test_compose_domain_mismatch():
    with pytest.raises(DomainMismatch):
        compose_morphisms(identity_morphism(catalog.named("Z2")), identity_morphism(catalog.named("Z3")))


def test_vertical_identity_and_inverse():
    A = catalog.named("S3")
    for f in enumerate_saut(A).autos:
        one = identity_transformation(f)
        assert vertical_compose(one, one) == one
    for i, j, r in enumerate_saut(A).arrows:
        back = vertical_compose(r, vertical_inverse(r))
        assert back == identity_transformation(r.source)


def test_vertical_mismatch():
    A = catalog.named("Z3")
    autos = enumerate_saut(A).autos
    r = natural_transformations(autos[0], autos[0])[1]
    s = natural_transformations(autos[1], autos[1])[0]
    with pytest.raises(CompositionMismatch):
        vertical_compose(r, s)


def test_vertical_compose_on_z4_is_pointwise_and_natural():
    A = catalog.named("Z4")
    saut = enumerate_saut(A)
    for f, g, h in itertools.product(saut.autos, repeat=3):
        for r1 in natural_transformations(f, g):
            for r2 in natural_transformations(g, h):
                c = vertical_compose(r1, r2)
                assert c.sigma == (A.mul[r1.sigma[0]][r2.sigma[0]],)
                assert c.is_natural()


def test_horizontal_identity_and_inverse():
    A = catalog.named("S3")
    one = identity_transformation(identity_morphism(A))
    assert horizontal_compose(one, one) == one
    for _, _, r in enumerate_saut(A).arrows:
        ri = horizontal_inverse(r)
        assert ri.is_natural()
        assert horizontal_compose(ri, r) == one
        assert horizontal_compose(r, ri) == one


def test_n_group_of_z3_is_z3():
    A = catalog.named("Z3")
    ng = n_group(A)
    assert ng.order == 3
    for a, b in itertools.product(range(3), repeat=2):
        assert star(A, (a,), (b,)) == ((a + b) % 3,)


@pytest.mark.parametrize("name", ["Z4", "S3", "pair2", "Z2+Z2"])
def test_interchange_law(name):
    A = catalog.named(name)
    saut = enumerate_saut(A)
    cells = {}
    for i, j, r in saut.arrows:
        cells.setdefault(i, []).append((j, r))
    chains = [(r1, r2) for i in cells for j, r1 in cells[i] for _, r2 in cells[j]]
    for (r1, r2), (r3, r4) in itertools.product(chains, repeat=2):
        lhs = horizontal_compose(vertical_compose(r3, r4), vertical_compose(r1, r2))
        rhs = vertical_compose(horizontal_compose(r3, r1), horizontal_compose(r4, r2))
        assert lhs == rhs


def test_refine_identity_cover():
    K = catalog.named("Z2")
    KU, q = refine(K, make_cover(K, [["*"]]))
    assert find_isomorphism(KU, K) is not None
    assert is_equivalence(q)[0]


def test_refine_partition_cover_of_pair_groupoid():
    K = catalog.pair_groupoid(2)
    KU, q = refine(K, make_cover(K, [["0"], ["1"]]))
    assert (KU.n0, KU.n1) == (2, 4)
    assert find_isomorphism(KU, K) is not None


def test_refine_overlapping_cover():
    K = catalog.pair_groupoid(2)
    KU, q = refine(K, make_cover(K, [["0", "1"], ["1"]]))
    assert (KU.n0, KU.n1) == (3, 9)
    assert q.is_functor()
    assert is_equivalence(q) == (True, "equivalence")


def test_invalid_covers():
    K = catalog.pair_groupoid(2)
    with pytest.raises(InvalidCover):
        make_cover(K, [["0"]])
    with pytest.raises(InvalidCover):
        make_cover(K, [["0", "1"], []])
    with pytest.raises(InvalidCover):
        make_cover(K, [["0", "2"], ["1"]])


def test_natural_transformation_checks_naturality():
    A = catalog.named("S3")
    idA = identity_morphism(A)
    # a non-central element does not give a 2-cell id ⇒ id
    g = next(g for g in range(A.n1) if any(A.mul[g][h] != A.mul[h][g] for h in range(A.n1)))
    assert not NaturalTransformation(idA, idA, [g]).is_natural()


covers = st.lists(st.lists(st.sampled_from(["0", "1", "2"]), min_size=1, max_size=3, unique=True),
                  min_size=1, max_size=3)


def _complete(subsets):
    seen = set().union(*map(set, subsets))
    rest = [o for o in ("0", "1", "2") if o not in seen]
    return subsets + ([rest] if rest else [])


@given(covers)
def test_refinement_is_an_equivalence(subsets):
    K = catalog.disjoint_union(catalog.pair_groupoid(2), catalog.named("Z2"))
    K = FiniteGroupoid(["0", "1", "2"], K.arrows, K.src, K.tgt, K.mul, K.unit, K.inv)
    U = make_cover(K, _complete(subsets))
    KU, q = refine(K, U)
    assert check_axioms(KU) == []
    assert is_equivalence(q)[0]


@given(covers, covers)
def test_refinement_triangle_commutes(s1, s2):
    K = catalog.pair_groupoid(3)
    U, V = make_cover(K, _complete(s1)), make_cover(K, _complete(s2))
    W = common_refinement(U, V)
    KU, qU = refine(K, U)
    KW, qW = refine(K, W)
    iota = refinement_map(K, W, U, KW, KU)
    assert iota.is_functor()
    back = compose_morphisms(iota, qU)
    assert back == qW
