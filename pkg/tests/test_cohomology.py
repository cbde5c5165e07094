import random
from math import gcd

import pytest
from hypothesis import given, strategies as st

from gpdext import catalog
from gpdext.abelian import FiniteAbelianGroup
from gpdext.cohomology import (BackendDisagreement, CapExceeded, Cochain, DegreeMismatch, KModule, NotACocycle,
                               add_cochains, all_modules, class_of, coboundary, cohomology, composable_tuples,
                               describe_group, evaluate, is_cocycle, trivial_module, zero_cochain)


def _E(*orders):
    return FiniteAbelianGroup.cyclic_product(orders)


def _cyclic_trivial(m, n, k):
    if k == 0:
        return (n,)
    g = gcd(m, n)
    return (g,) if g > 1 else ()


@pytest.mark.parametrize("m", [1, 2, 3, 4])
@pytest.mark.parametrize("n", [2, 3, 4])
@pytest.mark.parametrize("k", [0, 1, 2, 3])
def test_cyclic_groups_trivial_coefficients(m, n, k):
    mod = trivial_module(catalog.cyclic(m), _E(n))
    assert cohomology(mod, k).invariant_factors == _cyclic_trivial(m, n, k)


def test_sign_action_on_z4():
    # ℤ/2 acting on ℤ/4 by negation
    E = _E(4)
    neg = tuple(E.neg)
    mod = KModule(catalog.cyclic(2), E, [tuple(range(4)), neg])
    assert mod.problems() == []
    assert [cohomology(mod, k).invariant_factors for k in range(4)] == [(2,), (2,), (2,), (2,)]


@pytest.mark.parametrize("k", [0, 1, 2, 3])
def test_groupoid_invariance(k):
    E = _E(2)
    point = cohomology(trivial_module(catalog.named("unit1"), E), k).invariant_factors
    assert cohomology(trivial_module(catalog.pair_groupoid(3), E), k).invariant_factors == point
    z2 = cohomology(trivial_module(catalog.named("Z2"), E), k).invariant_factors
    both = cohomology(trivial_module(catalog.named("Z2+Z2"), E), k).invariant_factors
    assert both == z2 + z2


def test_unit_groupoid_has_only_h0():
    mod = trivial_module(catalog.unit_groupoid(2), _E(3))
    assert cohomology(mod, 0).invariant_factors == (3, 3)
    assert cohomology(mod, 1).order == 1


def test_composable_tuples_counts():
    P = catalog.pair_groupoid(2)
    assert [len(composable_tuples(P, n)) for n in range(4)] == [2, 4, 8, 16]
    Z3 = catalog.cyclic(3)
    assert [len(composable_tuples(Z3, n, normalized=True)) for n in range(4)] == [1, 2, 4, 8]


MODULES = [m for K in ("Z2", "Z3", "Z4", "pair2", "Z2+unit1") for orders in ((2,), (4,), (2, 2))
           for m in all_modules(catalog.named(K), _E(*orders), limit=4)]


@given(st.sampled_from(MODULES), st.integers(0, 3), st.integers(0, 2**32))
def test_dd_is_zero(m, n, seed):
    r = random.Random(seed)
    c = Cochain(n, tuple(r.randrange(m.E.order) for _ in composable_tuples(m.K, n)))
    assert is_cocycle(m, coboundary(m, c))


@given(st.sampled_from(MODULES), st.integers(0, 3))
def test_normalized_matches_unnormalized(m, n):
    assert cohomology(m, n).invariant_factors == cohomology(m, n, normalized=True).invariant_factors


@given(st.sampled_from(MODULES), st.integers(1, 3), st.integers(0, 2**32))
def test_coboundaries_have_witnesses(m, n, seed):
    r = random.Random(seed)
    for normalized in (False, True):
        tuples = composable_tuples(m.K, n - 1, normalized)
        c = Cochain(n - 1, tuple(r.randrange(m.E.order) for _ in tuples), normalized)
        z = coboundary(m, c)
        H = cohomology(m, n, normalized=normalized)
        coords, w = class_of(m, H, z)
        assert not any(coords)
        assert coboundary(m, w) == z


@given(st.sampled_from(MODULES), st.integers(1, 3))
def test_representatives_round_trip(m, n):
    H = cohomology(m, n)
    for coords in H.elements():
        z = H.representative(coords)
        assert is_cocycle(m, z)
        assert H.coordinates(z) == coords
        assert (H.witness(z) is None) == any(coords)


def test_backends_agree_and_both_backend():
    m = trivial_module(catalog.cyclic(2), _E(2))
    H = cohomology(m, 2, "both")
    assert H.invariant_factors == (2,)
    assert repr(H).startswith("H^2[snf]")
    assert cohomology(m, 2, "exhaustive").invariant_factors == (2,)


def test_exhaustive_cap():
    m = trivial_module(catalog.cyclic(4), _E(4))
    with pytest.raises(CapExceeded):
        cohomology(m, 3, "exhaustive", cap=64)


def test_errors():
    m = trivial_module(catalog.cyclic(2), _E(2))
    H = cohomology(m, 2)
    with pytest.raises(DegreeMismatch):
        H.coordinates(zero_cochain(m, 1))
    bad = Cochain(2, (0, 1, 0, 0))
    assert not is_cocycle(m, bad)
    with pytest.raises(NotACocycle):
        H.coordinates(bad)
    with pytest.raises(DegreeMismatch):
        coboundary(m, Cochain(2, (0,)))
    with pytest.raises(DegreeMismatch):
        add_cochains(m, zero_cochain(m, 1), zero_cochain(m, 2))
    with pytest.raises(DegreeMismatch):
        cohomology(m, -1)
    with pytest.raises(ValueError):
        cohomology(m, 1, "magic")
    with pytest.raises(ValueError):
        KModule(m.K, m.E, m.action, convention="right")
    assert issubclass(BackendDisagreement, Exception)


def test_normalized_cochains_vanish_on_identities():
    m = trivial_module(catalog.cyclic(3), _E(3))
    z = cohomology(m, 2, normalized=True).generators[0]
    assert evaluate(m, z, (0, 1)) == m.E.zero
    assert describe_group(()) == "0" and describe_group((2, 4)) == "Z/2 × Z/4"


def test_conventions_agree_on_orders():
    for m in MODULES:
        flipped = KModule(m.K, m.E, [m.twist[g] for g in range(m.K.n1)], convention="flipped")
        assert flipped.problems() == []
        for n in range(3):
            assert cohomology(flipped, n).invariant_factors == cohomology(m, n).invariant_factors
