from math import gcd

import numpy as np
import pytest
from hypothesis import given, strategies as st
from sympy import Matrix, ZZ
from sympy.matrices.normalforms import smith_normal_form as sympy_snf

from gpdext.abelian import (FiniteAbelianGroup, canonical_decomposition, diagonalize_mod, invariant_factors_of,
                            smith_normal_form, xgcd)

matrices = st.integers(1, 4).flatmap(
    lambda r: st.integers(1, 4).flatmap(
        lambda c: st.lists(st.lists(st.integers(-12, 12), min_size=c, max_size=c), min_size=r, max_size=r)))


@given(st.integers(-50, 50), st.integers(-50, 50))
def test_xgcd(a, b):
    g, x, y = xgcd(a, b)
    assert g == gcd(a, b) and a * x + b * y == g


@given(matrices)
def test_snf_matches_sympy(M):
    U, D, V, Ui, Vi = smith_normal_form(M)
    assert (np.array(U) @ np.array(M) @ np.array(V) == np.array(D)).all()
    assert (np.array(U) @ np.array(Ui) == np.eye(len(M), dtype=int)).all()
    assert (np.array(V) @ np.array(Vi) == np.eye(len(M[0]), dtype=int)).all()
    k = min(len(M), len(M[0]))
    ours = [D[i][i] for i in range(k)]
    for i in range(k - 1):
        assert ours[i + 1] % ours[i] == 0 if ours[i] else ours[i + 1] == 0
    S = sympy_snf(Matrix(M), domain=ZZ)
    theirs = [abs(int(S[i, i])) for i in range(k)]
    assert ours == theirs


@given(matrices, st.sampled_from([2, 4, 6, 8, 12]))
def test_diagonalize_mod_is_an_equivalence(M, N):
    U, diag, V = diagonalize_mod(M, N, track_u=True, track_v=True)
    D = np.zeros((len(M), len(M[0])), dtype=np.int64)
    for i, d in enumerate(diag):
        D[i, i] = d
    assert ((U @ np.array(M) @ V - D) % N == 0).all()
    # over ℤ/N the diagonal determines the cokernel: compare with the integer Smith form
    ours = sorted(gcd(d, N) for d in diag)
    S = sympy_snf(Matrix(M), domain=ZZ)
    theirs = sorted(gcd(int(S[i, i]), N) for i in range(len(diag)))
    assert _cokernel(ours, N) == _cokernel(theirs, N)


def _cokernel(ds, N):
    return invariant_factors_of([N // gcd(d, N) for d in ds])


@pytest.mark.parametrize("orders,expected", [
    ((2, 3), (6,)), ((2, 2), (2, 2)), ((4, 6), (2, 12)), ((2, 4, 8), (2, 4, 8)), ((1, 5), (5,)), ((), ()),
    ((6, 10, 15), (30, 30)),
])
def test_invariant_factors(orders, expected):
    assert invariant_factors_of(orders) == expected
    assert FiniteAbelianGroup.cyclic_product(orders).invariant_factors == expected


@given(st.lists(st.integers(1, 6), min_size=1, max_size=3))
def test_decomposition_coordinates_are_a_group_isomorphism(orders):
    E = FiniteAbelianGroup.cyclic_product(orders)
    d = E.invariant_factors
    for a in range(E.order):
        assert E.element(E.coords(a)) == a
        for b in range(0, E.order, max(1, E.order // 5)):
            s = tuple((x + y) % n for x, y, n in zip(E.coords(a), E.coords(b), d))
            assert E.coords(E.add[a][b]) == s
    factors, to_new, gens = canonical_decomposition(orders)
    assert factors == d and len(gens) == len(d)


@pytest.mark.parametrize("orders,count", [((2,), 1), ((3,), 2), ((5,), 4), ((6,), 2), ((2, 2), 6),
                                          ((2, 4), 8), ((3, 3), 48), ((2, 2, 2), 168)])
def test_automorphism_counts(orders, count):
    E = FiniteAbelianGroup.cyclic_product(orders)
    auts = E.automorphisms()
    assert len(auts) == count
    assert auts[0] == tuple(range(E.order))
    for p in auts[:20]:
        assert all(p[E.add[a][b]] == E.add[p[a]][p[b]] for a in range(E.order) for b in range(E.order))


def test_axioms_and_scalars():
    E = FiniteAbelianGroup.cyclic_product((4,))
    assert E.axiom_problems() == []
    assert E.scalar(3, 1) == 3 and E.scalar(-1, 1) == 3 and E.element_order(2) == 2
    assert E.exponent == 4 and FiniteAbelianGroup.cyclic_product(()).exponent == 1
