import pytest

from gpdext import catalog
from gpdext.abelian import FiniteAbelianGroup
from gpdext.cohomology import all_modules, cohomology, trivial_module
from gpdext.extension import classify, enumerate_bands
from gpdext.oracle import CapExceeded, OracleError, census_extensions, group_cohomology_oracle, oracle_for_module


def _trivial(order, M):
    return [tuple(range(M.order))] * order


@pytest.mark.parametrize("an,kn,classes", [("Z2", "Z2", 2), ("unit1", "Z2", 1), ("Z3", "Z3", 3),
                                           ("Z2", "unit2", 1), ("Z2", "pair2", 1)])
def test_census_class_counts(an, kn, classes):
    A, K = catalog.named(an), catalog.named(kn)
    cen = census_extensions(A, K)
    assert cen.n_classes == classes
    assert cen.counts() == {"structures": cen.n_structures, "classes": classes}
    assert all(cen.bands[i] == cen.bands[cl[0]] for cl in cen.classes for i in cl)


def test_census_band_filter_matches_classify():
    A, K = catalog.named("Z4"), catalog.named("Z2")
    for band in enumerate_bands(A, K):
        cen = census_extensions(A, K, band=band.values)
        assert cen.n_classes == classify(A, band, verify=False).count == 2


def test_census_cap():
    with pytest.raises(CapExceeded):
        census_extensions(catalog.named("S3"), catalog.named("Z3"))
    assert issubclass(CapExceeded, OracleError)


@pytest.mark.parametrize("n,expected", [(0, (2,)), (1, (2,)), (2, (2,)), (3, (2,))])
def test_z2_with_z2_coefficients(n, expected):
    M = FiniteAbelianGroup.cyclic_product((2,))
    assert group_cohomology_oracle(catalog.cyclic_table(2), M, _trivial(2, M), n) == expected


def test_z3_h1_with_z3_coefficients():
    M = FiniteAbelianGroup.cyclic_product((3,))
    assert group_cohomology_oracle(catalog.cyclic_table(3), M, _trivial(3, M), 1) == (3,)


@pytest.mark.parametrize("n,expected", [(0, (2,)), (1, (2, 2)), (2, (2, 2, 2)), (3, (2, 2, 2, 2))])
def test_klein_four_with_z2_coefficients(n, expected):
    V = catalog.named("V4")
    M = FiniteAbelianGroup.cyclic_product((2,))
    assert group_cohomology_oracle(V.mul, M, _trivial(4, M), n) == expected


def test_oracle_caps():
    M = FiniteAbelianGroup.cyclic_product((4,))
    V = catalog.named("V4")
    with pytest.raises(CapExceeded):
        group_cohomology_oracle(V.mul, M, _trivial(4, M), 2)
    with pytest.raises(CapExceeded):
        group_cohomology_oracle(catalog.named("S3").mul, M, _trivial(6, M), 1)
    with pytest.raises(CapExceeded):
        group_cohomology_oracle(catalog.cyclic_table(2), M, _trivial(2, M), 4)


@pytest.mark.parametrize("gname", ["Z2", "Z3", "Z4", "V4"])
def test_oracle_matches_snf_on_twisted_modules(gname):
    K = catalog.named(gname)
    checked = 0
    for orders in ((2,), (2, 2), (3,), (4,)):
        for m in all_modules(K, FiniteAbelianGroup.cyclic_product(orders)):
            for n in range(4):
                try:
                    expected = oracle_for_module(m, n)
                except CapExceeded:
                    continue
                assert cohomology(m, n).invariant_factors == expected
                checked += 1
    assert checked > 0


def test_oracle_for_trivial_module():
    m = trivial_module(catalog.cyclic(4), FiniteAbelianGroup.cyclic_product((2,)))
    assert oracle_for_module(m, 2) == (2,)
