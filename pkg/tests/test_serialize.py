import json

import pytest
from hypothesis import given, strategies as st

from gpdext import catalog
from gpdext.autalg import center, enumerate_saut
from gpdext.cohomology import Cochain, composable_tuples
from gpdext.core import GroupoidValidationError
from gpdext.serialize import (ParseError, band_from_dict, band_to_dict, cochain_from_dict, cochain_to_dict,
                              cocycle_from_dict, cocycle_to_dict, cover_from_dict, cover_to_dict, dumps,
                              groupoid_from_dict, groupoid_to_dict, load_groupoid, load_json, loads,
                              morphism_from_dict, morphism_to_dict, save_json)

from conftest import FIXTURES

GROUPOID_FILES = sorted(p.name for p in FIXTURES.glob("*.groupoid.json")
                        if not p.name.startswith(("corrupted", "duplicate")))


@pytest.mark.parametrize("name", GROUPOID_FILES)
def test_groupoid_round_trip_is_identity(name, tmp_path):
    G = load_groupoid(FIXTURES / name)
    out = save_json(groupoid_to_dict(G), tmp_path / name)
    assert out.read_bytes() == (FIXTURES / name).read_bytes()
    H = load_groupoid(out)
    assert groupoid_to_dict(H) == groupoid_to_dict(G)


def test_duplicate_product_is_rejected():
    with pytest.raises(ParseError) as exc:
        load_groupoid(FIXTURES / "duplicate_Z2.groupoid.json")
    assert "duplicate product" in str(exc.value) and "compose[4]" in str(exc.value)


def test_malformed_json_reports_line():
    with pytest.raises(ParseError) as exc:
        load_json(FIXTURES / "malformed.json")
    assert exc.value.line == 2
    assert str(exc.value).count("line") == 1


def test_duplicate_key_and_missing_file(tmp_path):
    with pytest.raises(ParseError, match="duplicate key"):
        loads('{"a": 1, "a": 2}')
    with pytest.raises(ParseError):
        load_json(tmp_path / "absent.json")


def test_corrupted_groupoid_fails_validation_not_parsing():
    G = load_groupoid(FIXTURES / "corrupted_Z2.groupoid.json", check=False)
    with pytest.raises(GroupoidValidationError):
        groupoid_from_dict(groupoid_to_dict(G))


@pytest.mark.parametrize("mutate,locus", [
    (lambda d: d.pop("unit"), "unit"),
    (lambda d: d["arrows"].append({"id": "0", "src": "*", "tgt": "*"}), "arrows[2]"),
    (lambda d: d["compose"].pop(), "compose"),
    (lambda d: d["inverse"].update({"9": "0"}), "inverse"),
    (lambda d: d["arrows"][0].update({"src": "nowhere"}), "arrows[0].src"),
    (lambda d: d.update({"objects": ["*", "*"]}), "objects[1]"),
    (lambda d: d["compose"].append(["0", "1"]), "compose[4]"),
])
def test_groupoid_parse_errors(mutate, locus):
    raw = groupoid_to_dict(catalog.named("Z2"))
    mutate(raw)
    with pytest.raises(ParseError) as exc:
        groupoid_from_dict(raw)
    assert exc.value.locus == locus


def test_cover_and_band_round_trip():
    K = catalog.pair_groupoid(2)
    raw = json.loads((FIXTURES / "pair2_overlap.cover.json").read_text())
    U = cover_from_dict(raw, K)
    assert cover_to_dict(U, K) == raw
    band = json.loads((FIXTURES / "Z4_over_Z2_inversion.band.json").read_text())
    Z2 = catalog.named("Z2")
    assert band_to_dict(band_from_dict(band, Z2), Z2) == band
    with pytest.raises(ParseError):
        band_from_dict({"band": {"0": 0}}, Z2)
    with pytest.raises(ParseError):
        band_from_dict({"band": {"0": 0, "1": -1}}, Z2)


def test_morphism_round_trip():
    V = catalog.named("V4")
    for f in enumerate_saut(V).autos:
        assert morphism_from_dict(morphism_to_dict(f), V, V) == f


@pytest.mark.parametrize("name", ["Z2_by_Z2_trivial", "Z2_by_Z2_cyclic", "Z3_by_Z3_asymmetric"])
def test_cocycle_round_trip(name):
    A = K = catalog.named(name[:2])
    raw = json.loads((FIXTURES / f"{name}.cocycle.json").read_text())
    lam, omega = cocycle_from_dict(raw, A, K)
    assert cocycle_to_dict(lam, omega, A, K) == raw


def test_cocycle_parse_errors():
    Z2 = catalog.named("Z2")
    with pytest.raises(ParseError, match="missing value"):
        cocycle_from_dict({"lambda": {"0": 0, "1": 0}, "omega": []}, Z2, Z2)
    with pytest.raises(ParseError, match="unknown"):
        cocycle_from_dict({"lambda": {"0": 0, "1": 0, "2": 0}, "omega": []}, Z2, Z2)
    with pytest.raises(ParseError, match="duplicate"):
        cocycle_from_dict({"lambda": {"0": 0, "1": 0},
                           "omega": [["1", "1", "*", "0"], ["1", "1", "*", "1"]]}, Z2, Z2)


@given(st.integers(0, 3), st.booleans(), st.data())
def test_cochain_round_trip(n, normalized, data):
    K = catalog.named("Z2+unit1")
    labels = center(catalog.named("Z3")).group.labels
    tuples = composable_tuples(K, n, normalized)
    c = Cochain(n, tuple(data.draw(st.integers(0, 2)) for _ in tuples), normalized)
    raw = json.loads(dumps(cochain_to_dict(c, K, labels)))
    assert cochain_from_dict(raw, K, labels) == c


def test_cochain_must_be_complete():
    K = catalog.named("Z2")
    with pytest.raises(ParseError):
        cochain_from_dict({"degree": 1, "values": [{"tuple": ["0"], "value": "0"}]}, K, ["0", "1"])


def test_dumps_is_stable():
    assert dumps({"b": 1, "a": [1, 2]}) == '{\n  "a": [\n    1,\n    2\n  ],\n  "b": 1\n}\n'
