import argparse
import json

import pytest

from gpdext.cli import COMMANDS, UnknownCommand, build_parser, config_from_args, dispatch, main
from gpdext.config import ConfigError, RunConfig

from conftest import FIXTURES


def run(tmp_path, *argv):
    status = main([*argv, "--out", str(tmp_path)])
    report = json.loads((tmp_path / f"{argv[0]}.report.json").read_text())
    return status, report


def F(name):
    return str(FIXTURES / name)


def test_validate_ok_and_corrupted(tmp_path):
    status, rep = run(tmp_path, "validate", "--groupoid", F("pair3.groupoid.json"))
    assert status == 0 and rep["result"]["arrows"] == 9 and rep["status"] == "ok"
    status, rep = run(tmp_path, "validate", "--groupoid", F("corrupted_Z2.groupoid.json"))
    assert status == 2 and rep["status"] == "input-error"
    assert rep["result"]["details"]


def test_parse_errors_exit_2(tmp_path):
    status, rep = run(tmp_path, "validate", "--groupoid", F("malformed.json"))
    assert status == 2 and rep["result"]["error"] == "ParseError"
    status, rep = run(tmp_path, "aut", "--groupoid", F("duplicate_Z2.groupoid.json"))
    assert status == 2
    status, rep = run(tmp_path, "center", "--groupoid", F("corrupted_Z2.groupoid.json"))
    assert status == 2


def test_classify_z2_by_z2(tmp_path):
    status, rep = run(tmp_path, "classify", "--groupoid", F("Z2.groupoid.json"), "--base", F("Z2.groupoid.json"))
    assert status == 0
    res = rep["result"]
    assert res["count"] == 2 and len(res["classes"]) == 2 and res["H2"] == [2]
    for c in res["classes"]:
        assert (tmp_path / c["groupoid_file"]).exists()
    assert rep["files"] == sorted(rep["files"])


def test_classify_inversion_band(tmp_path):
    status, rep = run(tmp_path, "classify", "--groupoid", F("Z4.groupoid.json"), "--base", F("Z2.groupoid.json"),
                      "--band", F("Z4_over_Z2_inversion.band.json"))
    assert status == 0 and rep["result"]["count"] == 2


def test_obstruction_reports_witness(tmp_path):
    status, rep = run(tmp_path, "obstruction", "--groupoid", F("Z2.groupoid.json"),
                      "--base", F("Z2.groupoid.json"), "--cocycle", F("Z2_by_Z2_cyclic.cocycle.json"))
    assert status == 0
    assert rep["result"]["verdict"] == "class = 0, witness c attached"
    assert rep["result"]["xi_is_identity"]
    assert (tmp_path / rep["result"]["witness_file"]).exists()


def test_asymmetric_cocycle(tmp_path):
    args = ("--groupoid", F("Z3.groupoid.json"), "--base", F("Z3.groupoid.json"),
            "--cocycle", F("Z3_by_Z3_asymmetric.cocycle.json"))
    status, rep = run(tmp_path, "check-cocycle", *args)
    assert status == 1 and rep["result"]["violation"]["kind"] == "cocycle"
    status, rep = run(tmp_path, "build", *args)
    assert status == 1 and not rep["result"]["built"]
    status, rep = run(tmp_path, "obstruction", *args)
    assert status == 0 and not rep["result"]["xi_is_identity"]
    status, rep = run(tmp_path, "trivialize", *args)
    assert status == 0 and rep["result"]["satisfies_cocycle_condition"]


def test_equivalent(tmp_path):
    base = ("--groupoid", F("Z2.groupoid.json"), "--base", F("Z2.groupoid.json"))
    status, rep = run(tmp_path, "equivalent", *base, "--cocycle", F("Z2_by_Z2_trivial.cocycle.json"),
                      "--other", F("Z2_by_Z2_cyclic.cocycle.json"))
    assert status == 1 and rep["result"]["class_coordinates"] == [[0], [1]]
    status, rep = run(tmp_path, "equivalent", *base, "--cocycle", F("Z2_by_Z2_cyclic.cocycle.json"),
                      "--other", F("Z2_by_Z2_cyclic.cocycle.json"))
    assert status == 0 and rep["result"]["equivalent"]


def test_band_check_broken(tmp_path):
    status, rep = run(tmp_path, "band-check", "--groupoid", F("Z2_plus_Z2.groupoid.json"),
                      "--base", F("pair2.groupoid.json"), "--band", F("Z2_plus_Z2_over_pair2_broken.band.json"))
    assert status == 1 and rep["result"]["violations"]


def test_build_extract_round_trip(tmp_path):
    base = ("--groupoid", F("Z2.groupoid.json"), "--base", F("Z2.groupoid.json"))
    status, rep = run(tmp_path, "build", *base, "--cocycle", F("Z2_by_Z2_cyclic.cocycle.json"))
    assert status == 0
    total = str(tmp_path / rep["result"]["groupoid_file"])
    status, rep = run(tmp_path, "extract", *base, "--total", total)
    assert status == 0 and rep["result"]["satisfies_cocycle_condition"]
    extracted = json.loads((tmp_path / rep["result"]["cocycle_file"]).read_text())
    assert extracted == json.loads((FIXTURES / "Z2_by_Z2_cyclic.cocycle.json").read_text())
    status, rep = run(tmp_path, "extract", *base, "--total", F("Z4.groupoid.json"))
    assert status == 1 and rep["result"]["product_bundle"] is False


def test_refine_and_pullback(tmp_path):
    status, rep = run(tmp_path, "refine", "--base", F("pair2.groupoid.json"), "--cover", F("pair2_overlap.cover.json"))
    assert status == 0 and (rep["result"]["objects"], rep["result"]["arrows"]) == (3, 9)
    assert rep["result"]["q_is_equivalence"]
    status, rep = run(tmp_path, "refine-pullback", "--groupoid", F("Z2.groupoid.json"),
                      "--base", F("Z2.groupoid.json"), "--cocycle", F("Z2_by_Z2_cyclic.cocycle.json"),
                      "--cover", F("point.cover.json"), "--other", F("Z2_by_Z2_cyclic.cocycle.json"))
    assert status == 0 and rep["result"]["stable"]


def test_cohomology_and_groups(tmp_path):
    status, rep = run(tmp_path, "cohomology", "--base", F("Z2.groupoid.json"), "--trivial", "2", "--degree", "3")
    assert status == 0 and rep["result"]["invariant_factors"] == [2]
    status, rep = run(tmp_path, "cohomology", "--base", F("Z2.groupoid.json"), "--groupoid", F("Z4.groupoid.json"),
                      "--band", F("Z4_over_Z2_inversion.band.json"), "--degree", "2")
    assert status == 0 and rep["result"]["invariant_factors"] == [2]
    status, rep = run(tmp_path, "cohomology", "--base", F("Z2.groupoid.json"), "--degree", "2")
    assert status == 2
    status, rep = run(tmp_path, "coarse-aut", "--groupoid", F("S3.groupoid.json"))
    assert rep["result"]["group_order"] == 1
    status, rep = run(tmp_path, "aut", "--groupoid", F("V4.groupoid.json"))
    assert rep["result"]["group_order"] == 6
    status, rep = run(tmp_path, "center", "--groupoid", F("Z4.groupoid.json"))
    assert rep["result"]["decomposition"] == [4]


def test_census_and_caps(tmp_path):
    status, rep = run(tmp_path, "census", "--groupoid", F("Z2.groupoid.json"), "--base", F("Z2.groupoid.json"))
    assert status == 0 and rep["result"]["count"] == 2
    status, rep = run(tmp_path, "census", "--groupoid", F("S3.groupoid.json"), "--base", F("Z3.groupoid.json"))
    assert status == 2 and rep["result"]["error"] == "CapExceeded"
    status, rep = run(tmp_path, "aut", "--groupoid", F("S3.groupoid.json"), "--cap-saut", "4")
    assert status == 2 and rep["result"]["error"] == "SizeCapExceeded"


def test_reports_are_byte_stable(tmp_path):
    args = ("classify", "--groupoid", F("Z3.groupoid.json"), "--base", F("Z3.groupoid.json"))
    run(tmp_path / "a", *args)
    run(tmp_path / "b", *args)
    for p in (tmp_path / "a").rglob("*.json"):
        q = tmp_path / "b" / p.relative_to(tmp_path / "a")
        assert p.read_bytes().replace(str(tmp_path / "a").encode(), b"") == \
            q.read_bytes().replace(str(tmp_path / "b").encode(), b"")


def test_report_embeds_config(tmp_path):
    status, rep = run(tmp_path, "validate", "--groupoid", F("Z2.groupoid.json"), "--seed", "7")
    assert rep["config"]["seed"] == 7 and rep["tool"] == "gpdext"
    assert "out" not in rep["config"]


def test_env_overrides_and_flags_win():
    parser = build_parser()
    args = parser.parse_args(["validate", "--groupoid", "x", "--backend", "exhaustive"])
    cfg = config_from_args(args, env={"GPDEXT_BACKEND": "both", "GPDEXT_CAP_SAUT": "20", "GPDEXT_NORMALIZED": "yes"})
    assert cfg.backend == "exhaustive" and cfg.cap_saut == 20 and cfg.normalized is True


def test_config_errors():
    with pytest.raises(ConfigError):
        RunConfig(cap_saut=0)
    with pytest.raises(ConfigError):
        RunConfig(backend="magic")
    with pytest.raises(ConfigError):
        RunConfig.from_env({"GPDEXT_SEED": "abc"})
    with pytest.raises(ConfigError):
        RunConfig.from_env({"GPDEXT_NORMALIZED": "maybe"})
    assert main(["validate", "--groupoid", F("Z2.groupoid.json"), "--cap-census", "-1"]) == 2


def test_unknown_command():
    with pytest.raises(UnknownCommand):
        dispatch("frobnicate", argparse.Namespace(), RunConfig())
    with pytest.raises(SystemExit):
        main(["frobnicate"])
    assert main([]) == 2
    assert len(COMMANDS) == 17
