"""Regenerate the JSON fixtures under fixtures/ from the built-in catalog."""
from __future__ import annotations

import sys
from pathlib import Path

from gpdext import catalog
from gpdext.serialize import groupoid_to_dict, save_json

ROOT = Path(__file__).resolve().parent.parent / "fixtures"

GROUPOIDS = ["Z2", "Z3", "Z4", "V4", "S3", "pair2", "pair3", "unit1", "Z2+Z2"]


def fname(name: str) -> str:
    return name.replace("+", "_plus_")


def main(out: Path = ROOT) -> list[Path]:
    written = []
    for name in GROUPOIDS:
        written.append(save_json(groupoid_to_dict(catalog.named(name)), out / f"{fname(name)}.groupoid.json"))

    # B(Z/2) with g·g redefined to g
    bad = groupoid_to_dict(catalog.named("Z2"))
    bad["compose"] = [[g, h, "1" if (g, h) == ("1", "1") else k] for g, h, k in bad["compose"]]
    written.append(save_json(bad, out / "corrupted_Z2.groupoid.json"))

    # duplicate product entry: rejected by the loader
    dup = groupoid_to_dict(catalog.named("Z2"))
    dup["compose"].append(["1", "1", "0"])
    written.append(save_json(dup, out / "duplicate_Z2.groupoid.json"))

    cocycles = {
        "Z2_by_Z2_trivial": {"lambda": {"0": 0, "1": 0}, "omega": [["1", "1", "*", "0"]]},
        "Z2_by_Z2_cyclic": {"lambda": {"0": 0, "1": 0}, "omega": [["1", "1", "*", "1"]]},
        "Z3_by_Z3_asymmetric": {"lambda": {"0": 0, "1": 0, "2": 0},
                                "omega": [["1", "1", "*", "1"], ["1", "2", "*", "0"],
                                          ["2", "1", "*", "0"], ["2", "2", "*", "0"]]},
    }
    for name, data in cocycles.items():
        written.append(save_json(data, out / f"{name}.cocycle.json"))

    written.append(save_json({"band": {"0": 0, "1": 1}}, out / "Z4_over_Z2_inversion.band.json"))
    # swap class on (0,1) only: fails the composition law over pair(2)
    written.append(save_json({"band": {"(0,0)": 0, "(0,1)": 1, "(1,0)": 0, "(1,1)": 0}},
                             out / "Z2_plus_Z2_over_pair2_broken.band.json"))

    written.append(save_json({"subsets": [["0", "1"], ["1"]], "labels": ["U", "V"]},
                             out / "pair2_overlap.cover.json"))
    written.append(save_json({"subsets": [["0"], ["1"]], "labels": ["U", "V"]},
                             out / "pair2_partition.cover.json"))
    written.append(save_json({"subsets": [["*"]], "labels": ["U"]}, out / "point.cover.json"))
    (out / "malformed.json").write_text('{"objects": ["*"], "arrows": [\n', encoding="utf-8")
    written.append(out / "malformed.json")
    return written


if __name__ == "__main__":
    target = Path(sys.argv[1]) if len(sys.argv) > 1 else ROOT
    for p in main(target):
        print(p)
