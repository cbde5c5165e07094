"""Run configuration shared by the command line and the property tests."""
from __future__ import annotations

import os
from dataclasses import asdict, dataclass, fields, replace
from typing import Mapping, Optional

from .autalg import DEFAULT_SAUT_CAP
from .cohomology import CONVENTIONS, DEFAULT_COHOMOLOGY_CAP
from .oracle import CENSUS_CAP

ENV_PREFIX = "GPDEXT_"
BACKENDS = ("snf", "exhaustive", "both")


class ConfigError(ValueError):
    pass


def parse_bool(text: str) -> bool:
    t = str(text).strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"expected true or false, got {text!r}")


@dataclass(frozen=True)
class RunConfig:
    cap_saut: int = DEFAULT_SAUT_CAP
    cap_cohomology: int = DEFAULT_COHOMOLOGY_CAP
    cap_census: int = CENSUS_CAP
    backend: str = "snf"
    normalized: bool = False
    convention: str = "A1"
    seed: int = 0
    out: str = "out"
    verbosity: int = 0

    def __post_init__(self):
        for name in ("cap_saut", "cap_cohomology", "cap_census"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name} must be positive")
        if self.backend not in BACKENDS:
            raise ConfigError(f"backend must be one of {BACKENDS}")
        if self.convention not in CONVENTIONS:
            raise ConfigError(f"convention must be one of {CONVENTIONS}")

    def flags(self) -> dict:
        """The settings that change mathematical output; embedded in every report."""
        d = asdict(self)
        del d["out"], d["verbosity"]
        return d

    @classmethod
    def from_env(cls, env: Optional[Mapping[str, str]] = None, base: Optional["RunConfig"] = None) -> "RunConfig":
        env = os.environ if env is None else env
        cfg = base or cls()
        updates = {}
        for f in fields(cls):
            key = ENV_PREFIX + f.name.upper()
            if key in env:
                updates[f.name] = _coerce(f.name, env[key])
        return replace(cfg, **updates)

    def override(self, **kw) -> "RunConfig":
        return replace(self, **{k: v for k, v in kw.items() if v is not None})


def _coerce(name: str, raw: str):
    default = getattr(RunConfig, name)
    try:
        if isinstance(default, bool):
            return parse_bool(raw)
        if isinstance(default, int):
            return int(raw)
    except ValueError as e:
        raise ConfigError(f"{ENV_PREFIX}{name.upper()}: {e}") from None
    return raw
