"""Run configuration: everything that determines a ``generate`` output."""
from __future__ import annotations

import json
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

from .fingering import FingeringConfig
from .fretboard import InstrumentSpec
from .rhythm import GRIDS
from .techniques import TechniqueTargets


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    instrument: InstrumentSpec = field(default_factory=InstrumentSpec)
    fingering: FingeringConfig = field(default_factory=FingeringConfig)
    techniques: TechniqueTargets = field(default_factory=TechniqueTargets)
    grid: int = 4  # subdivisions per quarter note
    seed: int = 0
    track: int | None = None
    clip_overlaps: bool = False
    input: str | None = None
    output: str | None = None
    verbosity: int = 0

    def __post_init__(self):
        if self.grid not in GRIDS:
            raise ConfigError(f"grid must be one of {GRIDS}, got {self.grid}")
        if not isinstance(self.seed, int) or isinstance(self.seed, bool):
            raise ConfigError(f"seed must be an integer, got {self.seed!r}")
        if self.track is not None and self.track < 0:
            raise ConfigError(f"track must be non-negative, got {self.track}")

    def to_dict(self) -> dict:
        return {
            "instrument": self.instrument.to_dict(),
            "fingering": self.fingering.to_dict(),
            "techniques": self.techniques.to_dict(),
            "grid": self.grid,
            "seed": self.seed,
            "track": self.track,
            "clip_overlaps": self.clip_overlaps,
            "input": self.input,
            "output": self.output,
            "verbosity": self.verbosity,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        unknown = set(data) - {f.name for f in fields(cls)}
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        kwargs = dict(data)
        try:
            if "instrument" in kwargs:
                kwargs["instrument"] = InstrumentSpec.from_dict(kwargs["instrument"])
            if "fingering" in kwargs:
                kwargs["fingering"] = FingeringConfig.from_dict(kwargs["fingering"])
            if "techniques" in kwargs:
                kwargs["techniques"] = TechniqueTargets.from_dict(kwargs["techniques"])
            return cls(**kwargs)
        except ConfigError:
            raise
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from exc

    def override(self, **changes) -> "RunConfig":
        """Copy with the non-None entries of ``changes`` applied."""
        return replace(self, **{k: v for k, v in changes.items() if v is not None})


def load_config(path) -> RunConfig:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
    return RunConfig.from_dict(data)


def save_config(config: RunConfig, path) -> None:
    Path(path).write_text(config.to_json())
