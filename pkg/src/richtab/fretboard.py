"""Instrument model: tuning, fret range and the string/fret realizations of a pitch.

Strings are numbered from 1 (highest-pitched) to ``string_count`` (lowest), the
usual tablature convention. Fret 0 is the open string.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

STANDARD_TUNING = (64, 59, 55, 50, 45, 40)


class Placement(NamedTuple):
    string: int
    fret: int

    @property
    def is_open(self) -> bool:
        return self.fret == 0


@dataclass(frozen=True)
class InstrumentSpec:
    open_pitches: tuple[int, ...] = STANDARD_TUNING
    fret_count: int = 22

    def __post_init__(self):
        object.__setattr__(self, "open_pitches", tuple(int(p) for p in self.open_pitches))
        if not self.open_pitches:
            raise ValueError("an instrument needs at least one string")
        if self.fret_count < 1:
            raise ValueError(f"fret_count must be positive, got {self.fret_count}")

    @property
    def string_count(self) -> int:
        return len(self.open_pitches)

    @property
    def strings(self) -> range:
        return range(1, self.string_count + 1)

    def pitch_at(self, string: int, fret: int) -> int:
        if not 1 <= string <= self.string_count:
            raise ValueError(f"string {string} outside 1..{self.string_count}")
        if not 0 <= fret <= self.fret_count:
            raise ValueError(f"fret {fret} outside 0..{self.fret_count}")
        return self.open_pitches[string - 1] + fret

    def candidates_for_pitch(self, pitch: int) -> list[Placement]:
        """All placements sounding ``pitch``, ordered by string.

        An empty list means the pitch is out of range for this instrument.
        """
        out = []
        for string, open_pitch in enumerate(self.open_pitches, start=1):
            fret = pitch - open_pitch
            if 0 <= fret <= self.fret_count:
                out.append(Placement(string, fret))
        return out

    def to_dict(self) -> dict:
        return {
            "string_count": self.string_count,
            "open_pitches": list(self.open_pitches),
            "fret_count": self.fret_count,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "InstrumentSpec":
        unknown = set(data) - {"open_pitches", "fret_count", "string_count"}
        if unknown:
            raise ValueError(f"unknown instrument keys: {sorted(unknown)}")
        spec = cls(
            open_pitches=tuple(data.get("open_pitches", STANDARD_TUNING)),
            fret_count=int(data.get("fret_count", 22)),
        )
        if "string_count" in data and data["string_count"] != spec.string_count:
            raise ValueError(
                f"string_count {data['string_count']} does not match "
                f"{spec.string_count} open pitches"
            )
        return spec
