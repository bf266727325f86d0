"""Snapping MIDI ticks to a notation grid and naming the resulting note values.

All positions are exact :class:`fractions.Fraction` quarter-note counts.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

GRIDS = (1, 2, 4, 8, 12, 16, 24, 48)

# quarter-note length of each MusicXML note type
NOTE_TYPES = {
    "whole": Fraction(4),
    "half": Fraction(2),
    "quarter": Fraction(1),
    "eighth": Fraction(1, 2),
    "16th": Fraction(1, 4),
    "32nd": Fraction(1, 8),
    "64th": Fraction(1, 16),
    "128th": Fraction(1, 32),
    "256th": Fraction(1, 64),
}


class NoteValue(NamedTuple):
    type: str
    dots: int
    tuplet: tuple[int, int] | None  # (actual, normal)

    @property
    def quarters(self) -> Fraction:
        length = NOTE_TYPES[self.type] * (2 - Fraction(1, 2 ** self.dots))
        if self.tuplet:
            length = length * self.tuplet[1] / self.tuplet[0]
        return length

    @property
    def value(self) -> Fraction:
        """Undotted fraction of a whole note, e.g. 1/8 for an eighth."""
        return NOTE_TYPES[self.type] / 4


def _value_table() -> dict[Fraction, NoteValue]:
    table: dict[Fraction, NoteValue] = {}
    for name in NOTE_TYPES:
        for dots in (0, 1, 2):
            v = NoteValue(name, dots, None)
            table.setdefault(v.quarters, v)
    for name in NOTE_TYPES:
        v = NoteValue(name, 0, (3, 2))
        table.setdefault(v.quarters, v)
    return table


_VALUES = _value_table()
_SORTED_LENGTHS = sorted(_VALUES, reverse=True)


def note_value(quarters: Fraction) -> NoteValue | None:
    """The single (possibly dotted or triplet) value of this length, if any."""
    return _VALUES.get(Fraction(quarters))


def split_duration(quarters: Fraction, divisions: int | None = None) -> list[NoteValue]:
    """Greedy decomposition into tied note values, longest first.

    With ``divisions`` only values spanning a whole number of divisions are
    used, so a triplet never leaves a remainder the score cannot express.
    """
    remaining = Fraction(quarters)
    lengths = _SORTED_LENGTHS
    if divisions is not None:
        lengths = [q for q in lengths if (q * divisions).denominator == 1]
    pieces = []
    while remaining > 0:
        length = next((q for q in lengths if q <= remaining), None)
        if length is None:
            raise ValueError(f"{quarters} quarters cannot be written with standard values")
        pieces.append(_VALUES[length])
        remaining -= length
    return pieces


@dataclass(frozen=True)
class QuantizedRhythm:
    onset: Fraction  # quarters from the start of the piece
    duration: Fraction
    measure: int  # 0-based
    beat_offset: Fraction  # quarters from the start of the measure

    @property
    def notation(self) -> NoteValue | None:
        return note_value(self.duration)

    @property
    def value(self) -> Fraction:
        nv = self.notation
        return nv.value if nv else self.duration / 4

    @property
    def dots(self) -> int:
        nv = self.notation
        return nv.dots if nv else 0

    @property
    def tuplet(self) -> tuple[int, int] | None:
        nv = self.notation
        return nv.tuplet if nv else None


def measure_length(time_signature: tuple[int, int]) -> Fraction:
    beats, beat_type = time_signature
    return Fraction(4 * beats, beat_type)


def score_divisions(grid: int, time_signature: tuple[int, int]) -> int:
    """Divisions per quarter fine enough for the grid and for the barlines."""
    return math.lcm(grid, measure_length(time_signature).denominator)


def _snap(x: Fraction) -> int:
    """Nearest integer, exact halves rounding down."""
    low = math.floor(x)
    return low + 1 if x - low > Fraction(1, 2) else low


def quantize(events, ppq: int, grid: int = 4,
             time_signature: tuple[int, int] = (4, 4)) -> list[QuantizedRhythm]:
    """Snap onsets and durations to ``grid`` subdivisions per quarter.

    Two onsets that land on the same grid point are separated by pushing the
    later one a grid unit forward, and durations are shortened so a note never
    runs into its successor. Both keep the output a strict, non-overlapping
    sequence that measures can be built from. Durations never drop below one
    grid unit.
    """
    if grid not in GRIDS:
        raise ValueError(f"grid must be one of {GRIDS}, got {grid}")
    unit = Fraction(ppq, grid)
    onsets: list[int] = []
    for ev in events:
        u = _snap(ev.onset_ticks / unit)
        if onsets and u <= onsets[-1]:
            u = onsets[-1] + 1
        onsets.append(u)

    bar = measure_length(time_signature)
    out = []
    for i, ev in enumerate(events):
        dur = max(1, _snap(ev.duration_ticks / unit))
        if i + 1 < len(onsets):
            dur = min(dur, onsets[i + 1] - onsets[i])
        onset = Fraction(onsets[i], grid)
        measure = math.floor(onset / bar)
        out.append(QuantizedRhythm(onset, Fraction(dur, grid), measure, onset - measure * bar))
    return out
