"""Per-string technique statistics over a corpus of annotated tablatures.

Inputs are MusicXML files carrying tablature technical elements, or the JSON
annotation dumps written by ``richtab generate``. The output file doubles as a
targets file for the annotator.
"""
from __future__ import annotations

import json
import warnings
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

from .musicxml import MissingTablatureWarning, reparse
from .techniques import CATEGORIES, note_from_dict

KIND_TO_CATEGORY = {kind: cat for cat, kind in CATEGORIES.items()}
CORPUS_SUFFIXES = (".musicxml", ".xml", ".json")


class EmptyCorpusError(Exception):
    pass


class CorpusWarning(UserWarning):
    pass


@dataclass
class CorpusStats:
    notes_per_string: Counter = field(default_factory=Counter)
    technique_counts: dict[int, Counter] = field(default_factory=dict)
    files: int = 0
    skipped_notes: int = 0

    @property
    def total_notes(self) -> int:
        return sum(self.notes_per_string.values())

    @property
    def strings(self) -> list[int]:
        return sorted(self.notes_per_string)

    def add_note(self, string: int, kinds: Iterable) -> None:
        self.notes_per_string[string] += 1
        row = self.technique_counts.setdefault(string, Counter())
        for kind in set(kinds):
            category = KIND_TO_CATEGORY.get(kind)
            if category:
                row[category] += 1

    def ratio(self, string: int, category: str) -> float:
        n = self.notes_per_string.get(string, 0)
        return self.technique_counts.get(string, Counter())[category] / n if n else 0.0

    @property
    def ratios(self) -> dict[int, dict[str, float]]:
        return {s: {c: self.ratio(s, c) for c in CATEGORIES} for s in self.strings}

    def shares(self) -> dict[int, float]:
        total = self.total_notes
        return {s: self.notes_per_string[s] / total for s in self.strings}

    def merge(self, other: "CorpusStats") -> "CorpusStats":
        counts = {s: Counter(self.technique_counts.get(s, Counter()))
                  + other.technique_counts.get(s, Counter())
                  for s in set(self.technique_counts) | set(other.technique_counts)}
        return CorpusStats(self.notes_per_string + other.notes_per_string, counts,
                           self.files + other.files, self.skipped_notes + other.skipped_notes)

    def to_dict(self) -> dict:
        return {
            "ratios": {str(s): row for s, row in self.ratios.items()},
            "notes_per_string": {str(s): self.notes_per_string[s] for s in self.strings},
            "technique_counts": {
                str(s): {c: self.technique_counts.get(s, Counter())[c] for c in CATEGORIES}
                for s in self.strings
            },
            "total_notes": self.total_notes,
            "files": self.files,
            "skipped_notes": self.skipped_notes,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "CorpusStats":
        notes = Counter({int(s): n for s, n in data["notes_per_string"].items()})
        counts = {int(s): Counter(row) for s, row in data.get("technique_counts", {}).items()}
        return cls(notes, counts, data.get("files", 0), data.get("skipped_notes", 0))


def _stats_from_file(path: Path) -> CorpusStats:
    stats = CorpusStats(files=1)
    if path.suffix == ".json":
        data = json.loads(path.read_text())
        if not isinstance(data, dict) or "notes" not in data:
            raise ValueError("not an annotation dump (no 'notes' list)")
        for row in data["notes"]:
            if row.get("string") is None:
                stats.skipped_notes += 1
                continue
            note = note_from_dict(row)
            stats.add_note(note.string, [t.kind for t in note.techniques])
        return stats

    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", MissingTablatureWarning)
        notes = reparse(path.read_bytes())
    stats.skipped_notes = sum(issubclass(w.category, MissingTablatureWarning) for w in caught)
    for note in notes:
        stats.add_note(note.string, [t.kind for t in note.techniques])
    return stats


def corpus_files(paths: Iterable) -> list[Path]:
    files = []
    for p in map(Path, paths):
        if p.is_dir():
            files.extend(f for f in p.rglob("*") if f.is_file() and f.suffix in CORPUS_SUFFIXES)
        else:
            files.append(p)
    return sorted(set(files))


def scan_corpus(paths: Iterable) -> CorpusStats:
    """Count notes and technique occurrences per string over all files.

    Unreadable files are skipped with a :class:`CorpusWarning`.
    """
    total = CorpusStats()
    for path in corpus_files(paths):
        try:
            stats = _stats_from_file(path)
        except Exception as exc:  # any unreadable file is skipped, not fatal
            warnings.warn(f"{path}: skipped ({exc})", CorpusWarning, stacklevel=2)
            continue
        if stats.skipped_notes:
            warnings.warn(f"{path}: {stats.skipped_notes} notes without string information skipped",
                          CorpusWarning, stacklevel=2)
        total = total.merge(stats)
    if total.total_notes == 0:
        raise EmptyCorpusError("no usable notes with tablature information in the corpus")
    return total


@dataclass
class Comparison:
    shares_a: dict[int, float]
    shares_b: dict[int, float]
    l1: float

    def table(self) -> str:
        lines = [f"{'string':>6}  {'a':>7}  {'b':>7}  {'|a-b|':>7}"]
        for s in sorted(set(self.shares_a) | set(self.shares_b)):
            a, b = self.shares_a.get(s, 0.0), self.shares_b.get(s, 0.0)
            lines.append(f"{s:>6}  {a:7.4f}  {b:7.4f}  {abs(a - b):7.4f}")
        lines.append(f"L1 distance: {self.l1:.4f}")
        return "\n".join(lines)


def compare_distributions(a: CorpusStats, b: CorpusStats) -> Comparison:
    """Per-string note shares of two corpora and their L1 distance (0 to 2)."""
    if not a.total_notes or not b.total_notes:
        raise EmptyCorpusError("both statistics need at least one note")
    sa, sb = a.shares(), b.shares()
    strings = sorted(set(sa) | set(sb))
    l1 = sum(abs(sa.get(s, 0.0) - sb.get(s, 0.0)) for s in strings)
    return Comparison(sa, sb, l1)


def format_table(stats: CorpusStats) -> str:
    header = f"{'string':>6}  {'notes':>6}  " + "  ".join(f"{c:>9}" for c in CATEGORIES)
    lines = [header]
    for s in stats.strings:
        cells = "  ".join(f"{stats.ratio(s, c):9.4f}" for c in CATEGORIES)
        lines.append(f"{s:>6}  {stats.notes_per_string[s]:>6}  {cells}")
    lines.append(f"total notes: {stats.total_notes}")
    return "\n".join(lines)
