"""Articulations and expressive techniques on top of a fingered melody.

Each technique has a feasibility predicate evaluated against neighbouring
notes. :func:`apply_targets` inserts techniques so that, per string, the share
of notes carrying each one approaches a target ratio. When there are more
insertion points than the target needs, the choice is random (seeded), except
for vibrato, which prefers the longest notes.

Bends are special: the cliché patterns that call for a bend usually require
re-fretting notes, so bend insertion rewrites fingering states, and only when
the rewritten sequence stays physically feasible.
"""
from __future__ import annotations

import json
import logging
import math
import random
from dataclasses import dataclass, field, replace
from enum import Enum, IntEnum
from importlib import resources
from typing import Iterable, NamedTuple, Sequence

from .fingering import (
    FingeringConfig,
    FingeringState,
    infeasibility_reason,
    node_cost,
    path_violations,
    transition_cost,
)
from .fretboard import InstrumentSpec
from .midi import NoteEvent

log = logging.getLogger(__name__)


class TechniqueKind(str, Enum):
    HAMMER_ON = "hammer_on"
    PULL_OFF = "pull_off"
    VIBRATO = "vibrato"
    SLIDE_START = "slide_start"
    SLIDE_STOP = "slide_stop"
    BEND = "bend"
    BEND_RELEASE = "bend_release"


# Statistics count one occurrence per technique: slides on their first note,
# bends on the bent note (releases are part of the same gesture).
CATEGORIES = {
    "hammer_on": TechniqueKind.HAMMER_ON,
    "pull_off": TechniqueKind.PULL_OFF,
    "vibrato": TechniqueKind.VIBRATO,
    "slide": TechniqueKind.SLIDE_START,
    "bend": TechniqueKind.BEND,
}


@dataclass(frozen=True, order=True)
class Technique:
    kind: TechniqueKind
    bend_semitones: int = 0

    def __post_init__(self):
        object.__setattr__(self, "kind", TechniqueKind(self.kind))
        bends = self.kind in (TechniqueKind.BEND, TechniqueKind.BEND_RELEASE)
        if bends and self.bend_semitones < 1:
            raise ValueError(f"{self.kind.value} needs a positive bend_semitones")
        if not bends and self.bend_semitones:
            raise ValueError(f"{self.kind.value} takes no bend_semitones")

    def to_dict(self) -> dict:
        out = {"kind": self.kind.value}
        if self.bend_semitones:
            out["bend_semitones"] = self.bend_semitones
        return out


@dataclass(frozen=True)
class RichNote:
    event: NoteEvent
    state: FingeringState
    techniques: tuple[Technique, ...] = ()

    @property
    def index(self) -> int:
        return self.event.index

    @property
    def pitch(self) -> int:
        return self.event.pitch

    @property
    def duration_s(self) -> float:
        return self.event.duration_s

    @property
    def string(self) -> int:
        return self.state.string

    @property
    def fret(self) -> int:
        return self.state.fret

    @property
    def finger(self) -> int:
        return self.state.finger

    @property
    def is_open(self) -> bool:
        return self.state.finger == 0

    def has(self, kind: TechniqueKind) -> bool:
        return any(t.kind is kind for t in self.techniques)

    @property
    def bend(self) -> int:
        """Semitones this note is bent up by when it sounds."""
        return next((t.bend_semitones for t in self.techniques if t.kind is TechniqueKind.BEND), 0)

    @property
    def fretted_pitch(self) -> int:
        return self.pitch - self.bend

    def with_techniques(self, *added: Technique) -> "RichNote":
        return replace(self, techniques=tuple(sorted(set(self.techniques) | set(added))))


class VibratoLevel(IntEnum):
    NONE = 0
    POSSIBLE = 1
    LIKELY = 2


def _default_ratios() -> dict[int, dict[str, float]]:
    text = resources.files("richtab").joinpath("data/default_targets.json").read_text()
    return parse_ratios(json.loads(text)["ratios"])


def parse_ratios(data: dict) -> dict[int, dict[str, float]]:
    ratios: dict[int, dict[str, float]] = {}
    for string, row in data.items():
        unknown = set(row) - set(CATEGORIES)
        if unknown:
            raise ValueError(f"unknown technique categories {sorted(unknown)} for string {string}")
        for cat, value in row.items():
            if not 0 <= value <= 1:
                raise ValueError(f"ratio for string {string} {cat} must lie in [0, 1], got {value}")
        ratios[int(string)] = {cat: float(row.get(cat, 0.0)) for cat in CATEGORIES}
    return ratios


@dataclass(frozen=True)
class TechniqueTargets:
    ratios: dict[int, dict[str, float]] = field(default_factory=_default_ratios)
    max_bend: tuple[int, int, int, int] = (2, 2, 2, 0)  # semitones, fingers 1..4
    t_possible: float = 0.5
    t_likely: float = 1.0
    min_bend_duration: float = 0.4
    slides: bool = False
    insert_everywhere: frozenset[str] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "ratios", parse_ratios(
            {str(k): v for k, v in self.ratios.items()}))
        object.__setattr__(self, "max_bend", tuple(int(b) for b in self.max_bend))
        object.__setattr__(self, "insert_everywhere", frozenset(self.insert_everywhere))
        if len(self.max_bend) != 4 or min(self.max_bend) < 0:
            raise ValueError("max_bend needs four non-negative entries")
        if not 0 <= self.t_possible <= self.t_likely:
            raise ValueError("vibrato thresholds must satisfy 0 <= t_possible <= t_likely")
        if self.min_bend_duration < 0:
            raise ValueError("min_bend_duration must be non-negative")
        unknown = self.insert_everywhere - set(CATEGORIES)
        if unknown:
            raise ValueError(f"unknown insert_everywhere categories {sorted(unknown)}")

    def ratio(self, string: int, category: str) -> float:
        return self.ratios.get(string, {}).get(category, 0.0)

    def bend_limit(self, finger: int) -> int:
        return self.max_bend[finger - 1] if finger >= 1 else 0

    def to_dict(self) -> dict:
        return {
            "ratios": {str(s): dict(row) for s, row in sorted(self.ratios.items())},
            "max_bend": list(self.max_bend),
            "t_possible": self.t_possible,
            "t_likely": self.t_likely,
            "min_bend_duration": self.min_bend_duration,
            "slides": self.slides,
            "insert_everywhere": sorted(self.insert_everywhere),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "TechniqueTargets":
        known = {"ratios", "max_bend", "t_possible", "t_likely", "min_bend_duration",
                 "slides", "insert_everywhere"}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown technique keys: {sorted(unknown)}")
        kwargs = dict(data)
        if "ratios" in kwargs:
            kwargs["ratios"] = parse_ratios(kwargs["ratios"])
        return cls(**kwargs)

    def with_ratios(self, ratios: dict) -> "TechniqueTargets":
        """Copy with ratios replaced, e.g. from a corpus statistics file."""
        return replace(self, ratios=parse_ratios({str(k): v for k, v in ratios.items()}))


# --- feasibility predicates -------------------------------------------------

def can_hammer_on(prev: RichNote, cur: RichNote) -> bool:
    return (prev.string == cur.string and prev.pitch < cur.pitch
            and (prev.is_open or prev.finger < cur.finger))


def can_pull_off(prev: RichNote, cur: RichNote) -> bool:
    return (prev.string == cur.string and prev.pitch > cur.pitch
            and (cur.is_open or prev.finger > cur.finger))


def vibrato_level(note: RichNote, targets: TechniqueTargets) -> VibratoLevel:
    if note.is_open or note.duration_s < targets.t_possible:
        return VibratoLevel.NONE
    if note.duration_s < targets.t_likely:
        return VibratoLevel.POSSIBLE
    return VibratoLevel.LIKELY


def can_slide(cur: RichNote, nxt: RichNote) -> bool:
    return (cur.string == nxt.string and cur.fret != nxt.fret
            and cur.finger == nxt.finger >= 1)


# --- bends ------------------------------------------------------------------

@dataclass(frozen=True)
class BendProposal:
    pattern: str  # "unison", "return" (X-Y-X) or "pair"
    bend_index: int
    state: FingeringState  # fingering of the bent note, and of its release
    semitones: int
    release_index: int | None = None
    anchor_index: int | None = None  # note whose fingering is reused

    @property
    def rewritten(self) -> tuple[int, ...]:
        if self.release_index is None:
            return (self.bend_index,)
        return (self.bend_index, self.release_index)


def _rewrite(states: list[FingeringState], proposal: BendProposal) -> list[FingeringState]:
    trial = list(states)
    for i in proposal.rewritten:
        trial[i] = proposal.state
    return trial


def bend_problems(proposal: BendProposal, notes: Sequence[RichNote],
                  states: Sequence[FingeringState], targets: TechniqueTargets,
                  spec: InstrumentSpec, config: FingeringConfig) -> list[str]:
    """Reasons a bend rewrite is not executable against ``states``."""
    state, b = proposal.state, proposal.semitones
    bent = notes[proposal.bend_index]
    problems = []
    if state.finger < 1:
        problems.append("open strings cannot be bent")
    elif b > targets.bend_limit(state.finger):
        problems.append(f"finger {state.finger} bends at most {targets.bend_limit(state.finger)}")
    if bent.duration_s < targets.min_bend_duration:
        problems.append(f"note {bent.index} too short to bend")
    if spec.pitch_at(state.string, state.fret) + b != bent.pitch:
        problems.append("bent pitch does not match the melody")
    if proposal.release_index is not None:
        release = notes[proposal.release_index]
        if spec.pitch_at(state.string, state.fret) != release.pitch:
            problems.append("release pitch does not match the melody")

    trial = _rewrite(list(states), proposal)
    touched = set()
    for i in proposal.rewritten:
        touched.update({i - 1, i})
    for i in sorted(touched):
        if 0 <= i < len(trial) - 1:
            reason = infeasibility_reason(trial[i], trial[i + 1], notes[i].event.ioi_s, config)
            if reason:
                problems.append(f"notes {i}->{i + 1}: {reason}")
    lo, hi = config.span(state.finger) if state.finger else (0, 0)
    if state.finger and not lo <= state.fret - state.hand_position <= hi:
        problems.append("finger outside its span")
    if state.hand_position not in config.hand_positions(spec):
        problems.append("hand position out of range")
    return problems


def _unison_state(notes, states, i, b, targets, spec, config) -> FingeringState | None:
    """Cheapest fingering for note ``i`` one string lower, bent up ``b`` semitones."""
    string = states[i - 1].string + 1
    if string > spec.string_count:
        return None
    fret = notes[i].pitch - b - spec.open_pitches[string - 1]
    if not 1 <= fret <= spec.fret_count:
        return None
    positions = config.hand_positions(spec)
    options = []
    for finger in (1, 2, 3, 4):
        if targets.bend_limit(finger) < b:
            continue
        lo, hi = config.span(finger)
        for h in range(max(fret - hi, positions.start), min(fret - lo, positions.stop - 1) + 1):
            cand = FingeringState(string, fret, finger, h)
            trial = list(states)
            trial[i] = cand
            if any(infeasibility_reason(trial[k], trial[k + 1], notes[k].event.ioi_s, config)
                   for k in (i - 1, i) if 0 <= k < len(trial) - 1):
                continue
            cost = node_cost(cand, config).total
            cost += transition_cost(states[i - 1], cand, config).total
            if i + 1 < len(states):
                cost += transition_cost(cand, states[i + 1], config).total
            options.append((cost, cand))
    return min(options)[1] if options else None


def find_bend_opportunities(notes: Sequence[RichNote], targets: TechniqueTargets,
                            spec: InstrumentSpec, config: FingeringConfig,
                            diagnostics: list[str] | None = None) -> list[BendProposal]:
    """Detect bend clichés and propose executable rewrites, one per bent note.

    Patterns, in order of preference for a given bent note:

    * ``return``: X-Y-X with Y a few semitones above X. Y is bent from X's
      fingering and the second X is its release.
    * ``unison``: repeated pitches. Every second occurrence moves to the next
      lower string and is bent up to the same pitch.
    * ``pair``: an ascending step on one string, small enough to bend. The
      second note is bent from the first note's fingering.

    X-Y-X with Y *below* X would need a pre-bend; such spots are reported to
    ``diagnostics`` and skipped.
    """
    states = [n.state for n in notes]
    reach = max(targets.max_bend)
    found: dict[int, BendProposal] = {}

    def offer(p: BendProposal):
        if p.bend_index in found:
            return
        if not bend_problems(p, notes, states, targets, spec, config):
            found[p.bend_index] = p

    for i in range(len(notes) - 2):
        x, y, z = notes[i], notes[i + 1], notes[i + 2]
        if x.pitch != z.pitch or x.pitch == y.pitch:
            continue
        d = y.pitch - x.pitch
        if d < 0:
            if -d <= reach:
                msg = (f"notes {i}-{i + 2}: lower-neighbour figure would need a pre-bend; "
                       f"not rewritten")
                log.info(msg)
                if diagnostics is not None:
                    diagnostics.append(msg)
            continue
        if x.finger >= 1 and d <= targets.bend_limit(x.finger):
            offer(BendProposal("return", i + 1, x.state, d, release_index=i + 2, anchor_index=i))

    i = 0
    while i < len(notes):
        j = i
        while j + 1 < len(notes) and notes[j + 1].pitch == notes[i].pitch:
            j += 1
        for k in range(i + 1, j + 1, 2):
            for b in range(reach, 0, -1):
                cand = _unison_state(notes, states, k, b, targets, spec, config)
                if cand is not None:
                    offer(BendProposal("unison", k, cand, b, anchor_index=k - 1))
                    break
        i = j + 1

    for i in range(len(notes) - 1):
        x, y = notes[i], notes[i + 1]
        d = y.pitch - x.pitch
        if x.string == y.string and x.finger >= 1 and 1 <= d <= targets.bend_limit(x.finger):
            offer(BendProposal("pair", i + 1, x.state, d, anchor_index=i))

    return [found[k] for k in sorted(found)]


# --- target-driven insertion -----------------------------------------------

def target_count(ratio: float, notes_on_string: int) -> int:
    return math.floor(ratio * notes_on_string + 0.5)


class SelectionReport(NamedTuple):
    category: str
    string: int
    notes: int  # notes on the string when the pass ran
    target: int | None  # None: insert everywhere
    candidates: int
    inserted: int


@dataclass
class Annotation:
    notes: list[RichNote]
    seed: int
    diagnostics: list[str] = field(default_factory=list)
    report: list[SelectionReport] = field(default_factory=list)

    def selection(self, category: str, string: int) -> SelectionReport | None:
        return next((r for r in self.report if r.category == category and r.string == string),
                    None)

    def to_json(self) -> dict:
        return {
            "seed": self.seed,
            "diagnostics": list(self.diagnostics),
            "selection": [r._asdict() for r in self.report],
            "notes": [note_to_dict(n) for n in self.notes],
        }


def note_to_dict(note: RichNote) -> dict:
    ev = note.event
    return {
        "index": ev.index,
        "pitch": ev.pitch,
        "onset_ticks": ev.onset_ticks,
        "duration_ticks": ev.duration_ticks,
        "onset_s": ev.onset_s,
        "duration_s": ev.duration_s,
        "ioi_s": ev.ioi_s if math.isfinite(ev.ioi_s) else None,
        **note.state._asdict(),
        "techniques": [t.to_dict() for t in note.techniques],
    }


def note_from_dict(row: dict) -> RichNote:
    ioi = row.get("ioi_s")
    event = NoteEvent(row["index"], row["pitch"], row.get("onset_ticks", 0),
                      row.get("duration_ticks", 1), row.get("onset_s", 0.0),
                      row.get("duration_s", 0.0), math.inf if ioi is None else ioi)
    state = FingeringState(row["string"], row["fret"], row["finger"], row["hand_position"])
    techniques = tuple(sorted(Technique(t["kind"], t.get("bend_semitones", 0))
                              for t in row.get("techniques", ())))
    return RichNote(event, state, techniques)


def fingered_notes(events: Iterable[NoteEvent], states: Iterable[FingeringState]) -> list[RichNote]:
    return [RichNote(ev, st) for ev, st in zip(events, states, strict=True)]


class _Annotator:
    def __init__(self, notes, targets, spec, config, seed):
        self.notes = list(notes)
        self.targets = targets
        self.spec = spec
        self.config = config
        self.rng = random.Random(seed)
        self.diagnostics: list[str] = []
        self.rewritten: set[int] = set()
        self.report: list[SelectionReport] = []

    def add(self, i: int, *techniques: Technique):
        self.notes[i] = self.notes[i].with_techniques(*techniques)

    def note_counts(self) -> dict[int, int]:
        counts: dict[int, int] = {}
        for n in self.notes:
            counts[n.string] = counts.get(n.string, 0) + 1
        return counts

    def select(self, category: str, candidates: list, string_of, accept, ranked=False):
        """Accept candidates per string until the quota is met.

        ``accept`` re-checks a candidate against the current annotations and
        applies it, returning False if it no longer fits.
        """
        counts = self.note_counts()
        everywhere = category in self.targets.insert_everywhere
        by_string: dict[int, list] = {}
        for c in candidates:
            by_string.setdefault(string_of(c), []).append(c)
        for string in sorted(set(counts) | set(by_string)):
            pool = by_string.get(string, [])
            want = (math.inf if everywhere
                    else target_count(self.targets.ratio(string, category), counts.get(string, 0)))
            if len(pool) > want > 0 and not ranked:
                pool = self.rng.sample(pool, len(pool))
            done = 0
            for c in pool:
                if done >= want:
                    break
                if accept(c):
                    done += 1
            self.report.append(SelectionReport(category, string, counts.get(string, 0),
                                               None if everywhere else want, len(pool), done))

    # each pass -------------------------------------------------------------

    def slides(self):
        if not self.targets.slides:
            return
        cands = [i for i in range(len(self.notes) - 1)
                 if can_slide(self.notes[i], self.notes[i + 1])]

        def accept(i):
            a, b = self.notes[i], self.notes[i + 1]
            if not can_slide(a, b) or a.has(TechniqueKind.SLIDE_START):
                return False
            self.add(i, Technique(TechniqueKind.SLIDE_START))
            self.add(i + 1, Technique(TechniqueKind.SLIDE_STOP))
            return True

        self.select("slide", cands, lambda i: self.notes[i].string, accept)

    def bends(self):
        proposals = find_bend_opportunities(self.notes, self.targets, self.spec, self.config,
                                            self.diagnostics)
        K = TechniqueKind

        def accept(p: BendProposal):
            involved = set(p.rewritten) | {p.anchor_index}
            if involved & self.rewritten:
                return False  # rewrites never build on other rewrites
            # slides are the only earlier annotations; a bent note takes part in none
            if self.notes[p.bend_index].techniques:
                return False
            if p.bend_index > 0 and self.notes[p.bend_index - 1].has(K.SLIDE_START):
                return False
            if p.release_index is not None and self.notes[p.release_index].techniques:
                return False
            states = [n.state for n in self.notes]
            if bend_problems(p, self.notes, states, self.targets, self.spec, self.config):
                return False
            for i in p.rewritten:
                self.notes[i] = replace(self.notes[i], state=p.state)
            self.add(p.bend_index, Technique(K.BEND, p.semitones))
            if p.release_index is not None:
                self.add(p.release_index, Technique(K.BEND_RELEASE, p.semitones))
            self.rewritten.update(p.rewritten)
            return True

        # Overlapping clichés exclude each other (X-Y-X-Y-X offers two bends
        # sharing a note). A dry run in index order keeps a compatible subset,
        # so every remaining candidate can really be inserted.
        saved_notes, saved_rewritten = list(self.notes), set(self.rewritten)
        compatible = [p for p in proposals if accept(p)]
        self.notes, self.rewritten = saved_notes, saved_rewritten
        self.select("bend", compatible, lambda p: p.state.string, accept)

    def legato(self, category: str, kind: TechniqueKind, predicate):
        K = TechniqueKind
        blocked = (K.HAMMER_ON, K.PULL_OFF, K.BEND, K.BEND_RELEASE, K.SLIDE_STOP)

        def eligible(j):
            prev, cur = self.notes[j - 1], self.notes[j]
            return (predicate(prev, cur) and not prev.has(K.BEND)
                    and not any(cur.has(k) for k in blocked))

        def accept(j):
            if not eligible(j):
                return False
            self.add(j, Technique(kind))
            return True

        cands = [j for j in range(1, len(self.notes)) if eligible(j)]
        self.select(category, cands, lambda j: self.notes[j].string, accept)

    def vibrato(self):
        K = TechniqueKind
        levels = {i: vibrato_level(n, self.targets) for i, n in enumerate(self.notes)}
        cands = [i for i, n in enumerate(self.notes)
                 if levels[i] > VibratoLevel.NONE
                 and not n.has(K.BEND) and not n.has(K.BEND_RELEASE)]
        cands.sort(key=lambda i: (-levels[i], -self.notes[i].duration_s, i))

        def accept(i):
            self.add(i, Technique(K.VIBRATO))
            return True

        self.select("vibrato", cands, lambda i: self.notes[i].string, accept, ranked=True)


def apply_targets(notes: Sequence[RichNote], targets: TechniqueTargets, spec: InstrumentSpec,
                  config: FingeringConfig, seed: int = 0) -> Annotation:
    """Insert techniques toward the per-string targets.

    Passes run slides, bends, hammer-ons, pull-offs, vibrato; each later pass
    sees the annotations and re-fretted notes of the earlier ones.
    """
    ann = _Annotator(notes, targets, spec, config, seed)
    ann.slides()
    ann.bends()
    ann.legato("hammer_on", TechniqueKind.HAMMER_ON, can_hammer_on)
    ann.legato("pull_off", TechniqueKind.PULL_OFF, can_pull_off)
    ann.vibrato()
    return Annotation(ann.notes, seed, ann.diagnostics, ann.report)


def annotate(events: Sequence[NoteEvent], states: Sequence[FingeringState],
             targets: TechniqueTargets, spec: InstrumentSpec, config: FingeringConfig,
             seed: int = 0) -> Annotation:
    return apply_targets(fingered_notes(events, states), targets, spec, config, seed)


# --- post-hoc validation ----------------------------------------------------

def technique_violations(notes: Sequence[RichNote], targets: TechniqueTargets,
                         spec: InstrumentSpec, config: FingeringConfig) -> list[str]:
    """Every technique whose precondition or compatibility rule fails.

    Also reports fingering problems of the (possibly re-fretted) sequence and
    bent notes whose sounded pitch differs from the melody.
    """
    K = TechniqueKind
    problems = path_violations([n.event for n in notes], [n.state for n in notes], spec,
                               config, pitches=[n.fretted_pitch for n in notes])
    for i, note in enumerate(notes):
        prev = notes[i - 1] if i > 0 else None
        nxt = notes[i + 1] if i + 1 < len(notes) else None
        kinds = [t.kind for t in note.techniques]
        where = f"note {i}"

        if len(kinds) != len(set(kinds)):
            problems.append(f"{where}: duplicate technique")
        if note.has(K.HAMMER_ON) and note.has(K.PULL_OFF):
            problems.append(f"{where}: hammer-on and pull-off together")
        if note.has(K.HAMMER_ON) and not (prev and can_hammer_on(prev, note)):
            problems.append(f"{where}: hammer-on not executable")
        if note.has(K.PULL_OFF) and not (prev and can_pull_off(prev, note)):
            problems.append(f"{where}: pull-off not executable")
        if (note.has(K.HAMMER_ON) or note.has(K.PULL_OFF)) and prev and prev.has(K.BEND):
            problems.append(f"{where}: legato out of a bent note")
        if note.has(K.VIBRATO) and vibrato_level(note, targets) is VibratoLevel.NONE:
            problems.append(f"{where}: vibrato on an open or short note")
        if note.has(K.SLIDE_START):
            if not (nxt and can_slide(note, nxt) and nxt.has(K.SLIDE_STOP)):
                problems.append(f"{where}: slide start without a reachable stop")
            if nxt and nxt.has(K.BEND):
                problems.append(f"{where}: slide into a bend")
        if note.has(K.SLIDE_STOP) and not (prev and prev.has(K.SLIDE_START)):
            problems.append(f"{where}: slide stop without a start")
        if note.has(K.SLIDE_STOP) and (note.has(K.HAMMER_ON) or note.has(K.PULL_OFF)):
            problems.append(f"{where}: slide and legato on the same transition")

        if note.has(K.BEND):
            b = note.bend
            clash = {K.HAMMER_ON, K.PULL_OFF, K.VIBRATO, K.SLIDE_START, K.BEND_RELEASE}
            if clash & set(kinds):
                problems.append(f"{where}: bend combined with {sorted(k.value for k in clash & set(kinds))}")
            if note.finger < 1 or b > targets.bend_limit(note.finger):
                problems.append(f"{where}: finger {note.finger} cannot bend {b}")
            if note.duration_s < targets.min_bend_duration:
                problems.append(f"{where}: too short to bend")
        if note.has(K.BEND_RELEASE):
            release = next(t for t in note.techniques if t.kind is K.BEND_RELEASE)
            if len(kinds) != 1:
                problems.append(f"{where}: release combined with other techniques")
            if not (prev and prev.has(K.BEND) and prev.state == note.state
                    and prev.bend == release.bend_semitones):
                problems.append(f"{where}: release not paired with the preceding bend")
        if spec.pitch_at(note.string, note.fret) + note.bend != note.pitch:
            problems.append(f"{where}: sounded pitch differs from the melody")
    return problems
