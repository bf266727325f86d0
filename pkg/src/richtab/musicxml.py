"""MusicXML 3.1 (partwise) output with a notation staff and a TAB staff, plus a reader.

The reader recovers string, fret, fingering and the techniques this module
writes, and tolerates third-party tablature files (unknown notations are
ignored, notes without tablature are skipped with a warning).
"""
from __future__ import annotations

import warnings
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple, Sequence

from .fretboard import InstrumentSpec
from .rhythm import NoteValue, QuantizedRhythm, measure_length, split_duration
from .techniques import RichNote, Technique, TechniqueKind

DOCTYPE = ('<!DOCTYPE score-partwise PUBLIC "-//Recordare//DTD MusicXML 3.1 Partwise//EN" '
           '"http://www.musicxml.org/dtds/partwise.dtd">')
STEPS = ("C", "C", "D", "D", "E", "F", "F", "G", "G", "A", "A", "B")
ALTERS = (0, 1, 0, 1, 0, 0, 1, 0, 1, 0, 1, 0)
STEP_SEMITONES = {"C": 0, "D": 2, "E": 4, "F": 5, "G": 7, "A": 9, "B": 11}
NOTATION_STAFF, TAB_STAFF = 1, 2


class MissingTablatureWarning(UserWarning):
    pass


def spell(pitch: int) -> tuple[str, int, int]:
    """(step, alter, octave) using sharps; MIDI 60 is C4."""
    return STEPS[pitch % 12], ALTERS[pitch % 12], pitch // 12 - 1


class Mark(NamedTuple):
    """One notation child: ``group`` is technical, ornaments or notations."""
    group: str
    tag: str
    type: str | None = None
    value: int | None = None
    release: bool = False


@dataclass
class ScoreNote:
    duration: int  # in divisions
    value: NoteValue
    pitch: int | None = None  # None for rests
    string: int | None = None
    fret: int | None = None
    finger: int | None = None
    tie_start: bool = False
    tie_stop: bool = False
    marks: list[Mark] = field(default_factory=list)
    whole_measure: bool = False

    @property
    def is_rest(self) -> bool:
        return self.pitch is None


@dataclass
class Measure:
    number: int
    notes: list[ScoreNote] = field(default_factory=list)


@dataclass
class ScoreDocument:
    divisions: int
    time_signature: tuple[int, int]
    tuning: tuple[int, ...]
    measures: list[Measure]
    title: str | None = None
    part_name: str = "Electric Guitar"
    metadata: dict[str, str] = field(default_factory=dict)

    @property
    def capacity(self) -> int:
        return int(measure_length(self.time_signature) * self.divisions)


def _marks_for(notes: Sequence[RichNote], i: int) -> tuple[list[Mark], list[Mark]]:
    """Marks for the first and for the last tied segment of note ``i``."""
    K = TechniqueKind
    note = notes[i]
    nxt = notes[i + 1] if i + 1 < len(notes) else None
    first, last = [], []
    for t in note.techniques:
        if t.kind is K.HAMMER_ON:
            first.append(Mark("technical", "hammer-on", "stop"))
        elif t.kind is K.PULL_OFF:
            first.append(Mark("technical", "pull-off", "stop"))
        elif t.kind is K.SLIDE_STOP:
            first.append(Mark("notations", "slide", "stop"))
        elif t.kind is K.SLIDE_START:
            last.append(Mark("notations", "slide", "start"))
        elif t.kind is K.BEND:
            first.append(Mark("technical", "bend", value=t.bend_semitones))
        elif t.kind is K.BEND_RELEASE:
            first.append(Mark("technical", "bend", value=-t.bend_semitones, release=True))
        elif t.kind is K.VIBRATO:
            first.append(Mark("ornaments", "wavy-line", "start"))
            last.append(Mark("ornaments", "wavy-line", "stop"))
    if nxt is not None:
        if nxt.has(K.HAMMER_ON):
            last.append(Mark("technical", "hammer-on", "start"))
        if nxt.has(K.PULL_OFF):
            last.append(Mark("technical", "pull-off", "start"))
    return first, last


def _fill(measures: list[Measure], start: Fraction, length: Fraction, bar: Fraction,
          divisions: int, make) -> None:
    """Lay ``length`` quarters from ``start`` into measures, split at barlines."""
    pieces = []
    pos, end = start, start + length
    while pos < end:
        m = int(pos // bar)
        stop = min(end, (m + 1) * bar)
        for nv in split_duration(stop - pos, divisions):
            pieces.append((m, nv))
        pos = stop
    for k, (m, nv) in enumerate(pieces):
        while len(measures) <= m:
            measures.append(Measure(len(measures) + 1))
        duration = nv.quarters * divisions
        if duration.denominator != 1:
            raise ValueError(f"{nv} does not fit {divisions} divisions per quarter")
        measures[m].notes.append(make(int(duration), nv, k, len(pieces)))


def build_score(notes: Sequence[RichNote], rhythm: Sequence[QuantizedRhythm],
                spec: InstrumentSpec, time_signature: tuple[int, int] = (4, 4),
                divisions: int = 4, title: str | None = None,
                metadata: dict[str, str] | None = None) -> ScoreDocument:
    if len(notes) != len(rhythm):
        raise ValueError(f"internal error: {len(notes)} notes but {len(rhythm)} rhythm entries")
    bar = measure_length(time_signature)
    measures: list[Measure] = []

    def rest(duration, nv, k, n):
        return ScoreNote(duration, nv)

    cursor = Fraction(0)
    for i, (note, r) in enumerate(zip(notes, rhythm)):
        if r.onset < cursor:
            raise ValueError(f"internal error: note {i} starts before the previous one ends")
        if r.onset > cursor:
            _fill(measures, cursor, r.onset - cursor, bar, divisions, rest)
        first, last = _marks_for(notes, i)

        def piece(duration, nv, k, n, note=note, first=first, last=last):
            marks = (first if k == 0 else []) + (last if k == n - 1 else [])
            return ScoreNote(duration, nv, note.pitch, note.string, note.fret,
                             note.finger if note.finger >= 1 else None,
                             tie_start=k < n - 1, tie_stop=k > 0, marks=list(marks))

        _fill(measures, r.onset, r.duration, bar, divisions, piece)
        cursor = r.onset + r.duration

    if not measures:
        measures.append(Measure(1))
    tail = len(measures) * bar - cursor
    if tail > 0 and cursor > 0:
        _fill(measures, cursor, tail, bar, divisions, rest)
    for m in measures:
        if not m.notes:
            m.notes.append(ScoreNote(int(bar * divisions), NoteValue("whole", 0, None),
                                     whole_measure=True))
    return ScoreDocument(divisions, tuple(time_signature), spec.open_pitches, measures,
                         title=title, metadata=dict(metadata or {}))


# --- writing ----------------------------------------------------------------

def _sub(parent, tag, text=None, **attrib):
    el = ET.SubElement(parent, tag, {k.replace("_", "-"): str(v) for k, v in attrib.items()})
    if text is not None:
        el.text = str(text)
    return el


def _attributes(measure_el, doc: ScoreDocument):
    attrs = _sub(measure_el, "attributes")
    _sub(attrs, "divisions", doc.divisions)
    key = _sub(attrs, "key")
    _sub(key, "fifths", 0)
    time = _sub(attrs, "time")
    _sub(time, "beats", doc.time_signature[0])
    _sub(time, "beat-type", doc.time_signature[1])
    _sub(attrs, "staves", 2)
    clef = _sub(attrs, "clef", number=NOTATION_STAFF)
    _sub(clef, "sign", "G")
    _sub(clef, "line", 2)
    _sub(clef, "clef-octave-change", -1)
    clef = _sub(attrs, "clef", number=TAB_STAFF)
    _sub(clef, "sign", "TAB")
    _sub(clef, "line", 5)
    details = _sub(attrs, "staff-details", number=TAB_STAFF)
    _sub(details, "staff-lines", len(doc.tuning))
    # staff line 1 is the bottom line, i.e. the lowest string
    for line, pitch in enumerate(reversed(doc.tuning), start=1):
        tuning = _sub(details, "staff-tuning", line=line)
        step, alter, octave = spell(pitch)
        _sub(tuning, "tuning-step", step)
        if alter:
            _sub(tuning, "tuning-alter", alter)
        _sub(tuning, "tuning-octave", octave)


def _note(measure_el, n: ScoreNote, staff: int):
    el = _sub(measure_el, "note")
    if n.is_rest:
        if n.whole_measure:
            _sub(el, "rest", measure="yes")
        else:
            _sub(el, "rest")
    else:
        pitch = _sub(el, "pitch")
        step, alter, octave = spell(n.pitch)
        _sub(pitch, "step", step)
        if alter:
            _sub(pitch, "alter", alter)
        _sub(pitch, "octave", octave)
    _sub(el, "duration", n.duration)
    if n.tie_stop:
        _sub(el, "tie", type="stop")
    if n.tie_start:
        _sub(el, "tie", type="start")
    _sub(el, "voice", 1 if staff == NOTATION_STAFF else 5)
    if not n.whole_measure:
        _sub(el, "type", n.value.type)
        for _ in range(n.value.dots):
            _sub(el, "dot")
        if n.value.tuplet:
            tm = _sub(el, "time-modification")
            _sub(tm, "actual-notes", n.value.tuplet[0])
            _sub(tm, "normal-notes", n.value.tuplet[1])
    _sub(el, "staff", staff)
    if n.is_rest:
        return

    notations = _sub(el, "notations")
    if n.tie_stop:
        _sub(notations, "tied", type="stop")
    if n.tie_start:
        _sub(notations, "tied", type="start")
    for mark in n.marks:
        if mark.group == "notations":
            _sub(notations, mark.tag, type=mark.type, number=1, line_type="solid")
    ornaments = [m for m in n.marks if m.group == "ornaments"]
    if ornaments:
        orn = _sub(notations, "ornaments")
        for mark in ornaments:
            _sub(orn, mark.tag, type=mark.type)
    tech = _sub(notations, "technical")
    if n.finger:
        _sub(tech, "fingering", n.finger)
    _sub(tech, "string", n.string)
    _sub(tech, "fret", n.fret)
    for mark in n.marks:
        if mark.group != "technical":
            continue
        if mark.tag == "bend":
            bend = _sub(tech, "bend")
            _sub(bend, "bend-alter", mark.value)
            if mark.release:
                _sub(bend, "release")
        elif mark.type == "start":
            _sub(tech, mark.tag, "H" if mark.tag == "hammer-on" else "P", type="start", number=1)
        else:
            _sub(tech, mark.tag, type="stop", number=1)


def to_element(doc: ScoreDocument) -> ET.Element:
    root = ET.Element("score-partwise", version="3.1")
    if doc.title:
        work = _sub(root, "work")
        _sub(work, "work-title", doc.title)
    ident = _sub(root, "identification")
    encoding = _sub(ident, "encoding")
    _sub(encoding, "software", "richtab")
    if doc.metadata:
        misc = _sub(ident, "miscellaneous")
        for name, value in sorted(doc.metadata.items()):
            _sub(misc, "miscellaneous-field", value, name=name)
    part_list = _sub(root, "part-list")
    score_part = _sub(part_list, "score-part", id="P1")
    _sub(score_part, "part-name", doc.part_name)

    part = _sub(root, "part", id="P1")
    for measure in doc.measures:
        m_el = _sub(part, "measure", number=measure.number)
        if measure.number == 1:
            _attributes(m_el, doc)
        for n in measure.notes:
            _note(m_el, n, NOTATION_STAFF)
        backup = _sub(m_el, "backup")
        _sub(backup, "duration", sum(n.duration for n in measure.notes))
        for n in measure.notes:
            _note(m_el, n, TAB_STAFF)
    return root


def serialize(doc: ScoreDocument) -> bytes:
    root = to_element(doc)
    ET.indent(root, space="  ")
    body = ET.tostring(root, encoding="unicode")
    text = '<?xml version="1.0" encoding="UTF-8" standalone="no"?>\n' + DOCTYPE + "\n" + body + "\n"
    return text.encode("utf-8")


# --- reading ----------------------------------------------------------------

@dataclass(frozen=True)
class TabNote:
    string: int
    fret: int
    finger: int | None
    techniques: tuple[Technique, ...] = ()
    pitch: int | None = None
    measure: str | None = None


def _int(el) -> int | None:
    if el is None or el.text is None:
        return None
    try:
        return int(round(float(el.text.strip())))
    except ValueError:
        return None


def _read_pitch(note_el) -> int | None:
    p = note_el.find("pitch")
    if p is None:
        return None
    step = p.findtext("step")
    octave = _int(p.find("octave"))
    if step not in STEP_SEMITONES or octave is None:
        return None
    return (octave + 1) * 12 + STEP_SEMITONES[step] + (_int(p.find("alter")) or 0)


def _read_techniques(note_el) -> set[Technique]:
    K = TechniqueKind
    found: set[Technique] = set()
    for notations in note_el.findall("notations"):
        for tech in notations.findall("technical"):
            for el in tech:
                if el.tag == "hammer-on" and el.get("type") == "stop":
                    found.add(Technique(K.HAMMER_ON))
                elif el.tag == "pull-off" and el.get("type") == "stop":
                    found.add(Technique(K.PULL_OFF))
                elif el.tag == "bend":
                    alter = _int(el.find("bend-alter")) or 0
                    if el.find("release") is not None and alter:
                        found.add(Technique(K.BEND_RELEASE, abs(alter)))
                    elif alter > 0 and el.find("pre-bend") is None:
                        found.add(Technique(K.BEND, alter))
        for slide in notations.findall("slide"):
            if slide.get("type") == "start":
                found.add(Technique(K.SLIDE_START))
            elif slide.get("type") == "stop":
                found.add(Technique(K.SLIDE_STOP))
        for orn in notations.findall("ornaments"):
            if any(w.get("type") == "start" for w in orn.findall("wavy-line")):
                found.add(Technique(K.VIBRATO))
    return found


def _tab_staves(part_el) -> set[str]:
    staves = set()
    for clef in part_el.iter("clef"):
        if clef.findtext("sign") == "TAB":
            staves.add(clef.get("number", "1"))
    return staves


def reparse(data: bytes) -> list[TabNote]:
    """Per-note tablature fields and techniques from a MusicXML document.

    Tied continuation segments are folded into the note they continue. When a
    part has a TAB staff only that staff is read, so notes doubled on a
    notation staff are counted once.
    """
    root = ET.fromstring(data)
    if root.tag != "score-partwise":
        raise ValueError(f"expected score-partwise, found {root.tag}")
    out: list[TabNote] = []
    for part in root.findall("part"):
        tab = _tab_staves(part)
        last: TabNote | None = None
        for measure in part.findall("measure"):
            for note_el in measure.findall("note"):
                if note_el.find("rest") is not None:
                    continue
                if tab and note_el.findtext("staff", "1").strip() not in tab:
                    continue
                techniques = _read_techniques(note_el)
                ties = {t.get("type") for t in note_el.findall("tie")}
                if "stop" in ties and last is not None:
                    if techniques - set(last.techniques):
                        last = TabNote(last.string, last.fret, last.finger,
                                       tuple(sorted(set(last.techniques) | techniques)),
                                       last.pitch, last.measure)
                        out[-1] = last
                    continue
                string = _int(note_el.find("notations/technical/string"))
                fret = _int(note_el.find("notations/technical/fret"))
                if string is None or fret is None:
                    warnings.warn(
                        f"note in measure {measure.get('number')} has no string/fret; skipped",
                        MissingTablatureWarning, stacklevel=2,
                    )
                    last = None
                    continue
                finger = _int(note_el.find("notations/technical/fingering"))
                if finger is None and fret == 0:
                    finger = 0
                last = TabNote(string, fret, finger, tuple(sorted(techniques)),
                               _read_pitch(note_el), measure.get("number"))
                out.append(last)
    return out
