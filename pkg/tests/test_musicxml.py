import random
import warnings
import xml.etree.ElementTree as ET
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st
from lxml import etree

from richtab.fingering import FingeringConfig, FingeringState, NoFeasiblePathError, solve
from richtab.fretboard import InstrumentSpec
from richtab.midi import read_midi
from richtab.musicxml import MissingTablatureWarning, build_score, reparse, serialize, spell
from richtab.rhythm import QuantizedRhythm, quantize, score_divisions
from richtab.techniques import (Technique, TechniqueKind, TechniqueTargets, annotate,
                                fingered_notes)

from helpers import ALL_FIXTURES, DATA, XSD, events_from, random_melody

K = TechniqueKind
S = FingeringState
SPEC = InstrumentSpec()
CFG = FingeringConfig()
SCHEMA = etree.XMLSchema(etree.parse(str(XSD)))


def assert_valid(data: bytes):
    doc = etree.fromstring(data)
    ok = SCHEMA.validate(doc)
    assert ok, SCHEMA.error_log


def score_bytes(notes, grid=4, ts=(4, 4), ppq=480):
    rhythm = quantize([n.event for n in notes], ppq, grid, ts)
    return serialize(build_score(notes, rhythm, SPEC, ts, score_divisions(grid, ts)))


def tab_notes(data):
    root = ET.fromstring(data)
    return [n for n in root.iter("note") if n.findtext("staff") == "2" and n.find("rest") is None]


def test_spelling():
    assert spell(60) == ("C", 0, 4)
    assert spell(61) == ("C", 1, 4)
    assert spell(40) == ("E", 0, 2)


def test_single_note():
    # fret 3 on string 5 sounds C3 and is written as C4 under the octave clef
    notes = fingered_notes(events_from([48], [0.5]), [S(5, 3, 2, 2)])
    data = score_bytes(notes)
    assert_valid(data)
    root = ET.fromstring(data)
    assert len(root.findall("part/measure")) == 1
    [note] = tab_notes(data)
    tech = note.find("notations/technical")
    assert (tech.findtext("string"), tech.findtext("fret"), tech.findtext("fingering")) == ("5", "3", "2")
    assert note.findtext("type") == "quarter"
    assert root.find(".//clef/clef-octave-change").text == "-1"


def test_hammer_on_pairing():
    notes = fingered_notes(events_from([64, 66], [0.5, 0.5]), [S(2, 5, 1, 5), S(2, 7, 3, 5)])
    notes[1] = notes[1].with_techniques(Technique(K.HAMMER_ON))
    data = score_bytes(notes)
    assert_valid(data)
    first, second = tab_notes(data)
    assert first.find("notations/technical/hammer-on").get("type") == "start"
    assert second.find("notations/technical/hammer-on").get("type") == "stop"


def test_bend_and_release():
    notes = fingered_notes(events_from([67, 69, 67], [0.5] * 3), [S(2, 8, 3, 6)] * 3)
    notes[1] = notes[1].with_techniques(Technique(K.BEND, 2))
    notes[2] = notes[2].with_techniques(Technique(K.BEND_RELEASE, 2))
    data = score_bytes(notes)
    assert_valid(data)
    _, bent, released = tab_notes(data)
    assert bent.findtext("notations/technical/bend/bend-alter") == "2"
    assert released.find("notations/technical/bend/release") is not None
    # the notation staff shows the sounding pitch, the TAB the fretted place
    assert bent.findtext("pitch/step") == "A"
    assert bent.findtext("notations/technical/fret") == "8"


def test_vibrato_and_slide_markup():
    notes = fingered_notes(events_from([67, 70], [1.0, 1.0]), [S(2, 8, 1, 8), S(2, 11, 1, 11)])
    notes[0] = notes[0].with_techniques(Technique(K.SLIDE_START))
    notes[1] = notes[1].with_techniques(Technique(K.SLIDE_STOP), Technique(K.VIBRATO))
    data = score_bytes(notes)
    assert_valid(data)
    a, b = tab_notes(data)
    assert a.find("notations/slide").get("type") == "start"
    assert b.find("notations/slide").get("type") == "stop"
    assert b.find("notations/ornaments/wavy-line").get("type") == "start"
    got = reparse(data)
    assert [set(n.techniques) for n in got] == [set(n.techniques) for n in notes]


def test_empty_melody():
    data = serialize(build_score([], [], SPEC))
    assert_valid(data)
    measures = ET.fromstring(data).findall("part/measure")
    assert len(measures) == 1
    assert reparse(data) == []


def test_serialize_is_deterministic():
    notes = fingered_notes(events_from([60, 62, 64]), [S(3, 5, 1, 5), S(3, 7, 3, 5), S(2, 5, 1, 5)])
    assert score_bytes(notes) == score_bytes(notes)


def test_misaligned_sequences():
    notes = fingered_notes(events_from([60]), [S(3, 5, 1, 5)])
    with pytest.raises(ValueError, match="internal error"):
        build_score(notes, [], SPEC)


def test_note_across_barline_is_tied():
    notes = fingered_notes(events_from([60, 62], [1.5, 1.5]), [S(3, 5, 1, 5), S(3, 7, 3, 5)])
    rhythm = [QuantizedRhythm(Fraction(3), Fraction(2), 0, Fraction(3)),
              QuantizedRhythm(Fraction(5), Fraction(1), 1, Fraction(1))]
    data = serialize(build_score(notes, rhythm, SPEC))
    assert_valid(data)
    tied = [n for n in tab_notes(data) if n.find("tie") is not None]
    assert len(tied) == 2
    assert [n.string for n in reparse(data)] == [3, 3]


def measure_totals(data):
    root = ET.fromstring(data)
    divisions = int(root.findtext(".//divisions"))
    beats, beat_type = int(root.findtext(".//beats")), int(root.findtext(".//beat-type"))
    capacity = Fraction(4 * beats, beat_type) * divisions
    for m in root.iter("measure"):
        per_staff = {}
        for n in m.findall("note"):
            staff = n.findtext("staff", "1")
            per_staff[staff] = per_staff.get(staff, 0) + int(n.findtext("duration"))
        yield capacity, per_staff


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from([1, 2, 4, 8, 12, 16, 24, 48]),
       st.sampled_from([(4, 4), (3, 4), (6, 8), (5, 8), (2, 2)]))
def test_measures_are_full_and_valid(seed, grid, ts):
    rng = random.Random(seed)
    evs = random_melody(rng, rng.randint(1, 25), low=52, high=76, max_step=4, ioi=(0.1, 1.3))
    try:
        states = solve(evs, SPEC, CFG).states
    except NoFeasiblePathError:
        return
    ann = annotate(evs, states, TechniqueTargets(slides=True), SPEC, CFG, seed=seed)
    data = score_bytes(ann.notes, grid, ts)
    for capacity, per_staff in measure_totals(data):
        assert set(per_staff) == {"1", "2"}
        assert all(total == capacity for total in per_staff.values())
    assert_valid(data)
    back = reparse(data)
    assert [(n.string, n.fret, n.finger if n.finger else 0, set(n.techniques)) for n in back] == [
        (n.string, n.fret, n.finger, set(n.techniques)) for n in ann.notes]


@pytest.mark.parametrize("path", ALL_FIXTURES, ids=lambda p: p.name)
def test_fixture_round_trip(path):
    melody = read_midi(path)
    states = solve(melody.events, SPEC, CFG).states
    ann = annotate(melody.events, states, TechniqueTargets(slides=True), SPEC, CFG, seed=1)
    rhythm = quantize(melody.events, melody.ppq, 4, melody.time_signature)
    data = serialize(build_score(ann.notes, rhythm, SPEC, melody.time_signature, 4))
    assert_valid(data)
    back = reparse(data)
    assert len(back) == len(ann.notes)
    for got, want in zip(back, ann.notes):
        assert (got.string, got.fret) == (want.string, want.fret)
        assert (got.finger or 0) == want.finger
        assert set(got.techniques) == set(want.techniques)
        assert got.pitch == want.pitch


def test_note_without_string_is_skipped():
    data = b"""<?xml version="1.0"?>
<score-partwise version="3.1"><part-list><score-part id="P1"><part-name>g</part-name></score-part></part-list>
<part id="P1"><measure number="1">
<note><pitch><step>E</step><octave>4</octave></pitch><duration>1</duration></note>
<note><pitch><step>G</step><octave>4</octave></pitch><duration>1</duration>
<notations><technical><string>1</string><fret>3</fret></technical></notations></note>
</measure></part></score-partwise>"""
    with pytest.warns(MissingTablatureWarning):
        got = reparse(data)
    assert [(n.string, n.fret) for n in got] == [(1, 3)]


def test_third_party_file():
    with warnings.catch_warnings():
        warnings.simplefilter("error", MissingTablatureWarning)
        got = reparse((DATA / "third_party_tab.musicxml").read_bytes())
    assert got and all(n.string >= 1 and n.fret >= 0 for n in got)
