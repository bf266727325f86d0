import io
import math
import random
import struct

import mido
import pytest
from hypothesis import given, settings, strategies as st

from richtab.midi import (EmptyMelodyError, MidiParseError, MonophonyError, RawNote,
                          TempoMap, check_monophony, parse_midi, read_midi, validate_monophony)

from helpers import ALL_FIXTURES, DATA, midi_bytes


def test_single_note_at_120_bpm():
    melody = parse_midi(midi_bytes([(60, 0, 480)]))
    [ev] = melody.events
    assert ev.pitch == 60 and ev.duration_s == 0.5 and ev.ioi_s == math.inf
    assert melody.time_signature == (4, 4)


def test_overlap_is_reported_with_both_indices():
    with pytest.raises(MonophonyError) as err:
        parse_midi(midi_bytes([(60, 0, 600), (62, 480, 480)]))
    assert err.value.pairs == [(0, 1)]


def test_clip_policy_truncates_earlier_note():
    melody = parse_midi(midi_bytes([(60, 0, 600), (62, 480, 480)]), clip_overlaps=True)
    assert [e.duration_ticks for e in melody.events] == [480, 480]


def test_abutting_notes_are_monophonic():
    notes = [RawNote(60, 0, 480), RawNote(62, 480, 480)]
    assert validate_monophony(notes) == notes


def test_equal_onsets_raise_even_when_clipping():
    with pytest.raises(MonophonyError):
        validate_monophony([RawNote(60, 0, 480), RawNote(64, 0, 480)], clip=True)


def test_random_non_overlapping_notes_ok():
    rng = random.Random(5)
    t, notes = 0, []
    for _ in range(100):
        d = rng.randint(1, 500)
        notes.append(RawNote(rng.randint(40, 80), t, d))
        t += d + rng.randint(0, 100)
    assert check_monophony(notes) == []


@given(st.lists(st.tuples(st.integers(0, 2000), st.integers(1, 400)), min_size=1, max_size=12))
def test_monophony_matches_pairwise_disjointness(spans):
    notes = sorted((RawNote(60, a, d) for a, d in spans), key=lambda n: n.onset_ticks)
    disjoint = all(
        a.onset_ticks + a.duration_ticks <= b.onset_ticks or b.onset_ticks + b.duration_ticks <= a.onset_ticks
        for i, a in enumerate(notes) for b in notes[i + 1:]
    )
    assert (check_monophony(notes) == []) == disjoint


def test_velocity_zero_note_on_is_note_off():
    mid = mido.MidiFile(ticks_per_beat=480)
    tr = mido.MidiTrack()
    tr += [mido.Message("note_on", note=64, velocity=80, time=0),
           mido.Message("note_on", note=64, velocity=0, time=240)]
    mid.tracks.append(tr)
    buf = io.BytesIO()
    mid.save(file=buf)
    [ev] = parse_midi(buf.getvalue()).events
    assert ev.duration_ticks == 240


def test_running_status():
    track = bytes([0x00, 0x90, 60, 100, 0x83, 0x60, 60, 0, 0x00, 62, 100, 0x83, 0x60, 62, 0,
                   0x00, 0xFF, 0x2F, 0x00])
    data = (b"MThd" + struct.pack(">IHHH", 6, 0, 1, 480)
            + b"MTrk" + struct.pack(">I", len(track)) + track)
    melody = parse_midi(data)
    assert [(e.pitch, e.onset_ticks, e.duration_ticks) for e in melody.events] == [
        (60, 0, 480), (62, 480, 480)]


def test_tempo_changes():
    tm = TempoMap(480, [(0, 500_000), (960, 250_000)])
    assert tm.seconds(960) == pytest.approx(1.0)
    assert tm.seconds(1440) == pytest.approx(1.25)


@pytest.mark.parametrize("data,offset", [
    (b"RIFF0000", 0),
    (b"MThd" + struct.pack(">IHHH", 6, 2, 1, 480), 8),  # the format field
    (b"MThd" + struct.pack(">IHHH", 6, 0, 1, 480) + b"MTrk" + struct.pack(">I", 50) + b"\x00", None),
])
def test_malformed_files_report_offset(data, offset):
    with pytest.raises(MidiParseError) as err:
        parse_midi(data)
    assert "byte offset" in str(err.value)
    if offset is not None:
        assert err.value.offset == offset


def test_no_notes():
    with pytest.raises(EmptyMelodyError):
        parse_midi(midi_bytes([]))


def test_blues_fixture():
    melody = read_midi(DATA / "blues12.mid")
    assert 40 <= len(melody.events) <= 80
    onsets = [e.onset_ticks for e in melody.events]
    assert all(a < b for a, b in zip(onsets, onsets[1:]))


def _mido_notes(path):
    """Independent reading: absolute seconds of note on/off pairs via mido."""
    mid = mido.MidiFile(path)
    t, open_, notes = 0.0, {}, []
    for msg in mid:  # merged tracks, time in seconds
        t += msg.time
        if msg.type == "note_on" and msg.velocity > 0:
            open_.setdefault(msg.note, []).append(t)
        elif msg.type in ("note_off", "note_on"):
            start = open_[msg.note].pop(0)
            notes.append((start, msg.note, t - start))
    return sorted(notes)


@pytest.mark.parametrize("path", ALL_FIXTURES, ids=lambda p: p.name)
def test_seconds_match_mido(path):
    events = read_midi(path).events
    ref = _mido_notes(path)
    assert len(ref) == len(events)
    for ev, (onset, pitch, dur) in zip(events, ref):
        assert ev.pitch == pitch
        assert abs(ev.onset_s - onset) < 1e-6
        assert abs(ev.duration_s - dur) < 1e-6


@pytest.mark.parametrize("path", ALL_FIXTURES, ids=lambda p: p.name)
def test_event_invariants(path):
    events = read_midi(path).events
    for a, b in zip(events, events[1:]):
        assert a.onset_ticks < b.onset_ticks
        assert a.ioi_s == pytest.approx(b.onset_s - a.onset_s, abs=1e-12)
        assert a.ioi_s >= 0
    assert all(e.duration_ticks > 0 for e in events)
    assert events[-1].ioi_s == math.inf


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(st.integers(21, 108), st.integers(0, 300), st.integers(1, 900)),
                min_size=1, max_size=20),
       st.sampled_from([60, 97, 120, 180]), st.sampled_from([96, 480, 960]))
def test_random_files_match_mido(spec, bpm, ppq):
    notes, t = [], 0
    for pitch, gap, dur in spec:
        notes.append((pitch, t + gap, dur))
        t += gap + dur
    data = midi_bytes(notes, bpm=bpm, ppq=ppq)
    events = parse_midi(data).events
    mid = mido.MidiFile(file=io.BytesIO(data))
    tempo = mido.bpm2tempo(bpm)
    for ev, (pitch, onset, dur) in zip(events, notes, strict=True):
        assert ev.pitch == pitch
        assert abs(ev.onset_s - mido.tick2second(onset, mid.ticks_per_beat, tempo)) < 1e-6
        assert abs(ev.duration_s - mido.tick2second(dur, mid.ticks_per_beat, tempo)) < 1e-6
