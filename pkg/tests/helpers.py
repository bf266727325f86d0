"""Melody builders shared by the test modules."""
import io
import math
import random
from pathlib import Path

import mido

from richtab.midi import NoteEvent

DATA = Path(__file__).parent / "data"
XSD = DATA / "musicxml-3.1" / "musicxml.xsd"
FIXTURES = sorted((DATA / "melodies").glob("*.mid"))
ALL_FIXTURES = [DATA / "blues12.mid"] + FIXTURES

TICKS_PER_SECOND = 960  # 480 ppq at 120 bpm


def events_from(pitches, iois=None, durations=None) -> list[NoteEvent]:
    """Events at 120 bpm / 480 ppq; IOIs and durations in seconds."""
    n = len(pitches)
    iois = list(iois) if iois is not None else [0.5] * n
    durations = list(durations) if durations is not None else iois
    out, t = [], 0
    for i, p in enumerate(pitches):
        ioi_ticks = round(iois[i] * TICKS_PER_SECOND) if i < n - 1 else None
        dur = max(1, round(durations[i] * TICKS_PER_SECOND))
        if ioi_ticks is not None:
            dur = min(dur, ioi_ticks)
        ioi = ioi_ticks / TICKS_PER_SECOND if ioi_ticks is not None else math.inf
        out.append(NoteEvent(i, p, t, dur, t / TICKS_PER_SECOND, dur / TICKS_PER_SECOND, ioi))
        if ioi_ticks is not None:
            t += ioi_ticks
    return out


def random_melody(rng: random.Random, n: int, low: int = 45, high: int = 80,
                  ioi=(0.1, 1.0), max_step: int | None = None) -> list[NoteEvent]:
    """Random pitches (optionally a bounded random walk) and uniform IOIs.

    IOIs are whole 1/960 s steps so the tick and second views agree exactly.
    """
    pitches = []
    for _ in range(n):
        if max_step is None or not pitches:
            pitches.append(rng.randint(low, high))
        else:
            step = rng.randint(-max_step, max_step)
            pitches.append(min(max(pitches[-1] + step, low), high))
    lo, hi = (round(x * TICKS_PER_SECOND) for x in ioi)
    iois = [rng.randint(lo, hi) / TICKS_PER_SECOND for _ in range(n)]
    return events_from(pitches, iois)


def midi_bytes(notes, bpm=120, ppq=480, time_signature=None, fmt=1) -> bytes:
    """SMF bytes written by mido. ``notes`` are (pitch, onset_ticks, duration_ticks)."""
    mid = mido.MidiFile(ticks_per_beat=ppq, type=fmt)
    track = mido.MidiTrack()
    track.append(mido.MetaMessage("set_tempo", tempo=mido.bpm2tempo(bpm), time=0))
    if time_signature:
        track.append(mido.MetaMessage("time_signature", numerator=time_signature[0],
                                      denominator=time_signature[1], time=0))
    msgs = []
    for pitch, onset, dur in notes:
        msgs.append((onset + dur, 0, mido.Message("note_off", note=pitch, velocity=0)))
        msgs.append((onset, 1, mido.Message("note_on", note=pitch, velocity=90)))
    now = 0
    for tick, _, msg in sorted(msgs, key=lambda m: (m[0], m[1])):
        track.append(msg.copy(time=tick - now))
        now = tick
    mid.tracks.append(track)
    buf = io.BytesIO()
    mid.save(file=buf)
    return buf.getvalue()


def melody_midi(events, path) -> Path:
    """Write events (as produced by ``events_from``) to a MIDI file."""
    notes = [(e.pitch, e.onset_ticks, e.duration_ticks) for e in events]
    Path(path).write_bytes(midi_bytes(notes, bpm=120, ppq=480))
    return Path(path)
