"""Write the MIDI fixtures under tests/data.

    python scripts/make_fixtures.py [--out tests/data]

The melodies are seeded random walks over blues and pentatonic scales with
phrase-level repetition, so they contain the neighbour figures, repeated
notes and legato steps that the technique passes look for. Re-running the
script reproduces the committed files byte for byte.
"""
import argparse
import random
from pathlib import Path

import mido

PPQ = 480
A_BLUES = (0, 3, 5, 6, 7, 10)
PENTATONIC = (0, 3, 5, 7, 10)
MAJOR = (0, 2, 4, 5, 7, 9, 11)
DORIAN = (0, 2, 3, 5, 7, 9, 10)


def scale_pitches(root, intervals, low, high):
    return [p for p in range(low, high + 1) if (p - root) % 12 in intervals]


def write_midi(path, notes, bpm=120, ppq=PPQ, time_signature=(4, 4)):
    """``notes`` are (pitch, onset_ticks, duration_ticks) triples."""
    mid = mido.MidiFile(ticks_per_beat=ppq, type=1)
    meta = mido.MidiTrack()
    meta.append(mido.MetaMessage("set_tempo", tempo=mido.bpm2tempo(bpm), time=0))
    meta.append(mido.MetaMessage("time_signature", numerator=time_signature[0],
                                 denominator=time_signature[1], time=0))
    mid.tracks.append(meta)
    track = mido.MidiTrack()
    msgs = []
    for pitch, onset, dur in notes:
        msgs.append((onset + dur, 0, mido.Message("note_off", note=pitch, velocity=64)))
        msgs.append((onset, 1, mido.Message("note_on", note=pitch, velocity=90)))
    now = 0
    for tick, _, msg in sorted(msgs, key=lambda m: (m[0], m[1])):
        track.append(msg.copy(time=tick - now))
        now = tick
    mid.tracks.append(track)
    path.parent.mkdir(parents=True, exist_ok=True)
    mid.save(path)


def walk(rng, pool, n, start=None, max_step=3):
    i = start if start is not None else rng.randrange(len(pool))
    out = []
    for _ in range(n):
        out.append(pool[i])
        r = rng.random()
        if r < 0.15 and out[-2:-1] and len(out) >= 2:
            # neighbour return figure
            i = pool.index(out[-2])
            continue
        if r < 0.25:
            continue  # repeated note
        step = rng.choice([s for s in range(-max_step, max_step + 1) if s])
        i = min(max(i + step, 0), len(pool) - 1)
    return out


RHYTHMS = [
    [1, 1, 1, 1], [0.5, 0.5, 1, 2], [1.5, 0.5, 1, 1], [0.5] * 8,
    [2, 1, 1], [0.5, 0.5, 0.5, 0.5, 2], [1, 0.5, 0.5, 2], [0.25, 0.25, 0.5, 1, 2],
]


def phrase_rhythm(rng, bars, beats=4):
    out = []
    for _ in range(bars):
        pattern = [d * beats / 4 for d in rng.choice(RHYTHMS)]
        out.extend(pattern)
    return out


def melody(rng, pool, bars, rest_prob=0.1, legato=0.9):
    durs = phrase_rhythm(rng, bars)
    pitches = walk(rng, pool, len(durs))
    notes, t = [], 0
    for p, d in zip(pitches, durs):
        ticks = int(d * PPQ)
        if rng.random() >= rest_prob:
            notes.append((p, t, max(1, int(ticks * legato))))
        t += ticks
    return notes


def blues(seed=12):
    """Twelve bars over a blues in A, the riff moving with the chords."""
    rng = random.Random(seed)
    notes, t = [], 0
    roots = [0, 0, 0, 0, 5, 5, 0, 0, 7, 5, 0, 7]
    riff = None
    for bar, shift in enumerate(roots):
        pool = scale_pitches(45 + shift, A_BLUES, 55 + shift, 76 + shift // 2)
        if riff is None or bar % 4 == 0:
            riff = melody(rng, pool, 1, rest_prob=0.05)
        for p, onset, dur in riff:
            q = p + shift if bar % 4 else p
            notes.append((min(q, 84), t + onset, dur))
        t += 4 * PPQ
    return notes


STYLES = [
    ("blues", 45, A_BLUES, 52, 79),
    ("pentatonic", 40, PENTATONIC, 52, 81),
    ("major", 43, MAJOR, 50, 79),
    ("dorian", 50, DORIAN, 50, 79),
]


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    parser.add_argument("--out", default=Path(__file__).resolve().parent.parent / "tests" / "data")
    args = parser.parse_args(argv)
    out = Path(args.out)
    write_midi(out / "blues12.mid", blues(), bpm=100)
    for k in range(20):
        rng = random.Random(1000 + k)
        name, root, intervals, low, high = STYLES[k % len(STYLES)]
        pool = scale_pitches(root, intervals, low, high)
        notes = melody(rng, pool, bars=rng.randint(6, 10))
        write_midi(out / "melodies" / f"{k:02d}_{name}.mid", notes, bpm=rng.choice([80, 96, 110, 126]))


if __name__ == "__main__":
    main()
