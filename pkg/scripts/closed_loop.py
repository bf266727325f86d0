"""Generate a batch of tablatures, re-read them, and compare with the targets.

    python scripts/closed_loop.py [--files 24] [--notes 120] [--out /tmp/closed_loop]

Writes random pentatonic melodies as MIDI, runs ``richtab generate`` on each
with the default targets, runs ``richtab stats`` over the results and prints
measured against configured ratios per string and technique, together with
the number of insertion candidates the annotator found.
"""
import argparse
import json
import random
from pathlib import Path

from richtab.cli import main as richtab
from richtab.stats import CorpusStats
from richtab.techniques import CATEGORIES, TechniqueTargets

from make_fixtures import PENTATONIC, PPQ, scale_pitches, walk, write_midi


def random_line(rng, n):
    pool = scale_pitches(40, PENTATONIC, 52, 81)
    pitches = walk(rng, pool, n)
    notes, t = [], 0
    for p in pitches:
        ticks = rng.choice([PPQ // 4, PPQ // 2, PPQ // 2, PPQ, PPQ, 3 * PPQ // 2, 2 * PPQ])
        notes.append((p, t, max(1, int(ticks * 0.9))))
        t += ticks
    return notes


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    parser.add_argument("--files", type=int, default=24)
    parser.add_argument("--notes", type=int, default=120)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out", type=Path, default=Path("/tmp/closed_loop"))
    args = parser.parse_args(argv)
    midi_dir, score_dir, dump_dir = (args.out / d for d in ("midi", "scores", "dumps"))

    candidates: dict[tuple[int, str], int] = {}
    for k in range(args.files):
        rng = random.Random(args.seed * 1000 + k)
        midi = midi_dir / f"m{k:03d}.mid"
        write_midi(midi, random_line(rng, args.notes), bpm=rng.choice([80, 100, 120]))
        dump = dump_dir / f"m{k:03d}.json"
        code = richtab(["generate", str(midi), "-o", str(score_dir / f"m{k:03d}.musicxml"),
                        "--seed", str(k), "--dump-annotations", str(dump)])
        if code:
            print(f"generate failed on {midi} (exit {code})")
            continue
        for r in json.loads(dump.read_text())["selection"]:
            key = (r["string"], r["category"])
            candidates[key] = candidates.get(key, 0) + r["candidates"]

    stats_path = args.out / "stats.json"
    richtab(["stats", str(score_dir), "-o", str(stats_path)])
    stats = CorpusStats.from_dict(json.loads(stats_path.read_text()))
    targets = TechniqueTargets()
    print(f"\n{'string':>6}  {'technique':<10} {'target':>7} {'measured':>9} {'candidates':>11}")
    for s in stats.strings:
        for cat in CATEGORIES:
            print(f"{s:>6}  {cat:<10} {targets.ratio(s, cat):7.3f} {stats.ratio(s, cat):9.3f} "
                  f"{candidates.get((s, cat), 0):>11}")


if __name__ == "__main__":
    main()
