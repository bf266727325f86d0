"""Sweep one fingering weight and report what the optimum trades away.

    python scripts/weight_sweep.py [--weight w_pc] [--values 0 1 2 4 8 16] [MIDI ...]

Prints, per weight value, the summed hand-position movement, string changes,
open strings and total stretch of the optimal fingerings over the melodies
(the test fixtures by default).
"""
import argparse
from pathlib import Path

from richtab.fingering import FingeringConfig, solve, stretch
from richtab.fretboard import InstrumentSpec
from richtab.midi import read_midi

FIXTURES = Path(__file__).resolve().parent.parent / "tests" / "data" / "melodies"


def summarize(states):
    return {
        "position": sum(abs(a.hand_position - b.hand_position) for a, b in zip(states, states[1:])),
        "strings": sum(abs(a.string - b.string) for a, b in zip(states, states[1:])),
        "open": sum(s.finger == 0 for s in states),
        "stretch": sum(stretch(s) for s in states),
    }


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    parser.add_argument("midi", nargs="*", type=Path)
    parser.add_argument("--weight", default="w_pc",
                        choices=["w_pc", "w_sc", "w_hs", "w_open", "w_zone"])
    parser.add_argument("--values", nargs="+", type=float, default=[0, 1, 2, 4, 8, 16])
    args = parser.parse_args(argv)
    paths = args.midi or sorted(FIXTURES.glob("*.mid"))
    melodies = [read_midi(p).events for p in paths]
    spec, base = InstrumentSpec(), FingeringConfig()

    print(f"{args.weight:>8}  {'position':>8}  {'strings':>8}  {'open':>5}  {'stretch':>7}")
    for value in args.values:
        cfg = base.with_weights(**{args.weight: value})
        totals = {"position": 0, "strings": 0, "open": 0, "stretch": 0}
        for events in melodies:
            for key, v in summarize(solve(events, spec, cfg).states).items():
                totals[key] += v
        print(f"{value:>8g}  {totals['position']:>8}  {totals['strings']:>8}  "
              f"{totals['open']:>5}  {totals['stretch']:>7}")


if __name__ == "__main__":
    main()
