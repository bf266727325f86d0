"""Contrast two weight profiles on the fixture melodies.

    python scripts/compare_profiles.py [MIDI ...]

One profile makes string changes the cheapest move (w_sc=1, w_hs=2, w_pc=4),
the other makes position shifts cheapest (w_pc=2, w_hs=1, w_sc=4). The first
should keep the hand in place and cross strings, the second should shift
along the neck and stay on fewer strings.
"""
import argparse
from pathlib import Path

from richtab.fingering import FingeringConfig, solve
from richtab.fretboard import InstrumentSpec
from richtab.midi import read_midi

from weight_sweep import FIXTURES, summarize

PROFILES = {
    "strings cheap": FingeringConfig(w_sc=1, w_hs=2, w_pc=4),
    "shifts cheap": FingeringConfig(w_hs=1, w_pc=2, w_sc=4),
}


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    parser.add_argument("midi", nargs="*", type=Path)
    args = parser.parse_args(argv)
    paths = args.midi or sorted(FIXTURES.glob("*.mid"))
    spec = InstrumentSpec()
    names = list(PROFILES)
    print(f"{'melody':<22}" + "".join(f"{n + ' pos/str':>22}" for n in names) + "  holds")
    held = 0
    for path in paths:
        events = read_midi(path).events
        a, b = (summarize(solve(events, spec, PROFILES[n]).states) for n in names)
        ok = a["position"] <= b["position"] and b["strings"] <= a["strings"]
        held += ok
        print(f"{path.name:<22}{a['position']:>14}/{a['strings']:<7}{b['position']:>14}/"
              f"{b['strings']:<7}  {'yes' if ok else 'NO'}")
    print(f"ordering holds on {held} of {len(paths)} melodies")


if __name__ == "__main__":
    main()
