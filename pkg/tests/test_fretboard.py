import pytest
from hypothesis import given, strategies as st

from richtab.fretboard import STANDARD_TUNING, InstrumentSpec, Placement

SPEC = InstrumentSpec()


def test_defaults():
    assert SPEC.string_count == 6
    assert SPEC.open_pitches == (64, 59, 55, 50, 45, 40)
    assert SPEC.fret_count == 22


@pytest.mark.parametrize("string,fret,pitch", [(6, 0, 40), (2, 5, 64), (1, 22, 86)])
def test_pitch_at(string, fret, pitch):
    assert SPEC.pitch_at(string, fret) == pitch


@pytest.mark.parametrize("string,fret", [(0, 0), (7, 0), (1, -1), (1, 23)])
def test_pitch_at_out_of_range(string, fret):
    with pytest.raises(ValueError):
        SPEC.pitch_at(string, fret)


def test_candidates_e4():
    assert set(SPEC.candidates_for_pitch(64)) == {(1, 0), (2, 5), (3, 9), (4, 14), (5, 19)}


def test_candidates_edges():
    assert SPEC.candidates_for_pitch(39) == []
    assert SPEC.candidates_for_pitch(40) == [Placement(6, 0)]
    assert Placement(6, 0).is_open


def test_candidates_exhaustive():
    for pitch in range(128):
        cands = SPEC.candidates_for_pitch(pitch)
        assert len(cands) <= SPEC.string_count
        assert all(SPEC.pitch_at(*p) == pitch for p in cands)
        expected = {(s, pitch - o) for s, o in enumerate(STANDARD_TUNING, 1)
                    if 0 <= pitch - o <= 22}
        assert set(cands) == expected


def test_adjacent_semitones_shift_by_one_fret():
    for pitch in range(30, 90):
        shifted = {(p.string, p.fret + 1) for p in SPEC.candidates_for_pitch(pitch)}
        upper = set(SPEC.candidates_for_pitch(pitch + 1))
        # the only differences: a placement falls off the last fret or a new open string
        assert all(f == SPEC.fret_count + 1 for _, f in shifted - upper)
        assert all(f == 0 for _, f in upper - shifted)


@given(st.lists(st.integers(20, 80), min_size=1, max_size=8), st.integers(1, 30))
def test_alternate_tunings(opens, frets):
    spec = InstrumentSpec(tuple(opens), frets)
    for pitch in range(min(opens), max(opens) + frets + 1):
        for p in spec.candidates_for_pitch(pitch):
            assert spec.pitch_at(*p) == pitch


def test_dict_round_trip():
    spec = InstrumentSpec((62, 57, 53, 48), 17)
    assert InstrumentSpec.from_dict(spec.to_dict()) == spec
    with pytest.raises(ValueError):
        InstrumentSpec.from_dict({"open_pitches": [64], "capo": 2})
    with pytest.raises(ValueError):
        InstrumentSpec.from_dict({"open_pitches": [64, 59], "string_count": 6})
