"""Guitar tablature from monophonic MIDI: fingering, techniques, MusicXML."""
__version__ = "0.1.0"

from .config import RunConfig
from .fingering import FingeringConfig, FingeringSolution, FingeringState, solve
from .fretboard import InstrumentSpec
from .midi import Melody, NoteEvent, parse_midi, read_midi
from .musicxml import build_score, reparse, serialize
from .stats import CorpusStats, compare_distributions, scan_corpus
from .techniques import Annotation, RichNote, TechniqueTargets, annotate

__all__ = [
    "Annotation", "CorpusStats", "FingeringConfig", "FingeringSolution", "FingeringState",
    "InstrumentSpec", "Melody", "NoteEvent", "RichNote", "RunConfig", "TechniqueTargets",
    "annotate", "build_score", "compare_distributions", "parse_midi", "read_midi", "reparse",
    "scan_corpus", "serialize", "solve",
]
