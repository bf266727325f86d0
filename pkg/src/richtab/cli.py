"""Command-line entry point.

    richtab generate melody.mid [-o out.musicxml] [--config run.json] ...
    richtab stats corpus/ [-o stats.json] [--compare a.json b.json]
    richtab config init [-o run.json]

Exit codes: 0 success, 1 input error, 2 no playable fingering, 3 internal error.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
import warnings
from pathlib import Path

from . import __version__
from .config import ConfigError, RunConfig, load_config
from .fingering import FingeringError, solve
from .midi import MidiError, read_midi
from .musicxml import build_score, serialize
from .rhythm import quantize, score_divisions
from .stats import CorpusStats, EmptyCorpusError, compare_distributions, format_table, scan_corpus
from .techniques import annotate, fingered_notes

EXIT_OK, EXIT_INPUT, EXIT_INFEASIBLE, EXIT_INTERNAL = 0, 1, 2, 3

log = logging.getLogger("richtab")


class StageError(Exception):
    def __init__(self, stage: str, message: str, code: int):
        super().__init__(f"[{stage}] {message}")
        self.stage, self.code = stage, code


def _write(path, data: bytes | str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if isinstance(data, str):
        data = data.encode()
    path.write_bytes(data)


def set_verbosity(level: int) -> None:
    logging.getLogger("richtab").setLevel(logging.WARNING - 10 * min(level, 2))


def _dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def embedded_config(config: RunConfig) -> str:
    """The effective config as written into the score; paths are left out so
    the score only depends on input bytes, config and seed."""
    data = config.to_dict()
    for key in ("input", "output", "verbosity"):
        data.pop(key)
    return json.dumps(data, sort_keys=True, separators=(",", ":"))


def generate(config: RunConfig, dump_solution=None, dump_annotations=None) -> Path:
    if config.input is None:
        raise StageError("input", "no input MIDI file given", EXIT_INPUT)
    src = Path(config.input)
    if config.verbosity:
        set_verbosity(config.verbosity)
    try:
        melody = read_midi(src, track=config.track, clip_overlaps=config.clip_overlaps)
    except OSError as exc:
        raise StageError("input", f"cannot read {src}: {exc.strerror or exc}", EXIT_INPUT) from exc
    except MidiError as exc:
        raise StageError("midi", str(exc), EXIT_INPUT) from exc
    log.info("read %d notes from %s", len(melody.events), src)

    try:
        solution = solve(melody.events, config.instrument, config.fingering)
    except FingeringError as exc:
        raise StageError("fingering", str(exc), EXIT_INFEASIBLE) from exc
    log.info("fingering cost %.3f", solution.objective)

    annotation = annotate(melody.events, solution.states, config.techniques,
                          config.instrument, config.fingering, seed=config.seed)

    rhythm = quantize(melody.events, melody.ppq, config.grid, melody.time_signature)
    divisions = score_divisions(config.grid, melody.time_signature)
    try:
        doc = build_score(annotation.notes, rhythm, config.instrument, melody.time_signature,
                          divisions, title=src.stem,
                          metadata={"richtab-version": __version__,
                                    "richtab-seed": str(config.seed),
                                    "richtab-config": embedded_config(config)})
    except ValueError as exc:
        raise StageError("export", str(exc), EXIT_INPUT) from exc

    out = Path(config.output) if config.output else src.with_suffix(".musicxml")
    _write(out, serialize(doc))
    if dump_solution:
        _write(dump_solution, _dump_json({"objective": solution.objective,
                                          "notes": solution.to_json(melody.events)}))
    if dump_annotations:
        notes = fingered_notes(melody.events, solution.states)
        _write(dump_annotations, _dump_json({**annotation.to_json(),
                                             "solver_states": [n.state._asdict() for n in notes]}))
    return out


def _cmd_generate(args) -> int:
    try:
        config = load_config(args.config) if args.config else RunConfig()
        config = config.override(input=args.midi, output=args.output, seed=args.seed,
                                 grid=args.grid, track=args.track,
                                 clip_overlaps=True if args.clip_overlaps else None)
        if args.targets:
            ratios = json.loads(Path(args.targets).read_text())["ratios"]
            config = config.override(techniques=config.techniques.with_ratios(ratios))
    except (OSError, KeyError, json.JSONDecodeError) as exc:
        raise StageError("config", f"cannot load: {exc}", EXIT_INPUT) from exc
    except (ConfigError, ValueError) as exc:
        raise StageError("config", str(exc), EXIT_INPUT) from exc
    out = generate(config, args.dump_solution, args.dump_annotations)
    print(f"wrote {out}")
    return EXIT_OK


def _load_stats(path) -> CorpusStats:
    try:
        return CorpusStats.from_dict(json.loads(Path(path).read_text()))
    except (OSError, KeyError, ValueError, AttributeError) as exc:
        raise StageError("stats", f"cannot load statistics {path}: {exc}", EXIT_INPUT) from exc


def _cmd_stats(args) -> int:
    if args.compare:
        a, b = (_load_stats(p) for p in args.compare)
        try:
            print(compare_distributions(a, b).table())
        except EmptyCorpusError as exc:
            raise StageError("stats", str(exc), EXIT_INPUT) from exc
        return EXIT_OK
    if not args.paths:
        raise StageError("stats", "no corpus paths given", EXIT_INPUT)
    missing = [p for p in args.paths if not Path(p).exists()]
    if missing:
        raise StageError("stats", f"no such file or directory: {missing[0]}", EXIT_INPUT)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        try:
            stats = scan_corpus(args.paths)
        except EmptyCorpusError as exc:
            raise StageError("stats", str(exc), EXIT_INPUT) from exc
        finally:
            for w in caught:
                print(f"warning: {w.message}", file=sys.stderr)
    print(format_table(stats))
    if args.output:
        _write(args.output, _dump_json(stats.to_dict()))
    return EXIT_OK


def _cmd_config_init(args) -> int:
    text = RunConfig().to_json()
    if args.output:
        _write(args.output, text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    # usage errors are input errors; argparse's own status 2 means infeasible here
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-v", "--verbose", action="count", default=argparse.SUPPRESS)
    parser = _Parser(prog="richtab", description="Guitar tablature with fingering and techniques from monophonic MIDI.", parents=[common])
    parser.add_argument("--version", action="version", version=f"richtab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    gen = sub.add_parser("generate", parents=[common], help="MIDI melody to annotated MusicXML tablature")
    gen.add_argument("midi")
    gen.add_argument("-o", "--output")
    gen.add_argument("--config", help="run configuration JSON (see 'config init')")
    gen.add_argument("--targets", help="statistics JSON whose ratios replace the configured ones")
    gen.add_argument("--seed", type=int)
    gen.add_argument("--grid", type=int, help="quantization subdivisions per quarter")
    gen.add_argument("--track", type=int)
    gen.add_argument("--clip-overlaps", action="store_true")
    gen.add_argument("--dump-solution", metavar="PATH")
    gen.add_argument("--dump-annotations", metavar="PATH")
    gen.set_defaults(func=_cmd_generate)

    st = sub.add_parser("stats", parents=[common], help="per-string technique ratios of a tablature corpus")
    st.add_argument("paths", nargs="*")
    st.add_argument("-o", "--output")
    st.add_argument("--compare", nargs=2, metavar=("A", "B"),
                    help="compare the per-string note distributions of two statistics files")
    st.set_defaults(func=_cmd_stats)

    cfg = sub.add_parser("config", help="configuration helpers")
    cfg_sub = cfg.add_subparsers(dest="config_command", required=True)
    init = cfg_sub.add_parser("init", parents=[common], help="write the default configuration")
    init.add_argument("-o", "--output")
    init.set_defaults(func=_cmd_config_init)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    args.verbose = getattr(args, "verbose", 0)
    logging.basicConfig(format="%(levelname)s %(message)s")
    set_verbosity(args.verbose)
    try:
        return args.func(args)
    except StageError as exc:
        print(f"error {exc}", file=sys.stderr)
        return exc.code
    except Exception as exc:  # anything unexpected is a bug
        print(f"error [internal] {type(exc).__name__}: {exc}", file=sys.stderr)
        if args.verbose:
            raise
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
