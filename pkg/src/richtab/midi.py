"""Standard MIDI File ingestion for monophonic melodies.

Only what a melody needs is decoded: note-on/note-off pairs, tempo and time
signature meta events. Everything else is skipped byte-exactly so malformed
files are reported with the offset where parsing went wrong.
"""
from __future__ import annotations

import math
import struct
import warnings
from bisect import bisect_right
from collections import defaultdict, deque
from dataclasses import dataclass, field, replace
from pathlib import Path

DEFAULT_TEMPO = 500_000  # microseconds per quarter, 120 BPM
DEFAULT_TIME_SIGNATURE = (4, 4)


class MidiError(Exception):
    """Base class for input problems in the MIDI stage."""


class MidiParseError(MidiError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (byte offset {offset})")
        self.offset = offset


class EmptyMelodyError(MidiError):
    pass


class MonophonyError(MidiError):
    def __init__(self, pairs: list[tuple[int, int]]):
        shown = ", ".join(f"({a}, {b})" for a, b in pairs[:10])
        more = f" and {len(pairs) - 10} more" if len(pairs) > 10 else ""
        super().__init__(f"overlapping notes at index pairs {shown}{more}")
        self.pairs = pairs


@dataclass(frozen=True)
class NoteEvent:
    index: int
    pitch: int
    onset_ticks: int
    duration_ticks: int
    onset_s: float
    duration_s: float
    ioi_s: float = math.inf

    @property
    def end_ticks(self) -> int:
        return self.onset_ticks + self.duration_ticks


@dataclass(frozen=True)
class RawNote:
    pitch: int
    onset_ticks: int
    duration_ticks: int
    channel: int = 0
    velocity: int = 64


@dataclass
class TempoMap:
    """Piecewise-constant tempo; converts ticks to seconds."""

    ppq: int
    changes: list[tuple[int, int]] = field(default_factory=list)  # (tick, us per quarter)

    def __post_init__(self):
        by_tick: dict[int, int] = {}
        for tick, tempo in sorted(self.changes, key=lambda c: c[0]):
            by_tick[tick] = tempo  # last change at a tick wins
        if 0 not in by_tick:
            by_tick[0] = DEFAULT_TEMPO
        self.changes = sorted(by_tick.items())
        self._ticks = [t for t, _ in self.changes]
        self._starts = []
        seconds = 0.0
        prev_tick, prev_tempo = self.changes[0]
        for tick, tempo in self.changes:
            seconds += (tick - prev_tick) * prev_tempo / (self.ppq * 1e6)
            self._starts.append(seconds)
            prev_tick, prev_tempo = tick, tempo

    def seconds(self, tick: int) -> float:
        i = bisect_right(self._ticks, tick) - 1
        start_tick, tempo = self.changes[i]
        return self._starts[i] + (tick - start_tick) * tempo / (self.ppq * 1e6)


@dataclass
class Melody:
    events: list[NoteEvent]
    ppq: int
    tempo_map: TempoMap
    time_signature: tuple[int, int] = DEFAULT_TIME_SIGNATURE
    track: int = 0


@dataclass
class _Track:
    notes: list[RawNote] = field(default_factory=list)
    tempos: list[tuple[int, int]] = field(default_factory=list)
    time_signatures: list[tuple[int, int, int]] = field(default_factory=list)
    end_tick: int = 0


_DATA_LENGTH = {0x8: 2, 0x9: 2, 0xA: 2, 0xB: 2, 0xC: 1, 0xD: 1, 0xE: 2}


def _read_vlq(data: bytes, pos: int, end: int) -> tuple[int, int]:
    value = 0
    for i in range(4):
        if pos >= end:
            raise MidiParseError("truncated variable-length quantity", pos)
        byte = data[pos]
        pos += 1
        value = (value << 7) | (byte & 0x7F)
        if not byte & 0x80:
            return value, pos
    raise MidiParseError("variable-length quantity longer than 4 bytes", pos - 4)


def _parse_track(data: bytes, pos: int, end: int, track_index: int) -> _Track:
    track = _Track()
    tick = 0
    status = None
    pending: dict[tuple[int, int], deque] = defaultdict(deque)

    while pos < end:
        delta, pos = _read_vlq(data, pos, end)
        tick += delta
        if pos >= end:
            raise MidiParseError("event missing after delta time", pos)
        byte = data[pos]
        event_offset = pos

        if byte == 0xFF:
            if pos + 1 >= end:
                raise MidiParseError("truncated meta event", pos)
            meta_type = data[pos + 1]
            length, pos = _read_vlq(data, pos + 2, end)
            if pos + length > end:
                raise MidiParseError("meta event runs past end of track", event_offset)
            payload = data[pos:pos + length]
            pos += length
            if meta_type == 0x51:
                if length != 3:
                    raise MidiParseError("tempo event must carry 3 bytes", event_offset)
                track.tempos.append((tick, int.from_bytes(payload, "big")))
            elif meta_type == 0x58:
                if length < 2:
                    raise MidiParseError("time signature event too short", event_offset)
                track.time_signatures.append((tick, payload[0], 2 ** payload[1]))
            elif meta_type == 0x2F:
                track.end_tick = tick
                break
            continue

        if byte in (0xF0, 0xF7):
            length, pos = _read_vlq(data, pos + 1, end)
            if pos + length > end:
                raise MidiParseError("sysex event runs past end of track", event_offset)
            pos += length
            status = None
            continue

        if byte & 0x80:
            if byte >= 0xF0:
                raise MidiParseError(f"unexpected system message 0x{byte:02X}", pos)
            status = byte
            pos += 1
        elif status is None:
            raise MidiParseError("data byte without running status", pos)

        n = _DATA_LENGTH[status >> 4]
        if pos + n > end:
            raise MidiParseError("truncated channel message", event_offset)
        params = data[pos:pos + n]
        if any(b & 0x80 for b in params):
            raise MidiParseError("status byte inside channel message data", pos)
        pos += n

        kind, channel = status >> 4, status & 0x0F
        if kind == 0x9 and params[1] > 0:
            pending[(channel, params[0])].append((tick, params[1]))
        elif kind == 0x8 or kind == 0x9:
            queue = pending.get((channel, params[0]))
            if queue:
                # FIFO pairing: an off closes the oldest sounding note of that pitch
                start, velocity = queue.popleft()
                _add_note(track, params[0], start, tick, channel, velocity, track_index)
    else:
        track.end_tick = tick

    for (channel, pitch), queue in sorted(pending.items()):
        for start, velocity in queue:
            warnings.warn(
                f"track {track_index}: note {pitch} at tick {start} never released; "
                f"closed at end of track",
                stacklevel=3,
            )
            _add_note(track, pitch, start, track.end_tick, channel, velocity, track_index)
    return track


def _add_note(track, pitch, start, stop, channel, velocity, track_index):
    if stop <= start:
        warnings.warn(
            f"track {track_index}: zero-length note {pitch} at tick {start} dropped",
            stacklevel=4,
        )
        return
    track.notes.append(RawNote(pitch, start, stop - start, channel, velocity))


def read_smf(data: bytes) -> tuple[int, list[_Track]]:
    """Decode the chunk structure; returns (ppq, tracks)."""
    if len(data) < 14 or data[:4] != b"MThd":
        raise MidiParseError("missing MThd header", 0)
    (header_len,) = struct.unpack(">I", data[4:8])
    if header_len < 6 or 8 + header_len > len(data):
        raise MidiParseError("bad header length", 4)
    fmt, ntracks, division = struct.unpack(">HHH", data[8:14])
    if fmt not in (0, 1):
        raise MidiParseError(f"unsupported SMF format {fmt}", 8)
    if division & 0x8000:
        raise MidiParseError("SMPTE time division is not supported", 12)
    if division == 0:
        raise MidiParseError("division of zero ticks per quarter", 12)

    pos = 8 + header_len
    tracks = []
    while pos < len(data) and len(tracks) < ntracks:
        if pos + 8 > len(data):
            raise MidiParseError("truncated chunk header", pos)
        chunk_id = data[pos:pos + 4]
        (length,) = struct.unpack(">I", data[pos + 4:pos + 8])
        body = pos + 8
        if body + length > len(data):
            raise MidiParseError("chunk runs past end of file", pos)
        if chunk_id == b"MTrk":
            tracks.append(_parse_track(data, body, body + length, len(tracks)))
        pos = body + length
    if len(tracks) < ntracks:
        raise MidiParseError(f"header announces {ntracks} tracks, found {len(tracks)}", pos)
    return division, tracks


def check_monophony(events) -> list[tuple[int, int]]:
    """Index pairs (i, j), i < j, where note j starts inside note i.

    ``events`` must be sorted by onset; anything with ``onset_ticks`` and
    ``duration_ticks`` works.
    """
    pairs = []
    for i, a in enumerate(events):
        end = a.onset_ticks + a.duration_ticks
        for j in range(i + 1, len(events)):
            if events[j].onset_ticks >= end:
                break
            pairs.append((i, j))
    return pairs


def validate_monophony(notes: list, clip: bool = False) -> list:
    """Return ``notes`` unchanged if monophonic, else raise MonophonyError.

    With ``clip``, an overlapped note is truncated at the next onset instead.
    Simultaneous onsets cannot be clipped and always raise.
    """
    pairs = check_monophony(notes)
    if not pairs:
        return list(notes)
    if not clip:
        raise MonophonyError(pairs)
    same_onset = [(i, j) for i, j in pairs if notes[i].onset_ticks == notes[j].onset_ticks]
    if same_onset:
        raise MonophonyError(same_onset)
    out = list(notes)
    for i in range(len(out) - 1):
        gap = out[i + 1].onset_ticks - out[i].onset_ticks
        if out[i].duration_ticks > gap:
            out[i] = replace(out[i], duration_ticks=gap)
    return out


def build_events(notes: list[RawNote], tempo_map: TempoMap) -> list[NoteEvent]:
    events = []
    for index, note in enumerate(notes):
        onset_s = tempo_map.seconds(note.onset_ticks)
        end_s = tempo_map.seconds(note.onset_ticks + note.duration_ticks)
        events.append(NoteEvent(index, note.pitch, note.onset_ticks, note.duration_ticks,
                                onset_s, end_s - onset_s))
    for i in range(len(events) - 1):
        events[i] = replace(events[i], ioi_s=events[i + 1].onset_s - events[i].onset_s)
    return events


def parse_midi(data: bytes, track: int | None = None, clip_overlaps: bool = False) -> Melody:
    """Parse an SMF byte string into a monophonic melody.

    ``track`` selects an MTrk chunk by position; by default the first track
    that contains notes is used. Tempo and time-signature events are read from
    every track, as format 1 files keep them in a conductor track.
    """
    ppq, tracks = read_smf(data)
    tempos = [t for tr in tracks for t in tr.tempos]
    signatures = sorted((s for tr in tracks for s in tr.time_signatures), key=lambda s: s[0])

    if track is None:
        track = next((i for i, tr in enumerate(tracks) if tr.notes), None)
        if track is None:
            raise EmptyMelodyError("no notes in any track")
    elif not 0 <= track < len(tracks):
        raise MidiError(f"track {track} does not exist (file has {len(tracks)})")
    notes = sorted(tracks[track].notes, key=lambda n: (n.onset_ticks, n.pitch))
    if not notes:
        raise EmptyMelodyError(f"track {track} contains no notes")

    notes = validate_monophony(notes, clip=clip_overlaps)
    tempo_map = TempoMap(ppq, tempos)

    time_signature = DEFAULT_TIME_SIGNATURE
    if signatures:
        if signatures[0][0] == 0:
            time_signature = signatures[0][1:]
        if len({s[1:] for s in signatures}) > 1 or signatures[0][0] != 0:
            warnings.warn("time signature changes are not supported; using the first one",
                          stacklevel=2)
            time_signature = signatures[0][1:]
    return Melody(build_events(notes, tempo_map), ppq, tempo_map, tuple(time_signature), track)


def read_midi(path, track: int | None = None, clip_overlaps: bool = False) -> Melody:
    return parse_midi(Path(path).read_bytes(), track=track, clip_overlaps=clip_overlaps)
