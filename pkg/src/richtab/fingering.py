"""Optimal fingering by dynamic programming over a layered state graph.

Each note contributes one layer of states ``(string, fret, finger, hand_position)``,
where the hand position is the fret under the index finger. Costs live on
nodes (hand spread, open strings, distance from the comfort zone) and on arcs
between consecutive layers (position change, string change). Arcs whose hand
movement does not fit in the inter-onset interval, or that reuse a finger in a
disallowed way, are removed. Because every term is local, a Viterbi sweep finds
the exact minimum.

Ties are broken the same way in :func:`solve` and :func:`brute_force_solve`:
among optimal paths, the one whose reversed state sequence is
lexicographically smallest wins. States order as ``(string, fret, finger,
hand_position)``.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field, fields
from enum import Enum
from itertools import product
from typing import NamedTuple, Sequence

import numpy as np

from .fretboard import InstrumentSpec, Placement

FINGERS = (1, 2, 3, 4)


class FingeringError(Exception):
    pass


class UnplayableNoteError(FingeringError):
    def __init__(self, index: int, pitch: int):
        super().__init__(f"note {index} unplayable (pitch {pitch} is outside the instrument's range)")
        self.index = index
        self.pitch = pitch


class NoFeasiblePathError(FingeringError):
    def __init__(self, layer: int, pitch: int | None = None):
        what = f"note {layer}" + (f" (pitch {pitch})" if pitch is not None else "")
        super().__init__(
            f"no feasible fingering reaches {what}; the inter-onset interval is too "
            f"short for the movement times, or the span/finger settings are too tight"
        )
        self.layer = layer


class InstanceTooLargeError(FingeringError):
    pass


class SameFingerPolicy(str, Enum):
    FORBID = "forbid"
    SAME_FRET_OR_STRING = "allow_same_fret_or_same_string"
    ALLOW_ALL = "allow_all"


class FingeringState(NamedTuple):
    string: int
    fret: int
    finger: int  # 0 = open string
    hand_position: int

    @property
    def placement(self) -> Placement:
        return Placement(self.string, self.fret)

    @property
    def is_open(self) -> bool:
        return self.finger == 0


@dataclass(frozen=True)
class FingeringConfig:
    w_pc: float = 4.0
    w_sc: float = 1.0
    w_hs: float = 2.0
    w_open: float = 1.0
    w_zone: float = 1.0
    comfort_zone: tuple[int, int] = (5, 12)
    # signed fret offset from the index finger, per finger 1..4
    min_span: tuple[int, int, int, int] = (0, 1, 2, 3)
    max_span: tuple[int, int, int, int] = (0, 2, 4, 5)
    t_long: float = 0.03  # seconds per fret of hand movement along the neck
    t_vert: float = 0.02  # seconds per string crossed
    same_finger_policy: SameFingerPolicy = SameFingerPolicy.SAME_FRET_OR_STRING
    hand_position_range: tuple[int, int] | None = None  # None: 1..fret_count

    def __post_init__(self):
        for name in ("w_pc", "w_sc", "w_hs", "w_open", "w_zone", "t_long", "t_vert"):
            value = getattr(self, name)
            if not value >= 0 or math.isinf(value):
                raise ValueError(f"{name} must be a finite non-negative number, got {value}")
            object.__setattr__(self, name, float(value))
        object.__setattr__(self, "comfort_zone", tuple(self.comfort_zone))
        object.__setattr__(self, "min_span", tuple(self.min_span))
        object.__setattr__(self, "max_span", tuple(self.max_span))
        object.__setattr__(self, "same_finger_policy", SameFingerPolicy(self.same_finger_policy))
        if self.hand_position_range is not None:
            object.__setattr__(self, "hand_position_range", tuple(self.hand_position_range))
            lo, hi = self.hand_position_range
            if not 1 <= lo <= hi:
                raise ValueError(f"bad hand_position_range {self.hand_position_range}")
        if len(self.min_span) != 4 or len(self.max_span) != 4:
            raise ValueError("min_span and max_span need one entry per finger 1..4")
        for k, (lo, hi) in enumerate(zip(self.min_span, self.max_span), start=1):
            if lo > hi:
                raise ValueError(f"finger {k}: min_span {lo} > max_span {hi}")
        if self.comfort_zone[0] > self.comfort_zone[1]:
            raise ValueError(f"bad comfort_zone {self.comfort_zone}")

    def hand_positions(self, spec: InstrumentSpec) -> range:
        lo, hi = self.hand_position_range or (1, spec.fret_count)
        return range(lo, hi + 1)

    def span(self, finger: int) -> tuple[int, int]:
        return self.min_span[finger - 1], self.max_span[finger - 1]

    def with_weights(self, **weights) -> "FingeringConfig":
        data = {f.name: getattr(self, f.name) for f in fields(self)}
        data.update(weights)
        return FingeringConfig(**data)

    def to_dict(self) -> dict:
        data = asdict(self)
        data["same_finger_policy"] = self.same_finger_policy.value
        for key in ("comfort_zone", "min_span", "max_span", "hand_position_range"):
            if data[key] is not None:
                data[key] = list(data[key])
        return data

    @classmethod
    def from_dict(cls, data: dict) -> "FingeringConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown fingering keys: {sorted(unknown)}")
        return cls(**data)


@dataclass(frozen=True)
class CostBreakdown:
    pc: float = 0.0
    sc: float = 0.0
    hs: float = 0.0
    open: float = 0.0
    zone: float = 0.0

    @property
    def total(self) -> float:
        return self.pc + self.sc + self.hs + self.open + self.zone

    def __add__(self, other: "CostBreakdown") -> "CostBreakdown":
        return CostBreakdown(self.pc + other.pc, self.sc + other.sc, self.hs + other.hs,
                             self.open + other.open, self.zone + other.zone)

    def to_dict(self) -> dict:
        return {**asdict(self), "total": self.total}


@dataclass
class FingeringSolution:
    states: list[FingeringState]
    objective: float = 0.0
    # cost paid on arriving at each note: its node cost plus the incoming arc
    per_transition: list[CostBreakdown] = field(default_factory=list)

    def to_json(self, events=None) -> list[dict]:
        rows = []
        for i, (state, cost) in enumerate(zip(self.states, self.per_transition)):
            row = {"index": events[i].index if events is not None else i}
            if events is not None:
                row["pitch"] = events[i].pitch
            row.update(state._asdict())
            row["cost_breakdown"] = cost.to_dict()
            rows.append(row)
        return rows


def zone_distance(hand_position: int, zone: tuple[int, int]) -> int:
    lo, hi = zone
    if hand_position < lo:
        return lo - hand_position
    if hand_position > hi:
        return hand_position - hi
    return 0


def stretch(state: FingeringState) -> int:
    """Frets of deviation from the one-finger-per-fret posture."""
    if state.finger == 0:
        return 0
    return abs((state.fret - state.hand_position) - (state.finger - 1))


def enumerate_states(note, spec: InstrumentSpec, config: FingeringConfig) -> list[FingeringState]:
    """All admissible states for ``note`` (a NoteEvent or bare pitch), sorted."""
    pitch = getattr(note, "pitch", note)
    positions = config.hand_positions(spec)
    states = []
    for string, fret in spec.candidates_for_pitch(pitch):
        if fret == 0:
            states.extend(FingeringState(string, 0, 0, h) for h in positions)
            continue
        for finger in FINGERS:
            lo, hi = config.span(finger)
            for h in range(max(fret - hi, positions.start), min(fret - lo, positions.stop - 1) + 1):
                states.append(FingeringState(string, fret, finger, h))
    if not states:
        raise UnplayableNoteError(getattr(note, "index", 0), pitch)
    return sorted(states)


def node_cost(state: FingeringState, config: FingeringConfig) -> CostBreakdown:
    return CostBreakdown(
        hs=config.w_hs * stretch(state),
        open=config.w_open if state.finger == 0 else 0.0,
        zone=config.w_zone * zone_distance(state.hand_position, config.comfort_zone),
    )


def transition_cost(prev: FingeringState, nxt: FingeringState,
                    config: FingeringConfig) -> CostBreakdown:
    return CostBreakdown(
        pc=config.w_pc * abs(nxt.hand_position - prev.hand_position),
        sc=config.w_sc * abs(nxt.string - prev.string),
    )


def infeasibility_reason(prev: FingeringState, nxt: FingeringState, ioi_s: float,
                         config: FingeringConfig) -> str | None:
    """Why the arc ``prev -> nxt`` is removed, or None if it is allowed."""
    moves = (config.t_long * abs(nxt.hand_position - prev.hand_position)
             + config.t_vert * abs(nxt.string - prev.string))
    if moves > ioi_s:
        return f"hand movement needs {moves:.3f} s but only {ioi_s:.3f} s are available"
    if prev.finger == nxt.finger >= 1:
        policy = config.same_finger_policy
        same_place = prev.placement == nxt.placement
        if policy is SameFingerPolicy.FORBID and not same_place:
            return f"finger {nxt.finger} reused on a different fret"
        if (policy is SameFingerPolicy.SAME_FRET_OR_STRING
                and prev.fret != nxt.fret and prev.string != nxt.string):
            return f"finger {nxt.finger} reused across both strings and frets"
    return None


def feasible(prev: FingeringState, nxt: FingeringState, ioi_s: float,
             config: FingeringConfig) -> bool:
    return infeasibility_reason(prev, nxt, ioi_s, config) is None


def state_violations(state: FingeringState, pitch: int, spec: InstrumentSpec,
                     config: FingeringConfig) -> list[str]:
    problems = []
    try:
        if spec.pitch_at(state.string, state.fret) != pitch:
            problems.append(f"{state} does not sound pitch {pitch}")
    except ValueError as exc:
        problems.append(str(exc))
    if (state.finger == 0) != (state.fret == 0):
        problems.append(f"{state}: finger 0 must go with fret 0")
    if state.hand_position not in config.hand_positions(spec):
        problems.append(f"{state}: hand position out of range")
    if state.finger >= 1:
        lo, hi = config.span(state.finger)
        if not lo <= state.fret - state.hand_position <= hi:
            problems.append(f"{state}: finger {state.finger} outside its span")
    return problems


def path_violations(events, states: Sequence[FingeringState], spec: InstrumentSpec,
                    config: FingeringConfig, pitches: Sequence[int] | None = None) -> list[str]:
    """Every span, pitch and transition problem in a fingered sequence."""
    if pitches is None:
        pitches = [ev.pitch for ev in events]
    problems = []
    for i, (state, pitch) in enumerate(zip(states, pitches)):
        problems.extend(f"note {i}: {p}" for p in state_violations(state, pitch, spec, config))
    for i in range(len(states) - 1):
        reason = infeasibility_reason(states[i], states[i + 1], events[i].ioi_s, config)
        if reason:
            problems.append(f"notes {i}->{i + 1}: {reason}")
    return problems


def path_breakdown(states: Sequence[FingeringState], config: FingeringConfig) -> list[CostBreakdown]:
    out = []
    for i, state in enumerate(states):
        cost = node_cost(state, config)
        if i:
            cost = transition_cost(states[i - 1], state, config) + cost
        out.append(cost)
    return out


def path_cost(states: Sequence[FingeringState], config: FingeringConfig) -> float:
    """Objective of a path, accumulated in the same order the solvers use."""
    if not states:
        return 0.0
    total = node_cost(states[0], config).total
    for prev, cur in zip(states, states[1:]):
        total = total + transition_cost(prev, cur, config).total
        total = total + node_cost(cur, config).total
    return total


class _Layer:
    def __init__(self, states: list[FingeringState], config: FingeringConfig):
        self.states = states
        arr = np.array(states, dtype=np.int64).reshape(-1, 4)
        self.string, self.fret, self.finger, self.hand = arr.T
        zone_lo, zone_hi = config.comfort_zone
        spread = np.where(self.finger == 0, 0,
                          np.abs((self.fret - self.hand) - (self.finger - 1)))
        zone = np.maximum(zone_lo - self.hand, 0) + np.maximum(self.hand - zone_hi, 0)
        hs = config.w_hs * spread
        opened = np.where(self.finger == 0, config.w_open, 0.0)
        self.node = (hs + opened) + config.w_zone * zone


def _arc_matrix(prev: _Layer, cur: _Layer, ioi_s: float, config: FingeringConfig) -> np.ndarray:
    dh = np.abs(cur.hand[None, :] - prev.hand[:, None])
    ds = np.abs(cur.string[None, :] - prev.string[:, None])
    arc = config.w_pc * dh + config.w_sc * ds
    blocked = (config.t_long * dh + config.t_vert * ds) > ioi_s

    same_finger = (prev.finger[:, None] == cur.finger[None, :]) & (prev.finger[:, None] >= 1)
    policy = config.same_finger_policy
    if policy is SameFingerPolicy.SAME_FRET_OR_STRING:
        blocked |= (same_finger & (prev.fret[:, None] != cur.fret[None, :])
                    & (prev.string[:, None] != cur.string[None, :]))
    elif policy is SameFingerPolicy.FORBID:
        blocked |= same_finger & ((prev.fret[:, None] != cur.fret[None, :])
                                  | (prev.string[:, None] != cur.string[None, :]))
    arc[blocked] = np.inf
    return arc


def solve(events, spec: InstrumentSpec, config: FingeringConfig) -> FingeringSolution:
    """Minimum-cost fingering for a monophonic note sequence."""
    if not events:
        return FingeringSolution([], 0.0, [])
    layers = [_Layer(enumerate_states(ev, spec, config), config) for ev in events]

    best = layers[0].node.copy()
    back = []
    for i in range(1, len(layers)):
        arc = _arc_matrix(layers[i - 1], layers[i], events[i - 1].ioi_s, config)
        candidates = best[:, None] + arc
        # argmin returns the first minimum, i.e. the smallest predecessor state
        arg = candidates.argmin(axis=0)
        best = candidates[arg, np.arange(arc.shape[1])] + layers[i].node
        if np.isinf(best).all():
            raise NoFeasiblePathError(getattr(events[i], "index", i), events[i].pitch)
        back.append(arg)

    j = int(best.argmin())
    objective = float(best[j])
    path = [j]
    for arg in reversed(back):
        j = int(arg[j])
        path.append(j)
    path.reverse()
    states = [layer.states[k] for layer, k in zip(layers, path)]
    return FingeringSolution(states, objective, path_breakdown(states, config))


def brute_force_solve(events, spec: InstrumentSpec, config: FingeringConfig,
                      limit: int = 10**7) -> FingeringSolution:
    """Exhaustive reference solver: scores every state sequence.

    Arc and node costs come from the scalar functions above rather than the
    vectorized ones :func:`solve` uses.
    """
    if not events:
        return FingeringSolution([], 0.0, [])
    layers = [enumerate_states(ev, spec, config) for ev in events]
    size = math.prod(len(layer) for layer in layers)
    if size > limit:
        raise InstanceTooLargeError(f"{size} state sequences exceed the limit of {limit}")

    nodes = [np.array([node_cost(s, config).total for s in layer]) for layer in layers]
    arcs = []
    for i in range(1, len(layers)):
        prev, cur = layers[i - 1], layers[i]
        arc = np.empty((len(prev), len(cur)))
        for (a, p), (b, c) in product(enumerate(prev), enumerate(cur)):
            if feasible(p, c, events[i - 1].ioi_s, config):
                arc[a, b] = transition_cost(p, c, config).total
            else:
                arc[a, b] = np.inf
        arcs.append(arc)

    # Enumerate explicit prefixes and score each suffix as a dense tensor, so
    # memory stays bounded however many sequences there are.
    depth = 1
    while depth < len(layers) and math.prod(len(x) for x in layers[depth:]) > _CHUNK:
        depth += 1

    best_value, best_path = math.inf, None
    for prefix in product(*(range(len(x)) for x in layers[:depth])):
        total = nodes[0][prefix[0]]
        for i in range(1, depth):
            total = (total + arcs[i - 1][prefix[i - 1], prefix[i]]) + nodes[i][prefix[i]]
        if math.isinf(total):
            continue
        if depth < len(layers):
            total = (total + arcs[depth - 1][prefix[-1]]) + nodes[depth]
            for i in range(depth + 1, len(layers)):
                total = (total[..., None] + arcs[i - 1]) + nodes[i]
            value = total.min()
            if math.isinf(value) or value > best_value:
                continue
            rows = np.argwhere(total == value)
            first = np.lexsort(rows.T)[0]  # last column is the primary key
            path = prefix + tuple(int(k) for k in rows[first])
        else:
            value, path = total, prefix
        if value < best_value or (value == best_value and path[::-1] < best_path[::-1]):
            best_value, best_path = value, path

    if best_path is None:
        _raise_first_empty_layer(events, layers, arcs)
    states = [layer[k] for layer, k in zip(layers, best_path)]
    return FingeringSolution(states, float(best_value), path_breakdown(states, config))


_CHUNK = 1 << 21


def _raise_first_empty_layer(events, layers, arcs):
    reachable = np.ones(len(layers[0]), dtype=bool)
    for i, arc in enumerate(arcs, start=1):
        reachable = (np.isfinite(arc) & reachable[:, None]).any(axis=0)
        if not reachable.any():
            raise NoFeasiblePathError(getattr(events[i], "index", i), events[i].pitch)
    raise AssertionError("a reachable final layer implies a finite path")
