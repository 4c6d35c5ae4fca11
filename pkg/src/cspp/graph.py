"""Weighted graphs: states with a target flag and a finite list of transitions.

Also the reverse index used for predecessor queries and the JSON file format.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .modality import Transition, support


class GraphError(ValueError):
    pass


class ParseError(GraphError):
    pass


class SchemaError(GraphError):
    pass


class DanglingStateRef(GraphError):
    pass


class IndexOutOfRange(IndexError):
    pass


@dataclass(frozen=True)
class Diagnostic:
    kind: str
    state: Optional[int]
    transition: Optional[int]
    message: str

    def __str__(self):
        where = []
        if self.state is not None:
            where.append(f"state {self.state}")
        if self.transition is not None:
            where.append(f"transition {self.transition}")
        loc = ", ".join(where)
        return f"{self.kind} at {loc}: {self.message}" if loc else f"{self.kind}: {self.message}"


class WeightedGraph:
    """A finite weighted graph over the dense state range ``0..V-1``."""

    def __init__(self, instance, targets: Sequence[bool], transitions: Sequence[Iterable[Transition]],
                 labels: Optional[dict] = None):
        self.instance = instance
        self.targets = tuple(bool(t) for t in targets)
        self.transitions = tuple(tuple(ts) for ts in transitions)
        if len(self.targets) != len(self.transitions):
            raise SchemaError("targets and transitions differ in length")
        self.labels = dict(labels or {})
        self._rindex = None

    @property
    def V(self) -> int:
        return len(self.targets)

    @property
    def E(self) -> int:
        return sum(len(successors(self, x)) for x in range(self.V))

    @property
    def states(self) -> range:
        return range(self.V)

    def reverse_index(self) -> "ReverseIndex":
        if self._rindex is None:
            self._rindex = ReverseIndex.build(self)
        return self._rindex

    def canonical(self) -> "WeightedGraph":
        """Same graph with duplicate transitions removed, first occurrence kept."""
        ts = []
        for row in self.transitions:
            seen, keep = set(), []
            for t in row:
                if t not in seen:
                    seen.add(t)
                    keep.append(t)
            ts.append(keep)
        return WeightedGraph(self.instance, self.targets, ts, self.labels)

    def __eq__(self, other):
        return (
            isinstance(other, WeightedGraph)
            and self.instance == other.instance
            and self.targets == other.targets
            and self.transitions == other.transitions
        )

    def __repr__(self):
        return f"WeightedGraph({self.instance.name}, V={self.V})"


@dataclass
class ReverseIndex:
    """For each state y, the (x, j) pairs whose j-th transition of x has y in its support."""

    entries: list = field(default_factory=list)

    @classmethod
    def build(cls, g: WeightedGraph) -> "ReverseIndex":
        entries = [[] for _ in range(g.V)]
        for x, row in enumerate(g.transitions):
            for j, t in enumerate(row):
                for y in support(t):
                    if not 0 <= y < g.V:
                        raise DanglingStateRef(f"state {x}, transition {j}: slot {y} out of range")
                    entries[y].append((x, j))
        return cls(entries)


def _check_state(g: WeightedGraph, x: int):
    if not (isinstance(x, int) and 0 <= x < g.V):
        raise IndexOutOfRange(f"state {x!r} not in 0..{g.V - 1}")


def successors(g: WeightedGraph, x: int) -> set:
    _check_state(g, x)
    out = set()
    for t in g.transitions[x]:
        out.update(t.slots)
    return out


def predecessors(g: WeightedGraph, idx: Optional[ReverseIndex], ys: Iterable[int]) -> set:
    """States with some transition whose support meets ``ys``."""
    idx = idx if idx is not None else g.reverse_index()
    out = set()
    for y in ys:
        _check_state(g, y)
        for x, _ in idx.entries[y]:
            out.add(x)
    return out


def validate(g: WeightedGraph) -> list:
    """Collect every violated invariant as a Diagnostic; empty means valid."""
    inst = g.instance
    mod, dom = inst.modality, inst.domain
    diags = []
    for x, row in enumerate(g.transitions):
        for j, t in enumerate(row):
            k = len(t.slots)
            for y in t.slots:
                if not (isinstance(y, int) and 0 <= y < g.V):
                    diags.append(Diagnostic("DanglingStateRef", x, j, f"slot {y!r} is not a state"))
            msg = mod.arity_problem(k)
            if msg:
                kind = "NonEmptySupportRequired" if k == 0 else "ArityMismatch"
                diags.append(Diagnostic(kind, x, j, msg))
                continue
            msg = mod.payload_problem(t.payload, k)
            if msg:
                kind = "ProbSum" if "sum to" in msg else "PayloadSchema"
                diags.append(Diagnostic(kind, x, j, msg))
    if g.V and not dom.contains(dom.xi):
        diags.append(Diagnostic("CarrierViolation", None, None, "final weight outside carrier"))
    return diags


# file format ----------------------------------------------------------------


def graph_to_dict(g: WeightedGraph) -> dict:
    mod = g.instance.modality
    doc = {
        "instance": g.instance.header(),
        "states": [
            {
                "id": x,
                "target": g.targets[x],
                "transitions": [
                    {"payload": mod.dump_payload(t.payload), "slots": list(t.slots)}
                    for t in g.transitions[x]
                ],
            }
            for x in g.states
        ],
    }
    if g.labels:
        doc["labels"] = {str(k): v for k, v in sorted(g.labels.items())}
    return doc


def save_graph(g: WeightedGraph) -> bytes:
    """Serialize with one state per line so golden files diff cleanly."""
    doc = graph_to_dict(g)
    lines = ["{", f'  "instance": {json.dumps(doc["instance"])},', '  "states": [']
    states = [f"    {json.dumps(st)}" for st in doc["states"]]
    lines.append(",\n".join(states))
    if "labels" in doc:
        lines.append("  ],")
        lines.append(f'  "labels": {json.dumps(doc["labels"])}')
    else:
        lines.append("  ]")
    lines.append("}")
    return ("\n".join(line for line in lines if line) + "\n").encode()


def graph_from_dict(doc: dict, instance=None) -> WeightedGraph:
    from .instances import InstanceError, instance_from_header

    if not isinstance(doc, dict) or "states" not in doc or "instance" not in doc:
        raise ParseError("graph document needs 'instance' and 'states'")
    try:
        header_inst = instance_from_header(doc["instance"])
    except InstanceError as exc:
        raise SchemaError(str(exc)) from exc
    if instance is not None and instance.name != header_inst.name:
        raise SchemaError(f"file is for {header_inst.name}, expected {instance.name}")
    inst = instance or header_inst
    mod = inst.modality
    states = doc["states"]
    if not isinstance(states, list):
        raise ParseError("'states' must be a list")
    V = len(states)
    targets, transitions = [], []
    for pos, st in enumerate(states):
        if not isinstance(st, dict):
            raise ParseError(f"state {pos}: expected an object")
        if st.get("id", pos) != pos:
            raise ParseError(f"state {pos}: ids must be dense and in order, got {st.get('id')!r}")
        targets.append(bool(st.get("target", False)))
        row = []
        for j, raw in enumerate(st.get("transitions", [])):
            if not isinstance(raw, dict) or not isinstance(raw.get("slots"), list):
                raise ParseError(f"state {pos}, transition {j}: needs a 'slots' list")
            slots = raw["slots"]
            for y in slots:
                if isinstance(y, bool) or not isinstance(y, int):
                    raise ParseError(f"state {pos}, transition {j}: slot {y!r} is not an integer")
                if not 0 <= y < V:
                    raise DanglingStateRef(f"state {pos}, transition {j}: slot {y} is not a state")
            try:
                payload = mod.parse_payload(raw.get("payload", {}), inst.exact)
            except ValueError as exc:
                raise SchemaError(f"state {pos}, transition {j}: {exc}") from exc
            row.append(Transition(payload, tuple(slots)))
        transitions.append(row)
    labels = {int(k): v for k, v in doc.get("labels", {}).items()}
    return WeightedGraph(inst, targets, transitions, labels)


def load_graph(data, instance=None) -> WeightedGraph:
    if isinstance(data, (bytes, bytearray)):
        data = data.decode()
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from exc
    return graph_from_dict(doc, instance)


def read_graph(path) -> WeightedGraph:
    with open(path, "rb") as fh:
        return load_graph(fh.read())


def write_graph(g: WeightedGraph, path):
    with open(path, "wb") as fh:
        fh.write(save_graph(g))
