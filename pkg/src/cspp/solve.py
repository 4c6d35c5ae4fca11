"""Greatest-fixed-point solvers.

``bellman_apply`` is one step of the Bellman operator.  ``kleene_gfp``
iterates it from the all-top valuation.  ``coalg_dijkstra`` freezes states in
order of their current value and only re-evaluates predecessors of newly
frozen states; ``coalg_dijkstra_heap`` does the same with a priority queue and
re-evaluates only the transitions that touch the newly frozen states.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from typing import Optional

from .domain import CarrierViolation, canon, parse_value, render, to_json_value
from .graph import WeightedGraph, predecessors
from .heap import make_queue
from .modality import first_violation


# results ---------------------------------------------------------------------


@dataclass(frozen=True)
class Stabilized:
    iterations: int

    def __str__(self):
        return f"Stabilized({self.iterations})"


@dataclass(frozen=True)
class IterationCapped:
    iterations: int

    def __str__(self):
        return f"IterationCapped({self.iterations})"


@dataclass(frozen=True)
class Frozen:
    states: int

    def __str__(self):
        return f"Frozen({self.states})"


@dataclass(frozen=True)
class MonitorEvent:
    """A modality application seen during a run that breaks expansiveness.

    ``kind`` is ``"slot"`` when a slot weight lies strictly above the result,
    ``"below-final"`` when the result lies strictly below the final weight,
    and ``"not-fixed"`` when the returned valuation moves under one more
    Bellman step (``transition`` is -1 then).
    """

    state: int
    transition: int
    kind: str
    slot_values: tuple
    result: object
    index: Optional[int] = None

    def describe(self) -> str:
        vals = ", ".join(render(v) for v in self.slot_values)
        if self.kind == "slot":
            return (f"state {self.state} transition {self.transition}: slot {self.index} "
                    f"value {render(self.slot_values[self.index])} above result {render(self.result)} "
                    f"(slots [{vals}])")
        if self.kind == "not-fixed":
            return (f"state {self.state}: returned value is not a fixed point "
                    f"(one more Bellman step gives {render(self.result)})")
        return (f"state {self.state} transition {self.transition}: result {render(self.result)} "
                f"below the final weight (slots [{vals}])")


MONITOR_CAVEAT = (
    "No event during a monitored run does not certify the result for this input: "
    "correctness depends on all values the modality can produce, not only the ones visited."
)


@dataclass(frozen=True)
class TraceRow:
    n: int
    d: tuple
    S: frozenset
    Y: frozenset
    P: frozenset


@dataclass
class Trace:
    rows: list = field(default_factory=list)

    def add(self, n, d, S, Y, P):
        self.rows.append(TraceRow(n, tuple(canon(v) for v in d), frozenset(S), frozenset(Y), frozenset(P)))

    def render(self, show_active: bool = False) -> str:
        return render_trace(self, show_active)


@dataclass
class SolveResult:
    valuation: list
    status: object
    monitor: Optional[list] = None
    trace: Optional[Trace] = None
    divergent: frozenset = frozenset()
    iterations: int = 0


def _fmt_set(s) -> str:
    return "{" + ",".join(str(x) for x in sorted(s)) + "}"


def render_trace(trace: Trace, show_active: bool = False) -> str:
    """Whitespace-aligned table: n, d(0..V-1), S, Y (and P when asked)."""
    if not trace.rows:
        return ""
    V = len(trace.rows[0].d)
    header = ["n"] + [f"d({x})" for x in range(V)] + ["S", "Y"] + (["P"] if show_active else [])
    body = []
    for row in trace.rows:
        cells = [str(row.n)] + [render(v) for v in row.d] + [_fmt_set(row.S), _fmt_set(row.Y)]
        if show_active:
            cells.append(_fmt_set(row.P))
        body.append(cells)
    widths = [max(len(r[i]) for r in [header] + body) for i in range(len(header))]
    lines = ["  ".join(c.rjust(w) if i <= V else c.ljust(w) for i, (c, w) in enumerate(zip(r, widths))).rstrip()
             for r in [header] + body]
    return "\n".join(lines) + "\n"


# the Bellman operator --------------------------------------------------------


def state_value(g: WeightedGraph, x: int, d) -> object:
    """Bellman value at one state: meet of all transition values, capped by xi at targets."""
    dom = g.instance.domain
    ev = g.instance.modality.evaluate
    lt = dom.lt
    v = dom.top
    for t in g.transitions[x]:
        r = ev(t.payload, [d[y] for y in t.slots])
        if lt(r, v):
            v = r
    if g.targets[x] and lt(dom.xi, v):
        v = dom.xi
    return v


def bellman_apply(g: WeightedGraph, d) -> list:
    """One application of the Bellman operator; ``d`` is left untouched."""
    _check_len(g, d)
    return [canon(state_value(g, x, d)) for x in range(g.V)]


def selective_bellman(g: WeightedGraph, d, active) -> list:
    """Bellman update on ``active`` states only; all values read from the old ``d``."""
    _check_len(g, d)
    out = list(d)
    for x in active:
        out[x] = canon(state_value(g, x, d))
    return out


def _check_len(g, d):
    if len(d) != g.V:
        raise ValueError(f"valuation has {len(d)} entries for {g.V} states")


def top_valuation(g: WeightedGraph) -> list:
    return [g.instance.domain.top] * g.V


def bellman_power(g: WeightedGraph, n: int) -> list:
    """The n-th Bellman iterate starting from the all-top valuation."""
    d = top_valuation(g)
    for _ in range(n):
        d = bellman_apply(g, d)
    return d


# Kleene iteration ------------------------------------------------------------


def _close(a, b, tol) -> bool:
    if a == b:
        return True
    if tol is None:
        return False
    if math.isinf(a) or math.isinf(b):
        return False
    return abs(a - b) <= tol


def kleene_gfp(g: WeightedGraph, max_iters: Optional[int] = None,
               tol: Optional[float] = None) -> SolveResult:
    """Iterate the Bellman operator from top until two iterates agree.

    Stops with ``Stabilized(n)`` when the n-th and (n+1)-st iterates are
    equal (or within ``tol``), else ``IterationCapped`` with the last iterate.
    Capped results flag states that strictly decreased in each of the last V
    steps as divergent.
    """
    V = g.V
    if max_iters is None:
        max_iters = 10 * V + 100
    if max_iters < 1:
        raise ValueError("max_iters must be >= 1")
    dom = g.instance.domain
    d = top_valuation(g)
    window = deque(maxlen=V + 1)
    window.append(d)
    for n in range(max_iters):
        nxt = bellman_apply(g, d)
        if all(_close(a, b, tol) for a, b in zip(nxt, d)):
            return SolveResult(nxt, Stabilized(n), iterations=n + 1)
        d = nxt
        window.append(d)
    divergent = set()
    if V and len(window) == V + 1:
        hist = list(window)
        for x in range(V):
            if all(dom.lt(hist[i + 1][x], hist[i][x]) for i in range(V)):
                divergent.add(x)
    return SolveResult(d, IterationCapped(max_iters), divergent=frozenset(divergent), iterations=max_iters)


# coalgebraic Dijkstra --------------------------------------------------------


def _tie(a, b, eps) -> bool:
    return a == b or (eps and not math.isinf(a) and not math.isinf(b) and abs(a - b) <= eps)


def _monitored_value(g, x, d, events):
    dom = g.instance.domain
    mod = g.instance.modality
    v = dom.top
    for j, t in enumerate(g.transitions[x]):
        vals = tuple(d[y] for y in t.slots)
        r = mod.evaluate(t.payload, vals)
        i = first_violation(mod, dom, t.payload, vals, r)
        if i is not None:
            events.append(MonitorEvent(x, j, "slot", tuple(map(canon, vals)), canon(r), i))
        if dom.lt(r, dom.xi):
            events.append(MonitorEvent(x, j, "below-final", tuple(map(canon, vals)), canon(r)))
        if dom.lt(r, v):
            v = r
    if g.targets[x] and dom.lt(dom.xi, v):
        v = dom.xi
    return v


def coalg_dijkstra(g: WeightedGraph, want_trace: bool = False, monitor: bool = False,
                   tie_eps: float = 0) -> SolveResult:
    """Generalized Dijkstra: freeze every minimal unfrozen state each round.

    With ``monitor`` every modality application made during the run is
    checked, and a final pass re-applies every transition to the returned
    valuation so that violations involving late values are seen too.
    """
    dom = g.instance.domain
    V = g.V
    idx = g.reverse_index()
    frozen = list(g.targets)
    d = [dom.xi if t else dom.top for t in g.targets]
    Y = [x for x in range(V) if frozen[x]]
    rest = [x for x in range(V) if not frozen[x]]
    events = [] if monitor else None
    trace = Trace() if want_trace else None
    if trace is not None:
        trace.add(0, [dom.top] * V, (), (), ())
        trace.add(1, d, Y, Y, ())
    S_size = len(Y)
    n = 1
    asc = dom.ascending
    while rest:
        P = predecessors(g, idx, Y)
        active = [x for x in P if not frozen[x]]
        if monitor:
            new = [(x, _monitored_value(g, x, d, events)) for x in active]
        else:
            new = [(x, state_value(g, x, d)) for x in active]
        for x, v in new:
            d[x] = v
        vals = [d[x] for x in rest]
        best = min(vals) if asc else max(vals)
        Y, keep = [], []
        for x, v in zip(rest, vals):
            (Y if _tie(v, best, tie_eps) else keep).append(x)
        rest = keep
        for y in Y:
            frozen[y] = True
        S_size += len(Y)
        n += 1
        if trace is not None:
            trace.add(n, d, [x for x in range(V) if frozen[x]], Y, P)
    if monitor:
        final = []
        for x in range(V):
            if _monitored_value(g, x, d, final) != d[x]:
                final.append(MonitorEvent(x, -1, "not-fixed", (), canon(state_value(g, x, d))))
        seen = set(events)
        events.extend(e for e in final if e not in seen)
    return SolveResult([canon(v) for v in d], Frozen(S_size), monitor=events, trace=trace, iterations=n - 1)


def coalg_dijkstra_heap(g: WeightedGraph, queue: str = "fib", tie_eps: float = 0,
                        full_update: bool = False) -> SolveResult:
    """Priority-queue Dijkstra that only re-evaluates transitions touching new frozen states.

    Every non-target state is queued at top up front, so unreachable states
    are frozen in the same round as in the plain solver.  ``full_update``
    recomputes the whole Bellman value of each touched state instead; that
    matches the plain solver step for step even when the modality is not
    expansive, at the price of the finer cost bound.
    """
    dom = g.instance.domain
    mod = g.instance.modality
    ev = mod.evaluate
    lt = dom.lt
    key = dom.key
    V = g.V
    idx = g.reverse_index()
    frozen = list(g.targets)
    d = [dom.xi if t else dom.top for t in g.targets]
    Q = make_queue(queue)
    top_key = key(dom.top)
    for x in range(V):
        if not frozen[x]:
            Q.insert(x, top_key)
    Y = [x for x in range(V) if frozen[x]]
    remaining = len(Q)
    rounds = 0
    transitions = g.transitions
    while remaining:
        touched = {}
        for y in Y:
            for x, j in idx.entries[y]:
                if not frozen[x]:
                    touched.setdefault(x, set()).add(j)
        updates = []
        for x, js in touched.items():
            if full_update:
                v = state_value(g, x, d)
                if v != d[x]:
                    updates.append((x, v))
                continue
            v = d[x]
            row = transitions[x]
            for j in js:
                t = row[j]
                r = ev(t.payload, [d[s] for s in t.slots])
                if lt(r, v):
                    v = r
            if v != d[x]:
                updates.append((x, v))
        for x, v in updates:
            d[x] = v
            k = key(v)
            if k < Q.key_of(x):
                Q.decrease(x, k)
        _, Y = Q.pop_all_min(tie_eps)
        for y in Y:
            frozen[y] = True
        remaining -= len(Y)
        rounds += 1
    return SolveResult([canon(v) for v in d], Frozen(V), iterations=rounds)


# valuation files ------------------------------------------------------------


def valuation_to_dict(g: WeightedGraph, result: SolveResult, algorithm: str) -> dict:
    doc = {
        "instance": g.instance.header(),
        "algorithm": algorithm,
        "status": str(result.status),
        "valuation": [to_json_value(v) for v in result.valuation],
    }
    if result.divergent:
        doc["divergent"] = sorted(result.divergent)
    if result.monitor is not None:
        doc["monitor"] = [e.describe() for e in result.monitor]
    return doc


def valuation_from_dict(doc: dict, g: WeightedGraph) -> list:
    """Parse a valuation document and check it against ``g``: instance, length and carrier."""
    if not isinstance(doc, dict) or not isinstance(doc.get("valuation"), list):
        raise ValueError("valuation document needs a 'valuation' list")
    from .instances import instance_from_header

    if "instance" in doc and instance_from_header(doc["instance"]).name != g.instance.name:
        raise ValueError(f"valuation is for {doc['instance']!r}, graph is {g.instance.name}")
    vals = [parse_value(v, exact=g.instance.exact) for v in doc["valuation"]]
    _check_len(g, vals)
    dom = g.instance.domain
    for x, v in enumerate(vals):
        if not dom.contains(v):
            raise CarrierViolation(f"state {x}: {render(v)} outside {dom.id}")
    return vals


SOLVERS = {
    "kleene": kleene_gfp,
    "dijkstra": coalg_dijkstra,
    "dijkstra-heap": coalg_dijkstra_heap,
}
