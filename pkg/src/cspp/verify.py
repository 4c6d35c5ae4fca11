"""Executable checks around the Dijkstra solvers.

* ``omega_sigma`` closes {xi, top} under the modality over a payload set.
* ``check_expansive`` searches that closure for a slot weight lying strictly
  above the result of the application, or answers in closed form.
* ``run_tree_infimum`` is an independent oracle for the Bellman iterates: it
  enumerates the values of all finite unfoldings of a state.
* ``contraction_coalgebra`` turns an expansiveness witness into a graph on
  which the Dijkstra solvers return a wrong answer.
* ``cross_check`` runs every solver on one graph and reports disagreements.
"""

from __future__ import annotations

import itertools
import json
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Union

from .domain import canon, render, to_json_value
from .graph import WeightedGraph
from .instances import SAMPLE_FOR, InstanceSpec, example_graph, instance_from_header
from .modality import Transition, first_violation
from .solve import (
    Stabilized,
    bellman_power,
    coalg_dijkstra,
    coalg_dijkstra_heap,
    kleene_gfp,
)


class VerifyError(ValueError):
    pass


class InstanceMismatch(VerifyError):
    pass


class BudgetError(VerifyError):
    pass


class CombinatorialBlowup(VerifyError):
    pass


class NotAWitness(VerifyError):
    pass


# construction trees ---------------------------------------------------------


@dataclass(frozen=True)
class Leaf:
    """A base weight: ``"xi"`` (final weight) or ``"top"``."""

    kind: str
    value: object

    @property
    def depth(self) -> int:
        return 0

    def size(self) -> int:
        return 1


@dataclass(frozen=True)
class Node:
    """An application of the modality to ``payload`` with one child per slot."""

    payload: object
    children: tuple
    value: object

    @property
    def depth(self) -> int:
        return 1 + max((c.depth for c in self.children), default=0)

    @property
    def slot_values(self) -> tuple:
        return tuple(c.value for c in self.children)

    def size(self) -> int:
        return 1 + sum(c.size() for c in self.children)


ConstructionTree = Union[Leaf, Node]


def tree_value(inst: InstanceSpec, tree) -> object:
    """Recompute the weight a construction tree denotes, checking every label."""
    if isinstance(tree, Leaf):
        expect = {"xi": inst.domain.xi, "top": inst.domain.top}.get(tree.kind)
        if expect is None or expect != tree.value:
            raise NotAWitness(f"bad leaf {tree!r}")
        return tree.value
    vals = [tree_value(inst, c) for c in tree.children]
    out = canon(inst.modality.evaluate(tree.payload, vals))
    if out != tree.value:
        raise NotAWitness(f"node value {render(tree.value)} but children give {render(out)}")
    return out


def render_tree(inst: InstanceSpec, tree) -> str:
    if isinstance(tree, Leaf):
        return tree.kind
    mod = inst.modality
    pay = mod.dump_payload(tree.payload)
    label = ",".join(f"{k}={v}" for k, v in pay.items()) if pay else ""
    inner = ", ".join(render_tree(inst, c) for c in tree.children)
    head = f"sigma[{label}]" if label else "sigma"
    return f"{head}({inner})={render(tree.value)}"


def tree_to_dict(inst: InstanceSpec, tree) -> dict:
    if isinstance(tree, Leaf):
        return {"leaf": tree.kind}
    return {
        "payload": inst.modality.dump_payload(tree.payload),
        "children": [tree_to_dict(inst, c) for c in tree.children],
        "value": to_json_value(tree.value),
    }


def tree_from_dict(inst: InstanceSpec, doc: dict):
    if "leaf" in doc:
        kind = doc["leaf"]
        if kind == "xi":
            return Leaf("xi", inst.domain.xi)
        if kind == "top":
            return Leaf("top", inst.domain.top)
        raise NotAWitness(f"unknown leaf kind {kind!r}")
    mod = inst.modality
    payload = mod.parse_payload(doc.get("payload", {}), inst.exact)
    children = tuple(tree_from_dict(inst, c) for c in doc.get("children", []))
    msg = mod.arity_problem(len(children)) or mod.payload_problem(payload, len(children))
    if msg:
        raise NotAWitness(msg)
    value = canon(mod.evaluate(payload, [c.value for c in children]))
    return Node(payload, children, value)


@dataclass(frozen=True)
class Witness:
    """A construction tree whose root application lies strictly below one child."""

    instance: InstanceSpec
    tree: Node
    index: int

    @property
    def slot_value(self):
        return self.tree.children[self.index].value

    @property
    def result(self):
        return self.tree.value

    def check(self) -> bool:
        """Re-validate by direct evaluation."""
        from .modality import apply

        tree_value(self.instance, self.tree)
        vals = self.tree.slot_values
        res = apply(self.instance.modality, self.instance.domain, self.tree.payload, vals)
        return res == self.tree.value and self.instance.domain.lt(res, vals[self.index])

    def describe(self) -> str:
        return (f"{render_tree(self.instance, self.tree)}; slot {self.index} holds "
                f"{render(self.slot_value)}, strictly above the result {render(self.result)}")

    def to_dict(self) -> dict:
        return {
            "instance": self.instance.header(),
            "violating_child": self.index,
            "tree": tree_to_dict(self.instance, self.tree),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"


def witness_from_dict(doc: dict) -> Witness:
    inst = instance_from_header(doc["instance"])
    tree = tree_from_dict(inst, doc["tree"])
    if not isinstance(tree, Node):
        raise NotAWitness("witness root must be an application")
    idx = doc.get("violating_child", 0)
    if not isinstance(idx, int) or not 0 <= idx < len(tree.children):
        raise NotAWitness(f"violating child {idx!r} out of range")
    return Witness(inst, tree, idx)


# the closure of {xi, top} ---------------------------------------------------


@dataclass(frozen=True)
class FromGraph:
    graph: WeightedGraph


@dataclass(frozen=True)
class Sampler:
    seed: int = 0
    count: int = 12
    max_arity: int = 2


@dataclass(frozen=True)
class Analytic:
    pass


def _payloads(inst: InstanceSpec, source) -> list:
    """(payload, arity) pairs to close over, deduplicated, in a stable order."""
    mod = inst.modality
    out = []
    if isinstance(source, FromGraph):
        g = source.graph
        if g.instance.name != inst.name:
            raise InstanceMismatch(f"graph is for {g.instance.name}, not {inst.name}")
        for row in g.transitions:
            for t in row:
                out.append((t.payload, len(t.slots)))
    elif isinstance(source, Sampler):
        rng = random.Random(source.seed)
        for _ in range(source.count):
            k = mod.sample_arity(rng, source.max_arity)
            out.append((mod.sample_payload(rng, k, inst.exact), k))
    else:
        raise VerifyError(f"no payload set for source {source!r}")
    seen, uniq = set(), []
    for item in out:
        if item not in seen:
            seen.add(item)
            uniq.append(item)
    return uniq


@dataclass
class OmegaSigmaSample:
    depth: int
    values: list
    source: object
    capped: bool = False
    trees: dict = field(default_factory=dict, repr=False)
    levels: list = field(default_factory=list, repr=False)

    def value_set(self) -> set:
        return set(self.values)


def _base(inst: InstanceSpec):
    dom = inst.domain
    vals, trees = [dom.xi], {dom.xi: Leaf("xi", dom.xi)}
    if dom.top not in trees:
        vals.append(dom.top)
        trees[dom.top] = Leaf("top", dom.top)
    return vals, trees


def omega_sigma(inst: InstanceSpec, depth: int, source=None, cap: int = 10_000) -> OmegaSigmaSample:
    """Values reachable from {xi, top} in at most ``depth`` rounds of applications."""
    if depth < 0:
        raise ValueError("depth must be >= 0")
    source = source if source is not None else Sampler()
    payloads = _payloads(inst, source)
    vals, trees = _base(inst)
    levels = [list(vals)]
    capped = False
    ev = inst.modality.evaluate
    for _ in range(depth):
        fresh = []
        current = list(vals)
        for payload, k in payloads:
            for combo in itertools.product(current, repeat=k):
                v = canon(ev(payload, combo))
                if v not in trees:
                    if len(trees) >= cap:
                        capped = True
                        break
                    trees[v] = Node(payload, tuple(trees[c] for c in combo), v)
                    fresh.append(v)
            if capped:
                break
        vals.extend(fresh)
        levels.append(fresh)
        if capped or not fresh:
            break
    return OmegaSigmaSample(depth, vals, source, capped, trees, levels)


# expansiveness ------------------------------------------------------------


@dataclass
class ExpansivenessReport:
    verdict: str  # "Expansive" | "NotExpansive" | "Unknown"
    mode: str
    depth: Optional[int]
    instance: InstanceSpec
    witness: Optional[Witness] = None
    reason: str = ""
    applications: int = 0
    capped: bool = False
    analysis: Optional[dict] = None

    @property
    def expansive(self) -> Optional[bool]:
        return {"Expansive": True, "NotExpansive": False}.get(self.verdict)

    def summary(self) -> str:
        if self.verdict == "Expansive":
            scope = "all depths (closed form)" if self.depth is None else f"depth {self.depth}"
            head = f"Expansive [{self.mode}, {scope}]"
        elif self.verdict == "NotExpansive":
            head = f"NotExpansive [{self.mode}, witness depth {self.witness.tree.depth - 1}]"
        else:
            head = f"Unknown [{self.mode}]"
        lines = [f"{self.instance.name}: {head}"]
        if self.reason:
            lines.append(f"  {self.reason}")
        if self.witness is not None:
            lines.append(f"  witness: {self.witness.describe()}")
        if self.analysis:
            for k, v in self.analysis.items():
                lines.append(f"  {k}: {v}")
        return "\n".join(lines)

    def to_dict(self) -> dict:
        out = {
            "instance": self.instance.header(),
            "verdict": self.verdict,
            "mode": self.mode,
            "depth": self.depth,
            "reason": self.reason,
            "applications": self.applications,
            "capped": self.capped,
        }
        if self.witness is not None:
            out["witness"] = self.witness.to_dict()
        if self.analysis:
            out["analysis"] = {k: (v if isinstance(v, (bool, int, str, list)) else str(v))
                               for k, v in self.analysis.items()}
        return out


def _search(inst: InstanceSpec, depth: int, source, budget: int, cap: int, mode: str) -> ExpansivenessReport:
    """Level-by-level search for a violating application, shallowest first."""
    dom = inst.domain
    ev = inst.modality.evaluate
    payloads = _payloads(inst, source)
    vals, trees = _base(inst)
    old = []
    apps = 0
    capped = False
    for level in range(depth + 1):
        new = [v for v in vals if v not in set(old)]
        old_set = set(old)
        fresh = []
        for payload, k in payloads:
            for combo in itertools.product(vals, repeat=k):
                if k and all(c in old_set for c in combo):
                    continue  # already examined at a shallower level
                apps += 1
                if apps > budget:
                    return ExpansivenessReport("Unknown", mode, level, inst, applications=apps - 1,
                                               reason=f"budget of {budget} applications exhausted at level {level}",
                                               capped=capped)
                r = canon(ev(payload, combo))
                i = first_violation(inst.modality, dom, payload, combo, r)
                node = Node(payload, tuple(trees[c] for c in combo), r)
                if i is not None:
                    w = Witness(inst, node, i)
                    return ExpansivenessReport("NotExpansive", mode, level, inst, witness=w,
                                               applications=apps, capped=capped)
                if level < depth and r not in trees:
                    if len(trees) < cap:
                        trees[r] = node
                        fresh.append(r)
                    else:
                        capped = True
        old = list(vals)
        vals = vals + fresh
        if not fresh and not new and level > 0:
            break
    if capped:
        return ExpansivenessReport("Unknown", mode, depth, inst, applications=apps, capped=True,
                                   reason=f"value set reached the cap of {cap} before depth {depth}")
    reason = "no violation among the sampled payloads" if mode == "sample" else "no violation among the graph's payloads"
    return ExpansivenessReport("Expansive", mode, depth, inst, applications=apps, reason=reason)


def _leaf(inst, kind):
    return Leaf(kind, inst.domain.xi if kind == "xi" else inst.domain.top)


def _node(inst, payload, children):
    v = canon(inst.modality.evaluate(payload, [c.value for c in children]))
    return Node(payload, tuple(children), v)


_EXPANSIVE_REASONS = {
    "reach": "identity: every slot equals the result",
    "uspp": "b <= 1 + b",
    "spp": "non-negative weights: b <= a + b",
    "spp-interest": "rate >= 1 and a >= 0: b <= a + r*b",
    "widest": "order is >=, and min(c, b) <= b numerically",
    "reliable": "order is >=, and p*b <= b for p in [0, 1]",
    "bintree": "non-negative weights and summands: b_i <= a + sum(b)",
    "bin-reach-game": "a join contains each of its arguments",
    "reach-game": "a join contains each of its arguments",
    "dyn-game": "non-negative weights: b_i <= a_i + b_i <= max",
}


def _fraction(x):
    return Fraction(x) if not isinstance(x, float) else Fraction(str(x))


def discount_game_analysis(lo, hi, r, xi, bound: int = 64) -> dict:
    """Compare the two published sufficient conditions with expansiveness.

    ``uniform_condition`` requires L*sum_{j<n} r^j + r^n*xi <= l0/(1-r) for
    every n (checked up to ``bound`` plus the n -> infinity limit).
    ``single_step_condition`` is L + r*xi <= l0/(1-r).
    """
    lo, hi, r, xi = map(_fraction, (lo, hi, r, xi))
    if r == 1:
        return {"uniform_condition": True, "single_step_condition": True,
                "uniform_condition_first_failure": None, "bound": bound}
    rhs = lo / (1 - r)
    first_fail = None
    partial = Fraction(0)
    for n in range(bound + 1):
        lhs = hi * partial + r ** n * xi
        if lhs > rhs and first_fail is None:
            first_fail = n
        partial += r ** n
    limit_ok = hi / (1 - r) <= rhs
    return {
        "uniform_condition": first_fail is None and limit_ok,
        "uniform_condition_first_failure": first_fail if first_fail is not None else ("limit" if not limit_ok else None),
        "single_step_condition": hi + r * xi <= rhs,
        "bound": bound,
    }


def _analytic(inst: InstanceSpec) -> ExpansivenessReport:
    dom = inst.domain
    iid = inst.id
    if iid in _EXPANSIVE_REASONS:
        return ExpansivenessReport("Expansive", "analytic", None, inst, reason=_EXPANSIVE_REASONS[iid])
    xi, top = _leaf(inst, "xi"), _leaf(inst, "top")
    exact = inst.exact

    def num(x):
        return x if exact else float(x)

    if iid == "ulongest":
        tree = _node(inst, None, [xi])
        why = "order is >=, so the slot value 0 lies above 1 + 0"
    elif iid == "spp-neg":
        tree = _node(inst, num(-1), [_node(inst, num(1), [xi])])
        why = "a negative weight pulls the result below its slot"
    elif iid == "spp-discount":
        tree = _node(inst, (num(0), num(0)), [_node(inst, (num(1), num(1)), [xi])])
        why = "a rate below 1 pulls the result below its slot"
    elif iid == "prob-reach":
        half = Fraction(1, 2) if exact else 0.5
        tree = _node(inst, (half, half), [xi, top])
        why = "an average lies strictly between its two distinct slot values"
    elif iid == "dyn-game-discount":
        p = inst.params
        lo, hi, r, x0 = p["l0"], p["L"], p["r"], p["xi"]
        analysis = discount_game_analysis(lo, hi, r, x0)
        if inst.dijkstra_applies:
            rep = ExpansivenessReport("Expansive", "analytic", None, inst, analysis=analysis,
                                      reason="r = 1, or l0 = L with xi <= L + r*xi")
            rep.analysis["agrees_with_uniform_condition"] = analysis["uniform_condition"] is True
            return rep
        # climb b_{n+1} = L + r*b_n from xi until l0 + r*b_n < b_n
        b = xi
        for _ in range(10_000):
            probe = _node(inst, (num(lo),), [b])
            if dom.lt(probe.value, b.value):
                break
            b = _node(inst, (num(hi),), [b])
        else:  # pragma: no cover - the chain converges above l0/(1-r)
            raise VerifyError("no witness found for the discounted game")
        tree = _node(inst, (num(lo),), [b])
        rep = ExpansivenessReport("NotExpansive", "analytic", None, inst, witness=Witness(inst, tree, 0),
                                  analysis=analysis, reason="a reward chain from xi climbs above l0/(1-r)")
        rep.analysis["agrees_with_uniform_condition"] = analysis["uniform_condition"] is False
        return rep
    else:  # pragma: no cover - every catalog id is handled above
        raise VerifyError(f"no closed form for {iid}")
    w = Witness(inst, tree, first_violation(inst.modality, dom, tree.payload, tree.slot_values, tree.value))
    return ExpansivenessReport("NotExpansive", "analytic", None, inst, witness=w, reason=why)


def check_expansive(inst: InstanceSpec, depth: int = 3, source=None, budget: int = 2_000_000,
                    cap: int = 10_000) -> ExpansivenessReport:
    """Decide expansiveness in closed form (``Analytic``) or by bounded search.

    A bounded search answers ``Expansive`` only for the depth and payloads it
    covered, ``NotExpansive`` with a shallowest witness, or ``Unknown`` when
    the budget or the value cap runs out.
    """
    if budget <= 0:
        raise BudgetError("budget must be positive")
    if depth < 0:
        raise ValueError("depth must be >= 0")
    source = source if source is not None else Analytic()
    if isinstance(source, Analytic):
        return _analytic(inst)
    mode = "from-graph" if isinstance(source, FromGraph) else "sample"
    return _search(inst, depth, source, budget, cap, mode)


def sample_graph_for(inst: InstanceSpec) -> WeightedGraph:
    g = example_graph(SAMPLE_FOR[inst.id])
    if g.instance.name != inst.name:
        g = WeightedGraph(inst, g.targets, g.transitions, g.labels)
    return g


# run trees -------------------------------------------------------------------


def run_tree_values(g: WeightedGraph, max_height: int, budget: int = 1_000_000) -> list:
    """Per state, the set of values of run trees of height <= h, for h = 0..max_height.

    A target may end a run (value xi) and may also continue through its
    transitions; a slot with no run tree of the allowed height leaves its
    transition without a tree.
    """
    if max_height < 0:
        raise ValueError("max_height must be >= 0")
    ev = g.instance.modality.evaluate
    xi = g.instance.domain.xi
    V = g.V
    work = 0
    prev = None
    history = []
    for h in range(max_height + 1):
        cur = []
        for x in range(V):
            vals = {xi} if g.targets[x] else set()
            for t in g.transitions[x]:
                if not t.slots:
                    vals.add(canon(ev(t.payload, ())))
                    continue
                if prev is None:
                    continue
                sets = [prev[y] for y in t.slots]
                n = 1
                for s in sets:
                    n *= len(s)
                work += n
                if work > budget:
                    raise CombinatorialBlowup(f"more than {budget} run-tree combinations by height {h}")
                for combo in itertools.product(*sets):
                    vals.add(canon(ev(t.payload, combo)))
            cur.append(frozenset(vals))
        history.append(cur)
        prev = cur
    return history


def run_tree_infimum(g: WeightedGraph, x: int, max_height: int, budget: int = 1_000_000):
    """Meet of the values of all run trees from ``x`` of height <= ``max_height``; top if none."""
    if not 0 <= x < g.V:
        raise IndexError(f"state {x} out of range")
    sets = run_tree_values(g, max_height, budget)[max_height]
    return g.instance.domain.meet(sets[x])


def run_tree_infima(g: WeightedGraph, max_height: int, budget: int = 1_000_000) -> list:
    dom = g.instance.domain
    return [dom.meet(s) for s in run_tree_values(g, max_height, budget)[max_height]]


@dataclass(frozen=True)
class RunTree:
    state: int
    transition: Optional[int]  # None for a leaf
    children: tuple = ()

    @property
    def height(self) -> int:
        return 0 if not self.children else 1 + max(c.height for c in self.children)


def enumerate_run_trees(g: WeightedGraph, x: int, max_height: int, max_states: int = 4):
    """Materialize every run tree from ``x`` of height <= ``max_height`` (small graphs only)."""
    if g.V > max_states:
        raise CombinatorialBlowup(f"materializing run trees is limited to {max_states} states")

    def trees(y, h):
        if g.targets[y]:
            yield RunTree(y, None)
        for j, t in enumerate(g.transitions[y]):
            if not t.slots:
                yield RunTree(y, j)
                continue
            if h == 0:
                continue
            for kids in itertools.product(*[list(trees(s, h - 1)) for s in t.slots]):
                yield RunTree(y, j, tuple(kids))

    return list(trees(x, max_height))


def run_tree_value(g: WeightedGraph, tree: RunTree):
    if tree.transition is None:
        return g.instance.domain.xi
    t = g.transitions[tree.state][tree.transition]
    return canon(g.instance.modality.evaluate(t.payload, [run_tree_value(g, c) for c in tree.children]))


# contraction coalgebra ------------------------------------------------------


def contraction_coalgebra(witness: Witness, violating_child_index: Optional[int] = None) -> WeightedGraph:
    """Build the graph on the witness tree minus its root.

    Every node below the root becomes its own state, numbered in postorder
    with the root's children taken in slot order.  Leaves standing for xi
    become targets without transitions, leaves standing for top become dead
    ends, and every inner node keeps its own application.  The violating
    child additionally carries the root's application, so its value can
    sink below what the Dijkstra solvers freeze it at.
    """
    inst = witness.instance
    tree = witness.tree
    j = witness.index if violating_child_index is None else violating_child_index
    if not isinstance(tree, Node) or not tree.children:
        raise NotAWitness("witness root must be an application with at least one slot")
    if not 0 <= j < len(tree.children):
        raise NotAWitness(f"child {j} out of range")
    tree_value(inst, tree)
    if not inst.domain.lt(tree.value, tree.children[j].value):
        raise NotAWitness(f"child {j} value {render(tree.children[j].value)} is not above "
                          f"the root value {render(tree.value)}")
    targets, rows = [], []

    def build(node) -> int:
        if isinstance(node, Leaf):
            targets.append(node.kind == "xi")
            rows.append([])
        else:
            kids = tuple(build(c) for c in node.children)
            targets.append(False)
            rows.append([Transition(node.payload, kids)])
        return len(targets) - 1

    ids = [build(c) for c in tree.children]
    rows[ids[j]].append(Transition(tree.payload, tuple(ids)))
    return WeightedGraph(inst, targets, rows)


# cross checking ---------------------------------------------------------------


@dataclass
class CrossCheckReport:
    graph: WeightedGraph
    valuations: dict
    statuses: dict
    diffs: dict
    notes: list
    expansiveness: Optional[ExpansivenessReport] = None
    run_tree_height: Optional[int] = None

    @property
    def disagreement(self) -> bool:
        return any(self.diffs.values())

    def render(self) -> str:
        g = self.graph
        lines = [f"instance: {g.instance.name}   states: {g.V}"]
        names = list(self.valuations)
        w = max([len(n) for n in names] + [6])
        cols = [[render(self.valuations[n][x]) for n in names] for x in range(g.V)]
        widths = [max([len(f"d({x})")] + [len(c) for c in col]) for x, col in enumerate(cols)]
        lines.append(" " * w + "".join("  " + f"d({x})".rjust(wd) for x, wd in enumerate(widths)))
        for i, name in enumerate(names):
            vals = "".join("  " + cols[x][i].rjust(wd) for x, wd in enumerate(widths))
            lines.append(f"{name.ljust(w)}{vals}   {self.statuses.get(name, '')}".rstrip())
        for pair, diff in self.diffs.items():
            if diff:
                detail = "; ".join(f"state {x}: {render(a)} vs {render(b)}" for x, a, b in diff)
                lines.append(f"DISAGREE {pair}: {detail}")
            else:
                lines.append(f"agree    {pair}")
        lines.extend(f"note: {n}" for n in self.notes)
        if self.expansiveness is not None:
            lines.append("expansiveness: " + self.expansiveness.summary())
        lines.append("result: " + ("DISAGREEMENT" if self.disagreement else "all checks agree"))
        return "\n".join(lines) + "\n"

    def to_dict(self) -> dict:
        return {
            "instance": self.graph.instance.header(),
            "valuations": {k: [to_json_value(v) for v in vs] for k, vs in self.valuations.items()},
            "statuses": self.statuses,
            "diffs": {k: [[x, to_json_value(a), to_json_value(b)] for x, a, b in d] for k, d in self.diffs.items()},
            "notes": self.notes,
            "disagreement": self.disagreement,
            "expansiveness": self.expansiveness.to_dict() if self.expansiveness else None,
        }


def _diff(a, b, tol):
    out = []
    for x, (u, v) in enumerate(zip(a, b)):
        if u == v:
            continue
        if tol and math.isfinite(u) and math.isfinite(v) and abs(u - v) <= tol:
            continue
        out.append((x, u, v))
    return out


def cross_check(g: WeightedGraph, run_tree_height: Optional[int] = 3, max_iters: Optional[int] = None,
                tol: Optional[float] = None, run_tree_budget: int = 1_000_000,
                queue: str = "fib") -> CrossCheckReport:
    """Run every solver on ``g`` and compare them state by state.

    The Kleene iterate stands for the exact answer only when it stabilized;
    a capped iterate is still an upper bound of the answer, so any state
    where it lies strictly below the Dijkstra value is a disagreement too.
    """
    inst = g.instance
    dom = inst.domain
    if tol is None and not inst.exact:
        tol = 1e-9
    notes = []
    plain = coalg_dijkstra(g)
    heap = coalg_dijkstra_heap(g, queue=queue)
    kl = kleene_gfp(g, max_iters=max_iters, tol=tol)
    vals = {"dijkstra": plain.valuation, "dijkstra-heap": heap.valuation, "kleene": kl.valuation}
    statuses = {"dijkstra": str(plain.status), "dijkstra-heap": str(heap.status), "kleene": str(kl.status)}
    diffs = {"dijkstra/dijkstra-heap": _diff(plain.valuation, heap.valuation, tol)}
    if isinstance(kl.status, Stabilized):
        diffs["dijkstra/kleene"] = _diff(plain.valuation, kl.valuation, tol)
    else:
        below = [(x, a, b) for x, (a, b) in enumerate(zip(plain.valuation, kl.valuation)) if dom.lt(b, a)]
        diffs["dijkstra/kleene"] = below
        if kl.divergent:
            notes.append("kleene diverging at states " + ",".join(map(str, sorted(kl.divergent))))
        if not below:
            notes.append("kleene hit its iteration cap without going below the dijkstra values: inconclusive")
    if run_tree_height is not None:
        try:
            rt = run_tree_infima(g, run_tree_height, run_tree_budget)
            ref = bellman_power(g, run_tree_height + 1)
            vals[f"run-tree(h={run_tree_height})"] = rt
            vals[f"bellman^{run_tree_height + 1}"] = ref
            diffs[f"run-tree/bellman^{run_tree_height + 1}"] = _diff(rt, ref, tol)
        except CombinatorialBlowup as exc:
            notes.append(f"run-tree oracle skipped: {exc}")
    exp = check_expansive(inst)
    return CrossCheckReport(g, vals, statuses, diffs, notes, exp, run_tree_height)
