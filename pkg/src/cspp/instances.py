"""Catalog of problem instances, bundled example graphs and random generators."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from typing import Optional

from . import domain as D
from . import modality as M
from .domain import INF, WeightDomain, parse_value, render, to_json_value
from .graph import WeightedGraph, load_graph
from .modality import Transition


class InstanceError(ValueError):
    pass


class UnknownInstance(InstanceError):
    pass


class ParamRange(InstanceError):
    pass


class UnknownExample(KeyError):
    pass


@dataclass(frozen=True, eq=False)
class InstanceSpec:
    id: str
    params: dict
    domain: WeightDomain
    modality: M.Modality
    expected_dijkstra: str  # "yes" | "no" | "conditional"
    condition: str = ""
    title: str = ""
    exact: bool = True
    value_pool: tuple = field(default=(), repr=False)

    @property
    def name(self) -> str:
        shown = {k: v for k, v in self.params.items() if k != "numeric"}
        if not shown:
            return self.id
        inner = ", ".join(f"{k}={render(v) if not isinstance(v, str) else v}" for k, v in shown.items())
        return f"{self.id}({inner})"

    @property
    def dijkstra_applies(self) -> bool:
        """The catalog answer, with any condition evaluated for these params."""
        if self.expected_dijkstra == "conditional":
            return _discount_game_applies(self.params)
        return self.expected_dijkstra == "yes"

    def header(self) -> dict:
        params = {}
        for k, v in self.params.items():
            params[k] = v if isinstance(v, str) else to_json_value(v)
        return {"id": self.id, "params": params}

    def sample_value(self, rng: random.Random):
        v = rng.choice(self.value_pool)
        if not self.exact and v not in (INF, -INF):
            return float(v)
        return v

    def __eq__(self, other):
        return isinstance(other, InstanceSpec) and self.name == other.name and self.exact == other.exact

    def __hash__(self):
        return hash((self.name, self.exact))


def _discount_game_applies(p) -> bool:
    r, lo, hi, xi = p["r"], p["l0"], p["L"], p["xi"]
    if r == 1:
        return True
    return lo == hi and xi <= hi + r * xi


_NONNEG_POOL = (0, Fraction(1, 2), 1, 2, 3, 5, INF)
_POOLS = {
    "zero-inf": (0, INF),
    "nat-asc": (0, 1, 2, 3, 5, INF),
    "nat-desc": (0, 1, 2, 3, 5, INF),
    "real-asc": (-INF, -2, -1, 0, 1, 3, INF),
    "nonneg-asc": _NONNEG_POOL,
    "nonneg-desc": _NONNEG_POOL,
    "unit-desc": (0, Fraction(1, 4), Fraction(1, 2), Fraction(3, 4), 1),
}

TITLES = {
    "reach": "Reachability",
    "uspp": "Unweighted shortest path",
    "ulongest": "Unweighted longest path",
    "spp": "Shortest path",
    "spp-neg": "Shortest path with negative edges",
    "spp-interest": "Shortest path with interest rate",
    "spp-discount": "Shortest path with discount rate",
    "widest": "Widest path",
    "reliable": "Most reliable path",
    "bintree": "Shortest tree of fixed arity",
    "bin-reach-game": "Binary reachability game",
    "reach-game": "Reachability game",
    "dyn-game": "Dynamic game",
    "dyn-game-discount": "Dynamic game with discount rate",
    "prob-reach": "Max probabilistic reachability",
}

INSTANCE_IDS = tuple(TITLES)

_DEFAULT_NUMERIC = {"prob-reach": "float"}


def _num(params, key, default):
    raw = params.get(key, default)
    try:
        return parse_value(raw, exact=True)
    except ValueError as exc:
        raise ParamRange(f"{key}: {exc}") from exc


def _build(id_: str, params: dict):
    """Return (domain, modality, expected, condition, normalized params)."""
    if id_ == "reach":
        return D.ZERO_INF, M.Identity(), "yes", "", {}
    if id_ == "uspp":
        return D.NAT_ASC, M.Successor(), "yes", "", {}
    if id_ == "ulongest":
        return D.NAT_DESC, M.Successor(), "no", "", {}
    if id_ == "spp":
        return D.NONNEG_ASC, M.Add(), "yes", "", {}
    if id_ == "spp-neg":
        return D.REAL_ASC, M.Add(signed=True), "no", "", {}
    if id_ == "spp-interest":
        return D.NONNEG_ASC, M.Rate(1, INF), "yes", "", {}
    if id_ == "spp-discount":
        return D.NONNEG_ASC, M.Rate(0, 1), "no", "", {}
    if id_ == "widest":
        return D.NONNEG_DESC, M.Cap(), "yes", "", {}
    if id_ == "reliable":
        return D.UNIT_DESC, M.Mult(), "yes", "", {}
    if id_ == "bintree":
        t = params.get("t", 2)
        if isinstance(t, bool) or not isinstance(t, int) or t < 1:
            raise ParamRange(f"tree arity t must be an integer >= 1, got {t!r}")
        return D.NONNEG_ASC, M.TreeAdd(t), "yes", "", {"t": t}
    if id_ == "bin-reach-game":
        return D.ZERO_INF, M.PairJoin(True), "yes", "", {}
    if id_ == "reach-game":
        return D.ZERO_INF, M.SetJoin(True), "yes", "", {}
    if id_ == "dyn-game":
        return D.NONNEG_ASC, M.GameMax(), "yes", "", {}
    if id_ == "dyn-game-discount":
        lo = _num(params, "l0", 1)
        hi = _num(params, "L", 2)
        r = _num(params, "r", Fraction(1, 2))
        xi = _num(params, "xi", 0)
        if not (0 < lo <= hi) or hi == INF:
            raise ParamRange(f"need 0 < l0 <= L < inf, got l0={lo}, L={hi}")
        if not (0 < r <= 1):
            raise ParamRange(f"need r in (0, 1], got {r}")
        if not D.NONNEG_ASC.contains(xi) or xi == INF:
            raise ParamRange(f"final weight must be finite and >= 0, got {render(xi)}")
        cond = "r = 1, or l0 = L and xi <= L + r*xi"
        dom = D.NONNEG_ASC.with_xi(xi)
        return dom, M.DiscountedGame(lo, hi, r), "conditional", cond, {"l0": lo, "L": hi, "r": r, "xi": xi}
    if id_ == "prob-reach":
        return D.UNIT_DESC, M.Expectation(), "no", "", {}
    raise UnknownInstance(f"unknown instance {id_!r}; known: {', '.join(INSTANCE_IDS)}")


def instance(id_: str, params: Optional[dict] = None, **kw) -> InstanceSpec:
    """Build a fully wired instance.  ``numeric`` selects exact or float mode."""
    params = dict(params or {})
    params.update(kw)
    numeric = params.pop("numeric", _DEFAULT_NUMERIC.get(id_, "exact"))
    if numeric not in ("exact", "float"):
        raise ParamRange(f"numeric must be 'exact' or 'float', got {numeric!r}")
    dom, mod, expected, cond, norm = _build(id_, params)
    unknown = set(params) - set(norm)
    if unknown:
        raise ParamRange(f"{id_} does not take parameter(s) {sorted(unknown)}")
    if numeric != _DEFAULT_NUMERIC.get(id_, "exact"):
        norm["numeric"] = numeric
    pool = tuple(v for v in _POOLS[dom.id] if dom.contains(v))
    if dom.xi not in pool:
        pool = pool + (dom.xi,)
    return InstanceSpec(
        id=id_,
        params=norm,
        domain=dom,
        modality=mod,
        expected_dijkstra=expected,
        condition=cond,
        title=TITLES[id_],
        exact=numeric == "exact",
        value_pool=pool,
    )


def instance_from_header(header) -> InstanceSpec:
    if isinstance(header, str):
        return instance(header)
    if not isinstance(header, dict) or "id" not in header:
        raise InstanceError("instance header needs an 'id'")
    return instance(header["id"], header.get("params") or {})


def all_instances() -> list:
    """One spec per catalog row with default parameters."""
    return [instance(i) for i in INSTANCE_IDS]


# bundled example graphs -----------------------------------------------------

EXAMPLE_FILES = {
    "fig1_fig2": "fig1_fig2_spp.json",
    "fig3": "fig3_bintree.json",
    "neg_edges": "neg_edges_counterexample.json",
    "prob_counterexample": "prob_counterexample.json",
    "reach_fig2_unweighted": "reach_fig2_unweighted.json",
    "uspp": "sample_uspp.json",
    "ulongest": "sample_ulongest.json",
    "spp_interest": "sample_spp_interest.json",
    "spp_discount": "sample_spp_discount.json",
    "widest": "sample_widest.json",
    "reliable": "sample_reliable.json",
    "bin_reach_game": "sample_bin_reach_game.json",
    "reach_game": "sample_reach_game.json",
    "dyn_game": "sample_dyn_game.json",
    "dyn_game_discount": "sample_dyn_game_discount.json",
}

# which bundled graph represents each catalog row
SAMPLE_FOR = {
    "reach": "reach_fig2_unweighted",
    "uspp": "uspp",
    "ulongest": "ulongest",
    "spp": "fig1_fig2",
    "spp-neg": "neg_edges",
    "spp-interest": "spp_interest",
    "spp-discount": "spp_discount",
    "widest": "widest",
    "reliable": "reliable",
    "bintree": "fig3",
    "bin-reach-game": "bin_reach_game",
    "reach-game": "reach_game",
    "dyn-game": "dyn_game",
    "dyn-game-discount": "dyn_game_discount",
    "prob-reach": "prob_counterexample",
}


def example_bytes(name: str) -> bytes:
    try:
        fname = EXAMPLE_FILES[name]
    except KeyError:
        raise UnknownExample(f"unknown example {name!r}; known: {', '.join(EXAMPLE_FILES)}") from None
    return resources.files("cspp.data").joinpath(fname).read_bytes()


def example_graph(name: str) -> WeightedGraph:
    return load_graph(example_bytes(name))


# random generation ---------------------------------------------------------


def random_graph(inst: InstanceSpec, rng: random.Random, V: Optional[int] = None, *,
                 max_states: int = 8, max_transitions: int = 3, max_arity: int = 3,
                 target_prob: float = 0.3, acyclic: bool = False) -> WeightedGraph:
    """A small random graph whose payloads come from the instance's sampler.

    With ``acyclic`` every slot points to a lower-numbered state.
    """
    mod = inst.modality
    if V is None:
        V = rng.randint(1, max_states)
    targets = [rng.random() < target_prob for _ in range(V)]
    transitions = []
    for x in range(V):
        row = []
        lo_choices = range(x) if acyclic else range(V)
        if acyclic and x == 0:
            transitions.append(row)
            continue
        for _ in range(rng.randint(0, max_transitions)):
            k = mod.sample_arity(rng, max_arity)
            slots = tuple(rng.choice(lo_choices) for _ in range(k))
            row.append(Transition(mod.sample_payload(rng, k, inst.exact), slots))
        transitions.append(row)
    return WeightedGraph(inst, targets, transitions)


def random_spp_graph(V: int, E: int, rng: random.Random, max_weight: int = 100,
                     targets: int = 1) -> WeightedGraph:
    """Sparse random shortest-path graph with ``E`` edges and integer weights."""
    inst = instance("spp")
    if E > V * V:
        raise ValueError("more edges than state pairs")
    rows = [[] for _ in range(V)]
    seen = set()
    while len(seen) < E:
        x, y = rng.randrange(V), rng.randrange(V)
        if (x, y) in seen:
            continue
        seen.add((x, y))
        rows[x].append(Transition(rng.randint(1, max_weight), (y,)))
    tflags = [False] * V
    for x in rng.sample(range(V), min(targets, V)):
        tflags[x] = True
    return WeightedGraph(inst, tflags, rows)



def random_sparse_graph(inst: InstanceSpec, V: int, E: int, rng: random.Random,
                        targets: int = 1, max_arity: int = 2) -> WeightedGraph:
    """``E`` random transitions spread over ``V`` states, payloads from the instance's sampler."""
    if inst.id == "spp" and inst.exact:
        return random_spp_graph(V, E, rng, targets=targets)
    mod = inst.modality
    rows = [[] for _ in range(V)]
    for _ in range(E):
        k = mod.sample_arity(rng, max_arity)
        slots = tuple(rng.randrange(V) for _ in range(k))
        rows[rng.randrange(V)].append(Transition(mod.sample_payload(rng, k, inst.exact), slots))
    tflags = [False] * V
    for x in rng.sample(range(V), min(targets, V)):
        tflags[x] = True
    return WeightedGraph(inst, tflags, rows)
