"""Transitions and transition modalities.

A transition is a payload plus an ordered tuple of successor slots.  A
modality turns the payload and the weights found at the slots into a single
weight.  Payloads are stored in a normalized hashable form; each modality
knows how to read and write the JSON form used in graph files.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .domain import INF, CarrierViolation, WeightDomain, canon, parse_value, to_json_value


class ArityMismatch(ValueError):
    pass


class PayloadSchemaError(ValueError):
    pass


@dataclass(frozen=True)
class Transition:
    payload: object
    slots: tuple

    def __post_init__(self):
        if not isinstance(self.slots, tuple):
            object.__setattr__(self, "slots", tuple(self.slots))


def support(t: Transition) -> frozenset:
    """The set of distinct slot states."""
    return frozenset(t.slots)


PROB_TOL = 1e-9


def _finite(x) -> bool:
    return not (isinstance(x, float) and math.isinf(x))


class Modality:
    """Base class.  ``arity`` is a fixed slot count or ``None`` for variable."""

    id = "modality"
    arity: Optional[int] = 1
    min_arity = 1
    formula = ""

    @property
    def params(self) -> dict:
        return {}

    # payload plumbing -------------------------------------------------------
    def parse_payload(self, raw, exact=True):
        if raw not in (None, {}):
            raise PayloadSchemaError(f"{self.id} takes an empty payload, got {raw!r}")
        return None

    def dump_payload(self, payload) -> dict:
        return {}

    def payload_problem(self, payload, k: int) -> Optional[str]:
        """Return a description of what is wrong with ``payload``, or None."""
        return None if payload is None else "payload must be empty"

    def arity_problem(self, k: int) -> Optional[str]:
        if self.arity is not None and k != self.arity:
            return f"{self.id} needs exactly {self.arity} slot(s), got {k}"
        if self.arity is None and k < self.min_arity:
            return f"{self.id} needs at least {self.min_arity} slot(s), got {k}"
        return None

    # semantics ------------------------------------------------------------
    def evaluate(self, payload, values: Sequence):
        raise NotImplementedError

    # sampling -------------------------------------------------------------
    def sample_arity(self, rng: random.Random, max_k: int = 3) -> int:
        if self.arity is not None:
            return self.arity
        return rng.randint(self.min_arity, max(self.min_arity, max_k))

    def sample_payload(self, rng: random.Random, k: int, exact: bool = True):
        return None

    def __repr__(self):
        extra = ", ".join(f"{k}={v}" for k, v in self.params.items())
        return f"{type(self).__name__}({extra})"


class Identity(Modality):
    id = "identity"
    formula = "b"

    def evaluate(self, payload, values):
        return values[0]


class Successor(Modality):
    id = "successor"
    formula = "1 + b"

    def evaluate(self, payload, values):
        return 1 + values[0]


def _read_number(raw, key, exact):
    if not isinstance(raw, dict) or key not in raw:
        raise PayloadSchemaError(f"payload needs field {key!r}")
    try:
        return parse_value(raw[key], exact)
    except ValueError as exc:
        raise PayloadSchemaError(str(exc)) from exc


def _read_list(raw, key, exact):
    if not isinstance(raw, dict) or not isinstance(raw.get(key), list):
        raise PayloadSchemaError(f"payload needs list field {key!r}")
    try:
        return tuple(parse_value(v, exact) for v in raw[key])
    except ValueError as exc:
        raise PayloadSchemaError(str(exc)) from exc


def _small_weight(rng, exact, lo=0, hi=6):
    w = rng.randint(lo, hi)
    return w if exact else float(w)


class Add(Modality):
    """a + b; ``signed`` admits negative weights."""

    formula = "a + b"

    def __init__(self, signed: bool = False):
        self.signed = signed
        self.id = "add-signed" if signed else "add"

    def parse_payload(self, raw, exact=True):
        return _read_number(raw, "weight", exact)

    def dump_payload(self, payload):
        return {"weight": to_json_value(payload)}

    def payload_problem(self, payload, k):
        if not _finite(payload):
            return "weight must be finite"
        if not self.signed and payload < 0:
            return "weight must be non-negative"
        return None

    def evaluate(self, payload, values):
        return payload + values[0]

    def sample_payload(self, rng, k, exact=True):
        return _small_weight(rng, exact, -3 if self.signed else 0, 6)


class Rate(Modality):
    """a + r*b with the rate confined to [rate_lo, rate_hi].

    A top slot stays top even when r = 0.
    """

    formula = "a + r*b"

    def __init__(self, rate_lo, rate_hi):
        self.rate_lo, self.rate_hi = rate_lo, rate_hi
        self.id = "rate"

    @property
    def params(self):
        return {"rate_lo": self.rate_lo, "rate_hi": self.rate_hi}

    def parse_payload(self, raw, exact=True):
        return (_read_number(raw, "weight", exact), _read_number(raw, "rate", exact))

    def dump_payload(self, payload):
        return {"weight": to_json_value(payload[0]), "rate": to_json_value(payload[1])}

    def payload_problem(self, payload, k):
        if not (isinstance(payload, tuple) and len(payload) == 2):
            return "payload must be (weight, rate)"
        w, r = payload
        if not _finite(w) or w < 0:
            return "weight must be finite and non-negative"
        if not (self.rate_lo <= r <= self.rate_hi) or not _finite(r):
            return f"rate must lie in [{self.rate_lo}, {self.rate_hi}]"
        return None

    def evaluate(self, payload, values):
        b = values[0]
        if b == INF:
            return INF
        return payload[0] + payload[1] * b

    def sample_payload(self, rng, k, exact=True):
        choices = [Fraction(n, 2) for n in range(0, 7)]
        rates = [r for r in choices if self.rate_lo <= r <= self.rate_hi]
        hi = self.rate_hi
        if hi != INF and hi not in rates:
            rates.append(hi)
        r = rng.choice(rates)
        w = _small_weight(rng, exact)
        return (w, canon(r) if exact else float(r))


class Cap(Modality):
    """min(c, b): the bottleneck of an edge of capacity c."""

    id = "cap"
    formula = "min(c, b)"

    def parse_payload(self, raw, exact=True):
        return _read_number(raw, "capacity", exact)

    def dump_payload(self, payload):
        return {"capacity": to_json_value(payload)}

    def payload_problem(self, payload, k):
        if not _finite(payload) or payload < 0:
            return "capacity must be finite and non-negative"
        return None

    def evaluate(self, payload, values):
        b = values[0]
        return payload if payload <= b else b

    def sample_payload(self, rng, k, exact=True):
        return _small_weight(rng, exact)


class Mult(Modality):
    id = "mult"
    formula = "p*b"

    def parse_payload(self, raw, exact=True):
        return _read_number(raw, "prob", exact)

    def dump_payload(self, payload):
        return {"prob": to_json_value(payload)}

    def payload_problem(self, payload, k):
        if not (0 <= payload <= 1):
            return "prob must lie in [0, 1]"
        return None

    def evaluate(self, payload, values):
        return payload * values[0]

    def sample_payload(self, rng, k, exact=True):
        p = Fraction(rng.randint(0, 4), 4)
        return canon(p) if exact else float(p)


class TreeAdd(Modality):
    """a + b_0 + ... + b_{t-1} for a fixed arity t."""

    id = "tree-add"
    formula = "a + sum(b)"

    def __init__(self, t: int = 2):
        if t < 1:
            raise ValueError("tree arity must be >= 1")
        self.arity = t

    @property
    def params(self):
        return {"t": self.arity}

    def parse_payload(self, raw, exact=True):
        return _read_number(raw, "weight", exact)

    def dump_payload(self, payload):
        return {"weight": to_json_value(payload)}

    def payload_problem(self, payload, k):
        if not _finite(payload) or payload < 0:
            return "weight must be finite and non-negative"
        return None

    def evaluate(self, payload, values):
        s = payload
        for b in values:
            s = s + b
        return s

    def sample_payload(self, rng, k, exact=True):
        return _small_weight(rng, exact)


class PairJoin(Modality):
    """Join of two slots under the domain order."""

    id = "pair-join"
    arity = 2
    formula = "b0 join b1"

    def __init__(self, ascending: bool = True):
        self.ascending = ascending

    def evaluate(self, payload, values):
        return max(values) if self.ascending else min(values)


class SetJoin(PairJoin):
    id = "set-join"
    arity = None
    formula = "join(B)"


class _Weighted(Modality):
    """Shared payload handling for per-slot weight lists."""

    arity = None

    def parse_payload(self, raw, exact=True):
        return _read_list(raw, "weights", exact)

    def dump_payload(self, payload):
        return {"weights": [to_json_value(w) for w in payload]}

    def _weight_problem(self, w) -> Optional[str]:
        if not _finite(w) or w < 0:
            return "weights must be finite and non-negative"
        return None

    def payload_problem(self, payload, k):
        if not isinstance(payload, tuple) or len(payload) != k:
            return f"need one weight per slot ({k})"
        for w in payload:
            msg = self._weight_problem(w)
            if msg:
                return msg
        return None


class GameMax(_Weighted):
    id = "game-max"
    formula = "max_i(a_i + b_i)"

    def evaluate(self, payload, values):
        return max(a + b for a, b in zip(payload, values))

    def sample_payload(self, rng, k, exact=True):
        return tuple(_small_weight(rng, exact) for _ in range(k))


class DiscountedGame(_Weighted):
    """max_i(a_i + r*b_i) with every a_i in [lo, hi]."""

    id = "discounted-game"
    formula = "max_i(a_i + r*b_i)"

    def __init__(self, lo, hi, r):
        if not (0 < lo <= hi) or not _finite(hi):
            raise ValueError("need 0 < lo <= hi < inf")
        if not (0 < r <= 1):
            raise ValueError("discount rate must lie in (0, 1]")
        self.lo, self.hi, self.r = lo, hi, r

    @property
    def params(self):
        return {"lo": self.lo, "hi": self.hi, "r": self.r}

    def _weight_problem(self, w):
        if not (self.lo <= w <= self.hi):
            return f"weights must lie in [{self.lo}, {self.hi}]"
        return None

    def evaluate(self, payload, values):
        r = self.r
        return max(INF if b == INF else a + r * b for a, b in zip(payload, values))

    def sample_payload(self, rng, k, exact=True):
        picks = [self.lo, self.hi]
        if self.lo != self.hi:
            picks.append(canon((Fraction(self.lo) + Fraction(self.hi)) / 2))
        return tuple(rng.choice(picks) if exact else float(rng.choice(picks)) for _ in range(k))


class Expectation(Modality):
    """sum_i p_i * b_i for a finite distribution over the slots."""

    id = "expectation"
    arity = None
    formula = "sum_i p_i*b_i"

    def parse_payload(self, raw, exact=True):
        return _read_list(raw, "probs", exact)

    def dump_payload(self, payload):
        return {"probs": [to_json_value(p) for p in payload]}

    def payload_problem(self, payload, k):
        if not isinstance(payload, tuple) or len(payload) != k:
            return f"need one probability per slot ({k})"
        if any(not (p > 0) for p in payload):
            return "probabilities must be positive"
        total = sum(payload)
        if any(isinstance(p, float) for p in payload):
            if abs(total - 1) > PROB_TOL:
                return f"probabilities sum to {total}, not 1"
        elif total != 1:
            return f"probabilities sum to {total}, not 1"
        return None

    def evaluate(self, payload, values):
        s = sum(p * b for p, b in zip(payload, values))
        if isinstance(s, float):
            s = min(1.0, max(0.0, s))
        return s

    def sample_payload(self, rng, k, exact=True):
        parts = [rng.randint(1, 3) for _ in range(k)]
        total = sum(parts)
        probs = [Fraction(p, total) for p in parts]
        return tuple(canon(p) if exact else float(p) for p in probs)


# checked entry points --------------------------------------------------------


def _check_call(mod: Modality, dom: WeightDomain, payload, values):
    k = len(values)
    msg = mod.arity_problem(k)
    if msg:
        raise ArityMismatch(msg)
    msg = mod.payload_problem(payload, k)
    if msg:
        raise PayloadSchemaError(msg)
    for v in values:
        dom.check(v)


def apply(mod: Modality, dom: WeightDomain, t, slot_values: Sequence):
    """Evaluate the modality on a transition (or bare payload) and slot weights."""
    payload = t.payload if isinstance(t, Transition) else t
    if isinstance(t, Transition) and len(t.slots) != len(slot_values):
        raise ArityMismatch(f"{len(t.slots)} slots but {len(slot_values)} values")
    values = tuple(slot_values)
    _check_call(mod, dom, payload, values)
    out = canon(mod.evaluate(payload, values))
    if not dom.contains(out):
        raise CarrierViolation(f"{mod.id} produced {out!r} outside {dom.id}")
    return out


def check_inf_distribution(mod: Modality, dom: WeightDomain, payload, slot_sets, tol=0.0) -> bool:
    """Does applying to slot-wise meets equal the meet of all slot-wise applications?"""
    sets = [list(s) for s in slot_sets]
    msg = mod.arity_problem(len(sets))
    if msg:
        raise ArityMismatch(msg)
    if any(not s for s in sets):
        raise ValueError("slot sets must be non-empty")
    lhs = apply(mod, dom, payload, [dom.meet(s) for s in sets])
    rhs = dom.meet(apply(mod, dom, payload, combo) for combo in itertools.product(*sets))
    if tol and lhs != rhs and math.isfinite(lhs) and math.isfinite(rhs):
        return abs(lhs - rhs) <= tol
    return lhs == rhs


@dataclass(frozen=True)
class SlotWitness:
    """A slot whose weight is strictly above the modality's result."""

    modality: str
    payload: object
    slot_values: tuple
    index: int
    slot_value: object
    result: object


@dataclass(frozen=True)
class ExpansivenessVerdict:
    ok: bool
    witness: Optional[SlotWitness] = None


def first_violation(mod: Modality, dom: WeightDomain, payload, values, result):
    """Index of the first slot value strictly above ``result``, else None."""
    for i, b in enumerate(values):
        if not dom.le(b, result):
            return i
    return None


def check_expansive_on(mod: Modality, dom: WeightDomain, t, slot_values) -> ExpansivenessVerdict:
    payload = t.payload if isinstance(t, Transition) else t
    values = tuple(slot_values)
    result = apply(mod, dom, t, values)
    i = first_violation(mod, dom, payload, values, result)
    if i is None:
        return ExpansivenessVerdict(True)
    return ExpansivenessVerdict(
        False, SlotWitness(mod.id, payload, values, i, values[i], result)
    )
