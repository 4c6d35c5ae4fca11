"""Totally ordered weight domains with top, bottom and a final weight.

Weights are plain Python numbers: ``int``/``Fraction`` in exact mode,
``float`` in float mode, and ``math.inf``/``-math.inf`` for the infinities.
A domain orders its carrier either by numeric ``<=`` (ascending) or by
numeric ``>=`` (descending); meet is always the order-minimum.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace
from fractions import Fraction
from numbers import Real
from typing import Callable, Iterable

INF = math.inf
NEG_INF = -math.inf


class CarrierViolation(ValueError):
    """A value lies outside the carrier of its domain."""


class Ordering(enum.Enum):
    LESS = -1
    EQUAL = 0
    GREATER = 1


def _is_number(x) -> bool:
    return isinstance(x, Real) and not isinstance(x, bool) and not (
        isinstance(x, float) and math.isnan(x)
    )


def _is_integral(x) -> bool:
    if isinstance(x, int):
        return True
    if isinstance(x, Fraction):
        return x.denominator == 1
    if isinstance(x, float):
        return x.is_integer()
    return False


def canon(x):
    """Canonical form: integral fractions collapse to ``int``."""
    if isinstance(x, Fraction) and x.denominator == 1:
        return int(x.numerator)
    return x


def render(x) -> str:
    """Text form used in traces and files: inf, -inf, integers, p/q, floats."""
    if x == INF:
        return "inf"
    if x == NEG_INF:
        return "-inf"
    x = canon(x)
    if isinstance(x, int):
        return str(x)
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}"
    return repr(float(x))


def parse_value(raw, exact: bool = True):
    """Parse a number or string ("inf", "-inf", "p/q", "0.25") into a weight.

    In exact mode decimals become fractions; in float mode everything finite
    becomes a float.
    """
    if isinstance(raw, bool):
        raise ValueError(f"not a weight: {raw!r}")
    if isinstance(raw, str):
        s = raw.strip().lower()
        if s in ("inf", "+inf", "infinity", "∞"):
            return INF
        if s in ("-inf", "-infinity", "-∞"):
            return NEG_INF
        try:
            v = Fraction(s)
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"not a weight: {raw!r}") from exc
        return canon(v) if exact else float(v)
    if isinstance(raw, float):
        if math.isnan(raw):
            raise ValueError("NaN is not a weight")
        if math.isinf(raw):
            return raw
        return canon(Fraction(str(raw))) if exact else raw
    if _is_number(raw):
        return canon(Fraction(raw)) if exact else float(raw)
    raise ValueError(f"not a weight: {raw!r}")


def to_json_value(x):
    """JSON-friendly form: ints stay ints, everything else is rendered text."""
    x = canon(x)
    if isinstance(x, int):
        return x
    if isinstance(x, float) and math.isfinite(x):
        return x
    return render(x)


@dataclass(frozen=True)
class WeightDomain:
    """A pointed weight domain.

    ``ascending`` means the order is numeric ``<=``; otherwise it is ``>=``.
    ``member`` is the carrier predicate.
    """

    id: str
    ascending: bool
    top: object
    bottom: object
    xi: object
    member: Callable[[object], bool]
    description: str = ""

    def contains(self, x) -> bool:
        return _is_number(x) and self.member(x)

    def check(self, x):
        if not self.contains(x):
            raise CarrierViolation(f"{x!r} is not in the carrier of {self.id}")
        return x

    # fast, unchecked order primitives used by the solvers
    def le(self, a, b) -> bool:
        return a <= b if self.ascending else a >= b

    def lt(self, a, b) -> bool:
        return a < b if self.ascending else a > b

    def min2(self, a, b):
        if self.ascending:
            return a if a <= b else b
        return a if a >= b else b

    def max2(self, a, b):
        if self.ascending:
            return a if a >= b else b
        return a if a <= b else b

    def key(self, x):
        """Numeric sort key whose ``<`` agrees with the domain order."""
        return x if self.ascending else -x

    def compare(self, a, b) -> Ordering:
        self.check(a)
        self.check(b)
        if a == b:
            return Ordering.EQUAL
        return Ordering.LESS if self.lt(a, b) else Ordering.GREATER

    def meet(self, values: Iterable) -> object:
        out = self.top
        for v in values:
            self.check(v)
            out = self.min2(out, v)
        return out

    def join(self, values: Iterable) -> object:
        out = self.bottom
        for v in values:
            self.check(v)
            out = self.max2(out, v)
        return out

    def with_xi(self, xi) -> "WeightDomain":
        self.check(xi)
        return replace(self, xi=xi)


def compare(dom: WeightDomain, a, b) -> Ordering:
    return dom.compare(a, b)


def meet(dom: WeightDomain, values: Iterable):
    return dom.meet(values)


def _nonneg(x) -> bool:
    return x >= 0


def _nat(x) -> bool:
    return x == INF or (x >= 0 and _is_integral(x))


def _real(x) -> bool:
    return True


def _unit(x) -> bool:
    return 0 <= x <= 1


def _zero_inf(x) -> bool:
    return x == 0 or x == INF


NONNEG_ASC = WeightDomain("nonneg-asc", True, INF, 0, 0, _nonneg, "[0,inf] ordered by <=, xi=0")
NAT_ASC = WeightDomain("nat-asc", True, INF, 0, 0, _nat, "N u {inf} ordered by <=, xi=0")
NAT_DESC = WeightDomain("nat-desc", False, 0, INF, 0, _nat, "N u {inf} ordered by >=, xi=0")
REAL_ASC = WeightDomain("real-asc", True, INF, NEG_INF, 0, _real, "[-inf,inf] ordered by <=, xi=0")
NONNEG_DESC = WeightDomain("nonneg-desc", False, 0, INF, INF, _nonneg, "[0,inf] ordered by >=, xi=inf")
UNIT_DESC = WeightDomain("unit-desc", False, 0, 1, 1, _unit, "[0,1] ordered by >=, xi=1")
ZERO_INF = WeightDomain("zero-inf", True, INF, 0, 0, _zero_inf, "{0, inf} ordered by <=, xi=0")

DOMAINS = {
    d.id: d
    for d in (NONNEG_ASC, NAT_ASC, NAT_DESC, REAL_ASC, NONNEG_DESC, UNIT_DESC, ZERO_INF)
}
