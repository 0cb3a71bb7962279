"""Instances, prices, selections and the JSON instance format.

All real-valued quantities are ``fractions.Fraction``. Module ids are 0-based
inside the package and 1-based in files and CLI output.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .matroids import Matroid, Free, matroid_from_json, matroid_to_json


class InstanceError(ValueError):
    """Malformed instance document or violated instance invariant."""

    def __init__(self, field_name, constraint):
        super().__init__(f"{field_name}: {constraint}")
        self.field = field_name
        self.constraint = constraint


def as_scalar(x, field_name="value") -> Fraction:
    """Parse an exact rational from a Fraction, int, "num/den" or decimal string,
    or a ``[num, den]`` pair. Floats are refused since they are not exact."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise InstanceError(field_name, "booleans are not scalars")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError):
            raise InstanceError(field_name, f"cannot parse {x!r} as a rational")
    if isinstance(x, (list, tuple)) and len(x) == 2 and all(
            isinstance(t, int) and not isinstance(t, bool) for t in x):
        if x[1] == 0:
            raise InstanceError(field_name, "zero denominator")
        return Fraction(x[0], x[1])
    raise InstanceError(field_name, f"expected exact rational, got {type(x).__name__}")


def fmt(x: Fraction) -> str:
    return str(x)


def as_prices(seq) -> tuple:
    return tuple(as_scalar(x, "prices") for x in seq)


@dataclass(frozen=True)
class Instance:
    values: tuple
    costs: tuple
    budget: Fraction
    matroid: Matroid = None

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(as_scalar(v, "values") for v in self.values))
        object.__setattr__(self, "costs", tuple(as_scalar(c, "costs") for c in self.costs))
        object.__setattr__(self, "budget", as_scalar(self.budget, "budget"))
        n = len(self.values)
        if len(self.costs) != n:
            raise InstanceError("costs", f"length {len(self.costs)} != n={n}")
        if self.matroid is None:
            object.__setattr__(self, "matroid", Free(n))
        if self.matroid.n != n:
            raise InstanceError("matroid", f"ground set size {self.matroid.n} != n={n}")
        if self.budget <= 0:
            raise InstanceError("budget", "must be > 0")
        for i, v in enumerate(self.values):
            if v < 0:
                raise InstanceError("values", f"module {i + 1} has negative value")
        for i, c in enumerate(self.costs):
            if c < 0:
                raise InstanceError("costs", f"module {i + 1} has negative cost")

    def check_costs_within_budget(self):
        # a module with c(i) > B has an empty strategy range [c(i), B]
        for i, c in enumerate(self.costs):
            if c > self.budget:
                raise InstanceError("costs", f"module {i + 1} costs more than the budget")

    @property
    def n(self):
        return len(self.values)

    def value_of(self, S) -> Fraction:
        return sum((self.values[i] for i in S), Fraction(0))

    def cost_of(self, S) -> Fraction:
        return sum((self.costs[i] for i in S), Fraction(0))

    def replace(self, **kw) -> "Instance":
        d = dict(values=self.values, costs=self.costs, budget=self.budget, matroid=self.matroid)
        d.update(kw)
        return Instance(**d)


@dataclass(frozen=True)
class Swap:
    removed: int
    added: int
    circuit: tuple


@dataclass(frozen=True)
class SelectionResult:
    selected: tuple                 # in admission order
    spend: Fraction
    inspection_order: tuple = ()
    swaps: tuple = ()
    terminated_at: int | None = None

    @property
    def selected_set(self) -> frozenset:
        return frozenset(self.selected)

    def __contains__(self, i):
        return i in self.selected

    def to_json(self) -> dict:
        return {
            "selected": [i + 1 for i in self.selected],
            "spend": fmt(self.spend),
            "order": [i + 1 for i in self.inspection_order],
            "swaps": [{"removed": s.removed + 1, "added": s.added + 1,
                       "circuit": sorted(j + 1 for j in s.circuit)} for s in self.swaps],
            "terminated_at": None if self.terminated_at is None else self.terminated_at + 1,
        }


def _check_id(inst, i):
    if not (isinstance(i, int) and 0 <= i < inst.n):
        raise ValueError(f"module id {i!r} out of range for n={inst.n}")


def utility(inst: Instance, p: Sequence, sel: SelectionResult, i: int) -> Fraction:
    _check_id(inst, i)
    if i in sel.selected:
        return as_scalar(p[i]) - inst.costs[i]
    return Fraction(0)


def lambda_max(inst: Instance) -> Fraction:
    return max(inst.costs, default=Fraction(0)) / inst.budget


def check_prices(inst: Instance, p, strategy=True):
    """Raise ValueError if p is not a valid price profile for inst."""
    if len(p) != inst.n:
        raise ValueError(f"price vector has length {len(p)}, expected {inst.n}")
    for i, x in enumerate(p):
        if x > inst.budget:
            raise ValueError(f"price of module {i + 1} exceeds the budget")
        if strategy and x < inst.costs[i]:
            raise ValueError(f"price of module {i + 1} is below its cost")


# ---- serialization

def instance_to_json(inst: Instance) -> dict:
    return {
        "n": inst.n,
        "values": [fmt(v) for v in inst.values],
        "costs": [fmt(c) for c in inst.costs],
        "budget": fmt(inst.budget),
        "matroid": matroid_to_json(inst.matroid),
    }


def instance_from_json(doc) -> Instance:
    if not isinstance(doc, dict):
        raise InstanceError("document", "expected a JSON object")
    for key in ("values", "costs", "budget"):
        if key not in doc:
            raise InstanceError(key, "missing")
    values, costs = doc["values"], doc["costs"]
    if not isinstance(values, list):
        raise InstanceError("values", "expected an array")
    if not isinstance(costs, list):
        raise InstanceError("costs", "expected an array")
    n = doc.get("n", len(values))
    if not isinstance(n, int) or n != len(values):
        raise InstanceError("n", f"does not match number of values ({len(values)})")
    mdoc = doc.get("matroid", {"kind": "free"})
    try:
        m = matroid_from_json(mdoc, n)
    except (ValueError, TypeError, KeyError) as e:
        raise InstanceError("matroid", str(e))
    inst = Instance(
        values=[as_scalar(v, "values") for v in values],
        costs=[as_scalar(c, "costs") for c in costs],
        budget=as_scalar(doc["budget"], "budget"),
        matroid=m,
    )
    inst.check_costs_within_budget()
    return inst


def save_instance(inst: Instance) -> bytes:
    return (json.dumps(instance_to_json(inst), indent=2) + "\n").encode()


def load_instance(data) -> Instance:
    if isinstance(data, (bytes, bytearray)):
        data = data.decode()
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as e:
        raise InstanceError("document", f"invalid JSON: {e}")
    return instance_from_json(doc)


def load_prices(data, n=None) -> tuple:
    """Prices file: a JSON array of rationals or an object with a "prices" array."""
    if isinstance(data, (bytes, bytearray)):
        data = data.decode()
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as e:
        raise InstanceError("prices", f"invalid JSON: {e}")
    if isinstance(doc, dict):
        doc = doc.get("prices")
    if not isinstance(doc, list):
        raise InstanceError("prices", "expected an array")
    p = as_prices(doc)
    if n is not None and len(p) != n:
        raise InstanceError("prices", f"length {len(p)} != n={n}")
    return p


def save_prices(p) -> bytes:
    return (json.dumps({"prices": [fmt(x) for x in p]}) + "\n").encode()
