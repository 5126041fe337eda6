"""Choose where to insert run-time annotations for each tainted sink.

The search walks the data-dependence graph backwards from a sink and stops
at the first statements whose value can be wrapped in markers without
disturbing any operation that inspects it.
"""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .errors import InvalidArgument


@dataclass(frozen=True)
class DDG:
    """``dep_edges`` holds pairs ``(s, p)``: statement ``s`` depends on ``p``."""

    nodes: frozenset
    dep_edges: frozenset
    _preds: Mapping = field(default=None, repr=False, compare=False)
    _succs: Mapping = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        preds, succs = defaultdict(set), defaultdict(set)
        for s, p in self.dep_edges:
            preds[s].add(p)
            succs[p].add(s)
        object.__setattr__(self, "_preds", {k: tuple(sorted(v)) for k, v in preds.items()})
        object.__setattr__(self, "_succs", {k: tuple(sorted(v)) for k, v in succs.items()})

    def preds(self, s: int) -> tuple:
        return self._preds.get(s, ())

    def succs(self, s: int) -> tuple:
        return self._succs.get(s, ())

    def __contains__(self, s) -> bool:
        return s in self.nodes


def build_ddg(data_dep: Iterable[tuple[int, int]], nodes: Iterable[int] = ()) -> DDG:
    """Graph over the given dependence pairs; ``nodes`` adds isolated statements."""
    edges = frozenset((int(s), int(p)) for s, p in data_dep)
    all_nodes = {n for e in edges for n in e} | {int(n) for n in nodes}
    return DDG(frozenset(all_nodes), edges)


def compute_unsafe_set(ddg: DDG, unsafe_ops: Iterable[int]) -> frozenset:
    """``unsafe_ops`` plus every statement any of them transitively depends on."""
    seen = set(unsafe_ops)
    stack = list(seen)
    while stack:
        for p in ddg.preds(stack.pop()):
            if p not in seen:
                seen.add(p)
                stack.append(p)
    return frozenset(seen)


@dataclass(frozen=True)
class SafetyInfo:
    unsafe_ops: frozenset = frozenset()
    context: Mapping = field(default_factory=dict)

    def ctx(self, s: int):
        return self.context.get(s)


@dataclass(frozen=True)
class InstrPlan:
    points: Mapping

    def __getitem__(self, sink):
        return self.points[sink]

    def __eq__(self, other):
        if isinstance(other, InstrPlan):
            return dict(self.points) == dict(other.points)
        if isinstance(other, Mapping):
            return dict(self.points) == {k: frozenset(v) for k, v in other.items()}
        return NotImplemented

    def lines(self) -> list[str]:
        return [f"Instrument {sink} {s}" for sink in sorted(self.points)
                for s in sorted(self.points[sink])]

    def format(self) -> str:
        return "".join(line + "\n" for line in self.lines())


def _find_instr(cur, visited, ctx, ddg, unsafe, context):
    # self-dependencies never lead anywhere new
    preds = [p for p in ddg.preds(cur) if p != cur]
    if not preds:
        return {cur}
    preds = [p for p in preds if p not in visited]
    if not preds:
        return set()
    visited.update(preds)
    if any(p in unsafe for p in preds):
        return {cur}
    points = set()
    for p in preds:
        points |= _find_instr(p, visited, ctx, ddg, unsafe, context)
    if any(context.get(s) != ctx for s in points):
        return {cur}
    return points


def find_instrumentation_points(tainted_sinks: Iterable[int], ddg: DDG,
                                safety: SafetyInfo) -> InstrPlan:
    unsafe = compute_unsafe_set(ddg, safety.unsafe_ops)
    plan = {}
    for sink in sorted(set(tainted_sinks)):
        if sink not in ddg:
            raise InvalidArgument(f"sink {sink} is not a node of the dependence graph")
        found = _find_instr(sink, set(), safety.ctx(sink), ddg, unsafe, safety.context)
        plan[sink] = frozenset(found)
    return InstrPlan(plan)
