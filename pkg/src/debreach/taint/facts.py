"""Line-oriented fact files.

One tuple per line: ``Relation arg1 arg2 ...``, whitespace separated, ``#``
starts a comment.  Statement arguments are non-negative integers; variable,
field and context arguments are bare words.
"""
from __future__ import annotations

from dataclasses import dataclass, field, fields
from typing import Iterable

from ..errors import FactsParseError

STMT, NAME = "stmt", "name"

# relation name -> (attribute on the container, argument kinds)
INPUT_RELATIONS = {
    "Edge": ("edge", (STMT, STMT)),
    "UnsafeBranch": ("unsafe_branch", (STMT,)),
    "CtrlDep": ("ctrl_dep", (STMT, STMT)),
    "StoreVar": ("store_var", (NAME, STMT)),
    "StoreField": ("store_field", (NAME, STMT)),
    "LoadVar": ("load_var", (NAME, STMT)),
    "LoadField": ("load_field", (NAME, STMT)),
    "Source": ("source", (STMT,)),
    "Sink": ("sink", (STMT,)),
    # declarations and instrumentation inputs
    "Stmt": ("stmt", (STMT,)),
    "UnsafeOp": ("unsafe_op", (STMT,)),
    "Context": ("context", (STMT, NAME)),
}

DERIVED_RELATIONS = {
    "TaintedVarFrom": ("tainted_var_from", (NAME, STMT, STMT)),
    "TaintedFieldFrom": ("tainted_field_from", (NAME, STMT, STMT)),
    "Tainted": ("tainted", (STMT,)),
    "DataDep": ("data_dep", (STMT, STMT)),
    "TaintedSink": ("tainted_sink", (STMT,)),
}


def _unwrap(kinds, tup):
    return tup[0] if len(kinds) == 1 else tup


@dataclass(frozen=True)
class FactBase:
    """Extensional relations.  Unary relations hold bare statement IDs."""

    edge: frozenset = frozenset()
    unsafe_branch: frozenset = frozenset()
    ctrl_dep: frozenset = frozenset()
    store_var: frozenset = frozenset()
    store_field: frozenset = frozenset()
    load_var: frozenset = frozenset()
    load_field: frozenset = frozenset()
    source: frozenset = frozenset()
    sink: frozenset = frozenset()
    stmt: frozenset = frozenset()
    unsafe_op: frozenset = frozenset()
    context: frozenset = frozenset()

    @classmethod
    def build(cls, **relations) -> "FactBase":
        return cls(**{k: frozenset(v) for k, v in relations.items()})

    def statements(self) -> set[int]:
        out = set(self.stmt) | set(self.source) | set(self.sink) | set(self.unsafe_branch)
        out |= set(self.unsafe_op)
        for rel in (self.edge, self.ctrl_dep):
            for a, b in rel:
                out.update((a, b))
        for rel in (self.store_var, self.store_field, self.load_var, self.load_field):
            out.update(s for _, s in rel)
        out.update(s for s, _ in self.context)
        return out

    def contexts(self) -> dict[int, str]:
        return dict(self.context)

    def populated(self) -> list[str]:
        return [name for name, (attr, _) in INPUT_RELATIONS.items() if getattr(self, attr)]


@dataclass(frozen=True)
class DerivedRelations:
    tainted_var_from: frozenset = frozenset()
    tainted_field_from: frozenset = frozenset()
    tainted: frozenset = frozenset()
    data_dep: frozenset = frozenset()
    tainted_sink: frozenset = frozenset()

    def as_dict(self) -> dict[str, frozenset]:
        return {f.name: getattr(self, f.name) for f in fields(self)}


def _parse(text: str, schema: dict, *, check_declared: bool):
    found = {attr: set() for attr, _ in schema.values()}
    first_line = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        name, *args = line.split()
        if name not in schema:
            raise FactsParseError(f"unknown relation {name!r}", lineno)
        attr, kinds = schema[name]
        if len(args) != len(kinds):
            raise FactsParseError(f"{name} takes {len(kinds)} argument(s), got {len(args)}", lineno)
        values = []
        for kind, arg in zip(kinds, args):
            if kind == STMT:
                if not arg.isdigit():
                    raise FactsParseError(f"statement ID must be a non-negative integer, got {arg!r}",
                                          lineno)
                values.append(int(arg))
            else:
                values.append(arg)
        tup = _unwrap(kinds, tuple(values))
        found[attr].add(tup)
        for kind, v in zip(kinds, values):
            if kind == STMT:
                first_line.setdefault(v, lineno)
    if check_declared:
        declared = {s for pair in found["edge"] for s in pair} | found["stmt"]
        for s, lineno in sorted(first_line.items(), key=lambda kv: kv[1]):
            if s not in declared:
                raise FactsParseError(f"statement {s} is neither an Edge endpoint nor declared "
                                      f"with Stmt", lineno)
    return {k: frozenset(v) for k, v in found.items()}


def parse_facts(text: str, check_declared: bool = True) -> FactBase:
    return FactBase(**_parse(text, INPUT_RELATIONS, check_declared=check_declared))


def parse_derived(text: str) -> DerivedRelations:
    return DerivedRelations(**_parse(text, DERIVED_RELATIONS, check_declared=False))


def _lines(schema: dict, container) -> list[str]:
    out = []
    for name in sorted(schema):
        attr, kinds = schema[name]
        tuples = getattr(container, attr)
        rows = sorted(t if isinstance(t, tuple) else (t,) for t in tuples)
        out.extend(" ".join([name, *map(str, row)]) for row in rows)
    return out


def format_facts(facts: FactBase) -> str:
    return "".join(line + "\n" for line in _lines(INPUT_RELATIONS, facts))


def format_derived(derived: DerivedRelations) -> str:
    """Deterministic dump: relations in name order, tuples sorted within each."""
    return "".join(line + "\n" for line in _lines(DERIVED_RELATIONS, derived))


def facts_from_lines(lines: Iterable[str]) -> FactBase:
    return parse_facts("\n".join(lines))
