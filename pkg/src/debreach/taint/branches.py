"""Decide which branch predicates may leak a tainted value through control flow.

A predicate is safe when every atom is a bare variable, a comparison of a
variable with a constant or with its length, or a type check: those
outcomes reveal at most a coarse property of the secret.  Any comparison
against another dynamic value makes the branch unsafe.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Mapping, Union


class BranchSafety(str, enum.Enum):
    SAFE = "safe"
    UNSAFE = "unsafe"


@dataclass(frozen=True)
class BareVar:
    var: str


@dataclass(frozen=True)
class CmpVarConst:
    var: str
    const: object
    op: str = "=="


@dataclass(frozen=True)
class CmpLenConst:
    var: str
    const: int
    op: str = "=="


@dataclass(frozen=True)
class TypeCheck:
    var: str
    type_name: str = ""


@dataclass(frozen=True)
class CmpVarDynamic:
    var: str
    other: str
    op: str = "=="


@dataclass(frozen=True)
class Not:
    operand: "PredicateAst"


@dataclass(frozen=True)
class And:
    operands: tuple


@dataclass(frozen=True)
class Or:
    operands: tuple


PredicateAst = Union[BareVar, CmpVarConst, CmpLenConst, TypeCheck, CmpVarDynamic, Not, And, Or]

_SAFE_ATOMS = (BareVar, CmpVarConst, CmpLenConst, TypeCheck)
_UNSAFE_ATOMS = (CmpVarDynamic,)


def _safe(node) -> bool:
    if isinstance(node, _SAFE_ATOMS):
        return True
    if isinstance(node, _UNSAFE_ATOMS):
        return False
    if isinstance(node, Not):
        return _safe(node.operand)
    if isinstance(node, (And, Or)):
        return all(_safe(op) for op in node.operands)
    raise TypeError(f"not a predicate node: {node!r}")


def classify_branch(predicate: PredicateAst) -> BranchSafety:
    return BranchSafety.SAFE if _safe(predicate) else BranchSafety.UNSAFE


def unsafe_branch_facts(predicates: Mapping[int, PredicateAst]) -> list[str]:
    """``UnsafeBranch`` fact lines for the unsafe predicates, by statement ID."""
    return [f"UnsafeBranch {s}" for s in sorted(predicates)
            if classify_branch(predicates[s]) is BranchSafety.UNSAFE]
