"""Static taint analysis over a statement-level fact base."""
from .branches import (And, BareVar, BranchSafety, CmpLenConst, CmpVarConst, CmpVarDynamic, Not, Or,
                       PredicateAst, TypeCheck, classify_branch, unsafe_branch_facts)
from .facts import (DerivedRelations, FactBase, format_derived, format_facts, parse_derived,
                    parse_facts)
from .solver import solve_taint

__all__ = [
    "And", "BareVar", "BranchSafety", "CmpLenConst", "CmpVarConst", "CmpVarDynamic", "Not", "Or",
    "PredicateAst", "TypeCheck", "classify_branch", "unsafe_branch_facts",
    "DerivedRelations", "FactBase", "format_derived", "format_facts", "parse_derived",
    "parse_facts", "solve_taint",
]
