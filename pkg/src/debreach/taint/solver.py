"""Semi-naive fixpoint for the taint rules.

Derived relations:

* ``TaintedVarFrom(v, d, s)``: a tainted value stored to ``v`` at ``d``
  may still be in ``v`` on entry to ``s`` (or right after ``d`` when s == d).
* ``TaintedFieldFrom(f, d, s)``: same for object fields, never killed.
* ``Tainted(s)``: statement ``s`` computes with tainted data.
* ``DataDep(s, d)``: ``s`` reads a tainted value written at ``d``.
* ``TaintedSink(s)``: an output statement that is tainted.

Every recursive rule has exactly one derived atom in its body, so each
round only has to join the previous round's new tuples against the
(immutable) input relations.
"""
from __future__ import annotations

from collections import defaultdict

from .facts import DerivedRelations, FactBase


def _index(facts: FactBase):
    succ = defaultdict(list)
    for a, b in facts.edge:
        succ[a].append(b)
    controlled = defaultdict(list)
    for s3, s2 in facts.ctrl_dep:
        controlled[s2].append(s3)
    stores_var = defaultdict(list)
    for v, s in facts.store_var:
        stores_var[s].append(v)
    stores_field = defaultdict(list)
    for f, s in facts.store_field:
        stores_field[s].append(f)
    return succ, controlled, stores_var, stores_field


def solve_taint(facts: FactBase) -> DerivedRelations:
    succ, controlled, stores_var, stores_field = _index(facts)
    store_var, load_var, load_field = facts.store_var, facts.load_var, facts.load_field
    unsafe_branch = facts.unsafe_branch

    tvf, tff, tainted = set(), set(), set()
    d_tvf = {(v, s, s) for v, s in store_var if s in facts.source}
    d_tff = {(f, s, s) for f, s in facts.store_field if s in facts.source}
    d_tainted = set()

    while d_tvf or d_tff or d_tainted:
        tvf |= d_tvf
        tff |= d_tff
        tainted |= d_tainted
        n_tvf, n_tff, n_tainted = set(), set(), set()

        for v, d, s in d_tvf:
            # propagate unless s overwrites v (the defining store itself does not kill)
            if s == d or (v, s) not in store_var:
                n_tvf.update((v, d, s3) for s3 in succ[s])
            if (v, s) in load_var:
                n_tainted.add(s)
                if s in unsafe_branch:
                    n_tainted.update(controlled[s])
        for f, d, s in d_tff:
            n_tff.update((f, d, s3) for s3 in succ[s])
            if (f, s) in load_field:
                n_tainted.add(s)
                if s in unsafe_branch:
                    n_tainted.update(controlled[s])
        for s in d_tainted:
            n_tvf.update((v, s, s) for v in stores_var[s])
            n_tff.update((f, s, s) for f in stores_field[s])

        d_tvf = n_tvf - tvf
        d_tff = n_tff - tff
        d_tainted = n_tainted - tainted

    data_dep = {(s, d) for v, d, s in tvf if (v, s) in load_var}
    data_dep |= {(s, d) for f, d, s in tff if (f, s) in load_field}
    return DerivedRelations(
        tainted_var_from=frozenset(tvf),
        tainted_field_from=frozenset(tff),
        tainted=frozenset(tainted),
        data_dep=frozenset(data_dep),
        tainted_sink=frozenset(facts.sink & tainted),
    )
