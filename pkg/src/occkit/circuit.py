"""Combinational core: labeled DAGs over {AND, OR, NOT} plus input gates.

Labels are plain ints. A value >= 0 names an input bit; the gate sentinels
are negative so they never collide with input indices. Values below NOT are
reserved for macro references (see ocmachine): macro k is encoded as
MACRO_BASE - k.

Fan-in is fixed: inputs take 0 edges, NOT exactly 1, AND and OR exactly 2.
In-edge lists hold ascending source indices; the edge relation is a set, so
a gate cannot read the same source twice.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Sequence

from .errors import BudgetExceededError

AND = -1
OR = -2
NOT = -3
MACRO_BASE = -4  # macro k <-> label MACRO_BASE - k


def macro_label(k: int) -> int:
    return MACRO_BASE - k


def is_macro_label(v: int) -> bool:
    return v <= MACRO_BASE


def macro_index(v: int) -> int:
    return MACRO_BASE - v


TRUTH_TABLE_BUDGET = 20


@dataclass(frozen=True)
class Circuit:
    """A circuit over `n_inputs` input bits with an ordered output list.

    labels[i] is the label of vertex i; in_edges[i] its ascending sources;
    outputs the vertex indices whose values form the output word.
    """

    n_inputs: int
    labels: tuple[int, ...]
    in_edges: tuple[tuple[int, ...], ...]
    outputs: tuple[int, ...]

    @property
    def n_vertices(self) -> int:
        return len(self.labels)

    @property
    def n_outputs(self) -> int:
        return len(self.outputs)

    def validate(self) -> Optional[str]:
        """None if every invariant holds, else the first violated rule.

        Rule order: shape, edge ranges, acyclicity, label/in-degree
        compatibility, output ranges.
        """
        v = self.n_vertices
        if v < 1:
            return "no vertices"
        if len(self.in_edges) != v:
            return "in_edges length mismatch"
        if len(self.outputs) < 1:
            return "no outputs"
        for srcs in self.in_edges:
            if any(s < 0 or s >= v for s in srcs):
                return "edge source out of range"
            if tuple(sorted(set(srcs))) != srcs:
                return "in-edge list not strictly ascending"
        if _cyclic(self.in_edges):
            return "cycle"
        for lab, srcs in zip(self.labels, self.in_edges):
            need = _required_indegree(lab, self.n_inputs)
            if need is None:
                return "bad label"
            if len(srcs) != need:
                return "bad in-degree"
        if any(o < 0 or o >= v for o in self.outputs):
            return "output index out of range"
        return None

    def evaluate(self, x: Sequence[int]) -> tuple[int, ...]:
        """Evaluate on an input word of length n_inputs, in topological order."""
        if len(x) != self.n_inputs:
            raise ValueError(f"expected {self.n_inputs} input bits, got {len(x)}")
        order = _topo_order(self.in_edges)
        vals = [0] * self.n_vertices
        for i in order:
            lab = self.labels[i]
            srcs = self.in_edges[i]
            if lab >= 0:
                vals[i] = x[lab]
            elif lab == AND:
                vals[i] = vals[srcs[0]] & vals[srcs[1]]
            elif lab == OR:
                vals[i] = vals[srcs[0]] | vals[srcs[1]]
            elif lab == NOT:
                vals[i] = 1 - vals[srcs[0]]
            else:
                raise ValueError("macro labels cannot be evaluated directly")
        return tuple(vals[o] for o in self.outputs)

    def debug_text(self) -> str:
        """Human-readable listing; not part of any measured length."""
        names = {AND: "AND", OR: "OR", NOT: "NOT"}
        lines = []
        for i, (lab, srcs) in enumerate(zip(self.labels, self.in_edges)):
            name = f"in:{lab}" if lab >= 0 else names.get(lab, f"macro:{macro_index(lab)}")
            src = ",".join(str(s) for s in srcs)
            lines.append(f"{i} {name} <- {src}" if srcs else f"{i} {name}")
        lines.append("out: " + ",".join(str(o) for o in self.outputs))
        return "\n".join(lines)


def _required_indegree(label: int, n_inputs: int) -> Optional[int]:
    if 0 <= label < n_inputs:
        return 0
    if label == NOT:
        return 1
    if label in (AND, OR):
        return 2
    return None


def _cyclic(in_edges: tuple[tuple[int, ...], ...]) -> bool:
    return len(_topo_order(in_edges)) < len(in_edges)


@lru_cache(maxsize=8192)
def _topo_order(in_edges: tuple[tuple[int, ...], ...]) -> tuple[int, ...]:
    """Kahn's algorithm; returns a (possibly partial) order, short on cycles."""
    v = len(in_edges)
    pending = [len(srcs) for srcs in in_edges]
    succ: list[list[int]] = [[] for _ in range(v)]
    for j, srcs in enumerate(in_edges):
        for i in srcs:
            succ[i].append(j)
    ready = [i for i in range(v) if pending[i] == 0]
    order = []
    while ready:
        i = ready.pop()
        order.append(i)
        for j in succ[i]:
            pending[j] -= 1
            if pending[j] == 0:
                ready.append(j)
    return tuple(order)


def truth_table(c: Circuit, budget: int = TRUTH_TABLE_BUDGET) -> list[tuple[int, ...]]:
    """All 2^N output rows, ordered by the input word read as an integer."""
    n = c.n_inputs
    if n > budget:
        raise BudgetExceededError(
            f"truth table needs budget {n}, have {budget}", required=n
        )
    rows = []
    for v in range(1 << n):
        x = [(v >> (n - 1 - i)) & 1 for i in range(n)]
        rows.append(c.evaluate(x))
    return rows


def synth_from_table(table: Sequence[Sequence[int]], n_inputs: int, n_outputs: int) -> Circuit:
    """Sum-of-minterms synthesis of an arbitrary table over the basis.

    Constant output bits have no gate-free form here (the basis has no
    constant gates): constant 0 becomes AND(x0, NOT x0) and constant 1
    OR(x0, NOT x0). AND/OR reductions are balanced trees.
    """
    if n_inputs < 1:
        raise ValueError("synthesis needs at least one input bit")
    if len(table) != (1 << n_inputs) or any(len(r) != n_outputs for r in table):
        raise ValueError("table shape mismatch")

    labels: list[int] = []
    in_edges: list[tuple[int, ...]] = []

    def add(label: int, srcs: tuple[int, ...] = ()) -> int:
        labels.append(label)
        in_edges.append(srcs)
        return len(labels) - 1

    inputs = [add(i) for i in range(n_inputs)]
    negs: dict[int, int] = {}

    def neg(i: int) -> int:
        if i not in negs:
            negs[i] = add(NOT, (inputs[i],))
        return negs[i]

    def tree(op: int, vs: list[int]) -> int:
        while len(vs) > 1:
            nxt = []
            for a, b in zip(vs[0::2], vs[1::2]):
                lo, hi = (a, b) if a < b else (b, a)
                nxt.append(add(op, (lo, hi)))
            if len(vs) % 2:
                nxt.append(vs[-1])
            vs = nxt
        return vs[0]

    outputs = []
    for j in range(n_outputs):
        minterms = [v for v in range(1 << n_inputs) if table[v][j]]
        if not minterms:
            outputs.append(add(AND, tuple(sorted((inputs[0], neg(0))))))
            continue
        if len(minterms) == 1 << n_inputs:
            outputs.append(add(OR, tuple(sorted((inputs[0], neg(0))))))
            continue
        terms = []
        for v in minterms:
            lits = [
                inputs[i] if (v >> (n_inputs - 1 - i)) & 1 else neg(i)
                for i in range(n_inputs)
            ]
            terms.append(tree(AND, lits))
        outputs.append(tree(OR, terms))

    c = Circuit(n_inputs, tuple(labels), tuple(in_edges), tuple(outputs))
    reason = c.validate()
    assert reason is None, f"synthesized circuit invalid: {reason}"
    return c
