"""Executable semantics of oc-circuits.

A machine runs its circuit for K = ceil(n/L_y) steps. Step i consumes the
fixed universe u, the current state s_i, the i-th semantics block m_i and
fresh uniform random bits r_i, concatenated in that order; the circuit's
L = N_s + L_y outputs split into the next state (first N_s bits) and the
output block y_i (last L_y bits). The machine's output is the first n bits
of y_1..y_K, and its distribution is taken over the randomness only.

Conditional machines splice a per-step condition block z_i between u and s.
Structured machines add a macro table; `expand` flattens them.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .bitio import BitString
from .circuit import AND, NOT, OR, Circuit, is_macro_label, macro_index, _topo_order
from .dist import FiniteDistribution
from .errors import BudgetExceededError

RANDOMNESS_BUDGET = 20


@dataclass(frozen=True)
class OcLogic:
    """The reusable part of a machine: circuit, widths, initial state."""

    circuit: Circuit
    n_u: int
    n_s: int
    n_m: int
    n_r: int
    l_y: int
    s1: BitString

    @property
    def n_inputs(self) -> int:
        return self.n_u + self.n_s + self.n_m + self.n_r

    @property
    def n_outputs(self) -> int:
        return self.n_s + self.l_y

    def validate(self) -> Optional[str]:
        if min(self.n_u, self.n_s, self.n_m, self.n_r) < 0 or self.l_y < 1:
            return "bad width"
        if self.n_m > self.l_y:
            return "semantics block wider than output block"
        if self.circuit.n_inputs != self.n_inputs:
            return "circuit input width mismatch"
        if self.circuit.n_outputs != self.n_outputs:
            return "circuit output width mismatch"
        if len(self.s1) != self.n_s:
            return "initial state width mismatch"
        return self.circuit.validate()

    # input offsets, in the frozen concatenation order u, s, m, r
    def _offsets(self) -> tuple[int, int, int, int]:
        return 0, self.n_u, self.n_u + self.n_s, self.n_u + self.n_s + self.n_m


@dataclass(frozen=True)
class OcCircuit:
    """A complete machine: logic plus universe u, target length n, semantics."""

    logic: OcLogic
    u: BitString
    n: int
    m_vec: BitString

    @property
    def k(self) -> int:
        return -(-self.n // self.logic.l_y)

    def validate(self) -> Optional[str]:
        if self.n < 1:
            return "n must be >= 1"
        if len(self.u) != self.logic.n_u:
            return "universe width mismatch"
        if len(self.m_vec) != self.k * self.logic.n_m:
            return "semantics length mismatch"
        return self.logic.validate()

    def m_block(self, i: int) -> BitString:
        w = self.logic.n_m
        return self.m_vec[i * w : (i + 1) * w]


@dataclass(frozen=True)
class ConditionalOcLogic:
    """OcLogic with a per-step condition block z_i spliced between u and s."""

    circuit: Circuit
    n_u: int
    n_z: int
    n_s: int
    n_m: int
    n_r: int
    l_y: int
    s1: BitString

    @property
    def n_inputs(self) -> int:
        return self.n_u + self.n_z + self.n_s + self.n_m + self.n_r

    @property
    def n_outputs(self) -> int:
        return self.n_s + self.l_y

    def validate(self) -> Optional[str]:
        if min(self.n_u, self.n_z, self.n_s, self.n_m, self.n_r) < 0 or self.l_y < 1:
            return "bad width"
        if self.n_m > self.l_y:
            return "semantics block wider than output block"
        if self.circuit.n_inputs != self.n_inputs:
            return "circuit input width mismatch"
        if self.circuit.n_outputs != self.n_outputs:
            return "circuit output width mismatch"
        if len(self.s1) != self.n_s:
            return "initial state width mismatch"
        return self.circuit.validate()


@dataclass(frozen=True)
class ConditionalOcCircuit:
    logic: ConditionalOcLogic
    u: BitString
    n: int
    m_vec: BitString

    @property
    def k(self) -> int:
        return -(-self.n // self.logic.l_y)

    def validate(self) -> Optional[str]:
        if self.n < 1:
            return "n must be >= 1"
        if len(self.u) != self.logic.n_u:
            return "universe width mismatch"
        if len(self.m_vec) != self.k * self.logic.n_m:
            return "semantics length mismatch"
        return self.logic.validate()


def step(
    logic: OcLogic, u: BitString, s: BitString, m: BitString, r: BitString
) -> tuple[BitString, BitString]:
    """One circuit application: (s_next, y) = C(u, s, m, r)."""
    if (len(u), len(s), len(m), len(r)) != (logic.n_u, logic.n_s, logic.n_m, logic.n_r):
        raise ValueError("step input widths do not match the logic")
    out = logic.circuit.evaluate(tuple(u) + tuple(s) + tuple(m) + tuple(r))
    return BitString(out[: logic.n_s]), BitString(out[logic.n_s :])


def run(c: OcCircuit, r_vec: BitString) -> BitString:
    """Execute K steps from s1 and return the n-bit restriction of y_1..y_K."""
    logic = c.logic
    if len(r_vec) != c.k * logic.n_r:
        raise ValueError(f"need {c.k * logic.n_r} random bits, got {len(r_vec)}")
    s = logic.s1
    ys: list[int] = []
    for i in range(c.k):
        r = r_vec[i * logic.n_r : (i + 1) * logic.n_r]
        s, y = step(logic, c.u, s, c.m_block(i), r)
        ys.extend(y)
    return BitString(ys[: c.n])


def run_conditional(
    logic: ConditionalOcLogic,
    u: BitString,
    n: int,
    m_vec: BitString,
    z_vec: BitString,
    r_vec: BitString,
) -> BitString:
    """As run(), with z_i spliced between u and s in the input vector."""
    k = -(-n // logic.l_y)
    if len(z_vec) != k * logic.n_z:
        raise ValueError(f"need {k * logic.n_z} condition bits, got {len(z_vec)}")
    if len(r_vec) != k * logic.n_r:
        raise ValueError(f"need {k * logic.n_r} random bits, got {len(r_vec)}")
    if len(m_vec) != k * logic.n_m:
        raise ValueError(f"need {k * logic.n_m} semantics bits, got {len(m_vec)}")
    if len(u) != logic.n_u:
        raise ValueError("universe width mismatch")
    s = logic.s1
    ys: list[int] = []
    for i in range(k):
        z = z_vec[i * logic.n_z : (i + 1) * logic.n_z]
        m = m_vec[i * logic.n_m : (i + 1) * logic.n_m]
        r = r_vec[i * logic.n_r : (i + 1) * logic.n_r]
        out = logic.circuit.evaluate(tuple(u) + tuple(z) + tuple(s) + tuple(m) + tuple(r))
        s = BitString(out[: logic.n_s])
        ys.extend(out[logic.n_s :])
    return BitString(ys[:n])


def _kernel(circuit: Circuit, n_s: int, s_offset: int, prefix: tuple[int, ...],
            n_r: int):
    """Per-step transition kernel: s_int -> [(s_next_int, y_int), ...].

    `prefix` is the input vector up to (but not including) the random bits,
    with zero placeholders in the state slots starting at `s_offset`. Only
    random bits the circuit actually reads are enumerated; the rest
    contribute a uniform factor that cancels, so each listed move carries
    weight 1 out of 2^(#read bits). Exactness is unaffected.
    """
    base = len(prefix)
    used = sorted({lab - base for lab in circuit.labels if base <= lab < base + n_r})
    width = len(used)

    def for_state(s_int: int):
        x = list(prefix) + [0] * n_r
        for j in range(n_s):
            x[s_offset + j] = (s_int >> (n_s - 1 - j)) & 1
        out = []
        for assign in range(1 << width):
            for idx, bit_pos in enumerate(used):
                x[base + bit_pos] = (assign >> (width - 1 - idx)) & 1
            vals = circuit.evaluate(x)
            s_next = 0
            for b in vals[:n_s]:
                s_next = (s_next << 1) | b
            y = 0
            for b in vals[n_s:]:
                y = (y << 1) | b
            out.append((s_next, y))
        return out

    return for_state, width


def _distribution_by_steps(
    circuit: Circuit,
    n_s: int,
    s_offset: int,
    l_y: int,
    s1: BitString,
    n: int,
    k: int,
    prefix_for_step,
    n_r: int,
) -> FiniteDistribution:
    """Exact output distribution via a step-indexed state/prefix DP.

    Weights stay integers throughout: every step multiplies the common
    denominator by 2^(#read bits), so masses only become Fractions at the
    very end.
    """
    states: dict[tuple[int, int], int] = {(s1.to_int(), 0): 1}
    kernels: dict[tuple[int, ...], object] = {}
    exp_total = 0
    for i in range(k):
        prefix = prefix_for_step(i)
        entry = kernels.get(prefix)
        if entry is None:
            entry = kernels.setdefault(prefix, _kernel(circuit, n_s, s_offset, prefix, n_r))
        kern, width = entry
        exp_total += width
        per_state: dict[int, list] = {}
        nxt: dict[tuple[int, int], int] = {}
        for (s_int, y_acc), w in states.items():
            moves = per_state.get(s_int)
            if moves is None:
                moves = per_state.setdefault(s_int, kern(s_int))
            shifted = y_acc << l_y
            for s_next, y in moves:
                key = (s_next, shifted | y)
                nxt[key] = nxt.get(key, 0) + w
        states = nxt
    drop = k * l_y - n
    counts: dict[int, int] = {}
    for (_, y_acc), w in states.items():
        word = y_acc >> drop
        counts[word] = counts.get(word, 0) + w
    den = 1 << exp_total
    probs = {
        BitString.from_int(word, n): Fraction(w, den) for word, w in counts.items()
    }
    return FiniteDistribution._unchecked(n, probs)


def output_distribution(
    c: OcCircuit, budget: int = RANDOMNESS_BUDGET
) -> FiniteDistribution:
    """Exact distribution of run(c, .) over all K*N_r random bits.

    Every mass is an integer multiple of 2^-(K*N_r).
    """
    logic = c.logic
    total_r = c.k * logic.n_r
    if total_r > budget:
        raise BudgetExceededError(
            f"distribution needs randomness budget {total_r}, have {budget}",
            required=total_r,
        )
    u = tuple(c.u)

    def prefix_for_step(i: int) -> tuple[int, ...]:
        return u + tuple([0] * logic.n_s) + tuple(c.m_block(i))

    return _distribution_by_steps(
        logic.circuit,
        logic.n_s,
        logic.n_u,
        logic.l_y,
        logic.s1,
        c.n,
        c.k,
        prefix_for_step,
        logic.n_r,
    )


def conditional_distribution(
    c: ConditionalOcCircuit, z_vec: BitString, budget: int = RANDOMNESS_BUDGET
) -> FiniteDistribution:
    """Exact output distribution for one fixed condition sample z_vec."""
    logic = c.logic
    total_r = c.k * logic.n_r
    if total_r > budget:
        raise BudgetExceededError(
            f"distribution needs randomness budget {total_r}, have {budget}",
            required=total_r,
        )
    if len(z_vec) != c.k * logic.n_z:
        raise ValueError(f"need {c.k * logic.n_z} condition bits, got {len(z_vec)}")
    u = tuple(c.u)

    def prefix_for_step(i: int) -> tuple[int, ...]:
        z = tuple(z_vec[i * logic.n_z : (i + 1) * logic.n_z])
        m = tuple(c.m_vec[i * logic.n_m : (i + 1) * logic.n_m])
        return u + z + tuple([0] * logic.n_s) + m

    return _distribution_by_steps(
        logic.circuit,
        logic.n_s,
        logic.n_u + logic.n_z,
        logic.l_y,
        logic.s1,
        c.n,
        c.k,
        prefix_for_step,
        logic.n_r,
    )


# ---------------------------------------------------------------------------
# structured machines


@dataclass(frozen=True)
class Macro:
    """A subroutine circuit; bodies may reference earlier macros only."""

    arity: int
    body: Circuit


@dataclass(frozen=True)
class StructuredOcCircuit:
    """An OcCircuit whose main circuit may call gates from a macro table."""

    macros: tuple[Macro, ...]
    logic: OcLogic
    u: BitString
    n: int
    m_vec: BitString

    @property
    def k(self) -> int:
        return -(-self.n // self.logic.l_y)

    def validate(self) -> Optional[str]:
        for k_idx, mac in enumerate(self.macros):
            if mac.arity < 1:
                return f"macro {k_idx}: arity must be >= 1"
            if mac.body.n_inputs != mac.arity:
                return f"macro {k_idx}: body input width mismatch"
            reason = _validate_with_macros(mac.body, self.macros[:k_idx])
            if reason is not None:
                return f"macro {k_idx}: {reason}"
        if self.n < 1:
            return "n must be >= 1"
        if len(self.u) != self.logic.n_u:
            return "universe width mismatch"
        if len(self.m_vec) != self.k * self.logic.n_m:
            return "semantics length mismatch"
        lg = self.logic
        if min(lg.n_u, lg.n_s, lg.n_m, lg.n_r) < 0 or lg.l_y < 1:
            return "bad width"
        if lg.n_m > lg.l_y:
            return "semantics block wider than output block"
        if lg.circuit.n_inputs != lg.n_inputs:
            return "circuit input width mismatch"
        if lg.circuit.n_outputs != lg.n_outputs:
            return "circuit output width mismatch"
        if len(lg.s1) != lg.n_s:
            return "initial state width mismatch"
        return _validate_with_macros(lg.circuit, self.macros)


def _validate_with_macros(c: Circuit, macros: tuple[Macro, ...]) -> Optional[str]:
    """Circuit validation where macro labels are legal single-output gates."""
    v = c.n_vertices
    if v < 1:
        return "no vertices"
    if len(c.in_edges) != v or len(c.outputs) < 1:
        return "shape mismatch"
    for srcs in c.in_edges:
        if any(s < 0 or s >= v for s in srcs):
            return "edge source out of range"
        if tuple(sorted(set(srcs))) != srcs:
            return "in-edge list not strictly ascending"
    if len(_topo_order(c.in_edges)) < v:
        return "cycle"
    for lab, srcs in zip(c.labels, c.in_edges):
        if is_macro_label(lab):
            k = macro_index(lab)
            if k >= len(macros):
                return "forward macro reference"
            if len(macros[k].body.outputs) != 1:
                return "macro used as a gate must have exactly one output"
            if len(srcs) != macros[k].arity:
                return "bad in-degree"
        else:
            if 0 <= lab < c.n_inputs:
                need = 0
            elif lab == NOT:
                need = 1
            elif lab in (AND, OR):
                need = 2
            else:
                return "bad label"
            if len(srcs) != need:
                return "bad in-degree"
    if any(o < 0 or o >= v for o in c.outputs):
        return "output index out of range"
    return None


def _inline(c: Circuit, flats: list[Circuit]) -> Circuit:
    """Splice flat macro bodies into c, producing a basis-only circuit.

    Macro formal input i binds to the i-th smallest source index (adjacency
    carries no operand order). When inlining makes a binary gate's two
    operands coincide, the gate is dropped: AND(v,v) = OR(v,v) = v.
    """
    labels: list[int] = []
    edges: list[tuple[int, ...]] = []

    def emit(label: int, srcs: tuple[int, ...]) -> int:
        if label in (AND, OR) and len(set(srcs)) == 1:
            return srcs[0]
        labels.append(label)
        edges.append(tuple(sorted(set(srcs))))
        return len(labels) - 1

    def splice(body: Circuit, args: list[int]) -> int:
        bmap: dict[int, int] = {}
        for b in _topo_order(body.in_edges):
            lab = body.labels[b]
            srcs = body.in_edges[b]
            if is_macro_label(lab):
                sub_args = [bmap[s] for s in srcs]
                bmap[b] = splice(flats[macro_index(lab)], sub_args)
            elif lab >= 0:
                bmap[b] = args[lab]
            else:
                bmap[b] = emit(lab, tuple(bmap[s] for s in srcs))
        return bmap[body.outputs[0]]

    value_of: dict[int, int] = {}
    for v in _topo_order(c.in_edges):
        lab = c.labels[v]
        srcs = c.in_edges[v]
        if is_macro_label(lab):
            value_of[v] = splice(flats[macro_index(lab)], [value_of[s] for s in srcs])
        elif lab >= 0:
            value_of[v] = emit(lab, ())
        else:
            value_of[v] = emit(lab, tuple(value_of[s] for s in srcs))
    outputs = tuple(value_of[o] for o in c.outputs)
    return Circuit(c.n_inputs, tuple(labels), tuple(edges), outputs)


def expand(s: StructuredOcCircuit) -> OcCircuit:
    """Flatten the macro hierarchy bottom-up into an ordinary machine."""
    reason = s.validate()
    if reason is not None:
        raise ValueError(f"invalid structured machine: {reason}")
    flats: list[Circuit] = []
    for mac in s.macros:
        flats.append(_inline(mac.body, flats))
    flat_main = _inline(s.logic.circuit, flats)
    logic = OcLogic(
        flat_main, s.logic.n_u, s.logic.n_s, s.logic.n_m, s.logic.n_r, s.logic.l_y, s.logic.s1
    )
    out = OcCircuit(logic, s.u, s.n, s.m_vec)
    bad = out.validate()
    assert bad is None, f"expansion produced an invalid machine: {bad}"
    return out


def structured_output_distribution(
    s: StructuredOcCircuit, budget: int = RANDOMNESS_BUDGET
) -> FiniteDistribution:
    """Direct interpretation of the structured machine, without flattening.

    Macro vertices are evaluated by recursive body evaluation; serves as the
    independent side of the expand-preserves-semantics check.
    """
    reason = s.validate()
    if reason is not None:
        raise ValueError(f"invalid structured machine: {reason}")
    total_r = s.k * s.logic.n_r
    if total_r > budget:
        raise BudgetExceededError(
            f"distribution needs randomness budget {total_r}, have {budget}",
            required=total_r,
        )

    def eval_with_macros(c: Circuit, x: tuple[int, ...]) -> tuple[int, ...]:
        vals: dict[int, int] = {}
        for v in _topo_order(c.in_edges):
            lab = c.labels[v]
            srcs = c.in_edges[v]
            if is_macro_label(lab):
                mac = s.macros[macro_index(lab)]
                sub_x = tuple(vals[src] for src in srcs)
                vals[v] = eval_with_macros(mac.body, sub_x)[0]
            elif lab >= 0:
                vals[v] = x[lab]
            elif lab == AND:
                vals[v] = vals[srcs[0]] & vals[srcs[1]]
            elif lab == OR:
                vals[v] = vals[srcs[0]] | vals[srcs[1]]
            else:
                vals[v] = 1 - vals[srcs[0]]
        return tuple(vals[o] for o in c.outputs)

    logic = s.logic
    probs: dict[BitString, Fraction] = {}
    weight = Fraction(1, 1 << total_r)
    for rv in range(1 << total_r):
        r_vec = BitString.from_int(rv, total_r)
        st = logic.s1
        ys: list[int] = []
        for i in range(s.k):
            r = r_vec[i * logic.n_r : (i + 1) * logic.n_r]
            m = s.m_vec[i * logic.n_m : (i + 1) * logic.n_m]
            out = eval_with_macros(
                logic.circuit, tuple(s.u) + tuple(st) + tuple(m) + tuple(r)
            )
            st = BitString(out[: logic.n_s])
            ys.extend(out[logic.n_s :])
        word = BitString(ys[: s.n])
        probs[word] = probs.get(word, Fraction(0)) + weight
    return FiniteDistribution(s.n, probs)
