"""Exhaustive minimal-encoding search.

Given a target distribution X and precision delta, the search enumerates
candidate payloads in increasing bit-length and, within a length, in
lexicographic payload order; the first machine whose output distribution is
within delta of X is the minimal witness. Enumeration is header-driven: the
leading gamma fields of a payload determine every later field width, so the
search walks exactly the syntactically valid payloads instead of all
bitstrings, which changes nothing about the result or the order.

If nothing at all accepts below the truth-table baseline, the baseline
itself is the answer; its length is exact only when the whole range below
it was actually enumerated and nothing was skipped for budget reasons.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Iterator, Optional

from .bitio import BitString, gamma_encode
from .circuit import AND, NOT, OR, Circuit, synth_from_table
from .codec import (
    cond_payload_length,
    encode_conditional,
    encode_oc_circuit,
    encode_structured,
    oc_payload_length,
)
from .dist import FiniteDistribution, dyadic_approximation, restrict, statistical_distance
from .errors import BudgetExceededError
from .ocmachine import (
    ConditionalOcCircuit,
    ConditionalOcLogic,
    Macro,
    OcCircuit,
    OcLogic,
    StructuredOcCircuit,
    conditional_distribution,
    expand,
    output_distribution,
)

EXACT_MINIMUM = "exact_minimum"
UPPER_BOUND_ONLY = "upper_bound_only"
BASELINE_ONLY = "baseline_only"


@dataclass(frozen=True)
class SearchBudget:
    max_payload_bits: int = 28
    randomness_budget: int = 20
    time_limit_s: Optional[float] = None
    workers: int = 1

    def __post_init__(self):
        if self.max_payload_bits < 0 or self.randomness_budget < 0 or self.workers < 1:
            raise ValueError("budgets must be positive")


@dataclass
class SearchResult:
    status: str
    oc_bits: int
    witness: object
    witness_payload: BitString
    candidates_tested: int = 0
    rejected_by_reason: dict = field(default_factory=dict)

    @property
    def exact(self) -> bool:
        return self.status == EXACT_MINIMUM


# ---------------------------------------------------------------------------
# baseline (the truth-table upper bound)


def baseline_circuit(
    x: FiniteDistribution, delta: Fraction, budget: SearchBudget = SearchBudget()
) -> OcCircuit:
    """One-step machine realizing a dyadic approximation of x exactly.

    The r-space {0,1}^l is dealt out to outcomes in ascending key order,
    each getting exactly mass*2^l values. l is forced to at least 1 because
    the basis has no constant gates: a point mass still needs one (ignored)
    random input to synthesize against.
    """
    approx, levels = dyadic_approximation(x, delta)
    levels = max(levels, 1)
    if levels > budget.randomness_budget:
        raise BudgetExceededError(
            f"baseline needs randomness budget {levels}, have {budget.randomness_budget}",
            required=levels,
        )
    n = x.n
    scale = 1 << levels
    table: list[tuple[int, ...]] = []
    for key in sorted(approx.probs, key=lambda k: k.to_int()):
        count = int(approx.probs[key] * scale)
        table.extend([tuple(key)] * count)
    assert len(table) == scale
    circuit = synth_from_table(table, levels, n)
    logic = OcLogic(circuit, 0, 0, 0, levels, n, BitString())
    return OcCircuit(logic, BitString(), n, BitString())


# ---------------------------------------------------------------------------
# candidate enumeration

_ADJ_CACHE: dict[tuple[int, int], list] = {}


def _adjacencies(v: int, max_indeg: int = 2) -> list[tuple[tuple, tuple]]:
    """All acyclic adjacency matrices on v vertices with bounded in-degree,
    in ascending row-major bit order: (in_edges, indegrees) pairs."""
    key = (v, max_indeg)
    cached = _ADJ_CACHE.get(key)
    if cached is not None:
        return cached
    out = []
    for bits in range(1 << (v * v)):
        in_edges: list[list[int]] = [[] for _ in range(v)]
        for pos in range(v * v):
            if (bits >> (v * v - 1 - pos)) & 1:
                i, j = divmod(pos, v)
                in_edges[j].append(i)
        indegs = tuple(len(s) for s in in_edges)
        if any(d > max_indeg for d in indegs):
            continue
        edges = tuple(tuple(s) for s in in_edges)
        if _acyclic(edges):
            out.append((edges, indegs))
    _ADJ_CACHE[key] = out
    return out


def _acyclic(in_edges: tuple[tuple[int, ...], ...]) -> bool:
    v = len(in_edges)
    pending = [len(s) for s in in_edges]
    succ: list[list[int]] = [[] for _ in range(v)]
    for j, srcs in enumerate(in_edges):
        for i in srcs:
            succ[i].append(j)
    ready = [i for i in range(v) if pending[i] == 0]
    seen = 0
    while ready:
        i = ready.pop()
        seen += 1
        for j in succ[i]:
            pending[j] -= 1
            if pending[j] == 0:
                ready.append(j)
    return seen == v


def _base_headers(n: int, cap: int) -> dict[int, list[tuple]]:
    """All (V, N_u, N_s, N_m, N_r, L_y) with payload length <= cap, grouped
    by length; each group sorted by the encoded gamma prefix. Every loop
    breaks on a monotone lower bound of the final length."""
    by_len: dict[int, list[tuple]] = {}
    v = 1
    while oc_payload_length(v, 0, 0, 0, 0, 1, n) <= cap:
        n_u = 0
        while oc_payload_length(v, n_u, 0, 0, 0, 1, n) <= cap:
            n_s = 0
            while oc_payload_length(v, n_u, n_s, 0, 0, 1, n) <= cap:
                l_y = 1
                while oc_payload_length(v, n_u, n_s, 0, 0, l_y, n) <= cap:
                    n_m = 0
                    while n_m <= l_y and oc_payload_length(v, n_u, n_s, n_m, 0, l_y, n) <= cap:
                        n_r = 0
                        while True:
                            length = oc_payload_length(v, n_u, n_s, n_m, n_r, l_y, n)
                            if length > cap:
                                break
                            by_len.setdefault(length, []).append(
                                (v, n_u, n_s, n_m, n_r, l_y)
                            )
                            n_r += 1
                        n_m += 1
                    l_y += 1
                n_s += 1
            n_u += 1
        v += 1
    for group in by_len.values():
        group.sort(key=_base_prefix)
    return by_len


def _base_prefix(h: tuple) -> str:
    v, n_u, n_s, n_m, n_r, l_y = h
    return "".join(
        gamma_encode(k).to01()
        for k in (v, n_u + 1, n_s + 1, n_m + 1, n_r + 1, l_y)
    )


def _label_choices(indeg: int, n_inputs: int, macro_sigs: tuple = ()) -> list[int]:
    """Valid labels for a vertex of the given in-degree, ascending by encoded
    value: inputs, then AND/OR/NOT, then single-output macros of that arity."""
    if indeg == 0:
        base = list(range(n_inputs))
    elif indeg == 1:
        base = [NOT]
    elif indeg == 2:
        base = [AND, OR]
    else:
        base = []
    from .circuit import macro_label

    for k, (arity, n_out) in enumerate(macro_sigs):
        if arity == indeg and n_out == 1:
            base.append(macro_label(k))
    return base


def _base_bodies(header: tuple, n: int) -> Iterator[OcCircuit]:
    """All machines for one header, in lexicographic payload order: the field
    order is s1, adjacency, labels, outputs, u, m."""
    v, n_u, n_s, n_m, n_r, l_y = header
    n_in = n_u + n_s + n_m + n_r
    n_out = n_s + l_y
    k = -(-n // l_y)
    adjacencies = _adjacencies(v)
    choice_cache = {d: _label_choices(d, n_in) for d in range(3)}
    for s1v in range(1 << n_s):
        s1 = BitString.from_int(s1v, n_s)
        for in_edges, indegs in adjacencies:
            choices = [choice_cache[d] for d in indegs]
            if any(not c for c in choices):
                continue
            for labels in product(*choices):
                for outs in product(range(v), repeat=n_out):
                    circuit = Circuit(n_in, labels, in_edges, outs)
                    logic = OcLogic(circuit, n_u, n_s, n_m, n_r, l_y, s1)
                    for uv in range(1 << n_u):
                        u = BitString.from_int(uv, n_u)
                        for mv in range(1 << (k * n_m)):
                            yield OcCircuit(logic, u, n, BitString.from_int(mv, k * n_m))


# ---------------------------------------------------------------------------
# the search proper


class _Target:
    """Per-target bookkeeping inside a shared enumeration pass."""

    def __init__(self, x: FiniteDistribution, delta: Fraction, baseline, baseline_bits: int):
        self.x = x
        self.delta = Fraction(delta)
        self.baseline = baseline
        self.baseline_bits = baseline_bits
        self.result: Optional[SearchResult] = None
        self.tested = 0
        self.rejected: dict[str, int] = {}
        self.skipped = 0

    def reject(self, reason: str) -> None:
        self.rejected[reason] = self.rejected.get(reason, 0) + 1


def _check_deadline(budget: SearchBudget, t0: float) -> None:
    if budget.time_limit_s is not None and time.monotonic() - t0 > budget.time_limit_s:
        raise BudgetExceededError("search wall-clock cap exceeded")


def oc_search_many(
    targets: list[tuple[FiniteDistribution, Fraction]],
    budget: SearchBudget = SearchBudget(),
) -> list[SearchResult]:
    """Run several searches over one shared candidate enumeration.

    All targets must share the same output length n. Results are identical
    to independent oc_search calls; only the enumeration work is shared.
    """
    if not targets:
        return []
    n = targets[0][0].n
    if any(x.n != n for x, _ in targets):
        raise ValueError("batched targets must share one output length")
    state = []
    for x, delta in targets:
        base = baseline_circuit(x, delta, budget)
        state.append(_Target(x, delta, base, len(encode_oc_circuit(base))))

    cap = min(budget.max_payload_bits, max(t.baseline_bits for t in state) - 1)
    t0 = time.monotonic()
    if cap >= 1:
        by_len = _base_headers(n, cap)
        for length in sorted(by_len):
            if all(t.result is not None for t in state):
                break
            pending = [
                t for t in state if t.result is None and length < t.baseline_bits
            ]
            if not pending:
                continue
            for header in by_len[length]:
                if not pending:
                    break
                k_nr = -(-n // header[5]) * header[4]
                over_budget = k_nr > budget.randomness_budget
                for cand in _base_bodies(header, n):
                    _maybe_self_check(cand, length)
                    if over_budget:
                        for t in pending:
                            t.tested += 1
                            t.skipped += 1
                            t.reject("rand_budget")
                        continue
                    dist = output_distribution(cand, budget.randomness_budget)
                    accepted = False
                    for t in pending:
                        t.tested += 1
                        if t.delta == 0:
                            close = dist.probs == t.x.probs
                        else:
                            close = statistical_distance(t.x, dist) <= t.delta
                        if close:
                            status = EXACT_MINIMUM if t.skipped == 0 else UPPER_BOUND_ONLY
                            t.result = SearchResult(
                                status, length, cand, encode_oc_circuit(cand),
                                t.tested, dict(t.rejected),
                            )
                            accepted = True
                        else:
                            t.reject("sd")
                    if accepted:
                        pending = [t for t in pending if t.result is None]
                        if not pending:
                            break
                _check_deadline(budget, t0)

    out = []
    for t in state:
        if t.result is not None:
            out.append(t.result)
            continue
        searched_all = budget.max_payload_bits >= t.baseline_bits - 1
        if budget.max_payload_bits == 0:
            status = BASELINE_ONLY
        elif searched_all and t.skipped == 0:
            status = EXACT_MINIMUM
        else:
            status = UPPER_BOUND_ONLY
        out.append(
            SearchResult(
                status, t.baseline_bits, t.baseline,
                encode_oc_circuit(t.baseline), t.tested, dict(t.rejected),
            )
        )
    return out


def oc_search(
    x: FiniteDistribution, delta: Fraction, budget: SearchBudget = SearchBudget()
) -> SearchResult:
    return oc_search_many([(x, delta)], budget)[0]


SELF_CHECK = False


def _maybe_self_check(cand, length: int) -> None:
    if SELF_CHECK:
        from .codec import decode_oc_circuit

        payload = encode_oc_circuit(cand)
        assert len(payload) == length, (len(payload), length)
        assert decode_oc_circuit(payload) == cand


# ---------------------------------------------------------------------------
# conditional search


def _cond_headers(n: int, cap: int) -> dict[int, list[tuple]]:
    by_len: dict[int, list[tuple]] = {}
    v = 1
    while cond_payload_length(v, 0, 0, 0, 0, 0, 1, n) <= cap:
        n_u = 0
        while cond_payload_length(v, n_u, 0, 0, 0, 0, 1, n) <= cap:
            n_z = 0
            while cond_payload_length(v, n_u, n_z, 0, 0, 0, 1, n) <= cap:
                n_s = 0
                while cond_payload_length(v, n_u, n_z, n_s, 0, 0, 1, n) <= cap:
                    l_y = 1
                    while cond_payload_length(v, n_u, n_z, n_s, 0, 0, l_y, n) <= cap:
                        n_m = 0
                        while (
                            n_m <= l_y
                            and cond_payload_length(v, n_u, n_z, n_s, n_m, 0, l_y, n) <= cap
                        ):
                            n_r = 0
                            while True:
                                length = cond_payload_length(
                                    v, n_u, n_z, n_s, n_m, n_r, l_y, n
                                )
                                if length > cap:
                                    break
                                by_len.setdefault(length, []).append(
                                    (v, n_u, n_z, n_s, n_m, n_r, l_y)
                                )
                                n_r += 1
                            n_m += 1
                        l_y += 1
                    n_s += 1
                n_z += 1
            n_u += 1
        v += 1
    for group in by_len.values():
        group.sort(key=_cond_prefix)
    return by_len


def _cond_prefix(h: tuple) -> str:
    v, n_u, n_z, n_s, n_m, n_r, l_y = h
    return "".join(
        gamma_encode(k).to01()
        for k in (v, n_u + 1, n_s + 1, n_m + 1, n_r + 1, n_z + 1, l_y)
    )


def _cond_bodies(header: tuple, n: int) -> Iterator[ConditionalOcCircuit]:
    v, n_u, n_z, n_s, n_m, n_r, l_y = header
    n_in = n_u + n_z + n_s + n_m + n_r
    n_out = n_s + l_y
    k = -(-n // l_y)
    adjacencies = _adjacencies(v)
    choice_cache = {d: _label_choices(d, n_in) for d in range(3)}
    for s1v in range(1 << n_s):
        s1 = BitString.from_int(s1v, n_s)
        for in_edges, indegs in adjacencies:
            choices = [choice_cache[d] for d in indegs]
            if any(not c for c in choices):
                continue
            for labels in product(*choices):
                for outs in product(range(v), repeat=n_out):
                    circuit = Circuit(n_in, labels, in_edges, outs)
                    logic = ConditionalOcLogic(circuit, n_u, n_z, n_s, n_m, n_r, l_y, s1)
                    for uv in range(1 << n_u):
                        u = BitString.from_int(uv, n_u)
                        for mv in range(1 << (k * n_m)):
                            yield ConditionalOcCircuit(
                                logic, u, n, BitString.from_int(mv, k * n_m)
                            )


def conditional_oc_search(
    x: FiniteDistribution,
    z: FiniteDistribution,
    delta: Fraction,
    budget: SearchBudget = SearchBudget(),
) -> SearchResult:
    """Minimal conditional machine: closeness must hold for every condition
    sample in the support of the (K*N_z)-bit restriction of z."""
    delta = Fraction(delta)
    base = baseline_circuit(x, delta, budget)
    base_cond = ConditionalOcCircuit(
        ConditionalOcLogic(
            base.logic.circuit, base.logic.n_u, 0, base.logic.n_s, base.logic.n_m,
            base.logic.n_r, base.logic.l_y, base.logic.s1,
        ),
        base.u, base.n, base.m_vec,
    )
    baseline_bits = len(encode_conditional(base_cond))
    cap = min(budget.max_payload_bits, baseline_bits - 1)
    tested = 0
    rejected: dict[str, int] = {}
    skipped = 0
    t0 = time.monotonic()
    z_support_cache: dict[int, list[BitString]] = {}

    def z_samples(bits: int) -> list[BitString]:
        if bits not in z_support_cache:
            z_support_cache[bits] = restrict(z, bits).support()
        return z_support_cache[bits]

    if cap >= 1:
        by_len = _cond_headers(x.n, cap)
        for length in sorted(by_len):
            for header in by_len[length]:
                v, n_u, n_z, n_s, n_m, n_r, l_y = header
                k = -(-x.n // l_y)
                over_rand = k * n_r > budget.randomness_budget
                z_short = k * n_z > z.n
                for cand in _cond_bodies(header, x.n):
                    tested += 1
                    if over_rand:
                        skipped += 1
                        rejected["rand_budget"] = rejected.get("rand_budget", 0) + 1
                        continue
                    if z_short:
                        # precondition failure, not an unverified gap: these
                        # machines cannot consume a sample of z at all
                        rejected["z_short"] = rejected.get("z_short", 0) + 1
                        continue
                    ok = True
                    for zv in z_samples(k * n_z):
                        d = conditional_distribution(cand, zv, budget.randomness_budget)
                        if statistical_distance(x, d) > delta:
                            ok = False
                            break
                    if ok:
                        status = EXACT_MINIMUM if skipped == 0 else UPPER_BOUND_ONLY
                        return SearchResult(
                            status, length, cand, encode_conditional(cand), tested, rejected
                        )
                    rejected["sd"] = rejected.get("sd", 0) + 1
                    if (tested & 0x3FF) == 0:
                        _check_deadline(budget, t0)

    searched_all = budget.max_payload_bits >= baseline_bits - 1
    if budget.max_payload_bits == 0:
        status = BASELINE_ONLY
    elif searched_all and skipped == 0:
        status = EXACT_MINIMUM
    else:
        status = UPPER_BOUND_ONLY
    return SearchResult(
        status, baseline_bits, base_cond, encode_conditional(base_cond), tested, rejected
    )


# ---------------------------------------------------------------------------
# structured search


def _macro_tables(max_cost: int) -> list[tuple[tuple, str, int]]:
    """All macro tables with encoded cost <= max_cost: (macros, prefix, cost).

    Bodies are enumerated validity-first like the main search; multi-output
    macros are encodable but nothing may reference them as gates.
    """
    from .bitio import gamma_length

    tables: list[tuple[tuple, str, int]] = []
    empty_prefix = gamma_encode(1).to01()
    tables.append(((), empty_prefix, 1))

    def macro_blocks(k_idx: int, macro_sigs: tuple, cost_left: int):
        """All (Macro, bits, cost) definable as macro k_idx within cost_left."""
        out = []
        arity = 1
        while gamma_length(arity) + 1 + 1 + 1 + 1 + 1 <= cost_left:
            v_m = 1
            while True:
                lw = max(1, (arity + 3 + k_idx - 1).bit_length())
                base_cost = (
                    gamma_length(arity) + gamma_length(v_m) + v_m * v_m + v_m * lw
                )
                ow = max(1, (v_m - 1).bit_length())
                if base_cost + 1 + ow > cost_left:
                    break
                max_indeg = max([2] + [sig[0] for sig in macro_sigs])
                for in_edges, indegs in _adjacencies(v_m, max_indeg):
                    choices = [
                        _label_choices(d, arity, macro_sigs) for d in indegs
                    ]
                    if any(not ch for ch in choices):
                        continue
                    for labels in product(*choices):
                        n_out = 1
                        while True:
                            cost = base_cost + gamma_length(n_out) + n_out * ow
                            if cost > cost_left:
                                break
                            for outs in product(range(v_m), repeat=n_out):
                                body = Circuit(arity, labels, in_edges, tuple(outs))
                                mac = Macro(arity, body)
                                bits = (
                                    gamma_encode(arity).to01()
                                    + gamma_encode(v_m).to01()
                                    + _circuit_block_bits(body, arity, k_idx, with_count=True)
                                )
                                out.append((mac, bits, cost))
                            n_out += 1
                v_m += 1
            arity += 1
        return out

    def extend(macros: tuple, bits: str, cost: int, cost_left: int):
        k_idx = len(macros)
        sigs = tuple((m.arity, len(m.body.outputs)) for m in macros)
        for mac, mbits, mcost in macro_blocks(k_idx, sigs, cost_left):
            new = macros + (mac,)
            header = gamma_length(len(new) + 1)
            total = cost + mcost
            tables.append(
                (new, gamma_encode(len(new) + 1).to01() + bits + mbits, header + total)
            )
            if total + 4 <= max_cost - header:
                extend(new, bits + mbits, total, max_cost - header - total)

    extend((), "", 0, max_cost - 1)
    return tables


def _circuit_block_bits(c: Circuit, n_inputs: int, n_macros: int, with_count: bool) -> str:
    from .circuit import is_macro_label, macro_index

    v = c.n_vertices
    srcs_of = [set(s) for s in c.in_edges]
    bits = []
    for i in range(v):
        for j in range(v):
            bits.append("1" if i in srcs_of[j] else "0")
    lw = max(1, (n_inputs + 3 + n_macros - 1).bit_length())
    for lab in c.labels:
        if lab >= 0:
            value = lab
        elif lab == AND:
            value = n_inputs
        elif lab == OR:
            value = n_inputs + 1
        elif lab == NOT:
            value = n_inputs + 2
        else:
            value = n_inputs + 3 + macro_index(lab)
        bits.append(format(value, f"0{lw}b"))
    if with_count:
        bits.append(gamma_encode(len(c.outputs)).to01())
    ow = max(1, (v - 1).bit_length())
    for o in c.outputs:
        bits.append(format(o, f"0{ow}b"))
    return "".join(bits)


def soc_search(
    x: FiniteDistribution, delta: Fraction, budget: SearchBudget = SearchBudget()
) -> SearchResult:
    """As oc_search over the structured encoding; acceptance is checked on
    the expanded (flattened) machine."""
    delta = Fraction(delta)
    base = baseline_circuit(x, delta, budget)
    base_s = StructuredOcCircuit((), base.logic, base.u, base.n, base.m_vec)
    baseline_bits = len(encode_structured(base_s))
    cap = min(budget.max_payload_bits, baseline_bits - 1)
    n = x.n
    tested = 0
    rejected: dict[str, int] = {}
    skipped = 0
    t0 = time.monotonic()

    if cap >= 1:
        min_main = oc_payload_length(1, 0, 0, 0, 0, 1, n)
        tables = _macro_tables(max(cap - min_main, 1))
        # every candidate: table prefix ++ main payload (with macro labels)
        entries = []
        for macros, tbits, tcost in tables:
            sigs = tuple((m.arity, len(m.body.outputs)) for m in macros)
            extra_labels = len(macros)
            by_len = _structured_main_headers(n, cap - tcost, extra_labels, sigs)
            for main_len, headers in by_len.items():
                for header in headers:
                    entries.append(
                        (tcost + main_len, tbits + _base_prefix(header), macros, sigs, header)
                    )
        entries.sort(key=lambda e: (e[0], e[1]))
        for total_len, _, macros, sigs, header in entries:
            v, n_u, n_s, n_m, n_r, l_y = header
            k = -(-n // l_y)
            over_rand = k * n_r > budget.randomness_budget
            for cand in _structured_bodies(macros, sigs, header, n):
                tested += 1
                if over_rand:
                    skipped += 1
                    rejected["rand_budget"] = rejected.get("rand_budget", 0) + 1
                    continue
                flat = expand(cand)
                dist = output_distribution(flat, budget.randomness_budget)
                if statistical_distance(x, dist) <= delta:
                    status = EXACT_MINIMUM if skipped == 0 else UPPER_BOUND_ONLY
                    return SearchResult(
                        status, total_len, cand, encode_structured(cand), tested, rejected
                    )
                rejected["sd"] = rejected.get("sd", 0) + 1
                if (tested & 0x3FF) == 0:
                    _check_deadline(budget, t0)

    searched_all = budget.max_payload_bits >= baseline_bits - 1
    if budget.max_payload_bits == 0:
        status = BASELINE_ONLY
    elif searched_all and skipped == 0:
        status = EXACT_MINIMUM
    else:
        status = UPPER_BOUND_ONLY
    return SearchResult(
        status, baseline_bits, base_s, encode_structured(base_s), tested, rejected
    )


def _structured_main_headers(
    n: int, cap: int, extra_labels: int, sigs: tuple
) -> dict[int, list[tuple]]:
    """Main-circuit headers for a fixed macro table; label width includes the
    macro labels, and the in-degree bound grows with the macro arities."""

    def length(v, n_u, n_s, n_m, n_r, l_y):
        n_in = n_u + n_s + n_m + n_r
        k = -(-n // l_y)
        lw = max(1, (n_in + 3 + extra_labels - 1).bit_length())
        ow = max(1, (v - 1).bit_length())
        from .bitio import gamma_length

        return (
            gamma_length(v)
            + gamma_length(n_u + 1)
            + gamma_length(n_s + 1)
            + gamma_length(n_m + 1)
            + gamma_length(n_r + 1)
            + gamma_length(l_y)
            + n_s
            + v * v
            + v * lw
            + (n_s + l_y) * ow
            + gamma_length(n)
            + n_u
            + k * n_m
        )

    by_len: dict[int, list[tuple]] = {}
    v = 1
    while length(v, 0, 0, 0, 0, 1) <= cap:
        n_u = 0
        while length(v, n_u, 0, 0, 0, 1) <= cap:
            n_s = 0
            while length(v, n_u, n_s, 0, 0, 1) <= cap:
                l_y = 1
                while length(v, n_u, n_s, 0, 0, l_y) <= cap:
                    n_m = 0
                    while n_m <= l_y and length(v, n_u, n_s, n_m, 0, l_y) <= cap:
                        n_r = 0
                        while True:
                            ln = length(v, n_u, n_s, n_m, n_r, l_y)
                            if ln > cap:
                                break
                            by_len.setdefault(ln, []).append((v, n_u, n_s, n_m, n_r, l_y))
                            n_r += 1
                        n_m += 1
                    l_y += 1
                n_s += 1
            n_u += 1
        v += 1
    for group in by_len.values():
        group.sort(key=_base_prefix)
    return by_len


def _structured_bodies(
    macros: tuple, sigs: tuple, header: tuple, n: int
) -> Iterator[StructuredOcCircuit]:
    v, n_u, n_s, n_m, n_r, l_y = header
    n_in = n_u + n_s + n_m + n_r
    n_out = n_s + l_y
    k = -(-n // l_y)
    max_indeg = max([2] + [s[0] for s in sigs])
    adjacencies = _adjacencies(v, max_indeg)
    choice_cache = {
        d: _label_choices(d, n_in, sigs) for d in range(max_indeg + 1)
    }
    for s1v in range(1 << n_s):
        s1 = BitString.from_int(s1v, n_s)
        for in_edges, indegs in adjacencies:
            choices = [choice_cache[d] for d in indegs]
            if any(not c for c in choices):
                continue
            for labels in product(*choices):
                for outs in product(range(v), repeat=n_out):
                    circuit = Circuit(n_in, labels, in_edges, outs)
                    logic = OcLogic(circuit, n_u, n_s, n_m, n_r, l_y, s1)
                    for uv in range(1 << n_u):
                        u = BitString.from_int(uv, n_u)
                        for mv in range(1 << (k * n_m)):
                            yield StructuredOcCircuit(
                                macros, logic, u, n, BitString.from_int(mv, k * n_m)
                            )
