"""Semantic quantities on top of the search: how many semantics bits the
minimal machine consumes per output bit, how much a side channel saves, and
the resulting effectiveness and capacity objectives.

All quantities are taken from fixed-n proper machines. A non-exact search
status propagates as `provisional`; nothing is ever clamped.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .bitio import BitString
from .circuit import Circuit
from .codec import CODEC_VERSION
from .dist import FiniteDistribution, mixture, statistical_distance
from .errors import EffUndefinedError
from .ocmachine import (
    ConditionalOcCircuit,
    ConditionalOcLogic,
    OcCircuit,
    OcLogic,
    conditional_distribution,
    output_distribution,
)
from .search import (
    EXACT_MINIMUM,
    SearchBudget,
    SearchResult,
    conditional_oc_search,
    oc_search,
)


@dataclass(frozen=True)
class SemanticReport:
    """Semantics consumption of a search witness: ceil(n*N_m / L_y) bits."""

    sa_bits: int
    n: int
    n_m: int
    l_y: int
    n_u: int
    n_s: int
    n_r: int
    n_z: Optional[int]
    oc_bits: int
    status: str
    codec_version: str = CODEC_VERSION

    @property
    def provisional(self) -> bool:
        return self.status != EXACT_MINIMUM


def _report_from(result: SearchResult, n: int) -> SemanticReport:
    logic = result.witness.logic
    n_z = logic.n_z if isinstance(logic, ConditionalOcLogic) else None
    return SemanticReport(
        sa_bits=-(-n * logic.n_m // logic.l_y),
        n=n,
        n_m=logic.n_m,
        l_y=logic.l_y,
        n_u=logic.n_u,
        n_s=logic.n_s,
        n_r=logic.n_r,
        n_z=n_z,
        oc_bits=result.oc_bits,
        status=result.status,
    )


def sa(
    x: FiniteDistribution, delta: Fraction, budget: SearchBudget = SearchBudget()
) -> SemanticReport:
    """Semantic information amount of x at precision delta."""
    return _report_from(oc_search(x, delta, budget), x.n)


def conditional_sa(
    x: FiniteDistribution,
    z: FiniteDistribution,
    delta: Fraction,
    budget: SearchBudget = SearchBudget(),
) -> SemanticReport:
    """Semantic information amount of x when every step may read z."""
    return _report_from(conditional_oc_search(x, z, delta, budget), x.n)


@dataclass(frozen=True)
class MutualReport:
    si_bits: int
    unconditional: SemanticReport
    conditional: SemanticReport

    @property
    def provisional(self) -> bool:
        return self.unconditional.provisional or self.conditional.provisional


def si(
    x: FiniteDistribution,
    z: FiniteDistribution,
    delta: Fraction,
    budget: SearchBudget = SearchBudget(),
) -> MutualReport:
    """Signed semantic mutual information: SA minus conditional SA."""
    a = sa(x, delta, budget)
    b = conditional_sa(x, z, delta, budget)
    return MutualReport(a.sa_bits - b.sa_bits, a, b)


def effectiveness(
    x: FiniteDistribution,
    z: FiniteDistribution,
    delta: Fraction,
    budget: SearchBudget = SearchBudget(),
) -> tuple[Fraction, MutualReport]:
    """SI/SA; undefined when SA = 0."""
    rep = si(x, z, delta, budget)
    if rep.unconditional.sa_bits == 0:
        raise EffUndefinedError("effectiveness is undefined at SA = 0")
    return Fraction(rep.si_bits, rep.unconditional.sa_bits), rep


# ---------------------------------------------------------------------------
# source-coding demo: ship the semantics, rewire the receiver


def conditionalize_logic(logic: OcLogic) -> ConditionalOcLogic:
    """Move the semantics input onto the condition wire: N_z := N_m, N_m := 0.

    The circuit function is unchanged; only input positions shift, because
    the condition block sits between u and s while semantics sat after s.
    """
    n_u, n_s, n_m, n_r = logic.n_u, logic.n_s, logic.n_m, logic.n_r
    remap = {}
    for i in range(n_u):
        remap[i] = i
    for i in range(n_s):
        remap[n_u + i] = n_u + n_m + i
    for i in range(n_m):
        remap[n_u + n_s + i] = n_u + i
    for i in range(n_r):
        remap[n_u + n_s + n_m + i] = n_u + n_m + n_s + i
    relabeled = tuple(
        remap[lab] if lab >= 0 else lab for lab in logic.circuit.labels
    )
    circuit = Circuit(
        logic.circuit.n_inputs, relabeled, logic.circuit.in_edges, logic.circuit.outputs
    )
    return ConditionalOcLogic(circuit, n_u, n_m, n_s, 0, n_r, logic.l_y, logic.s1)


@dataclass(frozen=True)
class SsocReport:
    code_len: int
    reconstruction_distance: Fraction
    exact_reconstruction: bool
    sa_report: Optional[SemanticReport]
    sa_within_code_len: Optional[bool]
    codec_version: str = CODEC_VERSION


def ssoc_demo(
    c: OcCircuit,
    delta: Fraction,
    budget: Optional[SearchBudget] = None,
    rand_budget: int = 20,
) -> SsocReport:
    """Sender transmits the semantics stream; the receiver is the same logic
    with the semantics input rewired to the condition wire.

    Reconstruction is exact by construction; the report verifies it
    numerically. With a budget, also searches for SA(X) and checks the
    code-length bracket SA <= l(n).
    """
    target = output_distribution(c, rand_budget)
    cond_logic = conditionalize_logic(c.logic)
    receiver = ConditionalOcCircuit(cond_logic, c.u, c.n, BitString())
    recon = conditional_distribution(receiver, c.m_vec, rand_budget)
    dist = statistical_distance(target, recon)
    code_len = c.k * c.logic.n_m
    sa_rep = None
    bracket = None
    if budget is not None:
        sa_rep = sa(target, delta, budget)
        if not sa_rep.provisional:
            bracket = sa_rep.sa_bits <= code_len
    return SsocReport(code_len, dist, dist == 0, sa_rep, bracket)


# ---------------------------------------------------------------------------
# channels and the capacity objective


@dataclass(frozen=True)
class ChannelMatrix:
    """Explicit stochastic map: one output distribution per input string."""

    n: int
    l: int
    rows: dict[BitString, FiniteDistribution]

    def __post_init__(self):
        for key, row in self.rows.items():
            if len(key) != self.n:
                raise ValueError("channel row key length mismatch")
            if row.n != self.l:
                raise ValueError("channel row output length mismatch")

    def apply(self, x: FiniteDistribution) -> FiniteDistribution:
        if x.n != self.n:
            raise ValueError("channel input length mismatch")
        parts = []
        for key in x.support():
            if key not in self.rows:
                raise ValueError(f"channel has no row for input {key.to01()}")
            parts.append((x.probs[key], self.rows[key]))
        return mixture(parts)

    @classmethod
    def identity(cls, n: int) -> "ChannelMatrix":
        rows = {}
        for v in range(1 << n):
            key = BitString.from_int(v, n)
            rows[key] = FiniteDistribution.point(key)
        return cls(n, n, rows)

    @classmethod
    def erasing(cls, n: int, l: int = 1) -> "ChannelMatrix":
        """Constant-output channel: the receiver learns nothing."""
        blank = FiniteDistribution.point(BitString.zeros(l))
        rows = {BitString.from_int(v, n): blank for v in range(1 << n)}
        return cls(n, l, rows)

    def to_json(self) -> str:
        rows = {
            k.to01(): {kk.to01(): str(p) for kk, p in self.rows[k].probs.items()}
            for k in sorted(self.rows, key=lambda b: b.to_int())
        }
        return json.dumps({"n": self.n, "l": self.l, "rows": rows}, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "ChannelMatrix":
        obj = json.loads(text)
        l = int(obj["l"])
        rows = {
            BitString.from01(k): FiniteDistribution(
                l, {BitString.from01(kk): Fraction(p) for kk, p in row.items()}
            )
            for k, row in obj["rows"].items()
        }
        return cls(int(obj["n"]), l, rows)


@dataclass(frozen=True)
class CandidateObjective:
    entropy_bits: float
    expected_conditional_sa: Fraction
    objective: float
    provisional: bool


@dataclass(frozen=True)
class CapacityReport:
    per_candidate: tuple[CandidateObjective, ...]
    best_objective: float
    best_index: int
    n: int
    codec_version: str = CODEC_VERSION


def capacity_objective(
    logic: OcLogic,
    u: BitString,
    n: int,
    candidates: list[FiniteDistribution],
    channel: ChannelMatrix,
    delta: Fraction,
    budget: SearchBudget = SearchBudget(),
    rand_budget: int = 20,
) -> CapacityReport:
    """Candidate-set lower bound on the capacity objective.

    For each message distribution M over semantics strings:
    (H(M) - E_M[conditional SA of X(m) given the channel image of X(m)]) / n.
    The true capacity maximizes over all admissible message families; with an
    explicit candidate list this is a lower bound on that maximum.
    """
    if not candidates:
        raise ValueError("need at least one candidate message distribution")
    k = -(-n // logic.l_y)
    want = k * logic.n_m
    results = []
    for m_dist in candidates:
        if m_dist.n != want:
            raise ValueError(
                f"candidate over {m_dist.n}-bit strings; logic consumes {want}"
            )
        entropy = -sum(
            float(p) * math.log2(float(p)) for p in m_dist.probs.values() if p > 0
        ) + 0.0
        expected = Fraction(0)
        provisional = False
        for m_vec in m_dist.support():
            x_m = output_distribution(OcCircuit(logic, u, n, m_vec), rand_budget)
            z_m = channel.apply(x_m)
            rep = conditional_sa(x_m, z_m, delta, budget)
            provisional = provisional or rep.provisional
            expected += m_dist.probs[m_vec] * rep.sa_bits
        objective = (entropy - float(expected)) / n
        results.append(CandidateObjective(entropy, expected, objective, provisional))
    best = max(range(len(results)), key=lambda i: results[i].objective)
    return CapacityReport(tuple(results), results[best].objective, best, n)
