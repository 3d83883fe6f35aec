"""Stochastic finite-state machines with per-transition output symbols.

Transition probabilities are exact rationals. The stationary distribution is
solved exactly, order-alpha state complexities are reported as floats, and
dyadic machines compile into single-circuit machines whose output
distribution matches the process distribution exactly.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .bitio import BitString
from .circuit import synth_from_table
from .dist import FiniteDistribution, _apportion
from .errors import BudgetExceededError, DyadicRequiredError, NonErgodicError
from .ocmachine import OcCircuit, OcLogic

PROCESS_BUDGET = 20


@dataclass(frozen=True)
class EpsilonMachine:
    """k states, row-stochastic rational matrix t, symbols where t[i][j] > 0."""

    k: int
    t: tuple[tuple[Fraction, ...], ...]
    symbols: tuple[tuple[Optional[BitString], ...], ...]
    l_y: int
    start: int

    def __post_init__(self):
        if self.k < 1 or self.l_y < 1:
            raise ValueError("need at least one state and one output bit")
        if not (0 <= self.start < self.k):
            raise ValueError("start state out of range")
        if len(self.t) != self.k or any(len(r) != self.k for r in self.t):
            raise ValueError("transition matrix shape mismatch")
        for i, row in enumerate(self.t):
            if any(p < 0 or p > 1 for p in row):
                raise ValueError("transition probabilities outside [0,1]")
            if sum(row, Fraction(0)) != 1:
                raise ValueError(f"row {i} does not sum to 1")
            for j, p in enumerate(row):
                sym = self.symbols[i][j]
                if p > 0:
                    if sym is None:
                        raise ValueError(f"missing symbol on transition {i}->{j}")
                    if len(sym) != self.l_y:
                        raise ValueError("symbols must share one length")

    def is_dyadic(self) -> bool:
        return all(
            p.denominator & (p.denominator - 1) == 0 for row in self.t for p in row
        )

    def to_json(self) -> str:
        trans = []
        for i in range(self.k):
            for j in range(self.k):
                if self.t[i][j] > 0:
                    trans.append(
                        {"from": i, "to": j, "p": str(self.t[i][j]),
                         "sym": self.symbols[i][j].to01()}
                    )
        return json.dumps(
            {"k": self.k, "L_y": self.l_y, "start": self.start, "trans": trans},
            sort_keys=True,
        )

    @classmethod
    def from_json(cls, text: str) -> "EpsilonMachine":
        obj = json.loads(text)
        k = int(obj["k"])
        t = [[Fraction(0)] * k for _ in range(k)]
        syms: list[list[Optional[BitString]]] = [[None] * k for _ in range(k)]
        for tr in obj["trans"]:
            i, j = int(tr["from"]), int(tr["to"])
            t[i][j] = Fraction(tr["p"])
            syms[i][j] = BitString.from01(tr["sym"])
        return cls(
            k,
            tuple(tuple(r) for r in t),
            tuple(tuple(r) for r in syms),
            int(obj["L_y"]),
            int(obj["start"]),
        )


def stationary(m: EpsilonMachine) -> tuple[Fraction, ...]:
    """The unique pi with pi T = pi and sum 1, solved exactly.

    Gaussian elimination on (T^t - I) stacked with the all-ones row; a
    coefficient rank below k means the stationary distribution is not unique.
    """
    k = m.k
    rows: list[list[Fraction]] = []
    for j in range(k):
        row = [m.t[i][j] - (1 if i == j else 0) for i in range(k)]
        rows.append([Fraction(x) for x in row] + [Fraction(0)])
    rows.append([Fraction(1)] * k + [Fraction(1)])

    rank = 0
    for col in range(k):
        piv = next((r for r in range(rank, len(rows)) if rows[r][col] != 0), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        inv = 1 / rows[rank][col]
        rows[rank] = [x * inv for x in rows[rank]]
        for r in range(len(rows)):
            if r != rank and rows[r][col] != 0:
                f = rows[r][col]
                rows[r] = [a - f * b for a, b in zip(rows[r], rows[rank])]
        rank += 1
    if rank < k:
        raise NonErgodicError("stationary distribution is not unique")
    if any(any(x != 0 for x in row[:k]) or row[k] != 0 for row in rows[rank:]):
        raise NonErgodicError("stationary system is inconsistent")

    pi = [Fraction(0)] * k
    for row in rows[:rank]:
        col = next(c for c in range(k) if row[c] == 1)
        pi[col] = row[k]
    if any(p < 0 for p in pi):
        raise NonErgodicError("stationary solution leaves the simplex")
    assert sum(pi) == 1
    for j in range(k):
        assert sum(pi[i] * m.t[i][j] for i in range(k)) == pi[j]
    return tuple(pi)


def statistical_complexity(m: EpsilonMachine, alpha) -> float:
    """Order-alpha entropy of the stationary state distribution, in bits.

    alpha=0 is log2 of the state count (all states, not the support),
    alpha=1 Shannon, alpha=inf min-entropy.
    """
    pi = stationary(m)
    if alpha == 0:
        return math.log2(m.k)
    if alpha == math.inf:
        return -math.log2(float(max(pi))) + 0.0
    if alpha == 1:
        return -sum(float(p) * math.log2(float(p)) for p in pi if p > 0) + 0.0
    a = float(alpha)
    if a < 0:
        raise ValueError("alpha must be >= 0")
    s = sum(float(p) ** a for p in pi if p > 0)
    return math.log2(s) / (1.0 - a)


def process_distribution(
    m: EpsilonMachine, steps: int, budget: int = PROCESS_BUDGET
) -> FiniteDistribution:
    """Exact distribution of the first `steps` emitted symbols from `start`."""
    n = steps * m.l_y
    if n > budget:
        raise BudgetExceededError(
            f"process distribution needs budget {n}, have {budget}", required=n
        )
    front: dict[tuple[int, BitString], Fraction] = {
        (m.start, BitString()): Fraction(1)
    }
    for _ in range(steps):
        nxt: dict[tuple[int, BitString], Fraction] = {}
        for (state, emitted), p in front.items():
            for j in range(m.k):
                q = m.t[state][j]
                if q > 0:
                    key = (j, emitted + m.symbols[state][j])
                    nxt[key] = nxt.get(key, Fraction(0)) + p * q
        front = nxt
    probs: dict[BitString, Fraction] = {}
    for (_, emitted), p in front.items():
        probs[emitted] = probs.get(emitted, Fraction(0)) + p
    return FiniteDistribution(n, probs)


def _fractional_bits(p: Fraction) -> int:
    """Length of the dyadic expansion of p in [0,1]; p must be dyadic."""
    d = p.denominator
    if d & (d - 1):
        raise DyadicRequiredError(f"{p} is not dyadic")
    return d.bit_length() - 1


def compile_machine(m: EpsilonMachine, n: int) -> OcCircuit:
    """Simulate the machine as a single-circuit stepper.

    The state lives in N_s = ceil(log2 k) + 1 bits; each step draws
    N_r = max_ij |t_ij| random bits and, per state i, the r-space splits into
    contiguous blocks of exact size t_ij * 2^N_r (j ascending) mapping to
    (state j, sigma_ij). State codes beyond k-1 sink to state 0 emitting 0s.
    """
    if not m.is_dyadic():
        raise DyadicRequiredError(
            "all transition probabilities must be dyadic; see dyadicize()"
        )
    if n < 1:
        raise ValueError("n must be >= 1")
    n_s = ceil_log2_plus_one(m.k)
    n_r = max(_fractional_bits(p) for row in m.t for p in row if p > 0)
    n_in = n_s + n_r
    rows: list[tuple[int, ...]] = []
    for code in range(1 << n_s):
        for r in range(1 << max(n_r, 0)):
            if code < m.k:
                j, sym = _transition_for(m, code, r, n_r)
                state_bits = tuple(BitString.from_int(j, n_s))
            else:
                state_bits = tuple(BitString.from_int(0, n_s))
                sym = BitString.zeros(m.l_y)
            rows.append(state_bits + tuple(sym))
    circuit = synth_from_table(rows, n_in, n_s + m.l_y)
    logic = OcLogic(
        circuit, 0, n_s, 0, n_r, m.l_y, BitString.from_int(m.start, n_s)
    )
    return OcCircuit(logic, BitString(), n, BitString())


def ceil_log2_plus_one(k: int) -> int:
    """ceil(log2 k) + 1 state bits: the verbatim width rule, wasteful or not."""
    return (k - 1).bit_length() + 1


def _transition_for(m: EpsilonMachine, i: int, r: int, n_r: int) -> tuple[int, BitString]:
    """Block lookup: which (j, sigma) the r-value falls into for state i."""
    scale = 1 << n_r
    acc = 0
    for j in range(m.k):
        width = int(m.t[i][j] * scale)
        if r < acc + width:
            return j, m.symbols[i][j]
        acc += width
    raise AssertionError("row blocks do not cover the r-space")


def dyadicize(m: EpsilonMachine, delta: Fraction) -> EpsilonMachine:
    """Round each row to dyadic masses within statistical distance delta.

    Support never grows: zero transitions stay zero, so no symbol is ever
    needed where the original machine had none.
    """
    delta = Fraction(delta)
    if delta <= 0:
        if m.is_dyadic():
            return m
        raise DyadicRequiredError("delta must be > 0 for non-dyadic machines")
    new_rows = []
    for row in m.t:
        support = [j for j, p in enumerate(row) if p > 0]
        masses = [row[j] for j in support]
        levels = 1
        while True:
            rounded = _apportion(masses, levels)
            sd = sum(abs(a - b) for a, b in zip(masses, rounded)) / 2
            if sd <= delta:
                break
            levels += 1
        new_row = [Fraction(0)] * m.k
        for j, p in zip(support, rounded):
            new_row[j] = p
        new_rows.append(tuple(new_row))
    return EpsilonMachine(m.k, tuple(new_rows), m.symbols, m.l_y, m.start)
