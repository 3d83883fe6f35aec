"""Reference machines used throughout the tests, the CLI compare table, and
the shipped fixture files.

ones/coin are the textbook two-gate machines (both vertices are input gates
that are also the outputs). Their original write-ups set the adjacency to the
identity matrix, which contradicts acyclicity; the fixtures here use the
empty edge set, which computes the same pass-through function.
"""

from __future__ import annotations

from fractions import Fraction

from .bitio import BitString
from .circuit import Circuit
from .epsmachine import EpsilonMachine
from .ocmachine import OcCircuit, OcLogic


def ones(n: int) -> OcCircuit:
    """Constant-ones source: y_i = u = 1, state parked at 0. Output 1^n."""
    circuit = Circuit(n_inputs=2, labels=(0, 1), in_edges=((), ()), outputs=(1, 0))
    logic = OcLogic(circuit, n_u=1, n_s=1, n_m=0, n_r=0, l_y=1, s1=BitString.from01("0"))
    return OcCircuit(logic, u=BitString.from01("1"), n=n, m_vec=BitString())


def coin(n: int) -> OcCircuit:
    """Uniform source: y_i = r_i passes one fresh random bit per step."""
    circuit = Circuit(n_inputs=2, labels=(0, 1), in_edges=((), ()), outputs=(0, 1))
    logic = OcLogic(circuit, n_u=0, n_s=1, n_m=0, n_r=1, l_y=1, s1=BitString.from01("0"))
    return OcCircuit(logic, u=BitString(), n=n, m_vec=BitString())


def pass_semantics(bits: str) -> OcCircuit:
    """Semantics-driven point source: y_i = m_i, so the output is exactly
    the semantics string. The stock fixture uses bits='1011'."""
    circuit = Circuit(n_inputs=1, labels=(0,), in_edges=((),), outputs=(0,))
    logic = OcLogic(circuit, n_u=0, n_s=0, n_m=1, n_r=0, l_y=1, s1=BitString())
    return OcCircuit(logic, u=BitString(), n=len(bits), m_vec=BitString.from01(bits))


# ---------------------------------------------------------------------------
# state-machine fixtures (all dyadic)


def golden_mean_machine() -> EpsilonMachine:
    """No two consecutive 1s: A -1/2-> A emits 0, A -1/2-> B emits 1, B -> A emits 0."""
    h = Fraction(1, 2)
    return EpsilonMachine(
        k=2,
        t=((h, h), (Fraction(1), Fraction(0))),
        symbols=(
            (BitString.from01("0"), BitString.from01("1")),
            (BitString.from01("0"), None),
        ),
        l_y=1,
        start=0,
    )


def even_process_machine() -> EpsilonMachine:
    """1-blocks of even length: A -1/2-> A emits 0, A -1/2-> B emits 1, B -> A emits 1."""
    h = Fraction(1, 2)
    return EpsilonMachine(
        k=2,
        t=((h, h), (Fraction(1), Fraction(0))),
        symbols=(
            (BitString.from01("0"), BitString.from01("1")),
            (BitString.from01("1"), None),
        ),
        l_y=1,
        start=0,
    )


def alternator_machine() -> EpsilonMachine:
    """Deterministic two-bit alternator: emits 01, 10, 01, ... (L_y = 2)."""
    return EpsilonMachine(
        k=2,
        t=((Fraction(0), Fraction(1)), (Fraction(1), Fraction(0))),
        symbols=(
            (None, BitString.from01("01")),
            (BitString.from01("10"), None),
        ),
        l_y=2,
        start=0,
    )


def biased_iid_machine() -> EpsilonMachine:
    """i.i.d. bits with Pr[1] = 3/4, written with two states so every
    transition carries a single symbol."""
    q, p = Fraction(1, 4), Fraction(3, 4)
    return EpsilonMachine(
        k=2,
        t=((q, p), (q, p)),
        symbols=(
            (BitString.from01("0"), BitString.from01("1")),
            (BitString.from01("0"), BitString.from01("1")),
        ),
        l_y=1,
        start=0,
    )


def constant_ones_machine() -> EpsilonMachine:
    """One state, always emits 1; the state-machine twin of ones()."""
    return EpsilonMachine(
        k=1,
        t=((Fraction(1),),),
        symbols=((BitString.from01("1"),),),
        l_y=1,
        start=0,
    )


def uniform_iid_machine() -> EpsilonMachine:
    """i.i.d. uniform bits via two interchangeable states."""
    h = Fraction(1, 2)
    return EpsilonMachine(
        k=2,
        t=((h, h), (h, h)),
        symbols=(
            (BitString.from01("0"), BitString.from01("1")),
            (BitString.from01("0"), BitString.from01("1")),
        ),
        l_y=1,
        start=0,
    )
