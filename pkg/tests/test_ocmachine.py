import random
from fractions import Fraction

import pytest

from machine_gen import random_oc_circuit
from occkit.bitio import BitString
from occkit.circuit import AND, NOT, Circuit, macro_label
from occkit.dist import FiniteDistribution, restrict, statistical_distance
from occkit.errors import BudgetExceededError
from occkit.fixtures import coin, ones, pass_semantics
from occkit.ocmachine import (
    ConditionalOcCircuit,
    ConditionalOcLogic,
    Macro,
    OcCircuit,
    OcLogic,
    StructuredOcCircuit,
    conditional_distribution,
    expand,
    output_distribution,
    run,
    run_conditional,
    step,
    structured_output_distribution,
)


def bs(s):
    return BitString.from01(s)


def test_step_ones_fixture():
    logic = ones(4).logic
    s_next, y = step(logic, bs("1"), bs("0"), BitString(), BitString())
    assert (s_next.to01(), y.to01()) == ("0", "1")


def test_step_coin_fixture():
    logic = coin(4).logic
    for r, want in (("0", "0"), ("1", "1")):
        _, y = step(logic, BitString(), bs("0"), BitString(), bs(r))
        assert y.to01() == want


def test_step_deterministic():
    logic = ones(4).logic
    a = step(logic, bs("1"), bs("0"), BitString(), BitString())
    b = step(logic, bs("1"), bs("0"), BitString(), BitString())
    assert a == b


def test_step_width_mismatch():
    logic = ones(4).logic
    with pytest.raises(ValueError):
        step(logic, bs("11"), bs("0"), BitString(), BitString())


def test_run_ones():
    assert run(ones(4), BitString()).to01() == "1111"


def test_run_coin_pass_through():
    assert run(coin(4), bs("0110")).to01() == "0110"


def test_run_truncates_last_block():
    # L_y=2 machine over 2 u bits, n=3: two steps emit u twice, keep 3 bits
    c = Circuit(2, (0, 1), ((), ()), (0, 1))
    logic = OcLogic(c, 2, 0, 0, 0, 2, BitString())
    mc = OcCircuit(logic, bs("10"), 3, BitString())
    assert mc.k == 2
    assert run(mc, BitString()).to01() == "101"


def test_output_distribution_fixture_values():
    assert output_distribution(ones(2)).probs == {bs("11"): Fraction(1)}
    assert output_distribution(coin(2)).probs == FiniteDistribution.uniform(2).probs


def test_output_distribution_deterministic_point():
    mc = pass_semantics("0101")
    dist = output_distribution(mc)
    assert dist.probs == {bs("0101"): Fraction(1)}


def test_output_distribution_budget():
    with pytest.raises(BudgetExceededError):
        output_distribution(coin(30), budget=20)


def test_distribution_matches_brute_force():
    """The step-kernel DP against literal enumeration of every r-vector."""
    rng = random.Random(21)
    checked = 0
    while checked < 60:
        mc = random_oc_circuit(rng)
        total_r = mc.k * mc.logic.n_r
        if total_r > 12:
            continue
        checked += 1
        counts: dict[BitString, int] = {}
        for rv in range(1 << total_r):
            out = run(mc, BitString.from_int(rv, total_r))
            counts[out] = counts.get(out, 0) + 1
        brute = {
            k: Fraction(v, 1 << total_r) for k, v in counts.items()
        }
        dist = output_distribution(mc)
        assert dist.probs == brute
        assert sum(dist.probs.values()) == 1


def test_run_lands_in_support():
    rng = random.Random(22)
    for _ in range(30):
        mc = random_oc_circuit(rng)
        total_r = mc.k * mc.logic.n_r
        if total_r > 10:
            continue
        dist = output_distribution(mc)
        for rv in range(1 << total_r):
            out = run(mc, BitString.from_int(rv, total_r))
            assert dist.probs.get(out, 0) > 0


def test_prefix_consistency():
    """The n-bit restriction of a longer run equals the shorter run's
    distribution when logic, universe and semantics prefix agree."""
    rng = random.Random(23)
    done = 0
    while done < 40:
        mc = random_oc_circuit(rng)
        logic = mc.logic
        n_long = mc.n
        if n_long < 2 or mc.k * logic.n_r > 10:
            continue
        n_short = rng.randint(1, n_long - 1)
        k_short = -(-n_short // logic.l_y)
        short = OcCircuit(
            logic, mc.u, n_short, mc.m_vec[: k_short * logic.n_m]
        )
        long_dist = output_distribution(mc)
        assert restrict(long_dist, n_short).probs == output_distribution(short).probs
        done += 1


def test_conditional_degenerate_equals_unconditional():
    base = coin(3)
    logic = base.logic
    clogic = ConditionalOcLogic(
        logic.circuit, logic.n_u, 0, logic.n_s, logic.n_m, logic.n_r, logic.l_y, logic.s1
    )
    cond = ConditionalOcCircuit(clogic, base.u, 3, base.m_vec)
    assert (
        conditional_distribution(cond, BitString()).probs
        == output_distribution(base).probs
    )


def test_conditional_pass_through():
    # y_i := z_i
    c = Circuit(1, (0,), ((),), (0,))
    logic = ConditionalOcLogic(c, 0, 1, 0, 0, 0, 1, BitString())
    out = run_conditional(logic, BitString(), 2, BitString(), bs("01"), BitString())
    assert out.to01() == "01"


def test_conditional_distribution_is_point_on_z():
    c = Circuit(1, (0,), ((),), (0,))
    logic = ConditionalOcLogic(c, 0, 1, 0, 0, 0, 1, BitString())
    cond = ConditionalOcCircuit(logic, BitString(), 4, BitString())
    dist = conditional_distribution(cond, bs("1011"))
    assert dist.probs == {bs("1011"): Fraction(1)}


NAND = Macro(2, Circuit(2, (0, 1, AND, NOT), ((), (), (0, 1), (2,)), (3,)))


def test_expand_nand_macro():
    main = Circuit(2, (0, 1, macro_label(0)), ((), (), (0, 1)), (2,))
    logic = OcLogic(main, 2, 0, 0, 0, 1, BitString())
    s = StructuredOcCircuit((NAND,), logic, bs("11"), 1, BitString())
    flat = expand(s)
    rows = [flat.logic.circuit.evaluate((a, b)) for a in (0, 1) for b in (0, 1)]
    assert rows == [(1,), (1,), (1,), (0,)]


def test_expand_empty_table_identity():
    base = ones(3)
    s = StructuredOcCircuit((), base.logic, base.u, base.n, base.m_vec)
    flat = expand(s)
    assert output_distribution(flat).probs == output_distribution(base).probs


def test_expand_two_level_xor():
    xor_main = Circuit(
        2,
        (0, 1, macro_label(0), macro_label(0), macro_label(0), macro_label(0)),
        ((), (), (0, 1), (0, 2), (1, 2), (3, 4)),
        (5,),
    )
    logic = OcLogic(xor_main, 2, 0, 0, 0, 1, BitString())
    for a in (0, 1):
        for b in (0, 1):
            s = StructuredOcCircuit((NAND,), logic, BitString([a, b]), 1, BitString())
            assert run(expand(s), BitString()).to01() == str(a ^ b)


def test_expand_forward_reference_rejected():
    bad = Circuit(1, (macro_label(0),), ((0,),), (0,))
    mac = Macro(1, bad)  # body references itself (macro 0 inside macro 0)
    main = Circuit(1, (0,), ((),), (0,))
    logic = OcLogic(main, 1, 0, 0, 0, 1, BitString())
    s = StructuredOcCircuit((mac,), logic, bs("1"), 1, BitString())
    assert s.validate() is not None


def test_expand_matches_direct_interpretation():
    main = Circuit(
        2, (0, 1, macro_label(0), NOT), ((), (), (0, 1), (2,)), (3,)
    )
    logic = OcLogic(main, 1, 0, 0, 1, 1, BitString())
    s = StructuredOcCircuit((NAND,), logic, bs("1"), 2, BitString())
    assert (
        structured_output_distribution(s).probs
        == output_distribution(expand(s)).probs
    )


def test_nm_wider_than_ly_rejected():
    c = Circuit(2, (0, 1), ((), ()), (0,))
    logic = OcLogic(c, 0, 0, 2, 0, 1, BitString())
    assert logic.validate() == "semantics block wider than output block"
