import math
from fractions import Fraction

import pytest

from occkit.bitio import BitString
from occkit.epsmachine import (
    EpsilonMachine,
    compile_machine,
    dyadicize,
    process_distribution,
    stationary,
    statistical_complexity,
)
from occkit.errors import DyadicRequiredError, NonErgodicError
from occkit.fixtures import (
    alternator_machine,
    biased_iid_machine,
    constant_ones_machine,
    even_process_machine,
    golden_mean_machine,
    uniform_iid_machine,
)
from occkit.ocmachine import output_distribution


def bs(s):
    return BitString.from01(s)


def test_stationary_single_state():
    assert stationary(constant_ones_machine()) == (Fraction(1),)


def test_stationary_golden_mean():
    assert stationary(golden_mean_machine()) == (Fraction(2, 3), Fraction(1, 3))


def test_stationary_non_ergodic():
    m = EpsilonMachine(
        k=2,
        t=((Fraction(1), Fraction(0)), (Fraction(0), Fraction(1))),
        symbols=((bs("0"), None), (None, bs("1"))),
        l_y=1,
        start=0,
    )
    with pytest.raises(NonErgodicError):
        stationary(m)


def test_complexity_single_state_zero():
    for alpha in (0, Fraction(1, 2), 1, 2, math.inf):
        assert statistical_complexity(constant_ones_machine(), alpha) == 0.0


def test_complexity_golden_mean():
    gm = golden_mean_machine()
    c1 = statistical_complexity(gm, 1)
    assert abs(c1 - (math.log2(3) - 2 / 3)) < 1e-12
    assert statistical_complexity(gm, 0) == 1.0


def test_complexity_monotone_in_alpha():
    for m in (golden_mean_machine(), even_process_machine(), biased_iid_machine()):
        alphas = (0, Fraction(1, 2), 1, 2, math.inf)
        vals = [statistical_complexity(m, a) for a in alphas]
        for lo, hi in zip(vals[1:], vals[:-1]):
            assert lo <= hi + 1e-12


def test_process_distribution_constant():
    m = constant_ones_machine()
    for t in (1, 3):
        dist = process_distribution(m, t)
        assert dist.probs == {BitString([1] * t): Fraction(1)}


def test_process_distribution_empty():
    dist = process_distribution(golden_mean_machine(), 0)
    assert dist.probs == {BitString(): Fraction(1)}


def test_process_distribution_golden_mean_hand_enumeration():
    # from A: AA(1/4)->00, AB(1/4)->01, BA(1/2)->10; B->B impossible
    dist = process_distribution(golden_mean_machine(), 2)
    assert dist.probs == {
        bs("00"): Fraction(1, 4),
        bs("01"): Fraction(1, 4),
        bs("10"): Fraction(1, 2),
    }


def test_process_masses_sum_to_one():
    for m in (golden_mean_machine(), even_process_machine(), alternator_machine()):
        for t in (1, 2, 4):
            assert sum(process_distribution(m, t).probs.values()) == 1


def test_compile_constant_ones_matches_ones_fixture():
    from occkit.fixtures import ones

    m = constant_ones_machine()
    cm = compile_machine(m, 4)
    assert output_distribution(cm).probs == output_distribution(ones(4)).probs


@pytest.mark.parametrize(
    "factory",
    [golden_mean_machine, even_process_machine, alternator_machine,
     biased_iid_machine, uniform_iid_machine],
)
def test_compile_equals_process_distribution(factory):
    m = factory()
    for t in (1, 2, 3):
        cm = compile_machine(m, t * m.l_y)
        assert (
            output_distribution(cm, 64).probs
            == process_distribution(m, t, 64).probs
        )


def test_compile_rejects_non_dyadic():
    third = Fraction(1, 3)
    m = EpsilonMachine(
        k=2,
        t=((third, 1 - third), (Fraction(1), Fraction(0))),
        symbols=((bs("0"), bs("1")), (bs("0"), None)),
        l_y=1,
        start=0,
    )
    with pytest.raises(DyadicRequiredError):
        compile_machine(m, 2)
    rounded = dyadicize(m, Fraction(1, 16))
    assert rounded.is_dyadic()
    for row_old, row_new in zip(m.t, rounded.t):
        sd = sum(abs(a - b) for a, b in zip(row_old, row_new)) / 2
        assert sd <= Fraction(1, 16)
        for old, new in zip(row_old, row_new):
            if old == 0:
                assert new == 0
    compile_machine(rounded, 2)


def test_compile_truncation_with_wide_symbols():
    m = alternator_machine()
    cm = compile_machine(m, 3)  # one and a half symbols
    dist = output_distribution(cm)
    assert dist.probs == {bs("011"): Fraction(1)}


def test_state_width_rule():
    from occkit.epsmachine import ceil_log2_plus_one

    assert ceil_log2_plus_one(1) == 1
    assert ceil_log2_plus_one(2) == 2
    assert ceil_log2_plus_one(3) == 3
    assert ceil_log2_plus_one(4) == 3
    assert ceil_log2_plus_one(5) == 4


def test_machine_json_round_trip():
    for m in (golden_mean_machine(), alternator_machine()):
        back = EpsilonMachine.from_json(m.to_json())
        assert back == m


def test_stationary_exactness_random():
    import random

    rng = random.Random(17)
    for _ in range(20):
        k = rng.randint(1, 4)
        rows = []
        for _ in range(k):
            weights = [rng.randint(0, 4) for _ in range(k)]
            if sum(weights) == 0:
                weights[rng.randrange(k)] = 1
            total = sum(weights)
            rows.append(tuple(Fraction(w, total) for w in weights))
        symbols = tuple(
            tuple(bs("1") if p > 0 else None for p in row) for row in rows
        )
        m = EpsilonMachine(k, tuple(rows), symbols, 1, 0)
        try:
            pi = stationary(m)
        except NonErgodicError:
            continue
        assert sum(pi) == 1
        for j in range(k):
            assert sum(pi[i] * m.t[i][j] for i in range(k)) == pi[j]
