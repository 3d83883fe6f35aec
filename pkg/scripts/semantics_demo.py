#!/usr/bin/env python3
"""End-to-end semantic walkthrough on the shipped fixtures.

Computes SA for the regular, random, and semantics-driven sources, shows the
source-coding demo (ship the semantics, rewire the receiver), and evaluates
the capacity objective for an identity and an erasing channel.
"""

import json
import pathlib
import sys
from fractions import Fraction

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent.parent / "src"))

from occkit.bitio import BitString
from occkit.dist import FiniteDistribution
from occkit.fixtures import coin, ones, pass_semantics
from occkit.ocmachine import output_distribution
from occkit.search import SearchBudget
from occkit.semantics import (
    ChannelMatrix,
    capacity_objective,
    conditional_sa,
    sa,
    ssoc_demo,
)

BUDGET = SearchBudget(max_payload_bits=26, randomness_budget=24)


def main() -> None:
    report = {}
    for name, machine in (
        ("ones_4", ones(4)),
        ("coin_4", coin(4)),
        ("pass_1011", pass_semantics("1011")),
    ):
        x = output_distribution(machine)
        rep = sa(x, Fraction(0), BUDGET)
        demo = ssoc_demo(machine, Fraction(0), BUDGET, rand_budget=24)
        report[name] = {
            "sa_bits": rep.sa_bits,
            "oc_bits": rep.oc_bits,
            "status": rep.status,
            "ssoc_code_len": demo.code_len,
            "ssoc_exact": demo.exact_reconstruction,
        }

    x = output_distribution(pass_semantics("1011"))
    z = FiniteDistribution.point(BitString.from01("1011"))
    crep = conditional_sa(x, z, Fraction(0), BUDGET)
    report["pass_1011_given_semantics"] = {
        "conditional_sa_bits": crep.sa_bits,
        "status": crep.status,
    }

    logic = pass_semantics("1011").logic
    m2 = FiniteDistribution(
        4,
        {
            BitString.from01("1011"): Fraction(1, 2),
            BitString.from01("0100"): Fraction(1, 2),
        },
    )
    for channel_name, channel in (
        ("identity", ChannelMatrix.identity(4)),
        ("erasing", ChannelMatrix.erasing(4)),
    ):
        cap = capacity_objective(
            logic, BitString(), 4, [m2], channel, Fraction(0), BUDGET
        )
        report[f"capacity_{channel_name}"] = {
            "objective": cap.best_objective,
            "expected_conditional_sa": str(
                cap.per_candidate[0].expected_conditional_sa
            ),
        }

    print(json.dumps(report, indent=2, sort_keys=True))


if __name__ == "__main__":
    main()
