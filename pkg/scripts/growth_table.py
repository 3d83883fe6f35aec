#!/usr/bin/env python3
"""Encoded-length growth of the two regular fixtures as n doubles.

The payload is constant except for the gamma(n) field, so the length climbs
by at most 2 bits per doubling. Prints a TSV consumable by external plotters.
"""

import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent.parent / "src"))

from occkit.codec import encode_oc_circuit
from occkit.fixtures import coin, ones


def main() -> None:
    print("n\tones_bits\tcoin_bits")
    prev = None
    for k in range(1, 11):
        n = 1 << k
        o = len(encode_oc_circuit(ones(n)))
        c = len(encode_oc_circuit(coin(n)))
        print(f"{n}\t{o}\t{c}")
        if prev is not None and n >= 16:
            assert o - prev[0] <= 2 and c - prev[1] <= 2
        prev = (o, c)


if __name__ == "__main__":
    main()
