#!/usr/bin/env python3
"""Regenerate the container files under fixtures/."""

import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent.parent / "src"))

from occkit.codec import save_circuit
from occkit.fixtures import coin, ones, pass_semantics

OUT = pathlib.Path(__file__).resolve().parent.parent / "fixtures"


def main() -> None:
    OUT.mkdir(exist_ok=True)
    for n in (4, 8):
        save_circuit(OUT / f"ones_{n}.occ1", ones(n))
        save_circuit(OUT / f"coin_{n}.occ1", coin(n))
    save_circuit(OUT / "pass_1011.occ1", pass_semantics("1011"))
    for path in sorted(OUT.iterdir()):
        print(path.name, path.stat().st_size, "bytes")


if __name__ == "__main__":
    main()
