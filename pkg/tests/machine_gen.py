"""Random valid machines for round-trip and fuzz tests."""

from __future__ import annotations

import random

from occkit.bitio import BitString
from occkit.circuit import AND, NOT, OR, Circuit
from occkit.ocmachine import OcCircuit, OcLogic


def random_oc_circuit(rng: random.Random, max_v: int = 6) -> OcCircuit:
    """A uniform-ish valid machine: random widths, a random DAG whose edges
    only point forward in vertex order, labels compatible with in-degrees."""
    n_u = rng.randint(0, 3)
    n_s = rng.randint(0, 3)
    l_y = rng.randint(1, 4)
    n_m = rng.randint(0, min(l_y, 2))
    n_r = rng.randint(0, 3)
    n_in = n_u + n_s + n_m + n_r
    if n_in == 0:
        # vertex 0 would need an input label; no machine exists without inputs
        return random_oc_circuit(rng, max_v)
    v = rng.randint(1, max_v)
    labels = []
    in_edges = []
    for i in range(v):
        options = ["in"]
        if i >= 1:
            options.append("not")
        if i >= 2:
            options += ["and", "or"]
        kind = rng.choice(options)
        if kind == "in":
            labels.append(rng.randrange(n_in))
            in_edges.append(())
        elif kind == "not":
            labels.append(NOT)
            in_edges.append((rng.randrange(i),))
        else:
            labels.append(AND if kind == "and" else OR)
            a, b = rng.sample(range(i), 2)
            in_edges.append(tuple(sorted((a, b))))
    n_out = n_s + l_y
    outputs = tuple(rng.randrange(v) for _ in range(n_out))
    circuit = Circuit(n_in, tuple(labels), tuple(in_edges), outputs)
    assert circuit.validate() is None, circuit.validate()
    n = rng.randint(1, 8)
    k = -(-n // l_y)
    logic = OcLogic(
        circuit, n_u, n_s, n_m, n_r, l_y,
        BitString([rng.randrange(2) for _ in range(n_s)]),
    )
    mc = OcCircuit(
        logic,
        BitString([rng.randrange(2) for _ in range(n_u)]),
        n,
        BitString([rng.randrange(2) for _ in range(k * n_m)]),
    )
    assert mc.validate() is None, mc.validate()
    return mc
