import random

import pytest

from machine_gen import random_oc_circuit
from occkit.bitio import BitString
from occkit.circuit import AND, Circuit, macro_label
from occkit.codec import (
    cond_payload_length,
    container_bytes,
    decode_conditional,
    decode_oc_circuit,
    decode_structured,
    encode_conditional,
    encode_oc_circuit,
    encode_structured,
    from_container_bytes,
    machine_from_json,
    machine_to_json,
    oc_payload_length,
)
from occkit.errors import DecodeError
from occkit.fixtures import coin, ones, pass_semantics
from occkit.ocmachine import (
    ConditionalOcCircuit,
    ConditionalOcLogic,
    Macro,
    OcCircuit,
    OcLogic,
    StructuredOcCircuit,
)


def bs(s):
    return BitString.from01(s)


def test_fixture_payload_lengths_hand_counted():
    # ones(4): 3+3+3+1+1+1 gammas, s1 1, adjacency 4, labels 2*3,
    # outputs 2*1, gamma(4)=5, u 1  -> 31
    assert len(encode_oc_circuit(ones(4))) == 31
    # coin(4): one fewer u bit and nu/ns gammas swap cost -> 30
    assert len(encode_oc_circuit(coin(4))) == 30


def test_payload_length_formula_matches_encoder():
    rng = random.Random(1)
    for _ in range(200):
        mc = random_oc_circuit(rng)
        lg = mc.logic
        assert len(encode_oc_circuit(mc)) == oc_payload_length(
            lg.circuit.n_vertices, lg.n_u, lg.n_s, lg.n_m, lg.n_r, lg.l_y, mc.n
        )


def test_round_trip_fixtures():
    for mc in (ones(4), coin(4), pass_semantics("1011")):
        assert decode_oc_circuit(encode_oc_circuit(mc)) == mc


def test_round_trip_random_circuits():
    rng = random.Random(2)
    for _ in range(1000):
        mc = random_oc_circuit(rng)
        payload = encode_oc_circuit(mc)
        back = decode_oc_circuit(payload)
        assert back == mc
        assert encode_oc_circuit(back) == payload


def test_decode_empty_rejects():
    with pytest.raises(DecodeError) as e:
        decode_oc_circuit(BitString())
    assert e.value.reason == "truncated"


def test_decode_self_loop_rejects_as_cycle():
    payload = encode_oc_circuit(ones(2))
    # ones(2) adjacency bits sit after the six gamma headers and s1;
    # flip the w_00 bit to create a self-loop
    gammas = 3 + 3 + 3 + 1 + 1 + 1 + 1  # incl. the single s1 bit
    bits = list(payload)
    assert bits[gammas] == 0
    bits[gammas] = 1
    with pytest.raises(DecodeError) as e:
        decode_oc_circuit(BitString(bits))
    assert e.value.reason in ("cycle", "bad_indegree")


def test_decode_trailing_bits_reject():
    payload = encode_oc_circuit(ones(2)) + bs("0")
    with pytest.raises(DecodeError) as e:
        decode_oc_circuit(payload)
    assert e.value.reason == "trailing"


def test_decode_random_bitstrings_never_crash():
    rng = random.Random(3)
    accepted = 0
    for _ in range(20000):
        length = rng.randint(0, 64)
        payload = BitString([rng.randrange(2) for _ in range(length)])
        try:
            mc = decode_oc_circuit(payload)
        except DecodeError as e:
            assert e.reason
            continue
        accepted += 1
        assert encode_oc_circuit(mc) == payload
    assert accepted > 0


def test_conditional_round_trip():
    c = Circuit(1, (0,), ((),), (0,))
    logic = ConditionalOcLogic(c, 0, 1, 0, 0, 0, 1, BitString())
    cond = ConditionalOcCircuit(logic, BitString(), 4, BitString())
    payload = encode_conditional(cond)
    assert len(payload) == cond_payload_length(1, 0, 1, 0, 0, 0, 1, 4)
    assert decode_conditional(payload) == cond


def test_structured_round_trip():
    from occkit.circuit import NOT

    nand = Macro(2, Circuit(2, (0, 1, AND, NOT), ((), (), (0, 1), (2,)), (3,)))
    main = Circuit(2, (0, 1, macro_label(0)), ((), (), (0, 1)), (2,))
    logic = OcLogic(main, 2, 0, 0, 0, 1, BitString())
    s = StructuredOcCircuit((nand,), logic, bs("10"), 1, BitString())
    payload = encode_structured(s)
    assert decode_structured(payload) == s


def test_structured_empty_table_costs_one_bit():
    base = ones(3)
    s = StructuredOcCircuit((), base.logic, base.u, base.n, base.m_vec)
    assert len(encode_structured(s)) == len(encode_oc_circuit(base)) + 1


def test_container_round_trip(tmp_path):
    for mc in (ones(4), coin(8), pass_semantics("1011")):
        data = container_bytes(mc)
        assert data[:4] == b"OCC1"
        assert from_container_bytes(data) == mc


def test_container_conditional_and_structured_tags():
    c = Circuit(1, (0,), ((),), (0,))
    logic = ConditionalOcLogic(c, 0, 1, 0, 0, 0, 1, BitString())
    cond = ConditionalOcCircuit(logic, BitString(), 2, BitString())
    data = container_bytes(cond)
    assert data[:5] == b"OCC1C"
    assert from_container_bytes(data) == cond

    base = ones(2)
    s = StructuredOcCircuit((), base.logic, base.u, base.n, base.m_vec)
    data = container_bytes(s)
    assert data[:5] == b"OCC1S"
    assert from_container_bytes(data) == s


def test_container_truncation_rejected():
    data = container_bytes(ones(2))
    for cut in (3, 4, 7, len(data) - 1):
        with pytest.raises(ValueError):
            from_container_bytes(data[:cut])


def test_shipped_fixture_files_decode(tmp_path):
    import pathlib

    fixdir = pathlib.Path(__file__).resolve().parent.parent / "fixtures"
    assert from_container_bytes((fixdir / "ones_4.occ1").read_bytes()) == ones(4)
    assert from_container_bytes((fixdir / "coin_8.occ1").read_bytes()) == coin(8)
    assert from_container_bytes(
        (fixdir / "pass_1011.occ1").read_bytes()
    ) == pass_semantics("1011")


def test_machine_json_round_trip():
    rng = random.Random(4)
    for _ in range(50):
        mc = random_oc_circuit(rng)
        assert machine_from_json(machine_to_json(mc)) == mc


def test_encode_refuses_invalid():
    # declared widths sum to 2 but the circuit reads one input
    broken = OcCircuit(
        OcLogic(Circuit(1, (0,), ((),), (0,)), 0, 0, 0, 2, 1, BitString()),
        BitString(), 1, BitString(),
    )
    with pytest.raises(ValueError):
        encode_oc_circuit(broken)
