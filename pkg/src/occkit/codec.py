"""Canonical binary encodings of machines; payload bit-lengths are the
measured description sizes.

Payload layout, MSB-first ("OCC1"):

    gamma(V) gamma(N_u+1) gamma(N_s+1) gamma(N_m+1) gamma(N_r+1) gamma(L_y)
    s_1 raw (N_s bits)
    adjacency w_ij row-major (V^2 bits, w_ij=1 iff edge i->j)
    V labels, each max(1, ceil(log2(N+3))) bits
        value v in [0, N-1]: input bit v, input order u, s, m, r
        v = N: AND, v = N+1: OR, v = N+2: NOT
    L = N_s + L_y output indices, each max(1, ceil(log2 V)) bits
    gamma(n)
    u raw (N_u bits)
    m raw (K * N_m bits, K = ceil(n / L_y))

Conditional machines ("OCC1C") insert gamma(N_z+1) after gamma(N_r+1); the
input order becomes u, z, s, m, r. Structured machines ("OCC1S") prepend a
macro table: gamma(#macros+1), then per macro gamma(arity), gamma(V_m),
adjacency, labels over {inputs, AND, OR, NOT, earlier macros}, gamma(#outputs)
and the output indices; main-circuit labels then extend past NOT with one
value per macro.

Decoding is strict: a payload is accepted only if re-encoding reproduces it
bit for bit, so enumeration by length never counts a machine twice. Zero
fields are stored as value+1 because gamma codes start at 1.
"""

from __future__ import annotations

import json
import struct

from .bitio import BitReader, BitString, BitWriter, gamma_decode, gamma_encode, gamma_length
from .circuit import AND, NOT, OR, Circuit, is_macro_label, macro_index, macro_label
from .errors import BitOverrunError, DecodeError, MalformedCodeError
from .ocmachine import (
    ConditionalOcCircuit,
    ConditionalOcLogic,
    Macro,
    OcCircuit,
    OcLogic,
    StructuredOcCircuit,
)

CODEC_VERSION = "OCC1/1"

REJECT_REASONS = (
    "truncated",
    "nm_exceeds_ly",
    "cycle",
    "bad_label",
    "bad_indegree",
    "bad_output",
    "bad_edge",
    "width_mismatch",
    "trailing",
    "bad_macro",
)

_MAGICS = {"oc": b"OCC1", "cond": b"OCC1C", "structured": b"OCC1S"}


def ceil_log2(x: int) -> int:
    if x < 1:
        raise ValueError("ceil_log2 needs x >= 1")
    return (x - 1).bit_length()


def label_width(n_inputs: int, n_macros: int = 0) -> int:
    return max(1, ceil_log2(n_inputs + 3 + n_macros))


def output_width(n_vertices: int) -> int:
    return max(1, ceil_log2(n_vertices))


def oc_payload_length(v: int, n_u: int, n_s: int, n_m: int, n_r: int, l_y: int, n: int) -> int:
    """Closed-form OCC1 payload length; used by the search to pick headers."""
    n_in = n_u + n_s + n_m + n_r
    k = -(-n // l_y)
    return (
        gamma_length(v)
        + gamma_length(n_u + 1)
        + gamma_length(n_s + 1)
        + gamma_length(n_m + 1)
        + gamma_length(n_r + 1)
        + gamma_length(l_y)
        + n_s
        + v * v
        + v * label_width(n_in)
        + (n_s + l_y) * output_width(v)
        + gamma_length(n)
        + n_u
        + k * n_m
    )


def cond_payload_length(
    v: int, n_u: int, n_z: int, n_s: int, n_m: int, n_r: int, l_y: int, n: int
) -> int:
    n_in = n_u + n_z + n_s + n_m + n_r
    k = -(-n // l_y)
    return (
        gamma_length(v)
        + gamma_length(n_u + 1)
        + gamma_length(n_s + 1)
        + gamma_length(n_m + 1)
        + gamma_length(n_r + 1)
        + gamma_length(n_z + 1)
        + gamma_length(l_y)
        + n_s
        + v * v
        + v * label_width(n_in)
        + (n_s + l_y) * output_width(v)
        + gamma_length(n)
        + n_u
        + k * n_m
    )


# ---------------------------------------------------------------------------
# circuit block helpers


def _encode_circuit_block(w: BitWriter, c: Circuit, n_macros: int) -> None:
    v = c.n_vertices
    srcs_of = [set(s) for s in c.in_edges]
    for i in range(v):
        for j in range(v):
            w.write_bit(1 if i in srcs_of[j] else 0)
    lw = label_width(c.n_inputs, n_macros)
    for lab in c.labels:
        if lab >= 0:
            value = lab
        elif lab == AND:
            value = c.n_inputs
        elif lab == OR:
            value = c.n_inputs + 1
        elif lab == NOT:
            value = c.n_inputs + 2
        else:
            value = c.n_inputs + 3 + macro_index(lab)
        w.write_bits(value, lw)
    ow = output_width(v)
    for o in c.outputs:
        w.write_bits(o, ow)


def _decode_circuit_block(
    r: BitReader, v: int, n_inputs: int, n_outputs: int, n_macros: int
) -> Circuit:
    """Adjacency + labels + outputs. Raises DecodeError on any malformation."""
    in_edges: list[list[int]] = [[] for _ in range(v)]
    for i in range(v):
        for j in range(v):
            if r.read_bit():
                in_edges[j].append(i)
    lw = label_width(n_inputs, n_macros)
    labels = []
    for _ in range(v):
        value = r.read_bits(lw)
        if value < n_inputs:
            labels.append(value)
        elif value == n_inputs:
            labels.append(AND)
        elif value == n_inputs + 1:
            labels.append(OR)
        elif value == n_inputs + 2:
            labels.append(NOT)
        elif value < n_inputs + 3 + n_macros:
            labels.append(macro_label(value - n_inputs - 3))
        else:
            raise DecodeError("bad_label", f"label value {value} out of range")
    ow = output_width(v)
    outputs = []
    for _ in range(n_outputs):
        o = r.read_bits(ow)
        if o >= v:
            raise DecodeError("bad_output", f"output index {o} >= {v}")
        outputs.append(o)
    return Circuit(n_inputs, tuple(labels), tuple(tuple(s) for s in in_edges), tuple(outputs))


_REASON_MAP = {
    "cycle": "cycle",
    "bad label": "bad_label",
    "bad in-degree": "bad_indegree",
    "output index out of range": "bad_output",
    "edge source out of range": "bad_edge",
    "forward macro reference": "bad_macro",
    "macro used as a gate must have exactly one output": "bad_macro",
}


def _reject_from_reason(reason: str) -> DecodeError:
    code = _REASON_MAP.get(reason.split(": ")[-1], "width_mismatch")
    return DecodeError(code, reason)


# ---------------------------------------------------------------------------
# OCC1


def encode_oc_circuit(c: OcCircuit) -> BitString:
    """OCC1 payload; deterministic, equal machines give equal bits."""
    reason = c.validate()
    if reason is not None:
        raise ValueError(f"refusing to encode invalid machine: {reason}")
    lg = c.logic
    w = BitWriter()
    w.write_bitstring(gamma_encode(lg.circuit.n_vertices))
    w.write_bitstring(gamma_encode(lg.n_u + 1))
    w.write_bitstring(gamma_encode(lg.n_s + 1))
    w.write_bitstring(gamma_encode(lg.n_m + 1))
    w.write_bitstring(gamma_encode(lg.n_r + 1))
    w.write_bitstring(gamma_encode(lg.l_y))
    w.write_bitstring(lg.s1)
    _encode_circuit_block(w, lg.circuit, 0)
    w.write_bitstring(gamma_encode(c.n))
    w.write_bitstring(c.u)
    w.write_bitstring(c.m_vec)
    return w.getvalue()


def decode_oc_circuit(b: BitString) -> OcCircuit:
    """Parse and fully validate an OCC1 payload; rejects never crash."""
    r = BitReader(b)
    try:
        v = gamma_decode(r)
        n_u = gamma_decode(r) - 1
        n_s = gamma_decode(r) - 1
        n_m = gamma_decode(r) - 1
        n_r = gamma_decode(r) - 1
        l_y = gamma_decode(r)
        if n_m > l_y:
            raise DecodeError("nm_exceeds_ly", f"N_m={n_m} > L_y={l_y}")
        s1 = r.read_bitstring(n_s)
        circuit = _decode_circuit_block(r, v, n_u + n_s + n_m + n_r, n_s + l_y, 0)
        n = gamma_decode(r)
        u = r.read_bitstring(n_u)
        k = -(-n // l_y)
        m_vec = r.read_bitstring(k * n_m)
    except (BitOverrunError, MalformedCodeError) as e:
        raise DecodeError("truncated", str(e)) from e
    if not r.at_end():
        raise DecodeError("trailing", f"{r.remaining()} trailing bits")
    mc = OcCircuit(OcLogic(circuit, n_u, n_s, n_m, n_r, l_y, s1), u, n, m_vec)
    reason = mc.validate()
    if reason is not None:
        raise _reject_from_reason(reason)
    return mc


# ---------------------------------------------------------------------------
# OCC1C


def encode_conditional(c: ConditionalOcCircuit) -> BitString:
    reason = c.validate()
    if reason is not None:
        raise ValueError(f"refusing to encode invalid machine: {reason}")
    lg = c.logic
    w = BitWriter()
    w.write_bitstring(gamma_encode(lg.circuit.n_vertices))
    w.write_bitstring(gamma_encode(lg.n_u + 1))
    w.write_bitstring(gamma_encode(lg.n_s + 1))
    w.write_bitstring(gamma_encode(lg.n_m + 1))
    w.write_bitstring(gamma_encode(lg.n_r + 1))
    w.write_bitstring(gamma_encode(lg.n_z + 1))
    w.write_bitstring(gamma_encode(lg.l_y))
    w.write_bitstring(lg.s1)
    _encode_circuit_block(w, lg.circuit, 0)
    w.write_bitstring(gamma_encode(c.n))
    w.write_bitstring(c.u)
    w.write_bitstring(c.m_vec)
    return w.getvalue()


def decode_conditional(b: BitString) -> ConditionalOcCircuit:
    r = BitReader(b)
    try:
        v = gamma_decode(r)
        n_u = gamma_decode(r) - 1
        n_s = gamma_decode(r) - 1
        n_m = gamma_decode(r) - 1
        n_r = gamma_decode(r) - 1
        n_z = gamma_decode(r) - 1
        l_y = gamma_decode(r)
        if n_m > l_y:
            raise DecodeError("nm_exceeds_ly", f"N_m={n_m} > L_y={l_y}")
        s1 = r.read_bitstring(n_s)
        circuit = _decode_circuit_block(
            r, v, n_u + n_z + n_s + n_m + n_r, n_s + l_y, 0
        )
        n = gamma_decode(r)
        u = r.read_bitstring(n_u)
        k = -(-n // l_y)
        m_vec = r.read_bitstring(k * n_m)
    except (BitOverrunError, MalformedCodeError) as e:
        raise DecodeError("truncated", str(e)) from e
    if not r.at_end():
        raise DecodeError("trailing", f"{r.remaining()} trailing bits")
    mc = ConditionalOcCircuit(
        ConditionalOcLogic(circuit, n_u, n_z, n_s, n_m, n_r, l_y, s1), u, n, m_vec
    )
    reason = mc.validate()
    if reason is not None:
        raise _reject_from_reason(reason)
    return mc


# ---------------------------------------------------------------------------
# OCC1S


def encode_structured(s: StructuredOcCircuit) -> BitString:
    reason = s.validate()
    if reason is not None:
        raise ValueError(f"refusing to encode invalid machine: {reason}")
    lg = s.logic
    w = BitWriter()
    w.write_bitstring(gamma_encode(len(s.macros) + 1))
    for k_idx, mac in enumerate(s.macros):
        w.write_bitstring(gamma_encode(mac.arity))
        w.write_bitstring(gamma_encode(mac.body.n_vertices))
        _encode_circuit_block_macro(w, mac.body, k_idx)
    w.write_bitstring(gamma_encode(lg.circuit.n_vertices))
    w.write_bitstring(gamma_encode(lg.n_u + 1))
    w.write_bitstring(gamma_encode(lg.n_s + 1))
    w.write_bitstring(gamma_encode(lg.n_m + 1))
    w.write_bitstring(gamma_encode(lg.n_r + 1))
    w.write_bitstring(gamma_encode(lg.l_y))
    w.write_bitstring(lg.s1)
    _encode_circuit_block(w, lg.circuit, len(s.macros))
    w.write_bitstring(gamma_encode(s.n))
    w.write_bitstring(s.u)
    w.write_bitstring(s.m_vec)
    return w.getvalue()


def _encode_circuit_block_macro(w: BitWriter, body: Circuit, k_idx: int) -> None:
    """Macro block: adjacency, labels, then explicit output count + indices."""
    v = body.n_vertices
    srcs_of = [set(srcs) for srcs in body.in_edges]
    for i in range(v):
        for j in range(v):
            w.write_bit(1 if i in srcs_of[j] else 0)
    lw = label_width(body.n_inputs, k_idx)
    for lab in body.labels:
        if lab >= 0:
            value = lab
        elif lab == AND:
            value = body.n_inputs
        elif lab == OR:
            value = body.n_inputs + 1
        elif lab == NOT:
            value = body.n_inputs + 2
        else:
            value = body.n_inputs + 3 + macro_index(lab)
        w.write_bits(value, lw)
    w.write_bitstring(gamma_encode(len(body.outputs)))
    ow = output_width(v)
    for o in body.outputs:
        w.write_bits(o, ow)


def decode_structured(b: BitString) -> StructuredOcCircuit:
    r = BitReader(b)
    try:
        n_macros = gamma_decode(r) - 1
        macros: list[Macro] = []
        for k_idx in range(n_macros):
            arity = gamma_decode(r)
            v_m = gamma_decode(r)
            in_edges: list[list[int]] = [[] for _ in range(v_m)]
            for i in range(v_m):
                for j in range(v_m):
                    if r.read_bit():
                        in_edges[j].append(i)
            lw = label_width(arity, k_idx)
            labels = []
            for _ in range(v_m):
                value = r.read_bits(lw)
                if value < arity:
                    labels.append(value)
                elif value == arity:
                    labels.append(AND)
                elif value == arity + 1:
                    labels.append(OR)
                elif value == arity + 2:
                    labels.append(NOT)
                elif value < arity + 3 + k_idx:
                    labels.append(macro_label(value - arity - 3))
                else:
                    raise DecodeError("bad_label", f"macro label value {value}")
            n_out = gamma_decode(r)
            ow = output_width(v_m)
            outputs = []
            for _ in range(n_out):
                o = r.read_bits(ow)
                if o >= v_m:
                    raise DecodeError("bad_output", f"macro output index {o}")
                outputs.append(o)
            body = Circuit(
                arity, tuple(labels), tuple(tuple(s) for s in in_edges), tuple(outputs)
            )
            macros.append(Macro(arity, body))
        v = gamma_decode(r)
        n_u = gamma_decode(r) - 1
        n_s = gamma_decode(r) - 1
        n_m = gamma_decode(r) - 1
        n_r = gamma_decode(r) - 1
        l_y = gamma_decode(r)
        if n_m > l_y:
            raise DecodeError("nm_exceeds_ly", f"N_m={n_m} > L_y={l_y}")
        s1 = r.read_bitstring(n_s)
        circuit = _decode_circuit_block(
            r, v, n_u + n_s + n_m + n_r, n_s + l_y, n_macros
        )
        n = gamma_decode(r)
        u = r.read_bitstring(n_u)
        k = -(-n // l_y)
        m_vec = r.read_bitstring(k * n_m)
    except (BitOverrunError, MalformedCodeError) as e:
        raise DecodeError("truncated", str(e)) from e
    if not r.at_end():
        raise DecodeError("trailing", f"{r.remaining()} trailing bits")
    mc = StructuredOcCircuit(
        tuple(macros), OcLogic(circuit, n_u, n_s, n_m, n_r, l_y, s1), u, n, m_vec
    )
    reason = mc.validate()
    if reason is not None:
        raise _reject_from_reason(reason)
    return mc


# ---------------------------------------------------------------------------
# on-disk container


def container_bytes(obj) -> bytes:
    """magic + 8-byte big-endian payload bit-length + zero-padded payload."""
    if isinstance(obj, OcCircuit):
        kind, payload = "oc", encode_oc_circuit(obj)
    elif isinstance(obj, ConditionalOcCircuit):
        kind, payload = "cond", encode_conditional(obj)
    elif isinstance(obj, StructuredOcCircuit):
        kind, payload = "structured", encode_structured(obj)
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")
    nbits = len(payload)
    padded = list(payload) + [0] * (-nbits % 8)
    body = bytearray()
    for i in range(0, len(padded), 8):
        byte = 0
        for bit in padded[i : i + 8]:
            byte = (byte << 1) | bit
        body.append(byte)
    return _MAGICS[kind] + struct.pack(">Q", nbits) + bytes(body)


def from_container_bytes(data: bytes):
    """Inverse of container_bytes; dispatches on the magic tag."""
    if data[:4] != b"OCC1":
        raise ValueError("not an oc-circuit container")
    # the base magic is 4 bytes; the conditional/structured tags add one
    if len(data) > 4 and data[4:5] in (b"C", b"S"):
        kind = "cond" if data[4:5] == b"C" else "structured"
        off = 5
    else:
        kind = "oc"
        off = 4
    if len(data) < off + 8:
        raise ValueError("truncated container header")
    (nbits,) = struct.unpack(">Q", data[off : off + 8])
    body = data[off + 8 :]
    if len(body) != -(-nbits // 8):
        raise ValueError("container length mismatch")
    bits = []
    for byte in body:
        for i in range(7, -1, -1):
            bits.append((byte >> i) & 1)
    payload = BitString(bits[:nbits])
    if any(bits[nbits:]):
        raise ValueError("nonzero container padding")
    if kind == "oc":
        return decode_oc_circuit(payload)
    if kind == "cond":
        return decode_conditional(payload)
    return decode_structured(payload)


def save_circuit(path, obj) -> None:
    with open(path, "wb") as f:
        f.write(container_bytes(obj))


def load_circuit(path):
    with open(path, "rb") as f:
        return from_container_bytes(f.read())


# ---------------------------------------------------------------------------
# JSON form (CLI / debugging; not a measured encoding)

_GATE_NAMES = {AND: "and", OR: "or", NOT: "not"}
_GATE_VALUES = {"and": AND, "or": OR, "not": NOT}


def _circuit_to_obj(c: Circuit) -> dict:
    labs = []
    for lab in c.labels:
        if lab >= 0:
            labs.append(f"in:{lab}")
        elif is_macro_label(lab):
            labs.append(f"macro:{macro_index(lab)}")
        else:
            labs.append(_GATE_NAMES[lab])
    return {
        "n_inputs": c.n_inputs,
        "labels": labs,
        "edges": [list(s) for s in c.in_edges],
        "outputs": list(c.outputs),
    }


def _circuit_from_obj(obj: dict) -> Circuit:
    labels = []
    for lab in obj["labels"]:
        if lab.startswith("in:"):
            labels.append(int(lab[3:]))
        elif lab.startswith("macro:"):
            labels.append(macro_label(int(lab[6:])))
        else:
            labels.append(_GATE_VALUES[lab])
    return Circuit(
        int(obj["n_inputs"]),
        tuple(labels),
        tuple(tuple(int(x) for x in s) for s in obj["edges"]),
        tuple(int(o) for o in obj["outputs"]),
    )


def machine_to_json(obj) -> str:
    if isinstance(obj, OcCircuit):
        lg = obj.logic
        payload = {
            "kind": "oc",
            "n_u": lg.n_u, "n_s": lg.n_s, "n_m": lg.n_m, "n_r": lg.n_r,
            "l_y": lg.l_y, "s1": lg.s1.to01(),
            "circuit": _circuit_to_obj(lg.circuit),
            "u": obj.u.to01(), "n": obj.n, "m": obj.m_vec.to01(),
        }
    elif isinstance(obj, ConditionalOcCircuit):
        lg = obj.logic
        payload = {
            "kind": "cond",
            "n_u": lg.n_u, "n_z": lg.n_z, "n_s": lg.n_s, "n_m": lg.n_m,
            "n_r": lg.n_r, "l_y": lg.l_y, "s1": lg.s1.to01(),
            "circuit": _circuit_to_obj(lg.circuit),
            "u": obj.u.to01(), "n": obj.n, "m": obj.m_vec.to01(),
        }
    elif isinstance(obj, StructuredOcCircuit):
        lg = obj.logic
        payload = {
            "kind": "structured",
            "macros": [
                {"arity": m.arity, "circuit": _circuit_to_obj(m.body)} for m in obj.macros
            ],
            "n_u": lg.n_u, "n_s": lg.n_s, "n_m": lg.n_m, "n_r": lg.n_r,
            "l_y": lg.l_y, "s1": lg.s1.to01(),
            "circuit": _circuit_to_obj(lg.circuit),
            "u": obj.u.to01(), "n": obj.n, "m": obj.m_vec.to01(),
        }
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")
    return json.dumps(payload, sort_keys=True)


def machine_from_json(text: str):
    obj = json.loads(text)
    kind = obj.get("kind", "oc")
    circuit = _circuit_from_obj(obj["circuit"])
    s1 = BitString.from01(obj["s1"])
    u = BitString.from01(obj["u"])
    m = BitString.from01(obj["m"])
    n = int(obj["n"])
    if kind == "oc":
        logic = OcLogic(circuit, obj["n_u"], obj["n_s"], obj["n_m"], obj["n_r"], obj["l_y"], s1)
        return OcCircuit(logic, u, n, m)
    if kind == "cond":
        logic = ConditionalOcLogic(
            circuit, obj["n_u"], obj["n_z"], obj["n_s"], obj["n_m"], obj["n_r"], obj["l_y"], s1
        )
        return ConditionalOcCircuit(logic, u, n, m)
    if kind == "structured":
        macros = tuple(
            Macro(m_["arity"], _circuit_from_obj(m_["circuit"])) for m_ in obj["macros"]
        )
        logic = OcLogic(circuit, obj["n_u"], obj["n_s"], obj["n_m"], obj["n_r"], obj["l_y"], s1)
        return StructuredOcCircuit(macros, logic, u, n, m)
    raise ValueError(f"unknown machine kind {kind!r}")
