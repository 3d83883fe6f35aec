"""Command-line frontend.

Subcommands mirror the library: `oc` for machine-level operations and the
minimal-description search, `em` for state machines, `sem` for the semantic
quantities, and `compare` for the qualitative criteria table. Every report
embeds the codec version and the budgets it was computed under, because the
absolute numbers are codec-relative.

Exit codes: 0 success, 1 domain errors (non-ergodic machine, non-dyadic
exactness, undefined effectiveness, budget), 2 usage or I/O errors.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from fractions import Fraction

from . import fixtures
from .bitio import BitString
from .codec import (
    CODEC_VERSION,
    container_bytes,
    load_circuit,
    machine_from_json,
    machine_to_json,
)
from .dist import FiniteDistribution, shannon_entropy
from .epsmachine import (
    EpsilonMachine,
    compile_machine,
    dyadicize,
    process_distribution,
    stationary,
    statistical_complexity,
)
from .errors import OckitError
from .ocmachine import (
    ConditionalOcCircuit,
    OcCircuit,
    StructuredOcCircuit,
    conditional_distribution,
    expand,
    output_distribution,
    run,
    run_conditional,
)
from .search import SearchBudget, conditional_oc_search, oc_search, soc_search
from .semantics import (
    ChannelMatrix,
    capacity_objective,
    conditional_sa,
    effectiveness,
    sa,
    si,
    ssoc_demo,
)


def _budget(args) -> SearchBudget:
    return SearchBudget(
        max_payload_bits=args.max_bits,
        randomness_budget=args.rand_budget,
        workers=args.workers,
    )


def _budget_echo(b: SearchBudget) -> dict:
    return {
        "max_payload_bits": b.max_payload_bits,
        "randomness_budget": b.randomness_budget,
        "workers": b.workers,
    }


def _payload_hex(bits: BitString) -> str:
    padded = list(bits) + [0] * (-len(bits) % 8)
    out = bytearray()
    for i in range(0, len(padded), 8):
        byte = 0
        for bit in padded[i : i + 8]:
            byte = (byte << 1) | bit
        out.append(byte)
    return out.hex()


def _witness_params(witness) -> dict:
    logic = witness.logic
    params = {
        "v": logic.circuit.n_vertices,
        "n_u": logic.n_u,
        "n_s": logic.n_s,
        "n_m": logic.n_m,
        "n_r": logic.n_r,
        "l_y": logic.l_y,
        "n": witness.n,
    }
    if isinstance(witness, ConditionalOcCircuit):
        params["n_z"] = logic.n_z
    if isinstance(witness, StructuredOcCircuit):
        params["macros"] = len(witness.macros)
    return params


def _search_report(result, budget: SearchBudget, delta: Fraction, n: int) -> dict:
    return {
        "codec": CODEC_VERSION,
        "status": result.status,
        "oc_bits": result.oc_bits,
        "witness_hex": _payload_hex(result.witness_payload),
        "witness_bits": len(result.witness_payload),
        "witness": _witness_params(result.witness),
        "candidates_tested": result.candidates_tested,
        "rejected_by_reason": result.rejected_by_reason,
        "budget": _budget_echo(budget),
        "delta": str(delta),
        "n": n,
    }


def _emit(obj: dict, args) -> None:
    if args.format == "json":
        text = json.dumps(obj, sort_keys=True, indent=2) + "\n"
    else:
        lines = []
        for key, value in sorted(obj.items()):
            if isinstance(value, (dict, list)):
                value = json.dumps(value, sort_keys=True)
            lines.append(f"{key}\t{value}")
        text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w") as f:
            f.write(text)
    else:
        sys.stdout.write(text)


def _read(path: str) -> str:
    with open(path) as f:
        return f.read()


def _load_dist(path: str) -> FiniteDistribution:
    return FiniteDistribution.from_json(_read(path))


def _parse_fraction(text: str) -> Fraction:
    value = Fraction(text)
    if value < 0 or value >= 1:
        raise ValueError(f"delta must be in [0,1), got {text}")
    return value


# ---------------------------------------------------------------------------
# oc subcommands


def cmd_oc_search(args) -> int:
    x = _load_dist(args.dist)
    delta = _parse_fraction(args.delta)
    result = oc_search(x, delta, _budget(args))
    _emit(_search_report(result, _budget(args), delta, x.n), args)
    return 0


def cmd_oc_soc_search(args) -> int:
    x = _load_dist(args.dist)
    delta = _parse_fraction(args.delta)
    result = soc_search(x, delta, _budget(args))
    _emit(_search_report(result, _budget(args), delta, x.n), args)
    return 0


def cmd_oc_encode(args) -> int:
    machine = machine_from_json(_read(args.machine))
    data = container_bytes(machine)
    with open(args.out, "wb") as f:
        f.write(data)
    sys.stdout.write(f"wrote {args.out} ({len(data)} bytes)\n")
    return 0


def cmd_oc_decode(args) -> int:
    machine = load_circuit(args.circuit)
    if args.text:
        logic = machine.logic
        sys.stdout.write(logic.circuit.debug_text() + "\n")
    else:
        sys.stdout.write(machine_to_json(machine) + "\n")
    return 0


def cmd_oc_eval(args) -> int:
    machine = load_circuit(args.circuit)
    if isinstance(machine, StructuredOcCircuit):
        machine = expand(machine)
    if args.distribution:
        if isinstance(machine, ConditionalOcCircuit):
            z = BitString.from01(args.z or "")
            dist = conditional_distribution(machine, z, args.rand_budget)
        else:
            dist = output_distribution(machine, args.rand_budget)
        _emit(json.loads(dist.to_json()), args)
        return 0
    if isinstance(machine, ConditionalOcCircuit):
        z = BitString.from01(args.z or "")
        r = BitString.from01(args.rand or "")
        out = run_conditional(machine.logic, machine.u, machine.n, machine.m_vec, z, r)
    else:
        out = run(machine, BitString.from01(args.rand or ""))
    sys.stdout.write(out.to01() + "\n")
    return 0


# ---------------------------------------------------------------------------
# em subcommands


def cmd_em_stationary(args) -> int:
    machine = EpsilonMachine.from_json(_read(args.machine))
    pi = stationary(machine)
    _emit({"stationary": [str(p) for p in pi]}, args)
    return 0


def cmd_em_complexity(args) -> int:
    machine = EpsilonMachine.from_json(_read(args.machine))
    alpha = math.inf if args.alpha in ("inf", "infinity") else Fraction(args.alpha)
    value = statistical_complexity(machine, alpha)
    _emit({"alpha": args.alpha, "complexity_bits": value}, args)
    return 0


def cmd_em_process(args) -> int:
    machine = EpsilonMachine.from_json(_read(args.machine))
    dist = process_distribution(machine, args.steps, args.rand_budget)
    _emit(json.loads(dist.to_json()), args)
    return 0


def cmd_em_compile(args) -> int:
    machine = EpsilonMachine.from_json(_read(args.machine))
    if args.dyadicize is not None:
        machine = dyadicize(machine, Fraction(args.dyadicize))
    compiled = compile_machine(machine, args.n)
    data = container_bytes(compiled)
    with open(args.out, "wb") as f:
        f.write(data)
    sys.stdout.write(f"wrote {args.out} ({len(data)} bytes)\n")
    return 0


# ---------------------------------------------------------------------------
# sem subcommands


def _semantic_report(rep) -> dict:
    out = {
        "codec": rep.codec_version,
        "sa_bits": rep.sa_bits,
        "status": rep.status,
        "provisional": rep.provisional,
        "oc_bits": rep.oc_bits,
        "witness": {
            "n_m": rep.n_m, "l_y": rep.l_y, "n_u": rep.n_u,
            "n_s": rep.n_s, "n_r": rep.n_r,
        },
        "n": rep.n,
    }
    if rep.n_z is not None:
        out["witness"]["n_z"] = rep.n_z
    return out


def cmd_sem_sa(args) -> int:
    x = _load_dist(args.dist)
    rep = sa(x, _parse_fraction(args.delta), _budget(args))
    out = _semantic_report(rep)
    out["budget"] = _budget_echo(_budget(args))
    _emit(out, args)
    return 0


def cmd_sem_csa(args) -> int:
    x = _load_dist(args.dist)
    z = _load_dist(args.cond)
    rep = conditional_sa(x, z, _parse_fraction(args.delta), _budget(args))
    out = _semantic_report(rep)
    out["budget"] = _budget_echo(_budget(args))
    _emit(out, args)
    return 0


def cmd_sem_si(args) -> int:
    x = _load_dist(args.dist)
    z = _load_dist(args.cond)
    rep = si(x, z, _parse_fraction(args.delta), _budget(args))
    _emit(
        {
            "codec": CODEC_VERSION,
            "si_bits": rep.si_bits,
            "provisional": rep.provisional,
            "sa": _semantic_report(rep.unconditional),
            "conditional_sa": _semantic_report(rep.conditional),
            "budget": _budget_echo(_budget(args)),
        },
        args,
    )
    return 0


def cmd_sem_eff(args) -> int:
    x = _load_dist(args.dist)
    z = _load_dist(args.cond)
    value, rep = effectiveness(x, z, _parse_fraction(args.delta), _budget(args))
    _emit(
        {
            "codec": CODEC_VERSION,
            "effectiveness": str(value),
            "si_bits": rep.si_bits,
            "sa_bits": rep.unconditional.sa_bits,
            "provisional": rep.provisional,
            "budget": _budget_echo(_budget(args)),
        },
        args,
    )
    return 0


def cmd_sem_ssoc_demo(args) -> int:
    machine = load_circuit(args.circuit)
    if not isinstance(machine, OcCircuit):
        raise ValueError("ssoc-demo expects a plain machine container")
    budget = _budget(args) if args.with_sa else None
    rep = ssoc_demo(machine, _parse_fraction(args.delta), budget, args.rand_budget)
    out = {
        "codec": rep.codec_version,
        "code_len": rep.code_len,
        "reconstruction_distance": str(rep.reconstruction_distance),
        "exact_reconstruction": rep.exact_reconstruction,
    }
    if rep.sa_report is not None:
        out["sa"] = _semantic_report(rep.sa_report)
        out["sa_within_code_len"] = rep.sa_within_code_len
    _emit(out, args)
    return 0


def cmd_sem_capacity(args) -> int:
    machine = load_circuit(args.circuit)
    if not isinstance(machine, OcCircuit):
        raise ValueError("capacity expects a plain machine container")
    channel = ChannelMatrix.from_json(_read(args.channel))
    cand_obj = json.loads(_read(args.candidates))
    candidates = [
        FiniteDistribution.from_json(json.dumps(entry)) for entry in cand_obj
    ]
    rep = capacity_objective(
        machine.logic, machine.u, machine.n, candidates, channel,
        _parse_fraction(args.delta), _budget(args), args.rand_budget,
    )
    _emit(
        {
            "codec": rep.codec_version,
            "n": rep.n,
            "best_objective": rep.best_objective,
            "best_index": rep.best_index,
            "per_candidate": [
                {
                    "entropy_bits": c.entropy_bits,
                    "expected_conditional_sa": str(c.expected_conditional_sa),
                    "objective": c.objective,
                    "provisional": c.provisional,
                }
                for c in rep.per_candidate
            ],
            "budget": _budget_echo(_budget(args)),
        },
        args,
    )
    return 0


# ---------------------------------------------------------------------------
# compare


def _compare_row(spec: str, delta: Fraction, args) -> dict:
    """One table row from a source token: ones:N, coin:N, pass:BITS,
    dist:PATH[,machine=PATH]."""
    kind, _, rest = spec.partition(":")
    machine = None
    x = None
    fixture_len = None
    if kind == "ones":
        n = int(rest)
        fixture_len = len_of(fixtures.ones(n))
        machine = fixtures.constant_ones_machine()
        if n <= args.search_max_n:
            x = FiniteDistribution.point(BitString([1] * n))
        label = f"ones:{n}"
    elif kind == "coin":
        n = int(rest)
        fixture_len = len_of(fixtures.coin(n))
        machine = fixtures.uniform_iid_machine()
        if n <= args.search_max_n and n <= 12:
            x = FiniteDistribution.uniform(n)
        label = f"coin:{n}"
    elif kind == "pass":
        n = len(rest)
        fixture_len = len_of(fixtures.pass_semantics(rest))
        if n <= args.search_max_n:
            x = FiniteDistribution.point(BitString.from01(rest))
        label = f"pass:{rest}"
    elif kind == "dist":
        path, _, mpath = rest.partition(",machine=")
        x = _load_dist(path)
        n = x.n
        if mpath:
            machine = EpsilonMachine.from_json(_read(mpath))
        label = spec
    else:
        raise ValueError(f"unknown compare source {spec!r}")

    row = {"source": label, "n": n, "delta": str(delta)}
    if x is not None:
        result = oc_search(x, delta, _budget(args))
        logic = result.witness.logic
        row["oc_bits"] = result.oc_bits
        row["oc_status"] = result.status
        row["sa_bits"] = -(-n * logic.n_m // logic.l_y)
        row["h1_bits"] = shannon_entropy(x)
    else:
        row["oc_bits"] = fixture_len
        row["oc_status"] = "fixture_upper_bound"
    if machine is not None:
        try:
            row["c1_bits"] = statistical_complexity(machine, 1)
        except OckitError:
            row["c1_bits"] = None
    return row


def len_of(machine: OcCircuit) -> int:
    from .codec import encode_oc_circuit

    return len(encode_oc_circuit(machine))


def cmd_compare(args) -> int:
    delta = _parse_fraction(args.delta)
    rows = [_compare_row(spec, delta, args) for spec in args.sources]
    if args.format == "tsv":
        cols = ["source", "n", "oc_bits", "oc_status", "sa_bits", "h1_bits", "c1_bits"]
        lines = ["\t".join(cols)]
        for row in rows:
            lines.append("\t".join(str(row.get(c, "")) for c in cols))
        text = "\n".join(lines) + "\n"
        if args.out:
            with open(args.out, "w") as f:
                f.write(text)
        else:
            sys.stdout.write(text)
    else:
        _emit({"codec": CODEC_VERSION, "rows": rows, "budget": _budget_echo(_budget(args))}, args)
    return 0


# ---------------------------------------------------------------------------
# wiring


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--max-bits", type=int, default=28, help="payload-length search cap")
    p.add_argument("--rand-budget", type=int, default=20, help="max K*N_r enumerated")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--format", choices=("json", "tsv"), default="json")
    p.add_argument("--out", default=None, help="write the report here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    root = argparse.ArgumentParser(prog="occkit", description=__doc__)
    top = root.add_subparsers(dest="group", required=True)

    oc = top.add_parser("oc", help="machines, codec, search").add_subparsers(
        dest="cmd", required=True
    )
    p = oc.add_parser("search", help="minimal machine for a distribution")
    p.add_argument("--dist", required=True)
    p.add_argument("--delta", required=True)
    _add_common(p)
    p.set_defaults(fn=cmd_oc_search)
    p = oc.add_parser("soc-search", help="minimal structured machine")
    p.add_argument("--dist", required=True)
    p.add_argument("--delta", required=True)
    _add_common(p)
    p.set_defaults(fn=cmd_oc_soc_search)
    p = oc.add_parser("encode", help="machine JSON -> container file")
    p.add_argument("--machine", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_oc_encode)
    p = oc.add_parser("decode", help="container file -> machine JSON")
    p.add_argument("--circuit", required=True)
    p.add_argument("--text", action="store_true", help="debug listing instead of JSON")
    p.set_defaults(fn=cmd_oc_decode)
    p = oc.add_parser("eval", help="run a machine on given random bits")
    p.add_argument("--circuit", required=True)
    p.add_argument("--rand", default="")
    p.add_argument("--z", default="", help="condition bits for conditional machines")
    p.add_argument("--distribution", action="store_true", help="print the exact output distribution")
    p.add_argument("--rand-budget", type=int, default=20)
    p.add_argument("--format", choices=("json", "tsv"), default="json")
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_oc_eval)

    em = top.add_parser("em", help="state machines").add_subparsers(dest="cmd", required=True)
    p = em.add_parser("stationary")
    p.add_argument("--machine", required=True)
    p.add_argument("--format", choices=("json", "tsv"), default="json")
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_em_stationary)
    p = em.add_parser("complexity")
    p.add_argument("--machine", required=True)
    p.add_argument("--alpha", default="1")
    p.add_argument("--format", choices=("json", "tsv"), default="json")
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_em_complexity)
    p = em.add_parser("process")
    p.add_argument("--machine", required=True)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--rand-budget", type=int, default=20)
    p.add_argument("--format", choices=("json", "tsv"), default="json")
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_em_process)
    p = em.add_parser("compile")
    p.add_argument("--machine", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--dyadicize", default=None, metavar="P/Q",
                   help="round transition rows to dyadic within this distance first")
    p.set_defaults(fn=cmd_em_compile)

    sem = top.add_parser("sem", help="semantic measures").add_subparsers(
        dest="cmd", required=True
    )
    p = sem.add_parser("sa")
    p.add_argument("--dist", required=True)
    p.add_argument("--delta", required=True)
    _add_common(p)
    p.set_defaults(fn=cmd_sem_sa)
    p = sem.add_parser("csa")
    p.add_argument("--dist", required=True)
    p.add_argument("--cond", required=True)
    p.add_argument("--delta", required=True)
    _add_common(p)
    p.set_defaults(fn=cmd_sem_csa)
    p = sem.add_parser("si")
    p.add_argument("--dist", required=True)
    p.add_argument("--cond", required=True)
    p.add_argument("--delta", required=True)
    _add_common(p)
    p.set_defaults(fn=cmd_sem_si)
    p = sem.add_parser("eff")
    p.add_argument("--dist", required=True)
    p.add_argument("--cond", required=True)
    p.add_argument("--delta", required=True)
    _add_common(p)
    p.set_defaults(fn=cmd_sem_eff)
    p = sem.add_parser("ssoc-demo")
    p.add_argument("--circuit", required=True)
    p.add_argument("--delta", required=True)
    p.add_argument("--with-sa", action="store_true", help="also search for SA and check the bracket")
    _add_common(p)
    p.set_defaults(fn=cmd_sem_ssoc_demo)
    p = sem.add_parser("capacity")
    p.add_argument("--circuit", required=True)
    p.add_argument("--channel", required=True)
    p.add_argument("--candidates", required=True, help="JSON list of message distributions")
    p.add_argument("--delta", required=True)
    _add_common(p)
    p.set_defaults(fn=cmd_sem_capacity)

    p = top.add_parser("compare", help="qualitative criteria table")
    p.add_argument("sources", nargs="+", help="ones:N coin:N pass:BITS dist:PATH[,machine=PATH]")
    p.add_argument("--delta", default="0")
    p.add_argument("--search-max-n", type=int, default=8)
    _add_common(p)
    p.set_defaults(fn=cmd_compare)

    return root


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except OckitError as e:
        sys.stderr.write(f"error: {type(e).__name__}: {e}\n")
        return 1
    except (OSError, ValueError, KeyError, json.JSONDecodeError) as e:
        sys.stderr.write(f"usage error: {e}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
