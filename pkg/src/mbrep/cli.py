"""``mbrep`` command line entry point.

Every JSON document has the shape ``{"schema", "config", "result"}``; CSV
output starts with one ``# schema=... config=...`` comment line followed by
a header row. Exit codes: 0 success, 1 other errors, 2 invalid input
(including a precision too low for the request),
3 budget or resource cap exceeded, 64 usage errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import importlib.resources
import json
import os
import sys
from typing import Callable

from . import commsim, diophantine, enumeration, expbench, greedy, minweight, numsys
from .errors import BudgetExceededError, MbrepError, PrecisionError, ResourceLimitError, ValidationError

SCHEMA_VERSION = 1
EXIT_USAGE = 64
DEFAULT_SYSTEM = numsys.BaseSystem((2, 3), (0, 1))


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def load_schema(command: str) -> dict:
    """The published JSON schema for one subcommand's output."""
    text = importlib.resources.files("mbrep").joinpath("schemas", f"{command}.json").read_text()
    return json.loads(text)


def _range(text: str) -> tuple[int, int]:
    try:
        a, b = text.split(":")
        return int(float(a)), int(float(b))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a:b, got {text!r}") from None


def _int(text: str) -> int:
    # accepts 1e6 and 2**20 style shorthands
    try:
        if "**" in text:
            base, exp = text.split("**")
            return int(base) ** int(exp)
        return int(text) if text.lstrip("-").isdigit() else int(float(text))
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None


def _load(args) -> tuple[numsys.BaseSystem, str | None]:
    path = args.config or os.environ.get("MBREP_CONFIG")
    if path:
        return numsys.load_system(path), path
    return DEFAULT_SYSTEM, None


class Output:
    def __init__(self, command: str, config: dict, fmt: str):
        self.schema = f"mbrep.{command}/{SCHEMA_VERSION}"
        self.config = config
        self.fmt = fmt

    def json(self, result) -> str:
        doc = {"schema": self.schema, "config": self.config, "result": result}
        return json.dumps(doc, indent=2) + "\n"

    def csv(self, header: list[str], rows) -> str:
        buf = io.StringIO()
        buf.write(f"# schema={self.schema} config={json.dumps(self.config, sort_keys=True)}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow(["" if v is None else v for v in row])
        return buf.getvalue()

    def emit(self, result, header: list[str] | None = None, rows=None) -> str:
        if self.fmt == "csv":
            if header is None:
                raise ValidationError("this command has no CSV form")
            return self.csv(header, rows)
        return self.json(result)


def _config(args, system, path, **extra) -> dict:
    cfg = {"system": system.to_config(), "config_path": path}
    cfg.update(extra)
    return cfg


def cmd_validate(args, system, path) -> str:
    out = Output("validate", _config(args, system, path, limit=args.limit), args.emit)
    return out.emit(numsys.validate_system(system, args.limit).to_json())


def cmd_enumerate(args, system, path) -> str:
    mono = enumeration.enumerate_power_products(system, args.bound)
    out = Output("enumerate", _config(args, system, path, bound=args.bound), args.emit)
    result = {
        "bound": args.bound,
        "t_bound": mono.t_bound,
        "count": len(mono),
        "elements": [{"B": pp.value, "exponents": list(pp.exponents)} for pp in mono.elements],
    }
    rows = ([pp.value, *pp.exponents] for pp in mono.elements)
    header = ["B"] + [f"exp_{b}" for b in system.bases]
    return out.emit(result, header, rows)


def cmd_encode(args, system, path) -> str:
    cfg = _config(args, system, path, algo=args.algo, n=args.n)
    if args.algo == "greedy":
        res = greedy.greedy_encode(system, args.n)
    else:
        cfg["table_limit"] = args.table_limit
        table = greedy.build_table(system, args.table_limit)
        res = greedy.greedy_encode_with_table(system, args.n, table)
    result = {
        "algo": args.algo,
        "representation": res.representation.to_json(),
        "text": str(res.representation),
        "steps": res.steps,
        "used_table": res.used_table,
        "collisions": list(res.collisions),
    }
    return Output("encode", cfg, args.emit).emit(result)


def cmd_profile(args, system, path) -> str:
    prof = greedy.greedy_profile(system, args.n_from, args.to)
    out = Output("profile", _config(args, system, path, n_from=args.n_from, n_to=args.to), args.emit)
    if args.emit == "csv":
        return out.csv(["n", "steps", "weight", "normalized"], prof.rows())
    n_star, norm = prof.max_normalized() if args.to >= 3 else (None, None)
    result = {
        "max_steps": prof.max_steps(),
        "records": [list(r) for r in prof.records],
        "max_normalized": norm,
        "argmax_normalized": n_star,
        "errors": {str(k): v for k, v in prof.errors.items()},
        "roundtrip_failures": prof.roundtrip_failures,
    }
    return out.json(result)


def cmd_minweight(args, system, path) -> str:
    res = minweight.minimal_weight_exact(system, args.n, args.budget)
    cfg = _config(args, system, path, n=args.n, budget=args.budget)
    result = {
        "n": args.n,
        "weight": res.weight,
        "lower_bound": res.lower_bound,
        "representation": res.representation.to_json(),
        "text": str(res.representation),
    }
    return Output("minweight", cfg, args.emit).emit(result)


def cmd_records(args, system, path) -> str:
    prof = minweight.weight_profile(system, args.to)
    out = Output("records", _config(args, system, path, to=args.to), args.emit)
    rows = [(n, w, greedy.normalized(w, n) if n >= 3 else None) for n, w in prof.records]
    result = {
        "limit": args.to,
        "records": [{"n": n, "weight": w, "normalized": z} for n, w, z in rows],
        "max_weight": prof.max_weight(),
        "unrepresentable_count": len(prof.unrepresentable()),
    }
    return out.emit(result, ["n", "weight", "normalized"], rows)


def cmd_bounds(args, system, path) -> str:
    chk = minweight.counting_check(system, args.N, args.K)
    cfg = _config(args, system, path, N=args.N, K=args.K)
    result = chk.to_json()
    if chk.forces_heavier:
        result["conclusion"] = (
            f"({chk.digit_count - 1}*{chk.t_bound})^{chk.K} = {chk.crude_bound} < {chk.dyadic_count}: "
            f"some n in ({chk.N // 2}, {chk.N}] has minimal weight > {chk.K}"
        )
    else:
        result["conclusion"] = "bound too weak to force a heavier integer"
    return Output("bounds", cfg, args.emit).emit(result)


def _policy(args) -> diophantine.PrecisionPolicy:
    return diophantine.PrecisionPolicy(args.bits, args.tolerance)


def cmd_gaps(args, system, path) -> str:
    policy = _policy(args)
    lam = diophantine.log_ratio(args.p, args.q, policy)
    seq = diophantine.gap_stats(lam, args.M, policy)
    cfg = _config(args, system, path, p=args.p, q=args.q, M=args.M, mantissa_bits=args.bits, tolerance=args.tolerance)
    counts = {g: 0 for g in seq.distinct_gaps}
    for g in seq.gaps:
        counts[min(seq.distinct_gaps, key=lambda c: abs(c - g))] += 1
    rows = [(g / seq.unit, counts[g]) for g in seq.distinct_gaps]
    result = {
        "lambda": str(lam),
        "M": args.M,
        "distinct_gaps": [{"length": length, "count": c} for length, c in rows],
        "max_gap": seq.max_gap,
        "three_gap_ok": seq.three_gap_ok,
    }
    return Output("gaps", cfg, args.emit).emit(result, ["length", "count"], rows)


def cmd_lemma_fit(args, system, path) -> str:
    fit = diophantine.fit_lemma_constants(
        args.p, args.q, args.fit, args.validate, samples=args.samples, seed=args.seed
    )
    cfg = _config(
        args, system, path, p=args.p, q=args.q, fit=list(args.fit), validate=list(args.validate),
        samples=args.samples, seed=args.seed,
    )
    out = Output("lemma-fit", cfg, args.emit)
    rows = [(c["kappa"], c["C"], c["violations"], c["max_violation"]) for c in fit.candidates]
    return out.emit(fit.to_json(), ["kappa", "C", "violations", "max_violation"], rows)


def cmd_commsim(args, system, path) -> str:
    cfg = _config(
        args, system, path, l=args.l, samples=args.samples, seed=args.seed, chunk=args.chunk, encoder=args.encoder
    )
    codec = commsim.SummandCodec(system, args.l)
    records = []
    for i in range(args.samples):
        rng = commsim.sample_rng(args.seed, args.l, i)
        a = rng.getrandbits(args.l)
        b = a if i % 2 == 0 else rng.getrandbits(args.l)
        tr = commsim.run_equality_protocol(system, a, b, args.l, args.chunk, args.encoder)
        records.append((i, a, b, tr.decision, tr.bits_sent, len(tr.chunks), tr.decision == ("equal" if a == b else "not-equal")))
    result = {
        "codec": {
            "header_bits": codec.header_bits,
            "digit_field_bits": codec.digit_field_bits,
            "exponent_field_bits": list(codec.exponent_field_bits),
            "record_bits": codec.record_bits,
        },
        "all_correct": all(r[-1] for r in records),
        "mean_bits_sent": sum(r[4] for r in records) / len(records) if records else 0.0,
        "transcripts": [
            {"index": i, "m_alice": a, "m_bob": b, "decision": d, "bits_sent": s, "chunks": c, "correct": ok}
            for i, a, b, d, s, c, ok in records
        ],
    }
    header = ["index", "m_alice", "m_bob", "decision", "bits_sent", "chunks", "correct"]
    return Output("commsim", cfg, args.emit).emit(result, header, records)


def cmd_expbench(args, system, path) -> str:
    rows = expbench.count_comparison(system, args.samples, args.bits, args.seed, args.encoder)
    cfg = _config(args, system, path, bits=args.bits, samples=args.samples, seed=args.seed, encoder=args.encoder)
    cfg["counting"] = expbench.COUNTING
    table = [(r.n, r.binary, r.multibase, r.weight, round(r.ratio, 6), r.agree) for r in rows]
    result = {
        "summary": expbench.summarize(rows),
        "rows": [
            {"n": n, "binary": a, "multibase": b, "weight": w, "ratio": z, "agree": ok}
            for n, a, b, w, z, ok in table
        ],
    }
    return Output("expbench", cfg, args.emit).emit(result, ["n", "binary", "multibase", "weight", "ratio", "agree"], table)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="base system file (default: $MBREP_CONFIG, else bases 2,3 digits 0,1)")
    common.add_argument("--emit", "--format", dest="emit", choices=("json", "csv"), default="json")

    parser = _Parser(prog="mbrep", description="Multi-base representation toolkit.")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    def add(name: str, func: Callable, help: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, parents=[common], help=help)
        p.set_defaults(func=func)
        return p

    p = add("validate", cmd_validate, "check independence and representability")
    p.add_argument("--limit", type=_int, default=1000)

    p = add("enumerate", cmd_enumerate, "list power-products up to a bound")
    p.add_argument("--bound", type=_int, required=True)

    p = add("encode", cmd_encode, "greedy encoding of n")
    p.add_argument("--algo", choices=("greedy", "greedy-table"), default="greedy")
    p.add_argument("-n", type=_int, required=True)
    p.add_argument("--table-limit", type=_int, default=greedy.DEFAULT_TABLE_LIMIT)

    p = add("profile", cmd_profile, "greedy step counts over a range")
    p.add_argument("--from", dest="n_from", type=_int, default=1)
    p.add_argument("--to", type=_int, required=True)

    p = add("minweight", cmd_minweight, "exact minimal-weight representation of n")
    p.add_argument("-n", type=_int, required=True)
    p.add_argument("--budget", type=_int, default=None)

    p = add("records", cmd_records, "minimal-weight records up to N")
    p.add_argument("--to", type=_int, required=True)

    p = add("bounds", cmd_bounds, "counting bound check")
    p.add_argument("--N", dest="N", type=_int, required=True)
    p.add_argument("--K", dest="K", type=_int, required=True)

    for name, func, helptext in (
        ("gaps", cmd_gaps, "gap structure of frac(m log_p q)"),
        ("lemma-fit", cmd_lemma_fit, "fit the nearest-below constants"),
    ):
        p = add(name, func, helptext)
        p.add_argument("--p", type=_int, default=2)
        p.add_argument("--q", type=_int, default=3)
        p.add_argument("--bits", type=_int, default=256)
        p.add_argument("--tolerance", type=float, default=1e-12)
        if name == "gaps":
            p.add_argument("--M", dest="M", type=_int, required=True)
        else:
            p.add_argument("--fit", type=_range, default=(1000, 10**4))
            p.add_argument("--validate", type=_range, default=(10**4 + 1, 10**6))
            p.add_argument("--samples", type=_int, default=10_000)
            p.add_argument("--seed", type=_int, default=0)

    p = add("commsim", cmd_commsim, "simulate the equality protocol")
    p.add_argument("--l", dest="l", type=_int, default=64)
    p.add_argument("--samples", type=_int, default=100)
    p.add_argument("--seed", type=_int, default=42)
    p.add_argument("--chunk", type=_int, default=8)
    p.add_argument("--encoder", choices=commsim.ENCODERS, default="greedy")

    p = add("expbench", cmd_expbench, "compare multiplication counts")
    p.add_argument("--bits", type=_int, default=256)
    p.add_argument("--samples", type=_int, default=100)
    p.add_argument("--seed", type=_int, default=7)
    p.add_argument("--encoder", choices=commsim.ENCODERS, default="greedy")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    try:
        system, path = _load(args)
        text = args.func(args, system, path)
    except (ValidationError, PrecisionError) as exc:
        print(f"mbrep: invalid input: {exc}", file=sys.stderr)
        return 2
    except (BudgetExceededError, ResourceLimitError) as exc:
        print(f"mbrep: {exc}", file=sys.stderr)
        return 3
    except MbrepError as exc:
        print(f"mbrep: {exc}", file=sys.stderr)
        return 1
    sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
