"""Command-line front end: evolutions, rule checks, the gallery and codec utilities.

All outputs are canonical JSON (sorted keys, fixed separators, sorted terms),
so equal inputs give byte-identical files.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Any, Sequence

from .classical_ca import ClassicalRule, config_index, config_unindex, step as classical_step
from .codec import (
    IndexTooLarge,
    coord_index,
    coord_unindex,
    index_to_json,
    pair,
    seq_decode,
    seq_encode,
    unpair,
)
from .errors import ContractViolation, DomainError
from .field import FieldSpec, zeta8
from .fock import StateVector, inner, vector_index, vector_unindex
from .gallery import DEMOS, Oracle
from .lattice import Configuration
from .qca import DoubledState, QCARule, check_causality, measure_cell, qca_step, verify_rule

__all__ = ["RunManifest", "InputError", "run", "trace_diff", "main", "canonical_json", "DEFAULT_INDEX_DIGITS"]

DEFAULT_INDEX_DIGITS = 10**6
EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_CONTRACT = 0, 1, 2, 3


class InputError(Exception):
    """An input file that does not parse or has the wrong shape."""


def canonical_json(doc: Any) -> str:
    return json.dumps(doc, sort_keys=True, separators=(",", ":"), ensure_ascii=False) + "\n"


def _read_json(path: str | Path) -> Any:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"{path}: cannot read: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None


def _shape_error(path, exc: Exception) -> InputError:
    return InputError(f"{path}: malformed document: {exc}")


def _write(doc: Any, out: str | None) -> None:
    text = canonical_json(doc)
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _index_entry(compute, max_digits: int | None) -> str | dict:
    """Decimal index, a digest past ``max_digits``, or an omission marker when too large to build."""
    max_bits = None if max_digits is None else int(max_digits * 3.33) + 64
    try:
        k = compute(max_bits)
    except IndexTooLarge as exc:
        return {"omitted": True, "reason": str(exc)}
    return index_to_json(k, max_digits)


# -- loaders --------------------------------------------------------------------


def load_field(path: str | None) -> FieldSpec:
    if path is None:
        return zeta8()
    doc = _read_json(path)
    try:
        return FieldSpec.from_json(doc, name=Path(path).stem)
    except DomainError as exc:
        raise _shape_error(path, exc) from None


def load_classical_rule(path: str) -> ClassicalRule:
    doc = _read_json(path)
    try:
        return ClassicalRule.from_json(doc)
    except (KeyError, TypeError, ValueError) as exc:
        raise _shape_error(path, exc) from None


def load_quantum_rule(path: str, field: FieldSpec) -> QCARule:
    doc = _read_json(path)
    try:
        return QCARule.from_json(doc, field)
    except (KeyError, TypeError, ValueError) as exc:
        raise _shape_error(path, exc) from None


def load_config(path: str, dim: int | None) -> Configuration:
    """A configuration file: ``{"dim": d, "config": [[coord, symbol], ...]}`` or the bare list."""
    doc = _read_json(path)
    try:
        if isinstance(doc, dict):
            dim = doc.get("dim", dim)
            doc = doc["config"]
        if dim is None:
            dim = len(doc[0][0]) if doc else 1
        return Configuration.from_json(doc, dim)
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise _shape_error(path, exc) from None


def load_state(path: str, field: FieldSpec, n: int, dim: int | None) -> StateVector:
    """A state file: ``{"dim": d, "terms": [{"config": ..., "coeff": [...]}, ...]}`` or the bare term list."""
    doc = _read_json(path)
    try:
        if isinstance(doc, dict):
            dim = doc.get("dim", dim)
            n = doc.get("n", n)
            doc = doc["terms"]
        if dim is None:
            dim = len(doc[0]["config"][0][0]) if doc and doc[0]["config"] else 1
        return StateVector.from_json(doc, field, n, dim)
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise _shape_error(path, exc) from None


# -- runs -----------------------------------------------------------------------


def classical_trace(rule: ClassicalRule, cfg: Configuration, steps: int, max_digits: int | None) -> dict:
    out = []
    for t in range(steps + 1):
        if t:
            cfg = classical_step(cfg, rule)
        entry = {
            "t": t,
            "config": cfg.to_json(),
            "config_index": _index_entry(lambda b, c=cfg: config_index(c, max_bits=b), max_digits),
        }
        out.append(entry)
    return {"mode": "classical", "dim": cfg.dim, "rule": rule.to_json(), "steps": out}


def quantum_trace(rule: QCARule, v: StateVector, steps: int, max_digits: int | None) -> dict:
    psi = DoubledState.from_primary(v)
    out = []
    for t in range(steps + 1):
        if t:
            psi = qca_step(psi, rule)
        prim = psi.primary()
        entry = {
            "t": t,
            "state": prim.to_json(),
            "vector_index": _index_entry(lambda b, p=prim: vector_index(p, max_bits=b), max_digits),
            "norm_sq": inner(prim, prim).to_json(),
        }
        out.append(entry)
    return {"mode": "quantum", "dim": rule.dim, "n": rule.n, "steps": out}


def verify_report(rule: QCARule, causality_trials: int, seed: int) -> dict:
    report = verify_rule(rule).to_json()
    if causality_trials and report["ok"]:
        report["causality"] = check_causality(rule, trials=causality_trials, seed=seed).to_json()
        report["ok"] = report["causality"]["failed"] == 0
    return report


def run_demo(name: str, params: dict) -> dict:
    if name not in DEMOS:
        raise InputError(f"unknown demo {name!r}; choose from {', '.join(sorted(DEMOS))}")
    params = dict(params)
    if name == "scalar-extraction":
        u = Fraction(str(params.pop("u", "3/5")))
        return DEMOS[name](u, **params).to_json()
    oracle = Oracle.parse(params.pop("oracle", "primality"))
    return DEMOS[name](oracle, **params).to_json()


@dataclass
class RunManifest:
    """A batch run description; relative paths resolve against ``base``."""

    mode: str
    rule_path: str | None = None
    state_path: str | None = None
    steps: int = 0
    seed: int = 0
    output_path: str | None = None
    field_path: str | None = None
    demo: str | None = None
    params: dict | None = None
    dim: int | None = None
    index_digits: int | None = DEFAULT_INDEX_DIGITS
    causality_trials: int = 0
    base: str = "."

    MODES = ("classical", "quantum", "gallery", "verify")

    def __post_init__(self):
        if self.mode not in self.MODES:
            raise InputError(f"manifest mode must be one of {', '.join(self.MODES)}, got {self.mode!r}")
        if not isinstance(self.steps, int) or self.steps < 0:
            raise InputError("manifest steps must be a natural number")
        needed = {"classical": ("rule_path", "state_path"), "quantum": ("rule_path", "state_path"), "verify": ("rule_path",), "gallery": ("demo",)}
        for key in needed[self.mode]:
            if getattr(self, key) is None:
                raise InputError(f"manifest mode {self.mode} needs {key}")

    @classmethod
    def load(cls, path: str) -> "RunManifest":
        doc = _read_json(path)
        if not isinstance(doc, dict):
            raise InputError(f"{path}: manifest must be a JSON object")
        known = {k for k in cls.__dataclass_fields__ if k != "base"}
        extra = set(doc) - known
        if extra:
            raise InputError(f"{path}: unknown manifest keys {sorted(extra)}")
        return cls(**doc, base=str(Path(path).parent))

    def resolve(self, p: str | None) -> str | None:
        if p is None:
            return None
        q = Path(p)
        return str(q if q.is_absolute() else Path(self.base) / q)


def run(manifest: RunManifest) -> int:
    """Execute a manifest, writing its output document; returns the exit status."""
    m = manifest
    out = m.resolve(m.output_path)
    if m.mode == "classical":
        rule = load_classical_rule(m.resolve(m.rule_path))
        cfg = load_config(m.resolve(m.state_path), m.dim)
        _write(classical_trace(rule, cfg, m.steps, m.index_digits), out)
        return EXIT_OK
    if m.mode == "gallery":
        _write(run_demo(m.demo, m.params or {}), out)
        return EXIT_OK
    field = load_field(m.resolve(m.field_path))
    if m.mode == "verify":
        rule = load_quantum_rule_unchecked(m.resolve(m.rule_path), field)
        report = verify_report(rule, m.causality_trials, m.seed)
        _write(report, out)
        return EXIT_OK if report["ok"] else EXIT_FAIL
    rule = load_quantum_rule(m.resolve(m.rule_path), field)
    v = load_state(m.resolve(m.state_path), field, rule.n, m.dim if m.dim is not None else rule.dim)
    _write(quantum_trace(rule, v, m.steps, m.index_digits), out)
    return EXIT_OK


def load_quantum_rule_unchecked(path: str, field: FieldSpec) -> QCARule:
    doc = _read_json(path)
    try:
        return QCARule.from_json(doc, field, validate=False)
    except (KeyError, TypeError, ValueError) as exc:
        raise _shape_error(path, exc) from None


# -- trace comparison -----------------------------------------------------------


def trace_diff(a: dict, b: dict) -> dict:
    """Step-by-step exact comparison of two trace documents."""
    sa, sb = a.get("steps", []), b.get("steps", [])
    first = None
    for t, (x, y) in enumerate(zip(sa, sb)):
        if x != y:
            keys = sorted(k for k in set(x) | set(y) if x.get(k) != y.get(k))
            first = {"step": t, "fields": keys}
            break
    header = sorted(k for k in (set(a) | set(b)) - {"steps"} if a.get(k) != b.get(k))
    return {
        "identical": first is None and len(sa) == len(sb) and not header,
        "first_divergence": first,
        "header_differences": header,
        "length_a": len(sa),
        "length_b": len(sb),
        "length_mismatch": len(sa) != len(sb),
    }


# -- codec utilities ------------------------------------------------------------


def encode_values(kind: str, values: Sequence[int], args) -> str | dict:
    if kind == "pair":
        if len(values) != 2:
            raise InputError("pair takes two naturals")
        return str(pair(*values))
    if kind == "seq":
        return index_to_json(seq_encode(values), args.index_digits)
    if kind == "coord":
        return str(coord_index(tuple(values)))
    if kind == "config":
        cfg = load_config(args.state, args.dim)
        return _index_entry(lambda b: config_index(cfg, max_bits=b), args.index_digits)
    if kind == "vector":
        field = load_field(args.field)
        v = load_state(args.state, field, args.n, args.dim)
        return _index_entry(lambda b: vector_index(v, max_bits=b), args.index_digits)
    raise InputError(f"unknown kind {kind!r}")


def decode_value(kind: str, k: int, args) -> Any:
    if kind == "pair":
        return list(unpair(k))
    if kind == "seq":
        return seq_decode(k)
    if kind == "coord":
        return list(coord_unindex(k, args.dim or 3))
    if kind == "config":
        return config_unindex(k, args.dim or 3).to_json()
    if kind == "vector":
        return vector_unindex(k, load_field(args.field), args.n, args.dim or 3).to_json()
    raise InputError(f"unknown kind {kind!r}")


# -- argument parsing -----------------------------------------------------------


def _demo_params(args) -> dict:
    name = args.demo
    if name == "scalar-extraction":
        return {"u": args.u, "samples": args.samples, "seed": args.seed}
    p: dict = {"oracle": args.oracle}
    if name == "space-inhomogeneous":
        p["indices"] = list(range(args.count)) if args.indices is None else args.indices
    elif name == "time-inhomogeneous":
        p["steps"] = args.steps
    elif name == "unbounded-density":
        p["m"] = args.m
    elif name == "unbounded-velocity":
        p["i"], p["x"] = args.i, args.x
    elif name == "nonquiescent-input":
        p["width"] = args.width
    elif name == "stochastic-correlation":
        p["i"], p["samples"], p["seed"] = args.i, args.samples, args.seed
    if args.restored:
        p["restored"] = True
    return p


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qgandy", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, rule=True, state=True, field=False):
        if rule:
            p.add_argument("--rule", required=True, help="rule JSON file")
        if state:
            p.add_argument("--state", required=True, help="initial state JSON file")
        if field:
            p.add_argument("--field", help="field JSON file (default Q(zeta8))")
        p.add_argument("--out", help="output file (default stdout)")
        p.add_argument("--dim", type=int, help="lattice dimension when the input does not say")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--index-digits", type=int, default=DEFAULT_INDEX_DIGITS, help="digest indices longer than this")

    p = sub.add_parser("classical-run", help="evolve a classical configuration")
    common(p)
    p.add_argument("--steps", type=int, default=1)

    p = sub.add_parser("quantum-run", help="evolve a state under a quantum rule")
    common(p, field=True)
    p.add_argument("--steps", type=int, default=1)

    p = sub.add_parser("verify-rule", help="check unitarity, quiescence and commutation of a quantum rule")
    common(p, state=False, field=True)
    p.add_argument("--causality-trials", type=int, default=0)

    p = sub.add_parser("measure", help="sample measurements of one cell of a normalized state")
    common(p, rule=False, field=True)
    p.add_argument("--n", type=int, required=True, help="alphabet size")
    p.add_argument("--cell", type=int, nargs="+", required=True)
    p.add_argument("--samples", type=int, default=10_000)

    p = sub.add_parser("gallery", help="run a necessity demo")
    p.add_argument("demo", choices=sorted(DEMOS))
    p.add_argument("--oracle", default="primality", help="primality, parity, zeros, ones or bits:<0/1 string>")
    p.add_argument("--indices", type=int, nargs="*")
    p.add_argument("--count", type=int, default=32, help="indices 0..count-1 when --indices is absent")
    p.add_argument("--steps", type=int, default=32)
    p.add_argument("--m", type=int, default=31)
    p.add_argument("--i", type=int, default=0)
    p.add_argument("--x", type=int, default=0)
    p.add_argument("--width", type=int, default=32)
    p.add_argument("--u", default="3/5")
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--restored", action="store_true", help="run with the hypothesis restored")
    p.add_argument("--out")

    p = sub.add_parser("trace-diff", help="compare two trace files")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--out")

    for name in ("encode", "decode"):
        p = sub.add_parser(name, help=f"{name} Godel indices")
        p.add_argument("kind", choices=["pair", "seq", "coord", "config", "vector"])
        p.add_argument("values", type=int, nargs="*")
        p.add_argument("--state")
        p.add_argument("--field")
        p.add_argument("--n", type=int, default=2)
        p.add_argument("--dim", type=int)
        p.add_argument("--index-digits", type=int, default=DEFAULT_INDEX_DIGITS)
        p.add_argument("--out")

    p = sub.add_parser("run", help="execute a run manifest")
    p.add_argument("--manifest", required=True)
    return ap


def _dispatch(args) -> int:
    cmd = args.command
    if cmd == "run":
        return run(RunManifest.load(args.manifest))
    if cmd == "classical-run":
        m = RunManifest("classical", args.rule, args.state, args.steps, args.seed, args.out, dim=args.dim, index_digits=args.index_digits)
        return run(m)
    if cmd == "quantum-run":
        m = RunManifest(
            "quantum", args.rule, args.state, args.steps, args.seed, args.out, args.field, dim=args.dim, index_digits=args.index_digits
        )
        return run(m)
    if cmd == "verify-rule":
        m = RunManifest("verify", args.rule, None, 0, args.seed, args.out, args.field, causality_trials=args.causality_trials)
        return run(m)
    if cmd == "measure":
        field = load_field(args.field)
        v = load_state(args.state, field, args.n, args.dim)
        counts = measure_cell(v, tuple(args.cell), args.seed, args.samples)
        _write({"cell": args.cell, "counts": {str(k): c for k, c in counts.items()}, "samples": args.samples, "seed": args.seed}, args.out)
        return EXIT_OK
    if cmd == "gallery":
        _write(run_demo(args.demo, _demo_params(args)), args.out)
        return EXIT_OK
    if cmd == "trace-diff":
        report = trace_diff(_read_json(args.a), _read_json(args.b))
        _write(report, args.out)
        return EXIT_OK if report["identical"] else EXIT_FAIL
    if cmd == "encode":
        _write(encode_values(args.kind, args.values, args), args.out)
        return EXIT_OK
    if cmd == "decode":
        if len(args.values) != 1:
            raise InputError("decode takes exactly one index")
        _write(decode_value(args.kind, args.values[0], args), args.out)
        return EXIT_OK
    raise InputError(f"unknown command {cmd!r}")


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _dispatch(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ContractViolation as exc:
        print(f"error: violated hypothesis: {exc}", file=sys.stderr)
        return EXIT_CONTRACT
    except (DomainError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
