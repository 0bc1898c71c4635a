"""Command-line front end.

Exit codes: 0 success, 1 a requested ``--expect`` class was not met,
2 usage or input error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import zoo
from .classifier import classify_circuit
from .core import ClassLabel, Permutation, resource_counts
from .errors import NotSeparable, PermclassError
from .kron import RANK1_TOL, factor_unitary
from .textfmt import format_circuit, parse_circuit
from .transforms import run_pipeline
from .unitary import ATOL, dump_matrix_csv, unitary_of

SYNTH_KINDS = {
    "toffoli6": lambda k: zoo.toffoli_strict(),
    "margolus": lambda k: zoo.relative_toffoli(),
    "rccx": lambda k: zoo.rccx(),
    "rc3x": lambda k: zoo.rc3x(),
    "barenco": zoo.barenco_ladder,
    "vchain-clean": lambda k: zoo.vchain(k, dirty=False),
    "vchain-dirty": lambda k: zoo.vchain(k, dirty=True),
    "strict-vchain": zoo.strict_vchain,
    "cwe": zoo.cwe_mct,
    "dwe": zoo.dwe_mct,
}

EXIT_OK, EXIT_EXPECT, EXIT_INPUT = 0, 1, 2


class UsageError(Exception):
    pass


def parse_permutation(spec: str) -> Permutation:
    """``mct:<controls>``, ``identity:<qubits>``, a JSON array, or a file holding one."""
    spec = spec.strip()
    name, _, arg = spec.partition(":")
    try:
        if name == "mct" and arg:
            return Permutation.mct(int(arg) + 1)
        if name == "identity" and arg:
            return Permutation.identity(int(arg))
        if spec.startswith("["):
            return Permutation(tuple(json.loads(spec)))
        if Path(spec).is_file():
            return Permutation(tuple(json.loads(Path(spec).read_text())))
    except (ValueError, TypeError) as exc:
        raise UsageError(f"bad permutation {spec!r}: {exc}") from exc
    raise UsageError(f"bad permutation {spec!r}; use mct:<controls>, identity:<qubits> or a JSON array")


def _read_circuit(path: str):
    text = sys.stdin.read() if path == "-" else Path(path).read_text()
    return parse_circuit(text)


def _emit(payload: dict, out: str | None = None) -> None:
    text = json.dumps(payload, indent=2)
    if out:
        Path(out).write_text(text + "\n")
    else:
        print(text)


def cmd_classify(args) -> int:
    c = _read_circuit(args.input)
    perm = parse_permutation(args.perm)
    report = classify_circuit(c, perm, atol=args.atol, rank1_tol=args.rank1_tol)
    payload = report.as_dict()
    exit_code = EXIT_OK
    if args.expect:
        want = ClassLabel.parse(args.expect)
        ok = report.is_member(want)
        payload["expect"] = {"class": want.name, "member": ok}
        exit_code = EXIT_OK if ok else EXIT_EXPECT
    if args.dump_unitary:
        prefix, _ = c.split_resets()
        Path(args.dump_unitary).write_text(dump_matrix_csv(unitary_of(prefix)))
    if args.plot:
        from .plotting import plot_lattice

        payload["figure"] = str(plot_lattice(report, args.plot))
    _emit(payload)
    return exit_code


def cmd_transform(args) -> int:
    c = _read_circuit(args.input)
    perm = parse_permutation(args.perm) if args.perm else None
    if perm is None and not args.assume:
        raise UsageError("transform needs --perm or --assume")
    passes = [p for p in args.passes.split(",") if p.strip()]
    result = run_pipeline(c, passes, perm, assume=args.assume, atol=args.atol)
    if args.output:
        Path(args.output).write_text(format_circuit(result.circuit))
    payload = result.as_dict()
    payload["atol"] = args.atol
    if args.plot:
        from .plotting import plot_lattice, plot_stage_deltas

        base = Path(args.plot)
        figs = [str(plot_stage_deltas(payload["stages"], base.with_name(base.stem + "_resources" + base.suffix)))]
        if result.report is not None:
            figs.append(str(plot_lattice(result.report, base)))
        payload["figures"] = figs
    if args.report:
        _emit(payload, args.report)
    else:
        _emit(payload)
    if args.expect:
        return EXIT_OK if result.report is not None and result.report.is_member(args.expect) else EXIT_EXPECT
    return EXIT_OK


def cmd_synth(args) -> int:
    k = args.controls
    fixed = {"toffoli6": 2, "margolus": 2, "rccx": 2, "rc3x": 3}
    if args.kind in fixed:
        if k is not None and k != fixed[args.kind]:
            raise UsageError(f"{args.kind} has exactly {fixed[args.kind]} controls")
    elif k is None:
        raise UsageError(f"{args.kind} needs --controls")
    c = SYNTH_KINDS[args.kind](k)
    if args.expand:
        c = zoo.expand(c)
    text = format_circuit(c)
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_stats(args) -> int:
    c = _read_circuit(args.input)
    payload = {"as_written": resource_counts(c).as_dict(), "expanded": resource_counts(zoo.expand(c)).as_dict()}
    _emit(payload)
    return EXIT_OK


def cmd_factor(args) -> int:
    c = _read_circuit(args.input)
    if c.has_reset:
        raise UsageError("factor needs a circuit without reset")
    n = c.num_qubits
    if not 0 < args.split < n:
        raise UsageError(f"--split must be between 1 and {n - 1}")
    U = unitary_of(c)
    payload: dict = {"split": [args.split, n - args.split], "atol": args.atol, "rank1_tol": args.rank1_tol}
    try:
        f = factor_unitary(U, 2**args.split, 2 ** (n - args.split), atol=args.atol, rank1_tol=args.rank1_tol)
    except NotSeparable as exc:
        payload.update(separable=False, sigma_ratio=exc.ratio, message=str(exc))
    else:
        payload.update(
            separable=True, residual=f.residual, sigma_ratio=f.ratio,
            V=dump_matrix_csv(f.V), W=dump_matrix_csv(f.W),
        )
    _emit(payload)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="permclass", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    def tolerances(p):
        p.add_argument("--atol", type=float, default=ATOL, help="absolute tolerance on matrix entries")
        p.add_argument("--rank1-tol", type=float, default=RANK1_TOL, help="largest accepted sigma2/sigma1")

    p = sub.add_parser("classify", help="report every class a circuit implements a permutation in")
    p.add_argument("input", help="circuit file, or - for stdin")
    p.add_argument("--perm", required=True, help="mct:<controls>, identity:<qubits> or JSON array")
    p.add_argument("--expect", help="exit 1 unless the circuit is in this class")
    p.add_argument("--dump-unitary", metavar="PATH", help="write the unitary as re,im CSV rows")
    p.add_argument("--plot", metavar="PNG", help="render the class lattice with memberships")
    tolerances(p)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("transform", help="run rewrite passes and reclassify")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", dest="output")
    p.add_argument("--passes", required=True, help="comma list such as t4,t3,t1")
    p.add_argument("--perm")
    p.add_argument("--assume", help="class to assume for the input instead of classifying it")
    p.add_argument("--report", help="write the JSON report here instead of stdout")
    p.add_argument("--expect", help="exit 1 unless the output is in this class")
    p.add_argument("--plot", metavar="PNG", help="render the output lattice and per-pass resource changes")
    tolerances(p)
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("synth", help="emit a reference MCT circuit")
    p.add_argument("--kind", required=True, choices=sorted(SYNTH_KINDS))
    p.add_argument("--controls", type=int)
    p.add_argument("--expand", action="store_true", help="decompose into H, S, T and CX")
    p.add_argument("--out", dest="output")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("stats", help="resource counts as written and after expansion")
    p.add_argument("input")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("factor", help="Kronecker-factor the circuit unitary")
    p.add_argument("input")
    p.add_argument("--split", type=int, required=True, help="number of leading qubits in the first factor")
    tolerances(p)
    p.set_defaults(func=cmd_factor)
    return ap


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    try:
        return args.func(args)
    except (UsageError, PermclassError, ValueError, KeyError, OSError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"error: {msg}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
