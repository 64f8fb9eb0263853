"""Command-line front end.

Exit codes: 0 all checks pass, 1 a relation failed, 2 usage or
compatibility error, 3 invalid input state file.
"""
from __future__ import annotations

import argparse
import itertools
import json
import sys
from pathlib import Path

import numpy as np

from . import harness, monogamy
from .bloch import bloch_tensor, space_like_sums, tr_R
from .errors import IncompatibleSpec, InvalidStateFile, RankTooHigh, ResourceLimit
from .invariants import (
    b_invariant_mixed,
    b_invariant_pure,
    h_concurrence_roof,
    h_invariant,
    lambda_spectrum,
    three_tangle,
    wootters_concurrence,
)
from .states import (
    basis_product,
    bell,
    check_size,
    ghz,
    linear_entropy,
    max_qubits,
    partial_trace,
    purity,
    sample_haar_pure,
    sample_mixed,
    w3,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_BAD_FILE = 0, 1, 2, 3
INPUT_TOL = 1e-6
CHECK_RELATIONS = tuple(harness.RELATIONS)


class UsageError(Exception):
    pass


# State files


def _complex_list(values, what: str) -> np.ndarray:
    try:
        arr = np.asarray(values, dtype=np.float64)
    except (TypeError, ValueError):
        raise InvalidStateFile(f"{what} must contain [re, im] number pairs")
    if arr.ndim == 0 or arr.shape[-1] != 2:
        raise InvalidStateFile(f"{what} must contain [re, im] number pairs")
    if not np.all(np.isfinite(arr)):
        raise InvalidStateFile(f"{what} contains non-finite numbers")
    return arr[..., 0] + 1j * arr[..., 1]


def parse_state(doc) -> tuple[np.ndarray, list[str]]:
    """Validate a state document leniently and project it onto a valid state."""
    warnings = []
    if not isinstance(doc, dict):
        raise InvalidStateFile("top level must be a JSON object")
    n = doc.get("n")
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise InvalidStateFile("field 'n' must be a positive integer")
    try:
        check_size(n)
    except ResourceLimit as exc:
        raise InvalidStateFile(str(exc))
    dim = 2**n
    kind = doc.get("kind")
    if kind == "pure":
        if "amps" not in doc:
            raise InvalidStateFile("pure state needs field 'amps'")
        psi = _complex_list(doc["amps"], "amps")
        if psi.shape != (dim,):
            raise InvalidStateFile(f"amps must have 2^n = {dim} entries, got shape {psi.shape}")
        norm = np.linalg.norm(psi)
        if abs(norm - 1) > INPUT_TOL:
            raise InvalidStateFile(f"amplitude norm {norm:.9g} differs from 1 by more than {INPUT_TOL:g}")
        if abs(norm - 1) > 1e-12:
            warnings.append("amplitudes renormalized")
        return psi / norm, warnings
    if kind == "mixed":
        if "rho" not in doc:
            raise InvalidStateFile("mixed state needs field 'rho'")
        rho = _complex_list(doc["rho"], "rho")
        if rho.shape != (dim, dim):
            raise InvalidStateFile(f"rho must be {dim}x{dim}, got shape {rho.shape}")
        herm = np.abs(rho - rho.conj().T).max()
        if herm > INPUT_TOL:
            raise InvalidStateFile(f"rho is not Hermitian (deviation {herm:.3g})")
        tr = np.trace(rho).real
        if abs(tr - 1) > INPUT_TOL:
            raise InvalidStateFile(f"trace {tr:.9g} differs from 1 by more than {INPUT_TOL:g}")
        rho = (rho + rho.conj().T) / 2
        p, v = np.linalg.eigh(rho)
        if p.min() < -INPUT_TOL:
            raise InvalidStateFile(f"rho is not positive semidefinite (eigenvalue {p.min():.3g})")
        if p.min() < 0 or herm > 1e-12 or abs(tr - 1) > 1e-12:
            warnings.append("density matrix projected onto the nearest valid state")
        p = np.clip(p, 0, None)
        rho = (v * p) @ v.conj().T
        return rho / np.trace(rho).real, warnings
    raise InvalidStateFile("field 'kind' must be 'pure' or 'mixed'")


def load_state_file(path) -> tuple[np.ndarray, list[str]]:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InvalidStateFile(f"cannot read {path}: {exc.strerror}")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidStateFile(f"not valid JSON ({exc.msg} at line {exc.lineno})")
    return parse_state(doc)


def _pairs(values) -> list:
    return [[float(z.real), float(z.imag)] for z in values]


def state_document(state) -> dict:
    state = np.asarray(state, dtype=np.complex128)
    n = state.shape[0].bit_length() - 1
    if state.ndim == 1:
        return {"n": n, "kind": "pure", "amps": _pairs(state)}
    return {"n": n, "kind": "mixed", "rho": [_pairs(row) for row in state]}


# Invariants report


def invariants_summary(state) -> dict:
    """Every applicable invariant of ``state``; skipped ones are explained in 'notes'."""
    state = np.asarray(state, dtype=np.complex128)
    pure = state.ndim == 1
    rho = np.outer(state, state.conj()) if pure else state
    n = rho.shape[0].bit_length() - 1
    out: dict = {"n": n, "kind": "pure" if pure else "mixed"}
    notes = []
    out["purity"] = purity(rho)
    out["trR"] = tr_R(rho)
    out["space_like_sums"] = [float(x) for x in space_like_sums(bloch_tensor(rho))]
    out["lambda_spectrum"] = [float(x) for x in lambda_spectrum(rho)]
    if n >= 2:
        out["tau_A"] = linear_entropy(partial_trace(state, range(2, n + 1)))
    if pure:
        h = h_invariant(state)
        out["H"] = [h.real, h.imag]
        out["H_abs"] = abs(h)
        if n >= 2:
            out["tau_profile"] = [float(x) for x in monogamy.tau_profile(state)]
            out["B_abs"] = [abs(b_invariant_pure(state, j)) for j in range(1, n + 1)]
    if n == 2:
        out["concurrence"] = wootters_concurrence(rho)
    else:
        notes.append("concurrence: two-qubit states only")
    if n == 3 and pure:
        out["three_tangle"] = three_tangle(state)
        out["pair_concurrences"] = {
            "AB": wootters_concurrence(partial_trace(state, [3])),
            "AC": wootters_concurrence(partial_trace(state, [2])),
            "BC": wootters_concurrence(partial_trace(state, [1])),
        }
    else:
        notes.append("three_tangle: three-qubit pure states only")
    if pure and n % 2 == 1 and n >= 3:
        out["H_roof_reductions"] = [h_concurrence_roof(partial_trace(state, [j])) for j in range(1, n + 1)]
    if not pure:
        if n % 2 == 0:
            try:
                out["H_roof"] = h_concurrence_roof(rho)
            except RankTooHigh:
                notes.append("H_roof: closed form needs rank <= 2")
        if n <= 6:
            out["B_mixed"] = [b_invariant_mixed(rho, j) for j in range(1, n + 1)]
    if n == 4 and pure:
        lhs, det = monogamy.n4_sides(state)
        out["n4_B12_minus_B13_sq"] = lhs
        out["n4_det_tr14"] = det
    out["notes"] = notes
    return out


# Commands


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _report_text(report: harness.EnsembleReport) -> str:
    s = report.spec
    status = "PASS" if report.passed else "FAIL"
    lines = [
        f"{status} {s.relation} N={s.n_qubits} sampler={s.sampler} trials={report.trials} seed={s.seed}",
        f"  max residual  {report.max_residual:.3e}  (tolerance {s.tolerance:.1e})",
        f"  mean residual {report.mean_residual:.3e}",
        f"  failures      {report.failure_count}",
    ]
    for f in report.failures[:10]:
        lines.append(f"    trial {f['trial']} seed {f['seed']} residual {f['residual']:.3e}")
    return "\n".join(lines) + "\n"


def cmd_invariants(args) -> int:
    state, warns = load_state_file(args.path)
    for w in warns:
        print(f"warning: {w}", file=sys.stderr)
    summary = invariants_summary(state)
    if args.format == "text":
        text = "".join(f"{k}: {v}\n" for k, v in summary.items())
    else:
        text = harness.dumps_json(summary)
    _emit(text, args.out)
    return EXIT_OK


def cmd_check(args) -> int:
    state = None
    sources = sum(bool(x) for x in (args.path, args.random, args.state))
    if sources != 1:
        raise UsageError("give exactly one of PATH, --random or --state")
    if args.path:
        state, warns = load_state_file(args.path)
        for w in warns:
            print(f"warning: {w}", file=sys.stderr)
        n = state.shape[0].bit_length() - 1
        if args.n is not None and args.n != n:
            raise UsageError(f"--n {args.n} does not match the file ({n} qubits)")
        spec = harness.EnsembleSpec(
            args.relation, n, trials=args.trials or 1, seed=args.seed, tolerance=args.tol,
            sampler="fixed", state=str(args.path), cond_cap=args.cond_cap,
        )
    else:
        if args.n is None:
            raise UsageError("--n is required with --random/--state")
        if args.state:
            sampler = "named"
        elif args.rank is not None:
            sampler = "ginibre"
        else:
            sampler = args.sampler
        spec = harness.EnsembleSpec(
            args.relation, args.n, trials=args.trials or 100, seed=args.seed, tolerance=args.tol,
            sampler=sampler, rank=args.rank, state=args.state, cond_cap=args.cond_cap,
        )
    report = harness.run_ensemble(spec, workers=args.workers, state=state)
    if args.format == "text":
        text = _report_text(report)
    else:
        text = harness.serialize_report(report, args.format, verbose=args.verbose).decode()
    _emit(text, args.out)
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_gen(args) -> int:
    kind, n = args.kind, args.n
    if kind == "w3":
        if n not in (None, 3):
            raise UsageError("w3 is a three-qubit state")
        state = w3()
    elif kind == "bell":
        if n not in (None, 2):
            raise UsageError("bell is a two-qubit state")
        state = bell()
    else:
        if n is None:
            raise UsageError(f"--n is required for {kind}")
        if kind == "ghz":
            if n < 2:
                raise UsageError("ghz needs --n >= 2")
            state = ghz(n)
        elif kind == "basis":
            bits = args.bits or "0" * n
            if len(bits) != n or set(bits) - {"0", "1"}:
                raise UsageError("--bits must be a 0/1 string of length n")
            state = basis_product(bits)
        elif kind == "haar":
            state = sample_haar_pure(n, args.seed)
        else:
            if args.rank is not None and not 1 <= args.rank <= 2**n:
                raise UsageError(f"--rank must lie in 1..{2**n}")
            state = sample_mixed(n, args.rank, args.seed)
    check_size(state.shape[0].bit_length() - 1)
    _emit(harness.dumps_json(state_document(state)), args.out)
    return EXIT_OK


def parse_n_range(text: str) -> range:
    try:
        if ".." in text:
            lo, hi = text.split("..", 1)
            return range(int(lo), int(hi) + 1)
        return range(int(text), int(text) + 1)
    except ValueError:
        raise UsageError(f"bad --n-range {text!r}; use LO..HI")


def cmd_sweep(args) -> int:
    relations = [r.strip() for r in args.relations.split(",") if r.strip()]
    unknown = [r for r in relations if r not in harness.RELATIONS]
    if unknown:
        raise UsageError(f"unknown relations: {', '.join(unknown)}")
    n_range = parse_n_range(args.n_range)
    runs, skipped = [], []
    for rel, n in itertools.product(relations, n_range):
        problem = harness.compatibility_problem(rel, n)
        if problem is None and n > max_qubits():
            problem = f"exceeds the dense limit of {max_qubits()} qubits"
        if problem:
            skipped.append({"relation": rel, "n": n, "reason": problem})
            print(f"note: skipping {rel} at N={n}: {problem}", file=sys.stderr)
            continue
        spec = harness.EnsembleSpec(rel, n, trials=args.trials, seed=args.seed, tolerance=args.tol)
        runs.append(harness.run_ensemble(spec, workers=args.workers))
    if not runs:
        raise UsageError("no compatible (relation, N) pairs")
    failed = sum(1 for r in runs if not r.passed)
    if args.format == "text":
        text = "".join(_report_text(r) for r in runs)
        text += "".join(f"SKIP {s['relation']} N={s['n']}: {s['reason']}\n" for s in skipped)
    else:
        doc = {
            "sweep": {
                "relations": relations,
                "n_range": [n_range.start, n_range.stop - 1],
                "trials": args.trials,
                "seed": args.seed,
            },
            "runs": [harness.report_to_dict(r) for r in runs],
            "skipped": skipped,
            "summary": {"runs": len(runs), "failed_runs": failed, "passed": failed == 0},
        }
        text = harness.dumps_json(doc)
    _emit(text, args.out)
    return EXIT_OK if failed == 0 else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="lorentz-monogamy",
        description="Lorentz-invariant quantities of qubit states and checks of exact monogamy equalities.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    inv = sub.add_parser("invariants", help="print every applicable invariant of a state file")
    inv.add_argument("path")
    inv.add_argument("--out")
    inv.add_argument("--format", choices=("json", "text"), default="json")
    inv.set_defaults(func=cmd_invariants)

    chk = sub.add_parser("check", help="check one relation on a state file or a random ensemble")
    chk.add_argument("relation", choices=CHECK_RELATIONS)
    chk.add_argument("path", nargs="?")
    chk.add_argument("--random", action="store_true")
    chk.add_argument("--state", choices=harness.NAMED_STATES, help="use a named state")
    chk.add_argument("--n", type=int)
    chk.add_argument("--trials", type=int)
    chk.add_argument("--seed", type=int, default=0)
    chk.add_argument("--tol", type=float)
    chk.add_argument("--rank", type=int)
    chk.add_argument("--sampler", choices=("haar", "ginibre"))
    chk.add_argument("--cond-cap", type=float, default=20.0)
    chk.add_argument("--workers", type=int, default=1)
    chk.add_argument("--verbose", action="store_true", help="include per-trial residuals in JSON")
    chk.add_argument("--out")
    chk.add_argument("--format", choices=("json", "csv", "text"), default="json")
    chk.set_defaults(func=cmd_check)

    gen = sub.add_parser("gen", help="write a named or random state file")
    gen.add_argument("kind", choices=("ghz", "w3", "bell", "haar", "ginibre", "basis"))
    gen.add_argument("--n", type=int)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--rank", type=int)
    gen.add_argument("--bits")
    gen.add_argument("--out")
    gen.set_defaults(func=cmd_gen)

    swp = sub.add_parser("sweep", help="run every compatible (relation, N) pair")
    swp.add_argument("--relations", required=True)
    swp.add_argument("--n-range", required=True)
    swp.add_argument("--trials", type=int, default=100)
    swp.add_argument("--seed", type=int, default=0)
    swp.add_argument("--tol", type=float)
    swp.add_argument("--workers", type=int, default=1)
    swp.add_argument("--out")
    swp.add_argument("--format", choices=("json", "text"), default="json")
    swp.set_defaults(func=cmd_sweep)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InvalidStateFile as exc:
        print(f"error: invalid state file: {exc}", file=sys.stderr)
        return EXIT_BAD_FILE
    except (UsageError, IncompatibleSpec, ResourceLimit) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
