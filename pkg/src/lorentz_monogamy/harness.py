"""Ensemble runner: sample states, apply a checker per trial, aggregate, serialize.

Trial ``i`` draws everything it needs from ``default_rng(mix_seed(seed, i))``,
so results do not depend on how trials are scheduled across workers.
"""
from __future__ import annotations

import csv
import io
import itertools
import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from typing import Callable

import numpy as np

from . import monogamy
from .bloch import bloch_tensor, space_like_sums, tr_R
from .errors import IncompatibleSpec
from .invariants import b_invariant_pure, h_invariant
from .states import (
    apply_local,
    basis_product,
    bell,
    check_size,
    ghz,
    mix_seed,
    pure_to_density,
    sample_haar_pure,
    sample_local_sl,
    sample_local_unitary,
    sample_mixed,
    w3,
)

VERBOSE_LIMIT = 10_000

DEFAULT_TOLERANCE = {
    "eq2": 1e-9,
    "eq4": 1e-9,
    "eq6": 1e-9,
    "eq10": 1e-9,
    "eq11": 1e-9,
    "eq13": 1e-9,
    "eq15": 1e-8,
    "eq16": 1e-8,
    "eq17": 1e-8,
    "ckw": 1e-8,
    "n4deg4": 1e-8,
    "sl-invariance": 1e-8,
    "lu-invariance": 1e-9,
}

NAMED_STATES = ("ghz", "w3", "bell", "basis")


@dataclass(frozen=True)
class EnsembleSpec:
    """What to run. ``None`` fields are resolved to per-relation defaults."""

    relation: str
    n_qubits: int
    trials: int = 100
    seed: int = 0
    tolerance: float | None = None
    sampler: str | None = None  # haar | ginibre | named | fixed
    rank: int | None = None
    state: str | None = None  # name for sampler="named", label for sampler="fixed"
    cond_cap: float = 20.0
    verbose: bool | None = None

    def __post_init__(self):
        if self.relation not in RELATIONS:
            raise IncompatibleSpec(f"unknown relation {self.relation!r}")
        rel = RELATIONS[self.relation]
        if self.trials < 1:
            raise IncompatibleSpec("trials must be >= 1")
        if self.tolerance is None:
            object.__setattr__(self, "tolerance", DEFAULT_TOLERANCE[self.relation])
        if self.tolerance <= 0:
            raise IncompatibleSpec("tolerance must be positive")
        if self.sampler is None:
            object.__setattr__(self, "sampler", "haar" if "pure" in rel.kinds and "mixed" not in rel.kinds else "ginibre")
        if self.verbose is None:
            object.__setattr__(self, "verbose", self.trials <= VERBOSE_LIMIT)
        object.__setattr__(self, "seed", int(self.seed) & ((1 << 64) - 1))
        self.validate()

    def validate(self) -> None:
        rel = RELATIONS[self.relation]
        n = self.n_qubits
        if self.sampler not in ("haar", "ginibre", "named", "fixed"):
            raise IncompatibleSpec(f"unknown sampler {self.sampler!r}")
        if self.sampler == "ginibre" and "mixed" not in rel.kinds:
            raise IncompatibleSpec(f"{self.relation} needs pure states")
        if self.sampler == "named" and self.state not in NAMED_STATES:
            raise IncompatibleSpec(f"named sampler needs state in {NAMED_STATES}")
        if self.sampler == "ginibre" and self.rank is not None and not 1 <= self.rank <= 2**n:
            raise IncompatibleSpec(f"rank {self.rank} invalid for {n} qubits")
        problem = rel.n_check(n)
        if problem:
            raise IncompatibleSpec(f"{self.relation} with N={n}: {problem}")
        check_size(n)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class EnsembleReport:
    spec: EnsembleSpec
    trials: int
    max_residual: float
    mean_residual: float
    failures: list[dict]
    residuals: list[float] | None = None
    wall_time: float | None = field(default=None, compare=False)

    @property
    def failure_count(self) -> int:
        return len(self.failures)

    @property
    def passed(self) -> bool:
        return not self.failures


@dataclass(frozen=True)
class _Relation:
    kinds: tuple
    n_check: Callable[[int], str | None]
    evaluate: Callable  # (state, rng, spec, exhaustive) -> residual


def _need(cond: bool, msg: str) -> str | None:
    return None if cond else msg


def _density(state):
    return pure_to_density(state) if state.ndim == 1 else state


def _eval_report(fn):
    return lambda state, rng, spec, exhaustive: fn(state).residual


def _eval_mixed_report(fn):
    return lambda state, rng, spec, exhaustive: fn(_density(state)).residual


def _eval_eq13(state, rng, spec, exhaustive):
    n = spec.n_qubits
    if exhaustive:
        parts = [
            (1,) + rest
            for k in range(n - 1)
            for rest in itertools.combinations(range(2, n + 1), k)
        ]
    else:
        size = int(rng.integers(1, n))
        parts = [tuple(sorted(int(q) + 1 for q in rng.choice(n, size=size, replace=False)))]
    return max(monogamy.check_eq13(state, p).residual for p in parts)


def _eval_per_position(fn):
    def evaluate(state, rng, spec, exhaustive):
        return max(fn(state, j).residual for j in range(1, spec.n_qubits + 1))

    return evaluate


def _relative_change(a: float, b: float, bound: float = 1.0) -> float:
    """|a - b| relative to max(|a|, |b|); values far below ``bound`` are compared on its scale."""
    return abs(a - b) / max(abs(a), abs(b), 1e-6 * bound)


def _weight(state) -> float:
    return float(np.vdot(state, state).real) if state.ndim == 1 else float(np.trace(state).real)


def _eval_lu(state, rng, spec, exhaustive):
    op = sample_local_unitary(spec.n_qubits, rng)
    before, after = _density(state), apply_local(_density(state), op)
    s0 = space_like_sums(bloch_tensor(before))
    s1 = space_like_sums(bloch_tensor(after))
    return max(float(np.abs(s0 - s1).max()), _relative_change(tr_R(before), tr_R(after)))


def _eval_sl(state, rng, spec, exhaustive):
    # F is not unitary, so the moved state is unnormalized; rounding in an
    # invariant of degree 2k grows like the larger weight to the power k
    n = spec.n_qubits
    op = sample_local_sl(n, rng, spec.cond_cap)
    moved = apply_local(state, op)
    w = max(_weight(state), _weight(moved))
    worst = _relative_change(tr_R(_density(state)), tr_R(_density(moved)), w**2)
    if state.ndim == 1:
        if n % 2 == 0:
            worst = max(worst, _relative_change(abs(h_invariant(state)), abs(h_invariant(moved)), w))
        for j in range(1, n + 1):
            worst = max(
                worst,
                _relative_change(abs(b_invariant_pure(state, j)), abs(b_invariant_pure(moved, j)), w**2),
            )
    return worst


BOTH = ("pure", "mixed")
PURE = ("pure",)


def _odd(n):
    return _need(n >= 3 and n % 2 == 1, "needs odd N >= 3 (even N reduces to eq11)")


RELATIONS: dict[str, _Relation] = {
    "eq2": _Relation(BOTH, lambda n: _need(n == 1, "needs N = 1"), _eval_mixed_report(monogamy.check_eq2)),
    "eq4": _Relation(BOTH, lambda n: _need(n >= 1, "needs N >= 1"), _eval_mixed_report(monogamy.check_eq4)),
    "eq6": _Relation(BOTH, lambda n: _need(n >= 1, "needs N >= 1"), _eval_mixed_report(monogamy.check_eq6)),
    "eq10": _Relation(BOTH, lambda n: _need(n >= 1, "needs N >= 1"), _eval_mixed_report(monogamy.check_eq10)),
    "eq11": _Relation(PURE, lambda n: _need(n >= 2, "needs N >= 2"), _eval_report(monogamy.check_eq11)),
    "eq13": _Relation(PURE, lambda n: _need(n >= 2, "needs N >= 2"), _eval_eq13),
    "eq15": _Relation(PURE, lambda n: _need(n == 3, "needs N = 3"), _eval_per_position(monogamy.check_eq15)),
    "eq16": _Relation(PURE, _odd, _eval_per_position(monogamy.check_eq16)),
    "eq17": _Relation(PURE, _odd, _eval_report(monogamy.check_eq17)),
    "ckw": _Relation(PURE, lambda n: _need(n == 3, "needs N = 3"), _eval_report(monogamy.check_ckw)),
    "n4deg4": _Relation(PURE, lambda n: _need(n == 4, "needs N = 4"), _eval_report(monogamy.check_n4_deg4)),
    "sl-invariance": _Relation(BOTH, lambda n: _need(n >= 1, "needs N >= 1"), _eval_sl),
    "lu-invariance": _Relation(BOTH, lambda n: _need(n >= 1, "needs N >= 1"), _eval_lu),
}


def compatibility_problem(relation: str, n: int) -> str | None:
    """Reason why ``relation`` cannot run at ``n`` qubits, or None."""
    if relation not in RELATIONS:
        return f"unknown relation {relation!r}"
    return RELATIONS[relation].n_check(n)


def named_state(name: str, n: int) -> np.ndarray:
    if name == "ghz":
        return ghz(n)
    if name == "w3":
        if n != 3:
            raise IncompatibleSpec("w3 is a three-qubit state")
        return w3()
    if name == "bell":
        if n != 2:
            raise IncompatibleSpec("bell is a two-qubit state")
        return bell()
    if name == "basis":
        return basis_product([0] * n)
    raise IncompatibleSpec(f"unknown named state {name!r}")


def _sample(spec: EnsembleSpec, rng, fixed):
    if spec.sampler == "haar":
        return sample_haar_pure(spec.n_qubits, rng)
    if spec.sampler == "ginibre":
        return sample_mixed(spec.n_qubits, spec.rank, rng)
    if spec.sampler == "named":
        return named_state(spec.state, spec.n_qubits)
    return fixed


def run_trial(spec: EnsembleSpec, index: int, state=None) -> float:
    """Residual of a single trial; reproducible in isolation from (spec, index)."""
    rng = np.random.default_rng(mix_seed(spec.seed, index))
    sample = _sample(spec, rng, state)
    exhaustive = spec.sampler in ("named", "fixed")
    return float(RELATIONS[spec.relation].evaluate(sample, rng, spec, exhaustive))


def run_ensemble(spec: EnsembleSpec, workers: int = 1, state=None) -> EnsembleReport:
    """Run ``spec.trials`` trials; ``state`` supplies the input when ``spec.sampler == "fixed"``."""
    if spec.sampler == "fixed":
        if state is None:
            raise IncompatibleSpec("fixed sampler needs a state")
        state = np.asarray(state, dtype=np.complex128)
        if state.ndim == 2 and "mixed" not in RELATIONS[spec.relation].kinds:
            raise IncompatibleSpec(f"{spec.relation} needs a pure state")
        if state.shape[0] != 2**spec.n_qubits:
            raise IncompatibleSpec("state dimension does not match n_qubits")
    start = time.perf_counter()
    residuals = [0.0] * spec.trials

    def work(i):
        residuals[i] = run_trial(spec, i, state)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(work, range(spec.trials)))
    else:
        for i in range(spec.trials):
            work(i)
    return _aggregate(spec, residuals, time.perf_counter() - start)


def _aggregate(spec: EnsembleSpec, residuals: list[float], wall_time: float | None) -> EnsembleReport:
    failures = [
        {"trial": i, "seed": mix_seed(spec.seed, i), "residual": r}
        for i, r in enumerate(residuals)
        if not r <= spec.tolerance
    ]
    return EnsembleReport(
        spec=spec,
        trials=len(residuals),
        max_residual=max(residuals),
        mean_residual=math.fsum(residuals) / len(residuals),
        failures=failures,
        residuals=list(residuals) if spec.verbose else None,
        wall_time=wall_time,
    )


def summary_from_residuals(spec: EnsembleSpec, residuals: list[float]) -> EnsembleReport:
    """Recompute the aggregate of a report from its per-trial residuals."""
    return _aggregate(spec, residuals, None)


# Serialization


def _fmt(value) -> str:
    if isinstance(value, bool) or value is None:
        return json.dumps(value)
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isnan(value):
            return "NaN"
        if math.isinf(value):
            return "Infinity" if value > 0 else "-Infinity"
        text = format(value, ".17g")
        if "." not in text and "e" not in text:
            text += ".0"
        return text
    if isinstance(value, str):
        return json.dumps(value)
    raise TypeError(f"cannot serialize {type(value).__name__}")


def _to_json(obj, indent: int = 0) -> str:
    pad = "  " * (indent + 1)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(k)}: {_to_json(v, indent + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + "  " * indent + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple)) for v in obj):
            return "[" + ", ".join(_fmt(v) for v in obj) + "]"
        items = [pad + _to_json(v, indent + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + "  " * indent + "]"
    return _fmt(obj)


def report_to_dict(report: EnsembleReport, verbose: bool = False, include_timing: bool = False) -> dict:
    out = {
        "spec": report.spec.to_dict(),
        "summary": {
            "trials": report.trials,
            "max_residual": report.max_residual,
            "mean_residual": report.mean_residual,
            "failures": report.failure_count,
        },
        "failures": [
            {"trial": f["trial"], "seed": f["seed"], "residual": f["residual"]} for f in report.failures
        ],
    }
    if verbose and report.residuals is not None:
        out["residuals"] = list(report.residuals)
    if include_timing:
        out["timing"] = {"wall_time_s": report.wall_time}
    return out


def dumps_json(obj) -> str:
    """Canonical JSON text: fixed key order, floats with 17 significant digits."""
    return _to_json(obj) + "\n"


def serialize_report(
    report: EnsembleReport, fmt: str = "json", verbose: bool = False, include_timing: bool = False
) -> bytes:
    if fmt == "json":
        return dumps_json(report_to_dict(report, verbose, include_timing)).encode()
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["trial", "residual", "pass"])
        if report.residuals is not None:
            rows = enumerate(report.residuals)
        else:
            rows = ((f["trial"], f["residual"]) for f in report.failures)
        for i, r in rows:
            writer.writerow([i, _fmt(r), "true" if r <= report.spec.tolerance else "false"])
        buf.write("# spec " + json.dumps(report.spec.to_dict(), separators=(",", ":")) + "\n")
        buf.write(
            f"# summary trials={report.trials} max_residual={_fmt(report.max_residual)} "
            f"mean_residual={_fmt(report.mean_residual)} failures={report.failure_count} "
            f"rows={'all' if report.residuals is not None else 'failures'}\n"
        )
        return buf.getvalue().encode()
    raise ValueError(f"unknown format {fmt!r}")


def _spec_from_dict(d: dict) -> EnsembleSpec:
    names = {f.name for f in fields(EnsembleSpec)}
    return EnsembleSpec(**{k: v for k, v in d.items() if k in names})


def parse_report(data: bytes | str, fmt: str = "json") -> EnsembleReport:
    text = data.decode() if isinstance(data, bytes) else data
    if fmt == "json":
        d = json.loads(text)
        spec = _spec_from_dict(d["spec"])
        s = d["summary"]
        wall = d.get("timing", {}).get("wall_time_s")
        residuals = d.get("residuals")
        return EnsembleReport(
            spec=spec,
            trials=s["trials"],
            max_residual=s["max_residual"],
            mean_residual=s["mean_residual"],
            failures=[dict(f) for f in d["failures"]],
            residuals=residuals,
            wall_time=wall,
        )
    if fmt == "csv":
        lines = text.splitlines()
        spec_line = next(l for l in lines if l.startswith("# spec "))
        summary_line = next(l for l in lines if l.startswith("# summary "))
        spec = _spec_from_dict(json.loads(spec_line[len("# spec "):]))
        summary = dict(kv.split("=", 1) for kv in summary_line[len("# summary "):].split())
        rows = list(csv.DictReader(l for l in lines if not l.startswith("#")))
        pairs = [(int(r["trial"]), float(r["residual"])) for r in rows]
        failures = [
            {"trial": i, "seed": mix_seed(spec.seed, i), "residual": r}
            for i, r in pairs
            if not r <= spec.tolerance
        ]
        return EnsembleReport(
            spec=spec,
            trials=int(summary["trials"]),
            max_residual=float(summary["max_residual"]),
            mean_residual=float(summary["mean_residual"]),
            failures=failures,
            residuals=[r for _, r in pairs] if summary["rows"] == "all" else None,
        )
    raise ValueError(f"unknown format {fmt!r}")


def run_invariance_sweep(spec: EnsembleSpec, workers: int = 1, state=None) -> EnsembleReport:
    """Invariance runs are ordinary ensembles over the sl-/lu-invariance relations."""
    if spec.relation not in ("sl-invariance", "lu-invariance"):
        raise IncompatibleSpec("invariance sweeps use relation sl-invariance or lu-invariance")
    return run_ensemble(spec, workers=workers, state=state)
