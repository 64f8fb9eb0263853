"""Exact relations between global invariants and reduced-state quantities.

Every ``check_*`` function evaluates the two sides of one identity through
separate code paths and returns a :class:`RelationReport`. Residuals are
relative: ``|lhs - rhs| / (1 + |lhs| + |rhs|)``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from math import comb
from typing import Iterable

import numpy as np

from .bloch import (
    bloch_tensor,
    euclidean_norm_sq,
    four_det_relation,
    minkowski_norm_sq,
    space_like_sums,
    tr_R,
)
from .errors import InvalidSubset, WrongQubitCount
from .invariants import (
    b_invariant_mixed,
    b_invariant_pure,
    b_invariant_pure_pair,
    h_concurrence_roof,
    h_invariant,
    three_tangle,
    wootters_concurrence,
)
from .states import (
    complement,
    linear_entropy,
    num_qubits,
    partial_trace,
    pure_to_density,
    purity,
    sample_haar_pure,
)

REFERENCE_N4_CONSTANT = 48.0**2


def residual(lhs: float, rhs: float) -> float:
    return float(abs(lhs - rhs) / (1.0 + abs(lhs) + abs(rhs)))


@dataclass
class RelationReport:
    relation: str
    lhs: float
    rhs: float
    residual: float
    tolerance: float
    passed: bool
    metadata: dict = field(default_factory=dict)

    @classmethod
    def build(cls, relation, lhs, rhs, tol, **metadata):
        res = residual(lhs, rhs)
        return cls(relation, float(lhs), float(rhs), res, tol, bool(res <= tol), metadata)


def _pure(psi, name: str) -> tuple[np.ndarray, int]:
    psi = np.asarray(psi, dtype=np.complex128)
    if psi.ndim != 1:
        raise ValueError(f"{name} needs a pure state vector")
    return psi, num_qubits(psi)


def tau_profile(psi) -> np.ndarray:
    """tau_(j) for j = 1..N-1: summed linear entropies after tracing out every j-subset.

    Entry ``j - 1`` is a sum of ``comb(N, j)`` terms.
    """
    psi, n = _pure(psi, "tau_profile")
    if n < 2:
        raise WrongQubitCount("tau profile needs at least two qubits")
    out = np.zeros(n - 1)
    for j in range(1, n):
        out[j - 1] = sum(
            linear_entropy(partial_trace(psi, traced))
            for traced in itertools.combinations(range(1, n + 1), j)
        )
    return out


def tau_counts(n: int) -> list[int]:
    return [comb(n, j) for j in range(1, n)]


def check_eq2(rho, tol: float = 1e-12) -> RelationReport:
    """Single qubit: 4 det rho equals the Minkowski square of the Bloch vector."""
    lhs, rhs = four_det_relation(rho)
    return RelationReport.build("eq2", lhs, rhs, tol, n=1)


def check_eq4(rho, tol: float = 1e-10) -> RelationReport:
    """tr R from the matrix product against the Minkowski contraction of the Bloch tensor."""
    rho = np.asarray(rho, dtype=np.complex128)
    return RelationReport.build(
        "eq4", tr_R(rho), minkowski_norm_sq(bloch_tensor(rho)), tol, n=num_qubits(rho)
    )


def check_eq6(rho, tol: float = 1e-10) -> RelationReport:
    rho = np.asarray(rho, dtype=np.complex128)
    return RelationReport.build(
        "eq6", purity(rho), euclidean_norm_sq(bloch_tensor(rho)), tol, n=num_qubits(rho)
    )


def check_eq10(rho, tol: float = 1e-10) -> RelationReport:
    """(-1)^N tr R = tr rho^2 - 2^{1-N} sum_{k=a_N}^{floor(N/2)} S_{2k - a_N}."""
    rho = np.asarray(rho, dtype=np.complex128)
    n = num_qubits(rho)
    a_n = (1 + (-1) ** n) // 2
    s = space_like_sums(bloch_tensor(rho))
    partial = sum(s[2 * k - a_n] for k in range(a_n, n // 2 + 1))
    lhs = (-1) ** n * tr_R(rho)
    rhs = purity(rho) - partial / 2 ** (n - 1)
    return RelationReport.build("eq10", lhs, rhs, tol, n=n)


def check_eq11(psi, tol: float = 1e-10) -> RelationReport:
    """2|H|^2 = tau_(1) - tau_(2) + ... + (-1)^N tau_(N-1)."""
    psi, n = _pure(psi, "check_eq11")
    lhs = 2 * abs(h_invariant(psi)) ** 2
    taus = tau_profile(psi)
    rhs = sum((-1) ** (j + 1) * taus[j - 1] for j in range(1, n))
    return RelationReport.build("eq11", lhs, rhs, tol, n=n, tau=taus.tolist())


def check_eq13(psi, part_a: Iterable[int], tol: float = 1e-11) -> RelationReport:
    """Both sides of a pure-state bipartition have equal purity."""
    psi, n = _pure(psi, "check_eq13")
    part_a = tuple(part_a)
    part_b = complement(part_a, n)
    if not part_a or not part_b:
        raise InvalidSubset("need a proper bipartition")
    lhs = purity(partial_trace(psi, part_a))
    rhs = purity(partial_trace(psi, part_b))
    return RelationReport.build("eq13", lhs, rhs, tol, n=n, part_a=list(part_a))


def check_eq15(psi, j: int = 3, tol: float = 1e-8) -> RelationReport:
    """Three qubits: B_j(pi_psi) equals the squared residual tangle from the CKW deficit."""
    psi, n = _pure(psi, "check_eq15")
    if n != 3:
        raise WrongQubitCount("eq15 is a three-qubit relation")
    lhs = b_invariant_mixed(pure_to_density(psi), j)
    rhs = three_tangle(psi) ** 2
    return RelationReport.build("eq15", lhs, rhs, tol, n=n, position=j)


def _odd_only(n: int, name: str) -> None:
    if n % 2 == 0 or n < 3:
        raise WrongQubitCount(
            f"{name} needs an odd number of qubits >= 3; for even N it reduces to eq11 (use check_eq11)"
        )


def check_eq16(psi, j: int, tol: float = 1e-8) -> RelationReport:
    """|B_j| = 2 (tr R of the j-reduction - roof of |H| on it squared)."""
    psi, n = _pure(psi, "check_eq16")
    _odd_only(n, "eq16")
    if not 1 <= j <= n:
        raise ValueError(f"position {j} out of range 1..{n}")
    lhs = abs(b_invariant_pure(psi, j))
    reduced = partial_trace(psi, [j])
    rhs = 2 * (tr_R(reduced) - h_concurrence_roof(reduced) ** 2)
    ratio = lhs / rhs if rhs else float("nan")
    return RelationReport.build("eq16", lhs, rhs, tol, n=n, position=j, ratio=ratio)


def check_eq17(psi, tol: float = 1e-8) -> RelationReport:
    """sum_j [|B_j| + 2 roof_j^2] = (-1)^N sum_j (-1)^{j+1} j tau_(j)."""
    psi, n = _pure(psi, "check_eq17")
    _odd_only(n, "eq17")
    lhs = 0.0
    for j in range(1, n + 1):
        roof = h_concurrence_roof(partial_trace(psi, [j]))
        lhs += abs(b_invariant_pure(psi, j)) + 2 * roof**2
    taus = tau_profile(psi)
    rhs = (-1) ** n * sum((-1) ** (j + 1) * j * taus[j - 1] for j in range(1, n))
    return RelationReport.build("eq17", lhs, rhs, tol, n=n)


def _ckw_sides(psi: np.ndarray, focus: int) -> tuple[float, float]:
    others = [q for q in (1, 2, 3) if q != focus]
    lhs = linear_entropy(partial_trace(psi, others))
    tangle = np.sqrt(max(b_invariant_mixed(pure_to_density(psi), focus), 0.0))
    pair = sum(
        wootters_concurrence(partial_trace(psi, [q for q in others if q != kept])) ** 2
        for kept in others
    )
    return float(lhs), float(tangle + pair)


def check_ckw(psi, tol: float = 1e-8) -> RelationReport:
    """tau(rho_A) = tau_res + C(rho_AB)^2 + C(rho_AC)^2, checked with each qubit as A.

    tau_res enters as sqrt(B_A) from the degree-4 invariant, independently of
    the Wootters concurrences on the right. The reported residual is the worst
    over the three choices of A; lhs and rhs are those for qubit 1.
    """
    psi, n = _pure(psi, "check_ckw")
    if n != 3:
        raise WrongQubitCount("CKW is a three-qubit relation")
    sides = [_ckw_sides(psi, q) for q in (1, 2, 3)]
    worst = max(residual(l, r) for l, r in sides)
    lhs, rhs = sides[0]
    report = RelationReport.build("ckw", lhs, rhs, tol, n=3, per_qubit=[list(s) for s in sides])
    report.residual = worst
    report.passed = bool(worst <= tol)
    return report


def n4_sides(psi) -> tuple[float, float]:
    """(|B_12 - B_13|^2, det tr_14 pi_psi) for a four-qubit pure state."""
    psi, n = _pure(psi, "n4_sides")
    if n != 4:
        raise WrongQubitCount("the paired degree-4 relation is a four-qubit relation")
    lhs = abs(b_invariant_pure_pair(psi, 1, 2) - b_invariant_pure_pair(psi, 1, 3)) ** 2
    det = np.linalg.det(partial_trace(psi, [1, 4])).real
    return float(lhs), float(det)


@lru_cache(maxsize=None)
def calibrate_n4_constant(seed: int = 48, samples: int = 32, det_floor: float = 1e-8) -> float:
    """Mean of |B_12 - B_13|^2 / det(tr_14) over a fixed-seed Haar batch."""
    ratios = []
    for i in range(samples):
        lhs, det = n4_sides(sample_haar_pure(4, seed * 1_000_003 + i))
        if det > det_floor:
            ratios.append(lhs / det)
    return float(np.mean(ratios))


def check_n4_deg4(psi, tol: float = 1e-8, constant: float | None = None) -> RelationReport:
    lhs, det = n4_sides(psi)
    k = calibrate_n4_constant() if constant is None else constant
    return RelationReport.build(
        "n4deg4",
        lhs,
        k * det,
        tol,
        n=4,
        det=det,
        constant=k,
        reference_constant=REFERENCE_N4_CONSTANT,
        ratio=lhs / det if det > 1e-8 else None,
    )
