"""Polynomial local-SL invariants and concurrence-type entanglement quantifiers."""
from __future__ import annotations

from typing import Iterable

import numpy as np

from .errors import InvalidSubset, NonRealResult, RankTooHigh, WrongQubitCount
from .states import (
    SIGMA,
    LocalOperator,
    apply_local,
    complement,
    linear_entropy,
    num_qubits,
    partial_trace,
    spin_flip,
)

ETA = np.array([1.0, -1.0, -1.0, -1.0])
_Y = SIGMA[2]

# eigenvalues of rho at or below this are dropped before building the
# decomposition vectors; their square roots would otherwise inject noise
# of order 1e-8 into lambda
_NULL_EIGENVALUE = 1e-14


def _bilinear(psi: np.ndarray, ops) -> complex:
    """<psi*| op_1 (x) ... (x) op_N |psi> = psi^T (op_1 (x) ...) psi."""
    return complex(psi @ apply_local(psi, LocalOperator(tuple(ops))))


def _position(j: int, n: int) -> int:
    if not 1 <= j <= n:
        raise ValueError(f"qubit position {j} out of range 1..{n}")
    return j - 1


def h_invariant(psi) -> complex:
    """The bilinear invariant H = <psi*| sigma_y^{(x)N} |psi>.

    Vanishes identically for odd N because sigma_y^{(x)N} is then antisymmetric.
    """
    psi = np.asarray(psi, dtype=np.complex128)
    n = num_qubits(psi)
    return _bilinear(psi, [_Y] * n)


def _decomposition_vectors(rho: np.ndarray, cut: float) -> np.ndarray:
    """Columns sqrt(p_i) v_i of the eigendecomposition, null part removed."""
    p, v = np.linalg.eigh(rho)
    keep = p > cut
    return v[:, keep] * np.sqrt(p[keep])


def _sigma_y_all(n: int) -> np.ndarray:
    out = np.ones((1, 1), dtype=np.complex128)
    for _ in range(n):
        out = np.kron(out, _Y)
    return out


def lambda_spectrum(rho) -> np.ndarray:
    """Square roots of the eigenvalues of rho * spin_flip(rho), descending.

    Computed as the singular values of tau = W^T sigma_y^{(x)N} W with
    rho = W W^dagger: the nonzero eigenvalues of rho rho~ are those of
    tau^dagger tau, and the SVD keeps the null directions exactly zero.
    """
    rho = np.asarray(rho, dtype=np.complex128)
    n = num_qubits(rho)
    w = _decomposition_vectors(rho, _NULL_EIGENVALUE * max(1.0, np.trace(rho).real))
    out = np.zeros(2**n)
    if w.shape[1]:
        s = np.linalg.svd(w.T @ _sigma_y_all(n) @ w, compute_uv=False)
        out[: len(s)] = s
    return np.sort(out)[::-1]


def wootters_concurrence(rho) -> float:
    rho = np.asarray(rho, dtype=np.complex128)
    if rho.ndim != 2 or num_qubits(rho) != 2:
        raise WrongQubitCount("Wootters concurrence is defined for two-qubit density matrices")
    lam = lambda_spectrum(rho)
    return max(0.0, float(lam[0] - lam[1] - lam[2] - lam[3]))


def h_concurrence_roof(rho, rank_cut: float = 1e-12) -> float:
    """Convex roof of |H| for a state of rank <= 2 on an even number of qubits.

    Uses the Takagi values s1 >= s2 of tau_ij = <w_i*| sigma_y^{(x)N} |w_j>
    built from the subnormalized eigenvectors, and returns max(0, s1 - s2).
    """
    rho = np.asarray(rho, dtype=np.complex128)
    n = num_qubits(rho)
    if n % 2:
        raise WrongQubitCount("the |H| roof needs an even number of qubits")
    p = np.linalg.eigvalsh(rho)
    if np.count_nonzero(p > rank_cut) > 2:
        raise RankTooHigh(f"rank {np.count_nonzero(p > rank_cut)} > 2; closed form not available")
    w = _decomposition_vectors(rho, _NULL_EIGENVALUE)
    if w.shape[1] == 0:
        return 0.0
    s = np.sort(np.linalg.svd(w.T @ _sigma_y_all(n) @ w, compute_uv=False))[::-1]
    s2 = s[1] if len(s) > 1 else 0.0
    return max(0.0, float(s[0] - s2))


def concurrence_bipartite_pure(psi, part_a: Iterable[int]) -> float:
    psi = np.asarray(psi, dtype=np.complex128)
    n = num_qubits(psi)
    part_a = tuple(part_a)
    rest = complement(part_a, n)
    if not part_a or not rest:
        raise InvalidSubset("part A must be a proper nonempty subset")
    tau = linear_entropy(partial_trace(psi, rest))
    return float(np.sqrt(max(tau, 0.0)))


def _sigma_string(n: int, slots: dict[int, int]) -> np.ndarray:
    out = np.ones((1, 1), dtype=np.complex128)
    for q in range(n):
        out = np.kron(out, SIGMA[slots[q]] if q in slots else _Y)
    return out


def b_invariant_mixed(rho, j: int) -> float:
    """Degree-4 invariant B_j(rho) = sum eta eta' t(g, g')^2, t = tr(rho S_g rho^T S_g').

    S_g carries sigma_g at position j and sigma_y elsewhere. Evaluated through
    explicit 2^N x 2^N operator products, so it is meant for small N.
    """
    rho = np.asarray(rho, dtype=np.complex128)
    n = num_qubits(rho)
    q = _position(j, n)
    ops = [_sigma_string(n, {q: g}) for g in range(4)]
    left = [rho @ s for s in ops]
    right = [rho.T @ s for s in ops]
    t = np.array([[np.sum(left[a] * right[b].T) for b in range(4)] for a in range(4)])
    value = np.sum(np.outer(ETA, ETA) * t * t)
    if abs(value.imag) > 1e-9 * max(1.0, abs(value.real)):
        raise NonRealResult(f"B invariant has imaginary part {value.imag:.3g}")
    return float(value.real)


def b_invariant_pure(psi, j: int) -> complex:
    """Pure-state degree-4 invariant: sum_g eta(g) h_g^2 with open index at position j."""
    psi = np.asarray(psi, dtype=np.complex128)
    n = num_qubits(psi)
    q = _position(j, n)
    total = 0j
    for g in range(4):
        ops = [_Y] * n
        ops[q] = SIGMA[g]
        total += ETA[g] * _bilinear(psi, ops) ** 2
    return total


def b_invariant_pure_pair(psi, j: int, k: int) -> complex:
    """Four-qubit invariant with two open, metric-contracted indices at j and k."""
    psi = np.asarray(psi, dtype=np.complex128)
    n = num_qubits(psi)
    if n != 4:
        raise WrongQubitCount("the paired B invariant is defined for four qubits")
    qj, qk = _position(j, n), _position(k, n)
    if qj == qk:
        raise ValueError("positions must differ")
    total = 0j
    for mu in range(4):
        for nu in range(4):
            ops = [_Y] * n
            ops[qj], ops[qk] = SIGMA[mu], SIGMA[nu]
            total += ETA[mu] * ETA[nu] * _bilinear(psi, ops) ** 2
    return total


def b_invariant_bloch3(r) -> float:
    """Three-qubit Bloch contraction 2^-4 r_abg r^abn r_lmn r^lmg."""
    r = np.asarray(r, dtype=np.float64)
    if r.shape != (4, 4, 4):
        raise WrongQubitCount("Bloch contraction form is for three qubits")
    k = np.einsum("abg,abn,a,b->gn", r, r, ETA, ETA)
    return float(np.einsum("gn,g,n->", k * k, ETA, ETA)) / 16


def three_tangle(psi) -> float:
    """Residual tangle tau(rho_A) - C(rho_AB)^2 - C(rho_AC)^2 of a three-qubit pure state."""
    psi = np.asarray(psi, dtype=np.complex128)
    if psi.ndim != 1 or num_qubits(psi) != 3:
        raise WrongQubitCount("three_tangle needs a three-qubit pure state")
    tau_a = linear_entropy(partial_trace(psi, [2, 3]))
    c_ab = wootters_concurrence(partial_trace(psi, [3]))
    c_ac = wootters_concurrence(partial_trace(psi, [2]))
    value = tau_a - c_ab**2 - c_ac**2
    if -1e-10 <= value < 0:
        value = 0.0
    return float(value)


def b_from_reduction(rho_ab) -> float:
    """8[(tr R)^2 - tr R^2] with R = rho rho~ for the two-party reduction of a pure state.

    For a three-qubit pure state this reproduces B_C = |B_C|^2 from its
    reduction rho_AB alone.
    """
    rho_ab = np.asarray(rho_ab, dtype=np.complex128)
    r = rho_ab @ spin_flip(rho_ab)
    tr = np.trace(r)
    return float((8 * (tr * tr - np.trace(r @ r))).real)
