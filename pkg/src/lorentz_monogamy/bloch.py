"""Bloch (Pauli) tensor of an N-qubit density matrix and its metric contractions.

The tensor ``r`` has shape ``(4,) * N`` with ``r[m1, ..., mN] = tr(rho s_m1 (x) ... (x) s_mN)``
in the order (identity, sigma_x, sigma_y, sigma_z); its C-order ravel is the
flat layout with qubit 1 slowest. Index value 0 is time-like, 1..3 space-like.
"""
from __future__ import annotations

import numpy as np

from .errors import NonRealResult, WrongQubitCount
from .states import SIGMA, check_size, num_qubits, spin_flip

# forward[m, 2r + c] = sigma_m[c, r] so that r_m = sum_{rc} rho_rc sigma_m[c, r]
_FORWARD = np.stack([s.T.ravel() for s in SIGMA])
# inverse[2r + c, m] = sigma_m[r, c] / 2
_INVERSE = np.stack([s.ravel() for s in SIGMA], axis=1) / 2


def _per_axis(tensor: np.ndarray, mat: np.ndarray) -> np.ndarray:
    for axis in range(tensor.ndim):
        tensor = np.moveaxis(np.tensordot(mat, tensor, axes=(1, axis)), 0, axis)
    return tensor


def _interleave(n: int) -> list[int]:
    return [k for q in range(n) for k in (q, n + q)]


def bloch_tensor(rho, max_qubits: int | None = None) -> np.ndarray:
    """Pauli coefficients via N single-qubit basis changes, O(N 4^N)."""
    rho = np.asarray(rho, dtype=np.complex128)
    n = num_qubits(rho)
    if rho.ndim != 2:
        raise ValueError("bloch_tensor expects a density matrix")
    check_size(n, max_qubits)
    t = rho.reshape((2,) * (2 * n)).transpose(_interleave(n)).reshape((4,) * n)
    t = _per_axis(t, _FORWARD)
    scale = max(1.0, float(np.abs(t).max()))
    if np.abs(t.imag).max() > 1e-10 * scale:
        raise NonRealResult("Bloch coefficients have an imaginary part; input is not Hermitian")
    return np.ascontiguousarray(t.real)


def reconstruct_density(r) -> np.ndarray:
    r = np.asarray(r, dtype=np.float64)
    n = r.ndim
    t = _per_axis(r.astype(np.complex128), _INVERSE)
    inv = np.argsort(_interleave(n))
    t = t.reshape((2,) * (2 * n)).transpose(inv)
    return t.reshape(2**n, 2**n)


def space_like_count(n: int) -> np.ndarray:
    """Number of space-like indices of every entry of an N-qubit Bloch tensor."""
    one = np.array([0, 1, 1, 1])
    count = np.zeros((), dtype=np.int64)
    for _ in range(n):
        count = np.add.outer(count, one)
    return count


def metric_signs(n: int) -> np.ndarray:
    """prod_i eta(mu_i) with eta = diag(1, -1, -1, -1), as a sign tensor."""
    eta = np.array([1.0, -1.0, -1.0, -1.0])
    signs = np.ones(())
    for _ in range(n):
        signs = np.multiply.outer(signs, eta)
    return signs


def euclidean_norm_sq(r) -> float:
    r = np.asarray(r)
    return float(np.sum(r * r)) / 2**r.ndim


def minkowski_norm_sq(r) -> float:
    r = np.asarray(r)
    return float(np.sum(metric_signs(r.ndim) * r * r)) / 2**r.ndim


def tr_R(rho) -> float:
    """tr(rho sigma_y^{(x)N} rho^T sigma_y^{(x)N}), computed on the matrix side.

    Uses rho^T literally (as the spin flip of rho^dagger) so that a
    non-Hermitian input shows up as an imaginary part.
    """
    rho = np.asarray(rho, dtype=np.complex128)
    value = np.sum(rho * spin_flip(rho.conj().T).T)
    if abs(value.imag) > 1e-8:
        raise NonRealResult(f"tr R has imaginary part {value.imag:.3g}")
    return float(value.real)


def space_like_sums(r) -> np.ndarray:
    """S_k for k = 0..N: sum of squared coefficients with exactly k space-like indices."""
    r = np.asarray(r)
    n = r.ndim
    return np.bincount(space_like_count(n).ravel(), weights=(r * r).ravel(), minlength=n + 1)


def four_det_relation(rho) -> tuple[float, float]:
    """Return ``(4 det rho, r_mu r^mu)`` for a single-qubit state."""
    rho = np.asarray(rho, dtype=np.complex128)
    if num_qubits(rho) != 1 or rho.ndim != 2:
        raise WrongQubitCount("four_det_relation needs a single-qubit density matrix")
    lhs = 4 * np.linalg.det(rho).real
    r = bloch_tensor(rho)
    rhs = r[0] ** 2 - r[1] ** 2 - r[2] ** 2 - r[3] ** 2
    return float(lhs), float(rhs)
