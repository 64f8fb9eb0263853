"""Dense N-qubit states: construction, reduction, local operations, sampling.

Pure states are 1-D complex arrays of length ``2**n``; density matrices are
``2**n x 2**n`` complex arrays. Qubit 1 is the leftmost tensor factor, i.e.
the most significant bit of the basis index. Qubit positions in the public
API are 1-based.
"""
from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DimensionMismatch,
    InvalidSubset,
    NonPowerOfTwoLength,
    ResourceLimit,
    ZeroVector,
)

DEFAULT_MAX_QUBITS = 8
_MASK64 = (1 << 64) - 1

SIGMA = np.array(
    [
        [[1, 0], [0, 1]],
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=np.complex128,
)


def max_qubits() -> int:
    """Dense-size guard, overridable through ``LM_MAX_QUBITS``."""
    value = os.environ.get("LM_MAX_QUBITS")
    if value is None or value.strip() == "":
        return DEFAULT_MAX_QUBITS
    return int(value)


def check_size(n: int, limit: int | None = None) -> None:
    limit = max_qubits() if limit is None else limit
    if n > limit:
        raise ResourceLimit(f"{n} qubits exceeds the dense limit of {limit} (set LM_MAX_QUBITS)")


def num_qubits(state) -> int:
    """Number of qubits of a state vector or density matrix."""
    state = np.asarray(state)
    dim = state.shape[0]
    if state.ndim == 2 and state.shape[1] != dim:
        raise DimensionMismatch(f"density matrix must be square, got {state.shape}")
    if state.ndim not in (1, 2):
        raise DimensionMismatch(f"expected a vector or a matrix, got shape {state.shape}")
    if dim < 2 or dim & (dim - 1):
        raise NonPowerOfTwoLength(f"dimension {dim} is not a power of two >= 2")
    return dim.bit_length() - 1


def _subset(traced: Iterable[int], n: int) -> list[int]:
    """Validate a 1-based qubit subset and return it 0-based."""
    positions = [int(q) for q in traced]
    if len(set(positions)) != len(positions):
        raise InvalidSubset(f"duplicate qubit positions in {positions}")
    bad = [q for q in positions if not 1 <= q <= n]
    if bad:
        raise InvalidSubset(f"positions {bad} out of range 1..{n}")
    return [q - 1 for q in positions]


def complement(subset: Iterable[int], n: int) -> tuple[int, ...]:
    chosen = set(_subset(subset, n))
    return tuple(q + 1 for q in range(n) if q not in chosen)


def make_pure(amps: Sequence[complex]) -> np.ndarray:
    psi = np.asarray(amps, dtype=np.complex128).ravel()
    num_qubits(psi)
    norm = np.linalg.norm(psi)
    if norm <= 1e-12:
        raise ZeroVector("amplitude vector has (near) zero norm")
    return psi / norm


def pure_to_density(psi) -> np.ndarray:
    psi = np.asarray(psi, dtype=np.complex128)
    return np.outer(psi, psi.conj())


def is_density_matrix(rho, atol: float = 1e-12, psd_tol: float = 1e-10) -> bool:
    rho = np.asarray(rho)
    num_qubits(rho)
    if np.abs(rho - rho.conj().T).max() > atol:
        return False
    if abs(np.trace(rho) - 1) > atol:
        return False
    return bool(np.linalg.eigvalsh(rho).min() >= -psd_tol)


def partial_trace(state, traced: Iterable[int]) -> np.ndarray:
    """Trace out the 1-based qubit positions ``traced``.

    Accepts a pure state vector or a density matrix and always returns the
    reduced density matrix of the remaining qubits (in their original order).
    """
    state = np.asarray(state, dtype=np.complex128)
    n = num_qubits(state)
    gone = _subset(traced, n)
    if len(gone) >= n:
        raise InvalidSubset("cannot trace out every qubit")
    kept = [q for q in range(n) if q not in gone]
    dk = 2 ** len(kept)
    if state.ndim == 1:
        m = state.reshape((2,) * n).transpose(kept + gone).reshape(dk, -1)
        return m @ m.conj().T
    letters = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ"
    rows = letters[:n]
    cols = "".join(rows[q] if q in gone else letters[n + q] for q in range(n))
    out = "".join(rows[q] for q in kept) + "".join(cols[q] for q in kept)
    reduced = np.einsum(f"{rows}{cols}->{out}", state.reshape((2,) * (2 * n)))
    return reduced.reshape(dk, dk)


def purity(rho) -> float:
    rho = np.asarray(rho)
    # tr(rho^2) = sum |rho_ij|^2 for Hermitian rho
    return float(np.vdot(rho, rho).real)


def linear_entropy(rho) -> float:
    rho = np.asarray(rho)
    tr = np.trace(rho).real
    return 2.0 * (tr * tr - purity(rho))


def _parity_signs(n: int) -> np.ndarray:
    """(-1)**popcount(x) for every basis index x."""
    signs = np.ones(1)
    for _ in range(n):
        signs = np.concatenate([signs, -signs])
    return signs


def spin_flip(rho) -> np.ndarray:
    """Return sigma_y^{(x)N} rho^T sigma_y^{(x)N}.

    Implemented with the entrywise conjugate, which equals rho^T for the
    Hermitian inputs this is defined on (the usual Wootters tilde).
    sigma_y^{(x)N} maps |x> to a phase times the bitwise complement, so the
    sandwich reduces to an index reversal with parity signs.
    """
    rho = np.asarray(rho, dtype=np.complex128)
    n = num_qubits(rho)
    s = _parity_signs(n)
    return (s[:, None] * s[None, :]) * rho.conj()[::-1, ::-1]


@dataclass(frozen=True)
class LocalOperator:
    """One 2x2 matrix per qubit, acting as F_1 (x) ... (x) F_N."""

    matrices: tuple
    kind: str = "arbitrary"

    def __post_init__(self):
        mats = tuple(np.asarray(m, dtype=np.complex128) for m in self.matrices)
        for m in mats:
            if m.shape != (2, 2):
                raise DimensionMismatch(f"local operators must be 2x2, got {m.shape}")
        if self.kind == "unitary":
            for m in mats:
                if np.abs(m.conj().T @ m - np.eye(2)).max() > 1e-10:
                    raise ValueError("matrix is not unitary")
        elif self.kind == "determinant-one":
            for m in mats:
                if abs(np.linalg.det(m) - 1) > 1e-10:
                    raise ValueError("matrix does not have unit determinant")
        elif self.kind != "arbitrary":
            raise ValueError(f"unknown operator kind {self.kind!r}")
        object.__setattr__(self, "matrices", mats)

    @property
    def n_qubits(self) -> int:
        return len(self.matrices)

    def full(self) -> np.ndarray:
        out = np.ones((1, 1), dtype=np.complex128)
        for m in self.matrices:
            out = np.kron(out, m)
        return out


def _apply_on_axes(tensor: np.ndarray, mats, offset: int) -> np.ndarray:
    for q, m in enumerate(mats):
        axis = offset + q
        tensor = np.moveaxis(np.tensordot(m, tensor, axes=(1, axis)), 0, axis)
    return tensor


def apply_local(state, op, renormalize: bool = False) -> np.ndarray:
    """Apply ``F_1 (x) ... (x) F_N`` to a pure state or conjugate a density matrix."""
    if not isinstance(op, LocalOperator):
        op = LocalOperator(tuple(op))
    state = np.asarray(state, dtype=np.complex128)
    n = num_qubits(state)
    if op.n_qubits != n:
        raise DimensionMismatch(f"{op.n_qubits} local operators for {n} qubits")
    if state.ndim == 1:
        out = _apply_on_axes(state.reshape((2,) * n), op.matrices, 0).reshape(-1)
        if renormalize:
            out = out / np.linalg.norm(out)
        return out
    t = state.reshape((2,) * (2 * n))
    t = _apply_on_axes(t, op.matrices, 0)
    t = _apply_on_axes(t, [m.conj() for m in op.matrices], n)
    out = t.reshape(2**n, 2**n)
    if renormalize:
        out = out / np.trace(out)
    return out


# Named states


def ghz(n: int) -> np.ndarray:
    if n < 2:
        raise ValueError("GHZ state needs n >= 2")
    psi = np.zeros(2**n, dtype=np.complex128)
    psi[0] = psi[-1] = 1 / np.sqrt(2)
    return psi


def bell() -> np.ndarray:
    return ghz(2)


def w3() -> np.ndarray:
    psi = np.zeros(8, dtype=np.complex128)
    psi[[1, 2, 4]] = 1 / np.sqrt(3)
    return psi


def basis_product(bits: Sequence[int] | str) -> np.ndarray:
    bits = [int(b) for b in bits]
    if not bits or any(b not in (0, 1) for b in bits):
        raise ValueError("bits must be a nonempty sequence of 0/1")
    psi = np.zeros(2 ** len(bits), dtype=np.complex128)
    psi[int("".join(map(str, bits)), 2)] = 1
    return psi


# Sampling


def mix_seed(seed: int, index: int) -> int:
    """Derive a 64-bit per-trial seed (splitmix64 finalizer)."""
    z = (int(seed) + (int(index) + 1) * 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(int(seed) & _MASK64)


def _ginibre(rng: np.random.Generator, shape) -> np.ndarray:
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def sample_haar_pure(n: int, seed) -> np.ndarray:
    if n < 1:
        raise ValueError("n must be >= 1")
    v = _ginibre(_rng(seed), 2**n)
    return v / np.linalg.norm(v)


def sample_mixed(n: int, rank: int | None, seed) -> np.ndarray:
    """Induced (Ginibre) ensemble: GG^dagger / tr(GG^dagger), G of shape 2^n x rank."""
    dim = 2**n
    rank = dim if rank is None else int(rank)
    if not 1 <= rank <= dim:
        raise ValueError(f"rank must lie in 1..{dim}, got {rank}")
    g = _ginibre(_rng(seed), (dim, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def _haar_unitary_2x2(rng: np.random.Generator) -> np.ndarray:
    q, r = np.linalg.qr(_ginibre(rng, (2, 2)))
    d = np.diag(r)
    return q * (d / np.abs(d))


def sample_local_unitary(n: int, seed) -> LocalOperator:
    rng = _rng(seed)
    return LocalOperator(tuple(_haar_unitary_2x2(rng) for _ in range(n)), kind="unitary")


def sample_local_sl(n: int, seed, cond_cap: float = 20.0) -> LocalOperator:
    """Per-qubit Gaussian 2x2 scaled to unit determinant, rejecting ill-conditioned draws."""
    if cond_cap <= 1:
        raise ValueError("cond_cap must exceed 1")
    rng = _rng(seed)
    mats = []
    while len(mats) < n:
        g = _ginibre(rng, (2, 2))
        det = np.linalg.det(g)
        if abs(det) < 1e-3:
            continue
        f = g / np.sqrt(det)
        if np.linalg.cond(f) > cond_cap:
            continue
        mats.append(f)
    return LocalOperator(tuple(mats), kind="determinant-one")
