"""
Degree-2 monogamy of pure states
================================

For a pure state, 2|H|^2 equals the alternating sum of the summed linear
entropies tau_(j) over all ways of tracing out j qubits.
"""
import numpy as np

import lorentz_monogamy as lm

for name, psi in [("Bell", lm.bell()), ("GHZ(4)", lm.ghz(4)), ("GHZ(5)", lm.ghz(5))]:
    rep = lm.check_eq11(psi)
    print(f"{name:8s} tau profile {np.round(lm.tau_profile(psi), 6)}  2|H|^2 = {rep.lhs:.6f}  rhs = {rep.rhs:.6f}")

# random states: H vanishes for odd N, the identity holds for every N
print()
for n in range(2, 8):
    psi = lm.sample_haar_pure(n, seed=n)
    rep = lm.check_eq11(psi)
    print(f"N={n}  |H| = {abs(lm.h_invariant(psi)):.4f}  residual {rep.residual:.1e}")

# the mixed-state version in terms of the space-like sums S_k
print()
rho = lm.sample_mixed(4, 2, seed=0)
print("S_k of a rank-2 4-qubit state:", np.round(lm.space_like_sums(lm.bloch_tensor(rho)), 6))
rep = lm.check_eq10(rho)
print(f"(-1)^N tr R = {rep.lhs:.10f}, from S_k: {rep.rhs:.10f}")
