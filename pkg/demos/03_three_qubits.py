"""
Three qubits: CKW and the degree-4 invariant
============================================

tau(rho_A) splits into the two pairwise concurrences squared and the
residual tangle. The residual tangle also comes out of the degree-4
invariant B_j, with no reference to the concurrences.
"""
import numpy as np

import lorentz_monogamy as lm


def ckw_row(psi):
    tau_a = lm.linear_entropy(lm.partial_trace(psi, [2, 3]))
    c_ab = lm.wootters_concurrence(lm.partial_trace(psi, [3]))
    c_ac = lm.wootters_concurrence(lm.partial_trace(psi, [2]))
    return tau_a, c_ab**2, c_ac**2, lm.three_tangle(psi)


print("            tau_A   C_AB^2  C_AC^2  tau_res  sqrt(B_1)")
for name, psi in [("GHZ", lm.ghz(3)), ("W", lm.w3()), ("random", lm.sample_haar_pure(3, seed=2))]:
    row = ckw_row(psi)
    b = lm.b_invariant_mixed(lm.pure_to_density(psi), 1)
    print(f"{name:10s}" + "".join(f"{v:8.4f}" for v in row) + f"{np.sqrt(b):10.4f}")

# |B_j| is fixed by the two-qubit reduction alone
psi = lm.sample_haar_pure(3, seed=5)
rho_ab = lm.partial_trace(psi, [3])
lam = lm.lambda_spectrum(rho_ab)
print("\n|B_3|                ", abs(lm.b_invariant_pure(psi, 3)))
print("4 lambda_1 lambda_2  ", 4 * lam[0] * lam[1])
print("2(tr R - C^2)        ", 2 * (lm.tr_R(rho_ab) - lm.wootters_concurrence(rho_ab) ** 2))

# summed over the three positions
rep = lm.check_eq17(psi)
print(f"\nsum_j |B_j| + 2 C_j^2 = {rep.lhs:.10f}, from tau profile: {rep.rhs:.10f}")
