"""
Bloch tensors and the Minkowski metric
======================================

A density matrix expands in products of (I, X, Y, Z). Contracting the
coefficients with the Euclidean metric gives the purity, and contracting
them with diag(1, -1, -1, -1) on every index gives tr R.
"""
import numpy as np

import lorentz_monogamy as lm

# the Bell state has four nonzero coefficients: r00, rxx, ryy, rzz
rho = lm.pure_to_density(lm.bell())
r = lm.bloch_tensor(rho)
print("Bell coefficients (nonzero):")
for idx in zip(*np.nonzero(np.abs(r) > 1e-12)):
    print("   ", "".join("IXYZ"[i] for i in idx), f"{r[idx]:+.3f}")

# both metric contractions on a random mixed state
rho = lm.sample_mixed(3, None, seed=7)
r = lm.bloch_tensor(rho)
print("\nrandom 3-qubit mixed state")
print("  tr rho^2      ", lm.purity(rho))
print("  euclidean     ", lm.euclidean_norm_sq(r))
print("  tr R          ", lm.tr_R(rho))
print("  minkowski     ", lm.minkowski_norm_sq(r))

# a local SL(2, C) transformation keeps tr R but not the purity
moved = lm.apply_local(rho, lm.sample_local_sl(3, seed=1))
print("\nafter a local SL(2,C) map (unnormalized)")
print("  tr R          ", lm.tr_R(moved))
print("  tr rho^2      ", lm.purity(moved))

# single qubit: 4 det rho equals the Minkowski square of the Bloch vector
rho1 = lm.sample_mixed(1, None, seed=3)
print("\nsingle qubit (4 det rho, r.r):", lm.four_det_relation(rho1))
