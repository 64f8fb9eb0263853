"""
A four-qubit degree-4 relation
==============================

|B_12 - B_13|^2 is proportional to det(tr_14 pi_psi). The ratio is the
same for every state; here it is measured on random states.
"""
import numpy as np

import lorentz_monogamy as lm

ratios = []
for seed in range(20):
    lhs, det = lm.n4_sides(lm.sample_haar_pure(4, seed))
    ratios.append(lhs / det)
    if seed < 5:
        print(f"seed {seed}:  |B12 - B13|^2 = {lhs:.6e}  det = {det:.6e}  ratio = {lhs / det:.9f}")

ratios = np.array(ratios)
print(f"\nmean ratio {ratios.mean():.9f}, spread {np.ptp(ratios):.1e}, 48^2 = {48**2}")
