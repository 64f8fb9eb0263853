"""
Odd N beyond three: rank-2 convex roofs
=======================================

Tracing one qubit out of a five-qubit pure state leaves a rank-2 state of
four qubits. The convex roof of |H| on it has a closed form, and with it
the degree-4 relation holds position by position.
"""
import lorentz_monogamy as lm

psi = lm.sample_haar_pure(5, seed=11)
for j in range(1, 6):
    reduced = lm.partial_trace(psi, [j])
    rep = lm.check_eq16(psi, j)
    print(
        f"j={j}  roof {lm.h_concurrence_roof(reduced):.6f}  tr R {lm.tr_R(reduced):.6f}  "
        f"|B_j| {rep.lhs:.6f}  2(trR - roof^2) {rep.rhs:.6f}"
    )

rep = lm.check_eq17(psi)
print(f"\nsummed relation: {rep.lhs:.10f} vs {rep.rhs:.10f}")

# GHZ(5) reductions are separable mixtures of |0000> and |1111>
print("roof on tr_1 GHZ(5):", lm.h_concurrence_roof(lm.partial_trace(lm.ghz(5), [1])))
