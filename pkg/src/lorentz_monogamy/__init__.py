"""Local SL(2,C) invariants of qubit states in the Bloch picture, and exact
monogamy equalities between global invariants and reduced-state entropies.
"""
from .bloch import (
    bloch_tensor,
    euclidean_norm_sq,
    four_det_relation,
    minkowski_norm_sq,
    reconstruct_density,
    space_like_sums,
    tr_R,
)
from .harness import (
    EnsembleReport,
    EnsembleSpec,
    parse_report,
    run_ensemble,
    run_invariance_sweep,
    run_trial,
    serialize_report,
)
from .invariants import (
    b_from_reduction,
    b_invariant_bloch3,
    b_invariant_mixed,
    b_invariant_pure,
    b_invariant_pure_pair,
    concurrence_bipartite_pure,
    h_concurrence_roof,
    h_invariant,
    lambda_spectrum,
    three_tangle,
    wootters_concurrence,
)
from .monogamy import (
    RelationReport,
    calibrate_n4_constant,
    check_ckw,
    check_eq2,
    check_eq4,
    check_eq6,
    check_eq10,
    check_eq11,
    check_eq13,
    check_eq15,
    check_eq16,
    check_eq17,
    check_n4_deg4,
    n4_sides,
    tau_profile,
)
from .states import (
    LocalOperator,
    apply_local,
    basis_product,
    bell,
    ghz,
    linear_entropy,
    make_pure,
    partial_trace,
    pure_to_density,
    purity,
    sample_haar_pure,
    sample_local_sl,
    sample_local_unitary,
    sample_mixed,
    spin_flip,
    w3,
)

__version__ = "0.1.0"
