"""
Ensemble runs and reports
=========================

The harness samples states from a seed, checks one relation per trial and
writes a report that is byte-identical across runs and worker counts.
"""
import lorentz_monogamy as lm

spec = lm.EnsembleSpec("eq17", 5, trials=50, seed=3)
serial = lm.run_ensemble(spec)
parallel = lm.run_ensemble(spec, workers=4)
print(f"max residual {serial.max_residual:.2e}, failures {serial.failure_count}")
print("serial == parallel bytes:", lm.serialize_report(serial) == lm.serialize_report(parallel))

# force failures with an impossible tolerance, then replay one trial alone
strict = lm.EnsembleSpec("eq11", 4, trials=20, seed=3, tolerance=1e-300)
report = lm.run_ensemble(strict)
first = report.failures[0]
print(f"\n{report.failure_count} failures; trial {first['trial']} residual {first['residual']:.3e}")
print("replayed alone:", lm.run_trial(strict, first["trial"]))

# invariance under local SL(2,C) maps with a condition cap
sl = lm.run_invariance_sweep(lm.EnsembleSpec("sl-invariance", 4, trials=100, cond_cap=20.0))
print(f"\nSL invariance over 100 trials: max relative change {sl.max_residual:.2e}")
print(lm.serialize_report(sl, "csv").decode().splitlines()[-1])
