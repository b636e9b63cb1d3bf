"""
Sudden changes of entanglement for E, V and Lambda qutrits
==========================================================

Each negative eigenvalue of the partially transposed state is a branch of
entanglement.  When a branch reaches zero at finite time, the negativity
kinks.  The Lambda structure has a dark pair of levels and can keep some
entanglement forever.
"""
import numpy as np

from qutrit_feedback.analysis import (InitialCoeffs, classify_regime, detect_sudden_changes, evolve_spectra,
                                      lambda_nojump_asymptote, nojump_transient_check, regime_from_spectra)

sample = InitialCoeffs.normalized(0.179, 0.2386, 0.9545)
for s in ("E", "V"):
    times, spec, neg = evolve_spectra(s, [sample], t_max=15)
    sc = detect_sudden_changes(spec[0], times)
    print(f"{s}: table says {classify_regime(s, sample)}; master equation gives "
          f"{regime_from_spectra(spec[0], times)} with changes at {np.round(sc.times, 3)}")

lam = InitialCoeffs.normalized(0.2386, 0.9545, 0.179)
times, spec, neg = evolve_spectra("Lambda", [lam], t_max=15)
print(f"Lambda: {classify_regime('Lambda', lam)}; N(15) = {neg[0, -1]:.4f}")

# %%
# Conditioned on no clicks, entanglement can grow before it settles.
for c in (sample, InitialCoeffs.normalized(0.9545, 0.2386, 0.179)):
    r = nojump_transient_check("E", c)
    print(f"(a, b, c) = ({c.a:.3f}, {c.b:.3f}, {c.c:.3f}): N(0) = {r['initial']:.3f}, "
          f"max {r['max_negativity']:.3f} at t = {r['time_of_max']:.2f}")
print("Lambda no-click asymptote for a=0.179, b=0.2386:",
      round(lambda_nojump_asymptote(InitialCoeffs.normalized(0.179, 0.2386, 0.9545)), 5))
