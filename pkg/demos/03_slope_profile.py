"""
Growth rate as a function of slope
==================================

Estimate delta_theta on a grid of slopes, locate the maximising slope
and run the audits.
"""
import math

import numpy as np

from slopegrowth import action, rates
from slopegrowth.spectrum import Binning, spectrum_from_histogram

spec = action.example41()
L = 11
n = action.completeness_horizon(spec, L)
s = spectrum_from_histogram(action.displacement_histogram(spec, L), Binning(), n, spec.fingerprint(), horizon=n)

g = rates.delta_global(s)
print(f"global rate {g.value:.4f} +- {g.stderr:.4f} over annuli {g.window}")

profile = rates.build_profile(s)
for t, e in zip(profile.thetas, profile.estimates):
    if e.finite:
        print(f"  theta={t:.4f}  delta={e.value:.4f}  stderr={e.stderr:.4f}  eps={e.eps}")
print("finite points:", int(profile.finite_mask.sum()), "of", len(profile.thetas))

theta_star, delta_star = rates.find_theta_star(profile)
print(f"maximiser theta*={theta_star:.4f}, rate {delta_star:.4f}")

# the homogeneous extension x -> |x| delta(theta(x))
x = np.array([1.0, 1.5])
print("psi(x) =", rates.psi(profile, x), " psi(2x) =", rates.psi(profile, 2 * x))

band = (math.pi / 4, math.atan(2))
for res in (
    rates.regular_growth_check(s, band),
    rates.positivity_audit(profile, band),
    rates.continuity_audit(profile, 6.6),
    rates.sandwich_audit(profile, g),
):
    print(f"{res.name}: {'pass' if res.passed else 'FAIL'}  {res.violations[:3]}")

bad = rates.concavity_audit(profile.restricted(), slack=0.1)
print("concavity dips beyond 0.1:", len(bad))
