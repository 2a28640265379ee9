"""
When the first factor cancels
=============================

g1 = (a1, b1), g2 = (a2, b2), g_i = (1, b_i) in F_2 x F_N.  A closed form
for delta_theta is available if first-factor length were the number of
g1, g2 letters; here words like g1 g3 g1^-1 collapse in the first factor,
so the measured rates sit above it.
"""
import math

from slopegrowth import action, rates
from slopegrowth.calculus import example51_formula
from slopegrowth.spectrum import Binning, spectrum_from_histogram

N, L = 4, 9
spec = action.example51(N)
w = spec.word("g1 g3 g1^-1")
print(w.to_literal(), "->", action.displacement(spec, w))

s = spectrum_from_histogram(action.displacement_histogram(spec, L), Binning(), L, spec.fingerprint(), horizon=L)
profile = rates.build_profile(s)

print(" theta    measured  closed form")
for t, e in zip(profile.thetas, profile.estimates):
    if t >= math.pi / 4 and round(math.degrees(t)) % 5 == 0:
        print(f" {t:.4f}   {e.value:8.4f}  {example51_formula(N, float(t)):8.4f}")

ts, ds = rates.find_theta_star(profile)
print(f"measured maximiser {ts:.4f} (rate {ds:.4f})")

# the closed form alone sits exactly on the boundary of the interior condition
sharp = rates.check_interior_condition(rates.RateProfile.from_function(lambda t: math.log(3) * math.sin(t)))
print(sharp.to_text().splitlines()[0])
print(rates.check_interior_condition(profile, tolerance=0.05).to_text().splitlines()[0])
