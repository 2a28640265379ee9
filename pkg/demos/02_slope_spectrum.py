"""
Counting orbit points by annulus and slope
==========================================

The subgroup of F_2 x F_2 generated by x = (a1, b1) and y = (a2, b2^2)
has slopes filling [pi/4, arctan 2].  Enumerate it and tabulate.
"""
import math
import tempfile
from pathlib import Path

from slopegrowth import action
from slopegrowth.spectrum import (
    Binning, annulus_count, load_spectrum, save_spectrum, slope_annulus_counts, spectrum_from_histogram,
)

spec = action.example41()
L = 9
horizon = action.completeness_horizon(spec, L)
print(f"{spec.name}: enumerating reduced words up to length {L}; complete up to r < {horizon}")

# the compiled walk returns a {(d1, d2): count} table
hist = action.displacement_histogram(spec, L)
print("distinct displacements:", len(hist), "elements:", sum(hist.values()))

s = spectrum_from_histogram(hist, Binning(), horizon, spec.fingerprint(), horizon=horizon)
print("annulus totals:", [annulus_count(s, n) for n in range(1, horizon + 1)])

# slope-restricted counts for a few directions
for theta in (0.5, math.pi / 4, 1.0, math.atan(2), 1.3):
    print(f"theta={theta:.3f}:", slope_annulus_counts(s, 0.05, theta).tolist())

# a single word
w = spec.word("x y^-1 x")
print(w.to_literal(), "->", action.displacement(spec, w))

# spectra persist to a checksummed text file
with tempfile.TemporaryDirectory() as tmp:
    path = Path(tmp) / "spectrum.cache"
    save_spectrum(s, path)
    print("reloaded equal:", load_spectrum(path, expect_fingerprint=spec.fingerprint()) == s)
