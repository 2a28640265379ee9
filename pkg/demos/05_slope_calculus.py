"""
Slope calculus
==============

Unit slope vectors, the angle of a convex combination, and two weights
for mixing the boundary directions.
"""
import math

from slopegrowth.calculus import (
    h_vec, mixing_identity_residual, mixing_parameter, ray_mixing_parameter, tau, tau_prime,
)

beta, theta = 0.3, 1.2
for t in (0.0, 0.25, 0.5, 0.75, 1.0):
    print(f"t={t:.2f}  tau={tau(t, beta, theta):.6f}  tau'={tau_prime(t, beta, theta):.6f}")

print("H(pi/3) =", h_vec(math.pi / 3))

# t H(pi/2) + (1-t) H(0) lies on the theta ray only for the right t
print(" theta   tan(theta/2) residual   sin/(sin+cos) residual")
for deg in (0, 15, 30, 45, 60, 75, 90):
    th = math.radians(deg)
    a = mixing_identity_residual(th, mixing_parameter(th))
    b = mixing_identity_residual(th, ray_mixing_parameter(th))
    print(f" {deg:5d}   {a:.3e}               {b:.3e}")
