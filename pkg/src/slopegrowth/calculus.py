"""Closed-form slope calculus on the positive quadrant.

Pure double-precision helpers: unit slope vectors, the arctan interpolation
between two slopes and its derivative, the boundary mixing weight, and the
closed-form rates of the worked examples.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

HALF_PI = math.pi / 2

__all__ = [
    "SlopeVector",
    "h_vec",
    "tau",
    "tau_prime",
    "mixing_parameter",
    "ray_mixing_parameter",
    "mixing_identity_residual",
    "second_coordinate_identity_residual",
    "example51_formula",
    "example41_tan",
]


@dataclass(frozen=True)
class SlopeVector:
    x1: float
    x2: float

    def __post_init__(self):
        if self.x1 < 0 or self.x2 < 0:
            raise ValueError("slope vectors live in the closed positive quadrant")

    @property
    def norm(self) -> float:
        return math.hypot(self.x1, self.x2)

    @property
    def theta(self) -> float:
        if self.x1 == 0 and self.x2 == 0:
            raise ValueError("slope of the zero vector is undefined")
        return math.atan2(self.x2, self.x1)

    def __add__(self, other: "SlopeVector") -> "SlopeVector":
        return SlopeVector(self.x1 + other.x1, self.x2 + other.x2)

    def __rmul__(self, c: float) -> "SlopeVector":
        return SlopeVector(c * self.x1, c * self.x2)


def _check_angle(g: float) -> None:
    if not 0 <= g <= HALF_PI:
        raise ValueError(f"angle {g} outside [0, pi/2]")


def h_vec(gamma: float) -> SlopeVector:
    _check_angle(gamma)
    if gamma == HALF_PI:
        return SlopeVector(0.0, 1.0)
    return SlopeVector(math.cos(gamma), math.sin(gamma))


def _tau_parts(t, beta, theta):
    if not 0 <= beta < theta <= HALF_PI:
        raise ValueError(f"need 0 <= beta < theta <= pi/2, got beta={beta}, theta={theta}")
    if not 0 <= t <= 1:
        raise ValueError(f"t={t} outside [0, 1]")
    c = t * math.cos(theta) + (1 - t) * math.cos(beta)
    s = t * math.sin(theta) + (1 - t) * math.sin(beta)
    return c, s


def tau(t: float, beta: float, theta: float) -> float:
    """Angle of t*H_theta + (1-t)*H_beta; tau(0) = beta, tau(1) = theta."""
    if t == 0:
        _tau_parts(t, beta, theta)
        return beta
    if t == 1:
        _tau_parts(t, beta, theta)
        return theta
    c, s = _tau_parts(t, beta, theta)
    return math.atan2(s, c)


def tau_prime(t: float, beta: float, theta: float) -> float:
    c, s = _tau_parts(t, beta, theta)
    num = (math.sin(theta) - math.sin(beta)) * c + (math.cos(beta) - math.cos(theta)) * s
    return num / (c * c + s * s)


def mixing_parameter(theta: float) -> float:
    """sin(theta) / (1 + cos(theta)), the weight printed for the boundary mix.

    Note this is tan(theta/2); it does *not* put t*H_{pi/2} + (1-t)*H_0 on
    the ray of H_theta except at theta in {0, pi/2}.  See
    :func:`ray_mixing_parameter` for the weight that does.
    """
    _check_angle(theta)
    return math.sin(theta) / (1 + math.cos(theta))


def ray_mixing_parameter(theta: float) -> float:
    """sin / (sin + cos): the weight with t*H_{pi/2} + (1-t)*H_0 parallel to H_theta."""
    _check_angle(theta)
    s, c = math.sin(theta), math.cos(theta)
    return s / (s + c)


def mixing_identity_residual(theta: float, t: float | None = None) -> float:
    """Euclidean norm of t*H_{pi/2} + (1-t)*H_0 - sqrt(t^2 + (1-t)^2) * H_theta.

    ``t`` defaults to :func:`mixing_parameter` of theta.
    """
    if t is None:
        t = mixing_parameter(theta)
    h = h_vec(theta)
    scale = math.sqrt(t * t + (1 - t) * (1 - t))
    return math.hypot((1 - t) - scale * h.x1, t - scale * h.x2)


def second_coordinate_identity_residual(x: SlopeVector, y: SlopeVector, t: float) -> float:
    """||z|| sin(theta(z)) - (t ||x|| sin(theta(x)) + (1-t) ||y|| sin(theta(y))), z = tx + (1-t)y.

    Both sides are the second coordinate of z, so this vanishes up to rounding.
    """
    if not 0 <= t <= 1:
        raise ValueError(f"t={t} outside [0, 1]")

    def lifted(v: SlopeVector) -> float:
        return 0.0 if v.norm == 0 else v.norm * math.sin(v.theta)

    z = t * x + (1 - t) * y
    return lifted(z) - (t * lifted(x) + (1 - t) * lifted(y))


def example51_formula(N: int, theta: float) -> float:
    """log(2(N-2)-1) sin(theta) - (log(2(N-2)-1) - log 3) cos(theta), on [pi/4, pi/2]."""
    if N < 3:
        raise ValueError(f"N must be >= 3, got {N}")
    if not math.pi / 4 - 1e-15 <= theta <= HALF_PI:
        raise ValueError(f"closed form only holds on [pi/4, pi/2], got theta={theta}")
    a = math.log(2 * (N - 2) - 1)
    c = 0.0 if theta == HALF_PI else math.cos(theta)
    return a * math.sin(theta) - (a - math.log(3)) * c


def example41_tan(n: int, m: int) -> float:
    """Slope tangent (n + 2m) / (n + m) of a word with n x-letters and m y-letters."""
    if n < 0 or m < 0 or n + m == 0:
        raise ValueError("need n, m >= 0 with n + m >= 1")
    return (n + 2 * m) / (n + m)
