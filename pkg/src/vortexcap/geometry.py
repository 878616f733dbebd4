"""Spherical geometry in colatitude/longitude coordinates.

Colatitude theta is measured from the north pole, theta in (0, pi); longitude
phi is 2*pi-periodic.  All angles are radians.  The chordal-distance function
``chordal_d`` carries the full singularity structure of the stream-function
kernel: it vanishes exactly at coincident points (for interior colatitudes)
and equals half the squared Euclidean chord.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# Contour code rejects colatitudes closer than this to a pole; the chart
# degenerates there.
POLE_MARGIN = 1e-8


class DomainError(ValueError):
    """Argument outside the mathematical domain of an operation."""


class SingularityError(ValueError):
    """Kernel evaluated at a singular (coincident-point) configuration."""


@dataclass(frozen=True)
class ColatLong:
    """Point on the sphere by colatitude/longitude, poles excluded."""

    theta: float
    phi: float

    def __post_init__(self) -> None:
        if not (0.0 < self.theta < math.pi):
            raise DomainError(f"colatitude {self.theta} outside (0, pi)")
        object.__setattr__(self, "phi", self.phi % (2.0 * math.pi))


@dataclass(frozen=True)
class Point3:
    """Cartesian point; unit norm when produced by the chart."""

    x: float
    y: float
    z: float

    def norm(self) -> float:
        return math.sqrt(self.x * self.x + self.y * self.y + self.z * self.z)


def chart_c1(p: ColatLong) -> Point3:
    """Map (theta, phi) to the unit sphere."""
    st = math.sin(p.theta)
    return Point3(st * math.cos(p.phi), st * math.sin(p.phi), math.cos(p.theta))


def chordal_d(theta, theta_p, phi, phi_p):
    """Half squared chord 1 - cos(theta)cos(theta') - sin(theta)sin(theta')cos(phi-phi').

    Evaluated in the kink-free form 2[sin^2((theta-theta')/2)
    + sin(theta)sin(theta')sin^2((phi-phi')/2)], which is manifestly >= 0 and
    loses no precision near coincident points.  Accepts scalars or arrays.
    """
    dt = 0.5 * (np.asarray(theta) - np.asarray(theta_p))
    dp = 0.5 * (np.asarray(phi) - np.asarray(phi_p))
    return 2.0 * (np.sin(dt) ** 2 + np.sin(theta) * np.sin(theta_p) * np.sin(dp) ** 2)


def green_kernel(theta, theta_p, phi, phi_p):
    """Stream-function kernel (1/4pi)[log D - log 2] at non-coincident points."""
    d = chordal_d(theta, theta_p, phi, phi_p)
    if np.any(np.asarray(d) <= 0.0):
        raise SingularityError("green_kernel at coincident points (D = 0)")
    return (np.log(d) - math.log(2.0)) / (4.0 * math.pi)


def rotate_z(alpha: float, p: Point3) -> Point3:
    """Rotate a point by angle alpha about the z axis."""
    c, s = math.cos(alpha), math.sin(alpha)
    return Point3(c * p.x - s * p.y, s * p.x + c * p.y, p.z)
