"""Zonal base states: one-interface flat caps and two-interface bands.

Both states carry piecewise-constant absolute vorticity subject to the Gauss
constraint (zero mean over the sphere).  The colatitude derivative of their
stream function has elementary antiderivatives on each zonal branch, which
``stream_integral_one``/``stream_integral_two`` exploit; only differences of
the stream function ever enter downstream code, so integration constants are
irrelevant.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .geometry import DomainError, POLE_MARGIN
from .quadrature import gauss_legendre

GAUSS_TOL = 1e-12


class DegenerateStateError(ValueError):
    """Vorticity levels coincide across an interface."""


@dataclass(frozen=True)
class FlatCapState:
    """Flat cap: omega_n above theta0, omega_s below, sphere rotation gamma."""

    theta0: float
    omega_n: float
    omega_s: float
    gamma: float = 0.0

    def __post_init__(self) -> None:
        if not (0.0 < self.theta0 < math.pi):
            raise DomainError("theta0 must lie in (0, pi)")
        if self.omega_n == self.omega_s:
            raise DegenerateStateError("omega_n == omega_s")
        lhs = (self.omega_n + self.omega_s) / (self.omega_n - self.omega_s)
        if abs(lhs - math.cos(self.theta0)) > GAUSS_TOL:
            raise DomainError("Gauss constraint violated for flat cap")

    @property
    def jump(self) -> float:
        return self.omega_n - self.omega_s

    def to_json(self) -> str:
        return json.dumps(
            {
                "theta0": self.theta0,
                "omega_n": self.omega_n,
                "omega_s": self.omega_s,
                "gamma": self.gamma,
            }
        )

    @staticmethod
    def from_json(text: str) -> "FlatCapState":
        d = json.loads(text)
        return FlatCapState(d["theta0"], d["omega_n"], d["omega_s"], d["gamma"])


@dataclass(frozen=True)
class BandState:
    """Vorticity band: omega_n / omega_c / omega_s split at theta1 < theta2."""

    theta1: float
    theta2: float
    omega_n: float
    omega_c: float
    omega_s: float
    gamma: float = 0.0

    def __post_init__(self) -> None:
        if not (0.0 < self.theta1 < self.theta2 < math.pi):
            raise DomainError("need 0 < theta1 < theta2 < pi")
        if self.omega_n == self.omega_c or self.omega_c == self.omega_s:
            raise DegenerateStateError("adjacent vorticities coincide")
        lhs = self.omega_n + self.omega_s
        rhs = (self.omega_n - self.omega_c) * math.cos(self.theta1) + (
            self.omega_c - self.omega_s
        ) * math.cos(self.theta2)
        if abs(lhs - rhs) > GAUSS_TOL * max(1.0, abs(lhs), abs(rhs)):
            raise DomainError("Gauss constraint violated for band")

    def to_json(self) -> str:
        return json.dumps(
            {
                "theta1": self.theta1,
                "theta2": self.theta2,
                "omega_n": self.omega_n,
                "omega_c": self.omega_c,
                "omega_s": self.omega_s,
                "gamma": self.gamma,
            }
        )

    @staticmethod
    def from_json(text: str) -> "BandState":
        d = json.loads(text)
        return BandState(
            d["theta1"], d["theta2"], d["omega_n"], d["omega_c"], d["omega_s"], d["gamma"]
        )


def solve_gauss_one(theta0: float, omega_s: float, gamma: float = 0.0) -> FlatCapState:
    """Solve the one-interface Gauss constraint for omega_n given omega_s."""
    if not (0.0 < theta0 < math.pi):
        raise DomainError("theta0 must lie in (0, pi)")
    if omega_s == 0.0:
        raise DegenerateStateError("omega_s = 0 forces omega_n = omega_s")
    c = math.cos(theta0)
    omega_n = omega_s * (c + 1.0) / (c - 1.0)
    return FlatCapState(theta0, omega_n, omega_s, gamma)


def solve_gauss_two(
    theta1: float, theta2: float, omega_n: float, omega_s: float, gamma: float = 0.0
) -> BandState:
    """Solve the two-interface Gauss constraint for the central vorticity."""
    if not (0.0 < theta1 < math.pi and 0.0 < theta2 < math.pi):
        raise DomainError("theta1, theta2 must lie in (0, pi)")
    if theta1 >= theta2:
        raise DomainError("need theta1 < theta2")
    c1, c2 = math.cos(theta1), math.cos(theta2)
    omega_c = (omega_n * (1.0 - c1) + omega_s * (1.0 + c2)) / (c2 - c1)
    if omega_c == omega_n or omega_c == omega_s:
        raise DegenerateStateError("solved omega_c equals a neighbouring level")
    return BandState(theta1, theta2, omega_n, omega_c, omega_s, gamma)


def _check_interior(theta) -> None:
    t = np.asarray(theta)
    if np.any(t < POLE_MARGIN) or np.any(t > math.pi - POLE_MARGIN):
        raise DomainError("colatitude at or beyond a pole")


def flat_stream_dtheta_one(state: FlatCapState, theta):
    """d/dtheta of the flat-cap stream function (right-continuous at theta0)."""
    _check_interior(theta)
    t = np.asarray(theta, dtype=float)
    north = state.omega_n * np.tan(0.5 * t) - state.gamma * np.sin(t)
    south = -state.omega_s / np.tan(0.5 * t) - state.gamma * np.sin(t)
    out = np.where(t < state.theta0, north, south)
    return out if out.ndim else float(out)


def flat_stream_dtheta_two(band: BandState, theta):
    """d/dtheta of the band stream function (right-continuous at interfaces)."""
    _check_interior(theta)
    t = np.asarray(theta, dtype=float)
    c2 = math.cos(band.theta2)
    north = band.omega_n * np.tan(0.5 * t) - band.gamma * np.sin(t)
    centre = (
        band.omega_c * (c2 - np.cos(t)) - band.omega_s * (1.0 + c2)
    ) / np.sin(t) - band.gamma * np.sin(t)
    south = -band.omega_s / np.tan(0.5 * t) - band.gamma * np.sin(t)
    out = np.where(t < band.theta1, north, np.where(t < band.theta2, centre, south))
    return out if out.ndim else float(out)


def _antideriv_north(omega_n: float, gamma: float, t):
    return -2.0 * omega_n * np.log(np.cos(0.5 * t)) + gamma * np.cos(t)


def _antideriv_south(omega_s: float, gamma: float, t):
    return -2.0 * omega_s * np.log(np.sin(0.5 * t)) + gamma * np.cos(t)


def stream_integral_one(state: FlatCapState, a, b):
    """Exact int_a^b of flat_stream_dtheta_one, splitting at the interface.

    a may be scalar or array-broadcast against b; values must stay interior.
    """
    _check_interior(a)
    _check_interior(b)
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    t0 = state.theta0
    # Clip each endpoint into its branch: integral over [a,b] decomposes as
    # [a, t0] (north antiderivative) + [t0, b] (south), each possibly empty.
    an = np.minimum(a, t0)
    bn = np.minimum(b, t0)
    north = _antideriv_north(state.omega_n, state.gamma, bn) - _antideriv_north(
        state.omega_n, state.gamma, an
    )
    as_ = np.maximum(a, t0)
    bs = np.maximum(b, t0)
    south = _antideriv_south(state.omega_s, state.gamma, bs) - _antideriv_south(
        state.omega_s, state.gamma, as_
    )
    out = north + south
    return out if out.ndim else float(out)


def stream_integral_two(band: BandState, a, b):
    """Exact int_a^b of flat_stream_dtheta_two, splitting at both interfaces."""
    _check_interior(a)
    _check_interior(b)
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    t1, t2 = band.theta1, band.theta2
    c2 = math.cos(t2)
    k = band.omega_c * c2 - band.omega_s * (1.0 + c2)

    def centre_anti(t):
        return (
            k * np.log(np.tan(0.5 * t))
            - band.omega_c * np.log(np.sin(t))
            + band.gamma * np.cos(t)
        )

    an, bn = np.minimum(a, t1), np.minimum(b, t1)
    north = _antideriv_north(band.omega_n, band.gamma, bn) - _antideriv_north(
        band.omega_n, band.gamma, an
    )
    ac = np.clip(a, t1, t2)
    bc = np.clip(b, t1, t2)
    centre = centre_anti(bc) - centre_anti(ac)
    as_, bs = np.maximum(a, t2), np.maximum(b, t2)
    south = _antideriv_south(band.omega_s, band.gamma, bs) - _antideriv_south(
        band.omega_s, band.gamma, as_
    )
    out = north + centre + south
    return out if out.ndim else float(out)


def signed_cap_measure(state) -> float:
    """Sum of omega_k * sigma(C_k); vanishes under the Gauss constraint."""
    if isinstance(state, FlatCapState):
        c0 = math.cos(state.theta0)
        return 2.0 * math.pi * (
            state.omega_n * (1.0 - c0) + state.omega_s * (1.0 + c0)
        )
    c1, c2 = math.cos(state.theta1), math.cos(state.theta2)
    return 2.0 * math.pi * (
        state.omega_n * (1.0 - c1)
        + state.omega_c * (c1 - c2)
        + state.omega_s * (1.0 + c2)
    )


def _vorticity_pieces(state):
    """(theta_lo, theta_hi, omega) spans of the absolute vorticity profile."""
    if isinstance(state, FlatCapState):
        return [
            (0.0, state.theta0, state.omega_n),
            (state.theta0, math.pi, state.omega_s),
        ]
    return [
        (0.0, state.theta1, state.omega_n),
        (state.theta1, state.theta2, state.omega_c),
        (state.theta2, math.pi, state.omega_s),
    ]


def _i0_kernel(a: float, b):
    """phi-mean of log D at fixed colatitudes: log((1+cos(min))(1-cos(max))/2)."""
    b = np.asarray(b, dtype=float)
    lo = np.minimum(a, b)
    hi = np.maximum(a, b)
    return np.log(2.0 * np.cos(0.5 * lo) ** 2 * np.sin(0.5 * hi) ** 2)


def zonal_stream_quadrature(state, theta: float, panel_order: int = 48) -> float:
    """Brute-force zonal stream function at colatitude theta (up to a constant).

    Independent oracle path: the full vorticity is integrated against the
    phi-averaged kernel with panelized Gauss-Legendre in theta', panels split
    at the interfaces and at theta where the kernel has a kink.

    Convention: this library transports the absolute vorticity
    Omega + 2*gamma*cos(theta) (planetary vorticity with the standard sign),
    so the full vorticity inverted here is the stored profile minus the
    2*gamma*cos(theta) background.
    """
    pieces = _vorticity_pieces(state)
    cuts = sorted({0.0, math.pi, theta, *(p[1] for p in pieces[:-1])})
    total = 0.0
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        if hi - lo < 1e-15:
            continue

        def integrand(tp, lo=lo, hi=hi):
            omega_bar = np.zeros_like(tp)
            for plo, phi_, w in pieces:
                omega_bar += np.where((tp >= plo) & (tp < phi_), w, 0.0)
            omega_tot = omega_bar - 2.0 * state.gamma * np.cos(tp)
            return _i0_kernel(theta, tp) * omega_tot * np.sin(tp)

        total += gauss_legendre(integrand, lo, hi, panel_order)
    return 0.5 * total
