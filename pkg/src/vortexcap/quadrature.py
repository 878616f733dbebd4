"""Periodic and log-singular quadrature rules and the kernel integral in_closed.

``in_closed`` is the closed-form cosine transform of the zonal kernel slice,

    (1/2pi) int_0^{2pi} cos(n x) log(1 - cos a cos b - sin a sin b cos x) dx
        = -(1/n) tan^n(min(a,b)/2) cot^n(max(a,b)/2),

with ``in_oracle`` its independent trapezoid evaluation used as a test oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import DomainError

TWO_PI = 2.0 * math.pi


class ResolutionError(ValueError):
    """Quadrature resolution too coarse for the requested mode."""


@dataclass(frozen=True)
class PeriodicGrid:
    """Uniform grid on [0, 2pi) with the trapezoid weight 2pi/N."""

    n_points: int
    nodes: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if self.n_points <= 0 or self.n_points % 2 != 0:
            raise DomainError("n_points must be a positive even integer")
        object.__setattr__(
            self, "nodes", TWO_PI * np.arange(self.n_points) / self.n_points
        )

    @property
    def weight(self) -> float:
        return TWO_PI / self.n_points


def periodic_trapezoid(samples) -> float:
    """Trapezoid rule on a PeriodicGrid; spectrally accurate for smooth integrands."""
    samples = np.asarray(samples)
    if samples.size == 0:
        raise DomainError("empty sample sequence")
    return float(TWO_PI * np.mean(samples, axis=-1))


def in_closed(n: int, a: float, b: float) -> float:
    """Closed form -(1/n) tan^n(min/2) cot^n(max/2); symmetric in (a, b).

    The geometric factor is assembled in log space so large n underflow to a
    clean zero instead of spurious inf/nan.
    """
    if n < 1:
        raise DomainError("n must be >= 1")
    if not (0.0 < a < math.pi and 0.0 < b < math.pi):
        raise DomainError("a, b must lie in (0, pi)")
    lo, hi = min(a, b), max(a, b)
    log_ratio = math.log(math.tan(0.5 * lo)) - math.log(math.tan(0.5 * hi))
    return -math.exp(n * log_ratio) / n


def in_oracle(n: int, a: float, b: float, n_points: int = 4096) -> float:
    """Quadrature evaluation of the kernel cosine transform, independent of
    ``in_closed``.

    a != b: the integrand is smooth and periodic, so the plain trapezoid rule
    is spectrally accurate.  a = b: the integrand has an integrable log
    singularity at x = 0 where a uniform (even half-step-shifted) rule only
    converges at first order, so the even symmetry about x = 0 is used with a
    cubically graded Gauss-Legendre substitution x = pi t^3 instead.  The
    kernel argument is evaluated in its sin^2 rewriting, which is exact and
    avoids cancellation near coincidence.
    """
    if n < 1:
        raise DomainError("n must be >= 1")
    if not (0.0 < a < math.pi and 0.0 < b < math.pi):
        raise DomainError("a, b must lie in (0, pi)")
    if n_points < 8 * n:
        raise ResolutionError(f"n_points={n_points} < 8n={8 * n}")

    def kernel_log(x):
        return np.log(
            2.0
            * (
                math.sin(0.5 * (a - b)) ** 2
                + math.sin(a) * math.sin(b) * np.sin(0.5 * x) ** 2
            )
        )

    if a == b:
        order = max(192, 8 * n)
        xg, wg = np.polynomial.legendre.leggauss(order)
        t = 0.5 * (xg + 1.0)
        x = math.pi * t**3
        w = 0.5 * wg * 3.0 * math.pi * t**2
        return float(np.dot(w, np.cos(n * x) * kernel_log(x))) / math.pi
    x = TWO_PI * np.arange(n_points) / n_points
    return periodic_trapezoid(np.cos(n * x) * kernel_log(x)) / TWO_PI


def log_singular_multiplier(coeffs, grid: PeriodicGrid) -> np.ndarray:
    """Convolve an even cosine series with log(4 sin^2((phi-phi')/2)) exactly.

    The kernel acts diagonally in Fourier space: cos(k phi) -> -(2pi/k) cos(k phi)
    and the constant mode -> 0.  ``coeffs`` are [a_0, a_1, ..., a_K]; returns
    the convolved samples on ``grid``.
    """
    coeffs = np.asarray(coeffs, dtype=float)
    phi = grid.nodes
    out = np.zeros_like(phi)
    for k in range(1, coeffs.size):
        out += -(TWO_PI / k) * coeffs[k] * np.cos(k * phi)
    return out


def convolve_log_kernel(samples: np.ndarray) -> np.ndarray:
    """Samples-space version: int g(phi') log(4 sin^2((phi-phi')/2)) dphi'.

    Exact for band-limited g via the same Fourier multiplier; the Nyquist mode
    is kept with the -(2pi/|k|) weight.
    """
    samples = np.asarray(samples, dtype=float)
    n = samples.size
    spec = np.fft.rfft(samples)
    k = np.arange(spec.size, dtype=float)
    mult = np.zeros_like(k)
    mult[1:] = -TWO_PI / k[1:]
    return np.fft.irfft(spec * mult, n)


def gauss_legendre(fn, lo: float, hi: float, order: int = 12) -> float:
    """Gauss-Legendre approximation of int_lo^hi fn; handles lo > hi by sign."""
    if order < 2:
        raise DomainError("order must be >= 2")
    x, w = np.polynomial.legendre.leggauss(order)
    mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
    return float(half * np.dot(w, fn(mid + half * x)))
