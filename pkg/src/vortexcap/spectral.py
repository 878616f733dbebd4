"""Closed-form spectral theory for both interface counts.

One interface: the linearization acts diagonally on cos(mn*phi) with symbol
mn[-c - (omega_n-omega_s)(mn-1)/(2mn) + gamma]; its roots are the shifted
Burbea speeds.  Two interfaces: each mode n couples through a 2x2 matrix
M_n(c) whose determinant c^2 - beta_n c + gamma_n yields at most two speeds
c_n^+/-.  The discriminant is assembled as (m11-m22)^2 + 4*m12*m21, which is
algebraically identical to beta^2 - 4*gamma but manifestly gamma-free and
stable when the exponential coupling factor underflows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .geometry import DomainError
from .states import BandState, FlatCapState

COLLISION_TOL = 1e-10
CONDITION_TOL = 1e-12


def burbea_shifted_speed(
    m: int, gamma: float, omega_n: float, omega_s: float
) -> float:
    """Candidate bifurcation speed gamma - (omega_n-omega_s)(m-1)/(2m)."""
    if m < 1:
        raise DomainError("m must be >= 1")
    return gamma - (omega_n - omega_s) * (m - 1) / (2.0 * m)


def one_interface_symbol(m: int, n: int, c: float, state: FlatCapState) -> float:
    """Fourier symbol of the one-interface linearization on cos(mn*phi)."""
    if m < 1 or n < 1:
        raise DomainError("m, n must be >= 1")
    mn = m * n
    return mn * (-c - state.jump * (mn - 1) / (2.0 * mn) + state.gamma)


def coupling_factor(n: int, theta1: float, theta2: float) -> float:
    """tan^n(theta1/2) cot^n(theta2/2), in log space to avoid underflow."""
    log_ratio = math.log(math.tan(0.5 * theta1)) - math.log(math.tan(0.5 * theta2))
    arg = n * log_ratio
    return math.exp(arg) if arg > -745.0 else 0.0


@dataclass(frozen=True)
class BandMatrix:
    """Mode-n coupling matrix of the two-interface linearization."""

    n: int
    c: float
    m11: float
    m12: float
    m21: float
    m22: float

    def matrix(self) -> np.ndarray:
        return np.array([[self.m11, self.m12], [self.m21, self.m22]])

    def det(self) -> float:
        return self.m11 * self.m22 - self.m12 * self.m21


@dataclass(frozen=True)
class SpectrumEntry:
    n: int
    c_plus: float
    c_minus: float
    discriminant: float
    valid: bool


@dataclass(frozen=True)
class NondegeneracyCase:
    """Condition-1 / condition-2 classification with satisfied (Hk+/-) labels."""

    kind: str  # "condition1" | "condition2" | "unclassified"
    labels: tuple[str, ...] = ()


def _diag_terms(band: BandState) -> tuple[float, float]:
    """n-independent diagonal offsets: -omega_n/(2cos^2), +omega_s/(2sin^2)."""
    d1 = -band.omega_n / (2.0 * math.cos(0.5 * band.theta1) ** 2)
    d2 = band.omega_s / (2.0 * math.sin(0.5 * band.theta2) ** 2)
    return d1, d2


def band_matrix(n: int, c: float, band: BandState) -> BandMatrix:
    if n < 1:
        raise DomainError("n must be >= 1")
    d1, d2 = _diag_terms(band)
    coup = coupling_factor(n, band.theta1, band.theta2)
    s1, s2 = math.sin(band.theta1), math.sin(band.theta2)
    jn = (band.omega_n - band.omega_c) / (2.0 * n)
    js = (band.omega_c - band.omega_s) / (2.0 * n)
    return BandMatrix(
        n=n,
        c=c,
        m11=-c + jn + d1 + band.gamma,
        m12=js * (s2 / s1) * coup,
        m21=jn * (s1 / s2) * coup,
        m22=-c + js + d2 + band.gamma,
    )


def band_det_coeffs(n: int, band: BandState) -> tuple[float, float]:
    """(beta_n, gamma_n) of det M_n(c) = c^2 - beta_n c + gamma_n."""
    mat = band_matrix(n, 0.0, band)
    beta = mat.m11 + mat.m22
    gam = mat.m11 * mat.m22 - mat.m12 * mat.m21
    return beta, gam


def band_discriminant(n: int, band: BandState) -> float:
    """beta_n^2 - 4 gamma_n via (m11-m22)^2 + 4 m12 m21; gamma-independent."""
    mat = band_matrix(n, 0.0, band)
    return (mat.m11 - mat.m22) ** 2 + 4.0 * mat.m12 * mat.m21


def band_speeds(n: int, band: BandState) -> SpectrumEntry:
    """Roots of det M_n(c), flagged invalid when the discriminant is <= 0."""
    beta, _ = band_det_coeffs(n, band)
    disc = band_discriminant(n, band)
    if disc <= 0.0:
        return SpectrumEntry(n, math.nan, math.nan, disc, False)
    half = 0.5 * math.sqrt(disc)
    return SpectrumEntry(n, 0.5 * beta + half, 0.5 * beta - half, disc, True)


def _abs_argument(n: int, band: BandState) -> float:
    """Argument of the |.| factor in the speed factorization; its sign decides
    which diagonal limit each speed family approaches."""
    d1, d2 = _diag_terms(band)
    return 2.0 * (d2 - d1) - (band.omega_n + band.omega_s - 2.0 * band.omega_c) / n


def find_threshold_n(band: BandState, n_max: int = 512) -> Optional[int]:
    """Smallest N <= n_max past which the spectrum is clean on [N, n_max].

    Clean means: positive discriminant, stable sign of the |.|-factor
    argument, and strictly monotone c_n^+ and c_n^- (constant-sign consecutive
    differences).  Finite-scan surrogate for the asymptotic threshold.
    """
    if n_max < 2:
        raise DomainError("n_max must be >= 2")
    entries = [band_speeds(n, band) for n in range(1, n_max + 1)]
    signs = [math.copysign(1.0, _abs_argument(n, band)) for n in range(1, n_max + 1)]

    first_ok = n_max + 1  # 1-based candidate
    for n in range(n_max, 0, -1):
        e = entries[n - 1]
        if not e.valid or signs[n - 1] != signs[-1]:
            break
        if n <= n_max - 2:
            nxt, nxt2 = entries[n], entries[n + 1]
            d_plus = nxt.c_plus - e.c_plus
            d_plus2 = nxt2.c_plus - nxt.c_plus
            d_minus = nxt.c_minus - e.c_minus
            d_minus2 = nxt2.c_minus - nxt.c_minus
            if d_plus * d_plus2 <= 0.0 or d_minus * d_minus2 <= 0.0:
                break
        first_ok = n
    return first_ok if first_ok <= n_max else None


def nondegeneracy_case(band: BandState) -> NondegeneracyCase:
    """Classify per the bifurcation theorem's non-degeneracy conditions."""
    q = band.omega_s * math.cos(0.5 * band.theta1) ** 2 + band.omega_n * math.sin(
        0.5 * band.theta2
    ) ** 2
    if abs(q) > CONDITION_TOL:
        return NondegeneracyCase("condition1")
    # Condition 2: the Gauss constraint then forces these identities.
    if abs(band.omega_c - (band.omega_n + band.omega_s)) > CONDITION_TOL * max(
        1.0, abs(band.omega_c)
    ):
        raise DomainError("condition-2 state violates omega_c = omega_n + omega_s")
    if band.omega_c == 0.0 or band.omega_n * band.omega_s >= 0.0:
        raise DomainError("condition-2 state violates sign structure")
    wc, wn, ws = band.omega_c, band.omega_n, band.omega_s
    cos2 = math.cos(0.5 * band.theta1) ** 2
    sin2 = math.sin(0.5 * band.theta2) ** 2
    labels = []
    if wc > 0 and wn > 0 and ws < 0:
        labels.append("H1+")
    if wc > 0 and wn < 0 and ws > 0 and 2.0 * cos2 > sin2:
        labels.append("H2+")
    if wc < 0 and wn > 0 and ws < 0:
        labels.append("H3+")
    if wc < 0 and wn < 0 and ws > 0 and 2.0 * sin2 > cos2:
        labels.append("H4+")
    if wc > 0 and wn < 0 and ws > 0:
        labels.append("H1-")
    if wc > 0 and wn > 0 and ws < 0 and 2.0 * sin2 > cos2:
        labels.append("H2-")
    if wc < 0 and wn < 0 and ws > 0:
        labels.append("H3-")
    if wc < 0 and wn > 0 and ws < 0 and 2.0 * cos2 > sin2:
        labels.append("H4-")
    if not labels:
        return NondegeneracyCase("unclassified")
    return NondegeneracyCase("condition2", tuple(labels))


@dataclass(frozen=True)
class CollisionRecord:
    kind: str  # "plus_vs_minus" (c_m^+ = c_km^-) or "minus_vs_plus"
    k: int
    c_m: float
    c_km: float


def collision_scan(
    band: BandState, m: int, k_max: int, tol: float = COLLISION_TOL
) -> list[CollisionRecord]:
    """All near-coincidences between c_m^+/- and the harmonics c_km^-/+."""
    if k_max < 1:
        return []
    base = band_speeds(m, band)
    if not base.valid:
        return []
    records = []
    for k in range(1, k_max + 1):
        harm = band_speeds(k * m, band)
        if not harm.valid:
            continue
        if abs(base.c_plus - harm.c_minus) < tol:
            records.append(CollisionRecord("plus_vs_minus", k, base.c_plus, harm.c_minus))
        if abs(harm.c_plus - base.c_minus) < tol:
            records.append(CollisionRecord("minus_vs_plus", k, base.c_minus, harm.c_plus))
    return records


@dataclass(frozen=True)
class RegionPoint:
    theta1: float
    theta2: float
    fig1a: bool  # 2 sin^2(theta2/2) > cos^2(theta1/2)
    fig1b: bool  # 2 cos^2(theta1/2) > sin^2(theta2/2)


def admissible_region_scan(
    grid_resolution: int, case_selector: str = "both"
) -> list[RegionPoint]:
    """Grid scan of admissible (theta1, theta2) couples with theta1 < theta2.

    case_selector filters the output: "fig1a", "fig1b", or "both" (points
    satisfying either condition; all flags are still reported per point).
    """
    if grid_resolution < 16:
        raise DomainError("grid_resolution must be >= 16")
    if case_selector not in ("fig1a", "fig1b", "both"):
        raise DomainError(f"unknown case selector {case_selector!r}")
    grid = math.pi * (np.arange(grid_resolution) + 0.5) / grid_resolution
    out = []
    for t1 in grid:
        for t2 in grid:
            if t1 >= t2:
                continue
            a = 2.0 * math.sin(0.5 * t2) ** 2 > math.cos(0.5 * t1) ** 2
            b = 2.0 * math.cos(0.5 * t1) ** 2 > math.sin(0.5 * t2) ** 2
            keep = a if case_selector == "fig1a" else b if case_selector == "fig1b" else (a or b)
            if keep:
                out.append(RegionPoint(float(t1), float(t2), a, b))
    return out
