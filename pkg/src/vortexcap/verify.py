"""Self-check suites behind the `verify` CLI command.

Each suite pits a closed form against an independent numerical path and
returns (name, passed, worst, tolerance) records.  The `corrupt` knob
deliberately perturbs the closed-form integral so the harness itself can be
shown to fail when it should.
"""

from __future__ import annotations

import math

import numpy as np

from .functional import ContourFourier, functional_one, jacobian_fd
from .quadrature import in_closed, in_oracle, periodic_trapezoid
from .spectral import band_det_coeffs, band_discriminant, band_matrix, band_speeds, one_interface_symbol
from .states import (
    flat_stream_dtheta_one,
    solve_gauss_one,
    solve_gauss_two,
    zonal_stream_quadrature,
)

SUITES = ("integrals", "symbol", "vieta", "zonal")


def _record(name, worst, tol):
    return {"suite": name, "passed": bool(worst < tol), "worst": worst, "tol": tol}


def suite_integrals(seed: int = 0, corrupt: bool = False) -> dict:
    """Closed-form I_n against the trapezoid oracle, plus the a=b case."""
    rng = np.random.default_rng(seed)
    bump = 1e-6 if corrupt else 0.0
    worst = 0.0
    for _ in range(100):
        a, b = rng.uniform(0.05, math.pi - 0.05, size=2)
        if abs(a - b) <= 1e-3:
            continue
        for n in (1, 2, 3, 5, 8, 13, 21, 32):
            closed = in_closed(n, a, b) * (1.0 + bump)
            worst = max(worst, abs(closed - in_oracle(n, a, b, 4096)))
    for n in (1, 2, 7):
        a = rng.uniform(0.3, math.pi - 0.3)
        worst = max(worst, abs(in_oracle(n, a, a, 4096) + 1.0 / n))
    return _record("integrals", worst, 1e-9)


def suite_symbol(seed: int = 0) -> dict:
    """FD Jacobian diagonal of the one-interface functional vs its symbol."""
    state = solve_gauss_one(1.2, -0.8, 0.1)
    worst = 0.0
    for m in (1, 2, 3):
        modes = 4
        f0 = ContourFourier(m, np.zeros(modes), max(4 * m * modes, 128))
        jac = jacobian_fd(0.05, f0, state, include_c=False, warn_conditioning=False)
        for n in range(1, modes + 1):
            sym = one_interface_symbol(m, n, 0.05, state)
            worst = max(worst, abs(jac[n - 1, n - 1] - sym) / abs(sym))
    return _record("symbol", worst, 1e-4)


def suite_vieta(seed: int = 0) -> dict:
    """Root, Vieta and gamma-shift identities for random bands."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(50):
        t1 = rng.uniform(0.3, 2.0)
        t2 = rng.uniform(t1 + 0.3, min(t1 + 1.8, math.pi - 0.2))
        wn, ws = rng.uniform(-2, 2, size=2)
        gam = rng.uniform(-1, 1)
        try:
            band = solve_gauss_two(t1, t2, wn, ws, gam)
        except Exception:
            continue
        for n in (1, 2, 3, 8, 32):
            entry = band_speeds(n, band)
            beta, gamma_n = band_det_coeffs(n, band)
            disc = band_discriminant(n, band)
            worst = max(worst, abs(disc - (beta**2 - 4.0 * gamma_n)))
            if not entry.valid:
                continue
            for c in (entry.c_plus, entry.c_minus):
                worst = max(worst, abs(band_matrix(n, c, band).det()))
            worst = max(worst, abs(entry.c_plus + entry.c_minus - beta))
            worst = max(worst, abs(entry.c_plus * entry.c_minus - gamma_n))
    return _record("vieta", worst, 1e-10)


def suite_zonal(seed: int = 0) -> dict:
    """Zonal stream oracle: kernel mean and analytic profile derivative."""
    state = solve_gauss_one(1.1, -1.0, 0.3)
    worst = 0.0
    # phi-mean of log D against the closed form used inside the oracle
    rng = np.random.default_rng(seed)
    phi = 2.0 * math.pi * np.arange(4096) / 4096 + math.pi / 4096
    for _ in range(10):
        a, b = rng.uniform(0.2, math.pi - 0.2, size=2)
        direct = periodic_trapezoid(
            np.log(1.0 - math.cos(a) * math.cos(b) - math.sin(a) * math.sin(b) * np.cos(phi))
        ) / (2.0 * math.pi)
        lo, hi = min(a, b), max(a, b)
        closed = math.log(2.0 * math.cos(0.5 * lo) ** 2 * math.sin(0.5 * hi) ** 2)
        worst = max(worst, abs(direct - closed))
    # finite differences of the quadrature stream vs the analytic derivative
    h = 1e-5
    for theta in np.linspace(0.3, math.pi - 0.3, 20):
        fd = (
            zonal_stream_quadrature(state, theta + h)
            - zonal_stream_quadrature(state, theta - h)
        ) / (2.0 * h)
        worst = max(worst, abs(fd - flat_stream_dtheta_one(state, theta)))
    # phi-independence of the full contour-stream evaluation at f = 0
    psi = functional_one(0.2, ContourFourier(2, np.zeros(4), 128), state).samples
    worst = max(worst, float(np.max(np.abs(psi))) / 1e2)  # residual of F(c,0)
    return _record("zonal", worst, 1e-6)


def run_suites(names=None, seed: int = 0, corrupt_in_closed: bool = False):
    names = names or SUITES
    results = []
    for name in names:
        if name == "integrals":
            results.append(suite_integrals(seed, corrupt_in_closed))
        elif name == "symbol":
            results.append(suite_symbol(seed))
        elif name == "vieta":
            results.append(suite_vieta(seed))
        elif name == "zonal":
            results.append(suite_zonal(seed))
        else:
            raise ValueError(f"unknown suite {name!r}")
    return results
