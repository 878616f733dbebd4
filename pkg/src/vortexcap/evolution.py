"""Time integration of the contour dynamics equations.

The contour state is carried as grid samples of the interface perturbations
(one row per interface).  The right-hand side is the c = 0 traveling-wave
residual, so converged branch points evolve by rigid rotation and zonal
states stay put.  Classical RK4 with a fixed step; every right-hand side is
filtered to the retained Fourier band to stop spectral blocking from the
quadratic nonlinearity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .functional import (
    BandFn,
    ContourFourier,
    PoleProximityError,
    InterfaceCrossingError,
    collocation_grid,
    residual_samples_one,
    residual_samples_two,
)
from .geometry import DomainError
from .states import FlatCapState

TWO_PI = 2.0 * math.pi


class EvolutionAbort(RuntimeError):
    """Bound violation mid-integration; carries the partial trajectory."""

    def __init__(self, message: str, trajectory: "Trajectory"):
        super().__init__(message)
        self.trajectory = trajectory


@dataclass
class Trajectory:
    state: object
    fold: int
    grid: np.ndarray
    times: list[float] = field(default_factory=list)
    snapshots: list[np.ndarray] = field(default_factory=list)  # (k, N) each
    areas: list[np.ndarray] = field(default_factory=list)  # (k,) each
    gauss_residuals: list[float] = field(default_factory=list)

    @property
    def n_interfaces(self) -> int:
        return int(self.snapshots[0].shape[0]) if self.snapshots else 0

    def initial(self) -> np.ndarray:
        return self.snapshots[0]

    def final(self) -> np.ndarray:
        return self.snapshots[-1]


def _band_filter(samples: np.ndarray, keep: int) -> np.ndarray:
    """Zero all Fourier modes above the retained band."""
    spec = np.fft.rfft(samples)
    spec[keep + 1 :] = 0.0
    return np.fft.irfft(spec, samples.size)


def _interfaces(state) -> list[float]:
    if isinstance(state, FlatCapState):
        return [state.theta0]
    return [state.theta1, state.theta2]


def _rhs(state, samples: np.ndarray, grid: np.ndarray, keep: int, fold: int):
    """Filtered d/dt samples for the stacked interfaces."""
    if isinstance(state, FlatCapState):
        fn = BandFn.from_samples(samples[0], keep, 1)
        out = residual_samples_one(0.0, state, fn, grid, fold)[None, :]
    else:
        fn1 = BandFn.from_samples(samples[0], keep, 1)
        fn2 = BandFn.from_samples(samples[1], keep, 1)
        g1, g2 = residual_samples_two(0.0, state, fn1, fn2, grid, fold)
        out = np.vstack([g1, g2])
    return np.vstack([_band_filter(row, keep) for row in out])


def rhs_one(f: ContourFourier, state: FlatCapState) -> np.ndarray:
    """Time derivative of a one-interface contour; equals the c=0 residual."""
    grid = collocation_grid(f.n_collocation)
    samples = f.band_fn()(grid)[None, :]
    keep = f.fold * f.modes
    return _rhs(state, samples, grid, keep, f.fold)[0]


def step_rk4(
    samples: np.ndarray,
    dt: float,
    state,
    grid: np.ndarray,
    keep: int,
    fold: int = 1,
) -> np.ndarray:
    """One classical fourth-order step on stacked interface samples."""
    if dt <= 0.0:
        raise DomainError("dt must be positive")
    k1 = _rhs(state, samples, grid, keep, fold)
    k2 = _rhs(state, samples + 0.5 * dt * k1, grid, keep, fold)
    k3 = _rhs(state, samples + 0.5 * dt * k2, grid, keep, fold)
    k4 = _rhs(state, samples + dt * k3, grid, keep, fold)
    return samples + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def cap_area(f, theta_interface: float) -> float:
    """Spherical area of the north cap bounded by theta_interface + f."""
    if isinstance(f, ContourFourier):
        f = f.band_fn()(collocation_grid(f.n_collocation))
    f = np.asarray(f, dtype=float)
    return float(TWO_PI * np.mean(1.0 - np.cos(theta_interface + f)))


def _gauss_residual(state, areas: np.ndarray) -> float:
    """Signed cap-measure sum from instantaneous areas; ~0 when conserved."""
    if isinstance(state, FlatCapState):
        a1 = areas[0]
        return state.omega_n * a1 + state.omega_s * (2.0 * TWO_PI - a1)
    a1, a2 = areas
    return (
        state.omega_n * a1
        + state.omega_c * (a2 - a1)
        + state.omega_s * (2.0 * TWO_PI - a2)
    )


def _as_samples(f0, state, n_collocation: Optional[int]):
    """Normalize the initial condition to (stacked samples, fold, keep, grid)."""
    bases = _interfaces(state)
    if isinstance(f0, ContourFourier):
        f0 = (f0,) if len(bases) == 1 else f0
    if isinstance(f0, (tuple, list)) and isinstance(f0[0], ContourFourier):
        if len(f0) != len(bases):
            raise DomainError("initial condition does not match interface count")
        n = n_collocation or max(f.n_collocation for f in f0)
        keep = max(f.fold * f.modes for f in f0)
        grid = collocation_grid(n)
        samples = np.vstack([f.band_fn()(grid) for f in f0])
        # Evaluation fold defaults to 1 so symmetry preservation is a property
        # of the flow, not of the discretization; callers may opt in to the
        # symmetry-restricted evaluation explicitly.
        return samples, 1, keep, grid
    samples = np.atleast_2d(np.asarray(f0, dtype=float))
    if samples.shape[0] != len(bases):
        raise DomainError("initial samples do not match interface count")
    n = samples.shape[1]
    if n_collocation is not None and n_collocation != n:
        raise DomainError("n_collocation conflicts with provided samples")
    return samples.copy(), 1, n // 3, collocation_grid(n)


def evolve(
    f0,
    state,
    t_end: float,
    dt: float,
    n_collocation: Optional[int] = None,
    keep: Optional[int] = None,
    record_every: int = 1,
    fold: Optional[int] = None,
) -> Trajectory:
    """Integrate the contour dynamics from f0 up to t_end with fixed dt."""
    if dt <= 0.0 or t_end < 0.0:
        raise DomainError("need dt > 0 and t_end >= 0")
    samples, fold_auto, keep_auto, grid = _as_samples(f0, state, n_collocation)
    fold = fold or fold_auto
    keep = keep or keep_auto
    bases = _interfaces(state)
    traj = Trajectory(state, fold, grid)

    def record(t, smp):
        traj.times.append(t)
        traj.snapshots.append(smp.copy())
        areas = np.array(
            [cap_area(row, base) for row, base in zip(smp, bases)]
        )
        traj.areas.append(areas)
        traj.gauss_residuals.append(_gauss_residual(state, areas))

    record(0.0, samples)
    n_steps = int(round(t_end / dt))
    for i in range(1, n_steps + 1):
        try:
            samples = step_rk4(samples, dt, state, grid, keep, fold)
        except (PoleProximityError, InterfaceCrossingError) as exc:
            raise EvolutionAbort(f"aborted at t={i * dt:.6g}: {exc}", traj) from exc
        if i % record_every == 0 or i == n_steps:
            record(i * dt, samples)
    return traj


def spectral_shift(samples: np.ndarray, shift: float) -> np.ndarray:
    """Samples of f(. - shift) by Fourier phase rotation."""
    samples = np.asarray(samples, dtype=float)
    n = samples.size
    spec = np.fft.rfft(samples)
    k = np.arange(spec.size)
    return np.fft.irfft(spec * np.exp(-1j * k * shift), n)


def rigid_rotation_error(trajectory: Trajectory, c: float) -> float:
    """max_t || f(t,.) - f(0, . - c t) ||_inf over recorded snapshots."""
    if not trajectory.snapshots:
        raise DomainError("empty trajectory")
    f0 = trajectory.initial()
    worst = 0.0
    for t, snap in zip(trajectory.times, trajectory.snapshots):
        for row0, row in zip(f0, snap):
            ref = spectral_shift(row0, c * t)
            worst = max(worst, float(np.max(np.abs(row - ref))))
    return worst
