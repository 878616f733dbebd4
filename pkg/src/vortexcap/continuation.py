"""Branch construction by amplitude-pinned Newton continuation.

Each branch point fixes the leading cosine coefficient to the amplitude
epsilon and solves the residual's sine coefficients for the speed c and the
remaining coefficients.  Predictors are the closed-form bifurcation point for
the first step and linear extrapolation afterwards; the corrector is a dense
Newton iteration with a lazily refreshed finite-difference Jacobian.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .functional import ContourFourier, functional_one, functional_two
from .geometry import DomainError
from .spectral import (
    band_matrix,
    band_speeds,
    burbea_shifted_speed,
    collision_scan,
    find_threshold_n,
    nondegeneracy_case,
)
from .states import BandState, FlatCapState

NEWTON_TOL = 1e-10
MAX_ITER = 25


class NewtonError(RuntimeError):
    """Corrector failed to converge within the iteration budget."""


class JacobianSingularError(RuntimeError):
    pass


class ContinuationStallError(RuntimeError):
    """Continuation stopped early; carries the last good branch prefix."""

    def __init__(self, message: str, branch: "Branch"):
        super().__init__(message)
        self.branch = branch


class SpectralCollisionError(RuntimeError):
    """Requested fold suffers a spectral collision; bifurcation not simple."""


@dataclass(frozen=True)
class BranchPoint:
    c: float
    f1: ContourFourier
    f2: Optional[ContourFourier]
    epsilon: float
    residual_norm: float
    newton_iterations: int = 0
    residual_history: tuple[float, ...] = ()

    @property
    def f(self) -> ContourFourier:
        return self.f1

    @property
    def is_band(self) -> bool:
        return self.f2 is not None


@dataclass
class Branch:
    state: object
    fold: int
    points: list[BranchPoint] = field(default_factory=list)
    kappa: Optional[str] = None
    kernel_ratio: float = 0.0  # f2/f1 kernel slope for band branches

    def sorted_points(self) -> list[BranchPoint]:
        return sorted(self.points, key=lambda p: p.epsilon)

    def limit_speed(self, n_fit: int = 4) -> float:
        """Extrapolate c(eps) = c0 + c2 eps^2 from the smallest amplitudes."""
        pts = sorted(self.points, key=lambda p: abs(p.epsilon))[:n_fit]
        if len(pts) < 2:
            raise DomainError("need at least two branch points to extrapolate")
        eps = np.array([p.epsilon for p in pts])
        cs = np.array([p.c for p in pts])
        design = np.column_stack([np.ones_like(eps), eps**2])
        sol, *_ = np.linalg.lstsq(design, cs, rcond=None)
        return float(sol[0])


def kernel_vector_two(band: BandState, m: int, kappa: str) -> np.ndarray:
    """Null vector (m22, -m21) of the singular mode matrix at c_m^kappa."""
    entry = band_speeds(m, band)
    if not entry.valid:
        raise DomainError(f"no real speeds at n={m}")
    c = entry.c_plus if kappa == "+" else entry.c_minus
    mat = band_matrix(m, c, band)
    u0 = np.array([mat.m22, -mat.m21])
    if np.max(np.abs(u0)) < 1e-14:
        raise DegeneracyError("kernel vector numerically zero")
    return u0


class DegeneracyError(RuntimeError):
    pass


def transversality_pairing(band: BandState, m: int, kappa: str) -> float:
    """m [ m22^2 - m12 m21 ] at the bifurcation speed; nonzero when admissible."""
    entry = band_speeds(m, band)
    if not entry.valid:
        raise DomainError(f"no real speeds at n={m}")
    c = entry.c_plus if kappa == "+" else entry.c_minus
    mat = band_matrix(m, c, band)
    return m * (mat.m22**2 - mat.m12 * mat.m21)


def _fd_step(x: float) -> float:
    return 1e-6 * max(1.0, abs(x))


class _PinnedSystem:
    """Residual/contour plumbing for the amplitude-pinned unknown vector."""

    def __init__(self, state, fold, modes, n_collocation, epsilon):
        self.state = state
        self.fold = fold
        self.modes = modes
        self.n_collocation = n_collocation
        self.epsilon = epsilon
        self.is_band = isinstance(state, BandState)

    def contours(self, x: np.ndarray):
        if self.is_band:
            c1 = np.concatenate([[self.epsilon], x[1 : self.modes]])
            c2 = x[self.modes :]
            return (
                ContourFourier(self.fold, c1, self.n_collocation),
                ContourFourier(self.fold, c2, self.n_collocation),
            )
        coeffs = np.concatenate([[self.epsilon], x[1:]])
        return ContourFourier(self.fold, coeffs, self.n_collocation)

    def residual_coeffs(self, x: np.ndarray) -> np.ndarray:
        if self.is_band:
            f1, f2 = self.contours(x)
            g1, g2 = functional_two(x[0], f1, f2, self.state)
            return np.concatenate(
                [g1.sine_coeffs(self.modes), g2.sine_coeffs(self.modes)]
            )
        field = functional_one(x[0], self.contours(x), self.state)
        return field.sine_coeffs(self.modes)

    def residual_sup(self, x: np.ndarray) -> float:
        if self.is_band:
            f1, f2 = self.contours(x)
            g1, g2 = functional_two(x[0], f1, f2, self.state)
            return max(g1.sup_norm(), g2.sup_norm())
        return functional_one(x[0], self.contours(x), self.state).sup_norm()

    def jacobian(self, x: np.ndarray) -> np.ndarray:
        n = x.size
        jac = np.empty((n, n))
        for i in range(n):
            h = _fd_step(x[i])
            xp, xm = x.copy(), x.copy()
            xp[i] += h
            xm[i] -= h
            jac[:, i] = (self.residual_coeffs(xp) - self.residual_coeffs(xm)) / (
                2.0 * h
            )
        return jac


def _newton_solve(system: _PinnedSystem, x0, tol, max_iter):
    """Damped-free Newton with lazy Jacobian refresh; returns (x, history)."""
    x = np.asarray(x0, dtype=float).copy()
    res = system.residual_coeffs(x)
    history = [float(np.max(np.abs(res)))]
    jac = None
    refresh = True
    for _ in range(max_iter):
        if history[-1] < 0.1 * tol:
            break
        if refresh or jac is None:
            jac = system.jacobian(x)
        try:
            dx = np.linalg.solve(jac, res)
        except np.linalg.LinAlgError as exc:
            raise JacobianSingularError(str(exc)) from exc
        x = x - dx
        res = system.residual_coeffs(x)
        history.append(float(np.max(np.abs(res))))
        # Reuse the Jacobian while convergence is comfortably superlinear.
        refresh = history[-1] > 0.05 * history[-2]
    else:
        if history[-1] >= tol:
            raise NewtonError(
                f"no convergence after {max_iter} iterations "
                f"(residual {history[-1]:.3e})"
            )
    return x, history


def newton_correct(
    initial: BranchPoint,
    state_or_band,
    tol: float = NEWTON_TOL,
    max_iter: int = MAX_ITER,
) -> BranchPoint:
    """Solve the pinned system from a predictor point."""
    f1 = initial.f1
    if initial.is_band:
        x0 = np.concatenate(
            [[initial.c], f1.coeffs[1:], initial.f2.coeffs]
        )
    else:
        x0 = np.concatenate([[initial.c], f1.coeffs[1:]])
    system = _PinnedSystem(
        state_or_band, f1.fold, f1.modes, f1.n_collocation, initial.epsilon
    )
    if initial.epsilon == 0.0 and not np.any(x0[1:]):
        # Exact flat state: already a root for any c.
        sup = system.residual_sup(x0)
        return BranchPoint(
            initial.c, *_contour_pair(system, x0), initial.epsilon, sup, 0, (sup,)
        )
    x, history = _newton_solve(system, x0, tol, max_iter)
    sup = system.residual_sup(x)
    if sup >= tol:
        raise NewtonError(f"sup-norm residual {sup:.3e} above tolerance {tol:.1e}")
    return BranchPoint(
        float(x[0]),
        *_contour_pair(system, x),
        initial.epsilon,
        sup,
        len(history) - 1,
        tuple(history),
    )


def _contour_pair(system: _PinnedSystem, x: np.ndarray):
    made = system.contours(x)
    if system.is_band:
        return made[0], made[1]
    return made, None


def _march(system_factory, predictor_seed, eps_values, tol, max_iter, branch):
    """Shared marching loop; extends branch.points, stalls with context."""
    prev: list[tuple[float, np.ndarray]] = []  # (epsilon, unknown vector)
    for eps in eps_values:
        system, x_seed = system_factory(eps)
        if len(prev) >= 2:
            (e1, x1), (e2, x2) = prev[-1], prev[-2]
            x0 = x1 + (x1 - x2) * (eps - e1) / (e1 - e2)
        elif len(prev) == 1:
            e1, x1 = prev[-1]
            x_flat = predictor_seed(0.0)
            x0 = x_flat + (x1 - x_flat) * eps / e1
        else:
            x0 = x_seed
        try:
            x, history = _newton_solve(system, x0, tol, max_iter)
            sup = system.residual_sup(x)
            if sup >= tol:
                raise NewtonError(f"sup-norm residual {sup:.3e}")
        except (NewtonError, JacobianSingularError) as exc:
            raise ContinuationStallError(
                f"continuation stalled at epsilon={eps:+.4e}: {exc}", branch
            ) from exc
        branch.points.append(
            BranchPoint(
                float(x[0]),
                *_contour_pair(system, x),
                eps,
                sup,
                len(history) - 1,
                tuple(history),
            )
        )
        prev.append((eps, x))


def branch_one(
    state: FlatCapState,
    m: int,
    eps_max: float,
    n_steps: int,
    modes: int = 16,
    n_collocation: Optional[int] = None,
    tol: float = NEWTON_TOL,
    max_iter: int = MAX_ITER,
    both_signs: bool = True,
) -> Branch:
    """March the m-fold one-interface branch in pinned amplitude."""
    if m < 1 or n_steps < 1 or eps_max <= 0.0:
        raise DomainError("need m >= 1, n_steps >= 1, eps_max > 0")
    c0 = burbea_shifted_speed(m, state.gamma, state.omega_n, state.omega_s)
    probe = ContourFourier(m, np.zeros(modes), n_collocation)
    branch = Branch(state, m)

    for sign in (1.0, -1.0) if both_signs else (1.0,):
        eps_values = [sign * eps_max * i / n_steps for i in range(1, n_steps + 1)]

        def factory(eps):
            system = _PinnedSystem(state, m, modes, probe.n_collocation, eps)
            return system, np.concatenate([[c0], np.zeros(modes - 1)])

        _march(
            factory,
            lambda _: np.concatenate([[c0], np.zeros(modes - 1)]),
            eps_values,
            tol,
            max_iter,
            branch,
        )
    branch.points.sort(key=lambda p: p.epsilon)
    return branch


def branch_two(
    band: BandState,
    m: int,
    kappa: str,
    eps_max: float,
    n_steps: int,
    modes: int = 12,
    n_collocation: Optional[int] = None,
    tol: float = NEWTON_TOL,
    max_iter: int = MAX_ITER,
    both_signs: bool = False,
    collision_k_max: int = 50,
    threshold_n_max: int = 256,
) -> Branch:
    """March the m-fold band branch along the kappa spectral family."""
    if kappa not in ("+", "-"):
        raise DomainError("kappa must be '+' or '-'")
    threshold = find_threshold_n(band, threshold_n_max)
    if threshold is None or m < threshold:
        raise DomainError(
            f"fold m={m} below the clean-spectrum threshold {threshold}"
        )
    case = nondegeneracy_case(band)
    if case.kind == "unclassified":
        raise DomainError("band satisfies no non-degeneracy hypothesis")
    collisions = collision_scan(band, m, collision_k_max)
    if collisions:
        raise SpectralCollisionError(
            f"{len(collisions)} spectral collision(s) at fold {m}"
        )
    entry = band_speeds(m, band)
    c0 = entry.c_plus if kappa == "+" else entry.c_minus
    u0 = kernel_vector_two(band, m, kappa)
    if abs(u0[0]) < 1e-14:
        raise DegeneracyError("kernel vector has vanishing first component")
    ratio = float(u0[1] / u0[0])
    probe = ContourFourier(m, np.zeros(modes), n_collocation)
    branch = Branch(band, m, kappa=kappa, kernel_ratio=ratio)

    def flat_x(_eps):
        return np.concatenate([[c0], np.zeros(modes - 1), np.zeros(modes)])

    for sign in (1.0, -1.0) if both_signs else (1.0,):
        eps_values = [sign * eps_max * i / n_steps for i in range(1, n_steps + 1)]

        def factory(eps):
            system = _PinnedSystem(band, m, modes, probe.n_collocation, eps)
            x0 = flat_x(eps)
            x0[modes] = ratio * eps  # leading coefficient of f2
            return system, x0

        _march(factory, flat_x, eps_values, tol, max_iter, branch)
    branch.points.sort(key=lambda p: p.epsilon)
    return branch
