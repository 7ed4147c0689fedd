"""Desired beampatterns, the benchmark covariance solver, and pattern metrics.

The benchmark transmit covariance is the matrix that best realizes a desired
beampattern on an angular grid, subject to membership in the feasible set:
Hermitian, positive semidefinite, and every diagonal entry equal to
``power / n_antennas`` (equal per-antenna average power). The fit allows a
free scale on the desired pattern, refit in closed form every iteration.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from ._io import read_container, unpack_complex, write_container
from .channel import steering_vector
from .errors import ConfigError
from .numerics import psd_project

COVARIANCE_FORMAT = "psi-v1"


@dataclass(frozen=True)
class BeampatternSpec:
    """Angular grid, desired gains, and the mainlobe layout that produced them."""

    grid: np.ndarray
    gains: np.ndarray
    directions: tuple = ()
    halfwidth: float = 0.0

    def __post_init__(self):
        if self.grid.ndim != 1 or self.grid.size < 2:
            raise ValueError("grid must hold at least two angles")
        if np.any(np.diff(self.grid) <= 0):
            raise ValueError("grid must be strictly increasing")
        if self.gains.shape != self.grid.shape:
            raise ValueError("gains and grid must have matching length")


def make_spec(directions, halfwidth: float, grid_size: int = 181) -> BeampatternSpec:
    """Indicator-pattern spec: gain 1 within ``halfwidth`` of a mainlobe, else 0.

    The grid is ``grid_size`` uniform angles covering [-90, 90] degrees.
    Duplicate mainlobe directions are collapsed.
    """
    if halfwidth <= 0:
        raise ConfigError("halfwidth must be positive")
    if grid_size < 2:
        raise ConfigError("grid_size must be at least 2")
    directions = tuple(sorted(set(float(x) for x in directions)))
    for theta in directions:
        if not -90.0 <= theta <= 90.0:
            raise ConfigError(f"mainlobe direction {theta} outside [-90, 90]")
    grid = np.linspace(-90.0, 90.0, grid_size)
    gains = np.zeros(grid_size)
    for theta in directions:
        gains[np.abs(grid - theta) <= halfwidth] = 1.0
    return BeampatternSpec(grid=grid, gains=gains, directions=directions,
                           halfwidth=float(halfwidth))


def steering_grid(grid, n_antennas: int) -> np.ndarray:
    """(N, T) matrix whose columns are steering vectors of the grid angles."""
    phases = np.pi * np.sin(np.deg2rad(np.asarray(grid, dtype=float)))
    return np.exp(1j * np.arange(n_antennas)[:, None] * phases[None, :])


def beampattern_value(cov, theta_deg: float) -> float:
    """Radiated power of covariance ``cov`` toward ``theta_deg``."""
    cov = np.asarray(cov)
    if cov.ndim != 2 or cov.shape[0] != cov.shape[1]:
        raise ValueError(f"square covariance required, got shape {cov.shape}")
    a = steering_vector(theta_deg, cov.shape[0])
    return float(np.real(a.conj() @ cov @ a))


def pattern_on_grid(cov, grid) -> np.ndarray:
    """Beampattern of ``cov`` at every grid angle (real-valued)."""
    s = steering_grid(grid, np.asarray(cov).shape[0])
    return np.real(np.sum(s.conj() * (cov @ s), axis=0))


def covariance_pattern_mse(cov, spec: BeampatternSpec) -> float:
    """Mean squared mismatch between desired gains and the realized pattern."""
    diff = spec.gains - pattern_on_grid(cov, spec.grid)
    return float(np.mean(np.abs(diff) ** 2))


def beampattern_mse(pc, spec: BeampatternSpec) -> float:
    """Pattern MSE of a hybrid precoder pair via its realized covariance."""
    return covariance_pattern_mse(pc.covariance, spec)


@dataclass(frozen=True)
class BenchmarkCovariance:
    """Solved target covariance plus the fit diagnostics."""

    psi: np.ndarray
    power: float
    scale: float
    residual: float
    converged: bool
    history: np.ndarray = field(default_factory=lambda: np.zeros(0), repr=False)


def _fit_scale(gains, pattern) -> float:
    denom = float(gains @ gains)
    if denom == 0.0:
        return 1.0
    return float(gains @ pattern) / denom


def _project_feasible(x, diag_value, max_cycles=200, eig_floor=-1e-9):
    """Alternate PSD clipping and diagonal pinning until both hold.

    The diagonal is set last so it holds exactly; cycling continues until the
    smallest eigenvalue is above ``eig_floor``.
    """
    for _ in range(max_cycles):
        x = psd_project(x)
        np.fill_diagonal(x, diag_value)
        if np.linalg.eigvalsh(x)[0] >= eig_floor:
            break
    return x


def solve_benchmark_covariance(spec: BeampatternSpec, power: float, n_antennas: int,
                               iters: int = 500, tol: float = 1e-12) -> BenchmarkCovariance:
    """Fit the feasible covariance whose beampattern tracks the desired gains.

    Alternates a closed-form refit of the pattern scale with a backtracked
    projected gradient step on the covariance, so the recorded objective is
    non-increasing. Returns the best iterate with ``converged=False`` if the
    improvement tolerance was not reached within ``iters`` iterations.
    """
    if n_antennas < 2:
        raise ConfigError("need at least two antennas")
    if power <= 0:
        raise ConfigError("power must be positive")
    steer = steering_grid(spec.grid, n_antennas)
    gains = spec.gains
    diag_value = power / n_antennas

    def pattern(psi):
        return np.real(np.sum(steer.conj() * (psi @ steer), axis=0))

    def objective(scale, patt):
        r = scale * gains - patt
        return float(r @ r)

    psi = diag_value * np.eye(n_antennas, dtype=complex)
    patt = pattern(psi)
    scale = _fit_scale(gains, patt)
    f_cur = objective(scale, patt)
    history = [f_cur]
    step = 1.0
    converged = False

    for _ in range(iters):
        resid = patt - scale * gains
        grad = 2.0 * (steer * resid[None, :]) @ steer.conj().T
        s = step
        cand = patt_c = None
        for _ in range(60):
            trial = _project_feasible(psi - s * grad, diag_value)
            patt_t = pattern(trial)
            if objective(scale, patt_t) <= f_cur:
                cand, patt_c = trial, patt_t
                break
            s *= 0.5
        if cand is None:
            converged = True  # no descent direction survives projection
            break
        psi, patt = cand, patt_c
        scale = _fit_scale(gains, patt)
        f_new = objective(scale, patt)
        history.append(f_new)
        step = min(s * 2.0, 1e6)
        if f_cur - f_new <= tol * max(f_cur, 1e-30):
            converged = True
            f_cur = f_new
            break
        f_cur = f_new

    return BenchmarkCovariance(psi=psi, power=float(power), scale=scale,
                               residual=f_cur, converged=converged,
                               history=np.asarray(history))


def save_covariance(path, bc: BenchmarkCovariance) -> None:
    header = {
        "format": COVARIANCE_FORMAT,
        "n_antennas": int(bc.psi.shape[0]),
        "power": bc.power,
        "scale": bc.scale,
        "residual": bc.residual,
        "converged": bool(bc.converged),
    }
    write_container(path, header, [bc.psi])


def load_covariance(path) -> BenchmarkCovariance:
    header, buf = read_container(path, COVARIANCE_FORMAT)
    n = header["n_antennas"]
    psi = unpack_complex(buf, (n, n))
    return BenchmarkCovariance(psi=psi, power=header["power"], scale=header["scale"],
                               residual=header["residual"], converged=header["converged"])
