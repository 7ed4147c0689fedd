"""Projected gradient ascent over hybrid precoders.

One outer iteration runs several ascent steps on the analog precoder (digital
fixed), projects its entries back to unit modulus, then takes one ascent step
on the digital precoder and rescales the pair to the power budget. Per-layer
step sizes come from a :class:`StepSchedule`, either fixed or trained. A zero
analog entry projects to 1 so the projection stays deterministic.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .backend import kernels
from .channel import steering_vector
from .errors import ConfigError, NumericalError
from .numerics import pseudo_inverse
from .objective import Precoders, SystemParams, _chan


@dataclass(frozen=True)
class StepSchedule:
    """Per-layer step sizes: mu[i, j] for analog steps, lam[i] for digital."""

    mu: np.ndarray
    lam: np.ndarray
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        mu = np.asarray(self.mu, dtype=float)
        lam = np.asarray(self.lam, dtype=float)
        if mu.ndim != 2:
            raise ValueError("mu must be a 2-d (outer, inner) array")
        if lam.shape != (mu.shape[0],):
            raise ValueError("lam must have one entry per outer iteration")
        if mu.size and not np.all(np.isfinite(mu)):
            raise ValueError("mu entries must be finite")
        if lam.size and not np.all(np.isfinite(lam)):
            raise ValueError("lam entries must be finite")
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "lam", lam)

    @property
    def n_outer(self) -> int:
        return self.mu.shape[0]

    @property
    def n_inner(self) -> int:
        return self.mu.shape[1]

    @classmethod
    def constant(cls, n_outer: int, n_inner: int, step: float = 0.01,
                 meta: dict | None = None) -> "StepSchedule":
        return cls(mu=np.full((n_outer, n_inner), float(step)),
                   lam=np.full(n_outer, float(step)), meta=meta or {})

    def flatten(self) -> np.ndarray:
        """All step sizes as one vector (mu row-major, then lam)."""
        return np.concatenate([self.mu.ravel(), self.lam])

    def replace_flat(self, theta) -> "StepSchedule":
        """New schedule with step sizes taken from a flat vector."""
        theta = np.asarray(theta, dtype=float)
        n_mu = self.mu.size
        return StepSchedule(mu=theta[:n_mu].reshape(self.mu.shape).copy(),
                            lam=theta[n_mu:].copy(), meta=dict(self.meta))


@dataclass(frozen=True)
class Trajectory:
    """Per-outer-iteration records (index 0 is the projected initial point)."""

    objective: np.ndarray
    rate: np.ndarray
    beam_error: np.ndarray
    analog_residual: np.ndarray
    power_residual: np.ndarray
    final: Precoders


def project_analog(a) -> np.ndarray:
    """Normalize every entry to unit modulus; zero entries become 1."""
    a = np.asarray(a, dtype=complex)
    mag = np.abs(a)
    out = np.where(mag > 0.0, a / np.where(mag > 0.0, mag, 1.0), 1.0 + 0.0j)
    return out


def project_digital(a, d, power: float) -> np.ndarray:
    """Rescale the digital precoder so the effective precoder carries ``power``."""
    d = np.asarray(d, dtype=complex)
    nrm = np.linalg.norm(np.asarray(a) @ d)
    if nrm == 0.0 or not np.isfinite(nrm):
        raise NumericalError(f"cannot normalize: effective precoder norm is {nrm}")
    return d * (math.sqrt(power) / nrm)


def analog_residual(a) -> float:
    """Worst-case deviation of analog entry moduli from 1."""
    return float(np.max(np.abs(np.abs(a) - 1.0)))


def power_residual(a, d, power: float) -> float:
    """Relative deviation of the effective precoder's power from the budget."""
    return abs(np.linalg.norm(a @ d) ** 2 - power) / power


def analog_inner_loop(a, d, mu_row, h, target_cov, params: SystemParams) -> np.ndarray:
    """Run the inner ascent steps on the analog precoder and project.

    The digital precoder stays fixed; one gradient step per entry of
    ``mu_row``, then a single unit-modulus projection.
    """
    a_new = kernels.ascend_analog(_chan(h), np.ascontiguousarray(a, dtype=complex),
                                  np.ascontiguousarray(d, dtype=complex),
                                  np.ascontiguousarray(target_cov, dtype=complex),
                                  float(params.noise_var), float(params.omega),
                                  np.asarray(mu_row, dtype=float))
    if not np.all(np.isfinite(a_new)):
        raise NumericalError(
            f"non-finite analog precoder after inner ascent (mu_row={np.asarray(mu_row)!r})")
    return project_analog(a_new)


def digital_step(a, d, lam_i: float, h, target_cov, params: SystemParams) -> np.ndarray:
    """One ascent step on the digital precoder followed by power projection."""
    hm = _chan(h)
    a = np.ascontiguousarray(a, dtype=complex)
    d = np.ascontiguousarray(d, dtype=complex)
    step = kernels.grad_rate_digital(hm, a, d, float(params.noise_var))
    if params.omega != 0.0:
        eta = params.eta_for(a.shape[0])
        step = step - (params.omega * eta) * kernels.grad_beam_error_digital(
            a, d, np.ascontiguousarray(target_cov, dtype=complex))
    d_new = d + lam_i * step
    if not np.all(np.isfinite(d_new)):
        raise NumericalError(f"non-finite digital precoder after step lam={lam_i}")
    return project_digital(a, d_new, params.power)


def run_pga(h, target_cov, params: SystemParams, schedule: StepSchedule,
            init: Precoders) -> Trajectory:
    """Full optimizer pass; deterministic given its arguments.

    The initial precoders are projected onto the feasible set before the first
    record, and every record is taken at a feasible point.
    """
    hm = _chan(h)
    target = np.ascontiguousarray(target_cov, dtype=complex)
    a = project_analog(init.analog)
    d = project_digital(a, init.digital, params.power)

    n = schedule.n_outer
    objective = np.empty(n + 1)
    rate = np.empty(n + 1)
    err = np.empty(n + 1)
    a_res = np.empty(n + 1)
    p_res = np.empty(n + 1)

    def record(idx, a_, d_):
        r = kernels.sum_rate(hm, a_, d_, params.noise_var)
        e = kernels.beam_error(a_, d_, target)
        rate[idx] = r
        err[idx] = e
        objective[idx] = r - params.omega * e
        a_res[idx] = analog_residual(a_)
        p_res[idx] = power_residual(a_, d_, params.power)

    record(0, a, d)
    for i in range(n):
        a = analog_inner_loop(a, d, schedule.mu[i], hm, target, params)
        d = digital_step(a, d, schedule.lam[i], hm, target, params)
        record(i + 1, a, d)

    return Trajectory(objective=objective, rate=rate, beam_error=err,
                      analog_residual=a_res, power_residual=p_res,
                      final=Precoders(analog=a, digital=d))


def _steering_columns(spec, n_antennas: int, count: int) -> list:
    if count == 0:
        return []
    if spec is None or len(spec.directions) < count:
        have = 0 if spec is None else len(spec.directions)
        raise ConfigError(
            f"need {count} sensing directions for the extra RF chains, have {have}")
    return [steering_vector(theta, n_antennas) for theta in spec.directions[:count]]


def _zf_target(h) -> np.ndarray:
    """Interference-free fully digital reference the digital stage tries to match."""
    return pseudo_inverse(_chan(h))


def _finish_init(a0, h, power: float) -> Precoders:
    d0 = pseudo_inverse(a0) @ _zf_target(h)
    d0 = project_digital(a0, d0, power)
    return Precoders(analog=a0, digital=d0)


def init_proposed(h, spec, power: float, n_chains: int) -> Precoders:
    """Phase-aligned analog stage plus a least-squares interference-nulling digital stage.

    Analog columns take the entrywise phases of the user channels (and, when
    there are more RF chains than users, of steering vectors toward the
    sensing mainlobes), which preserves the array gain of each column.
    """
    hm = _chan(h)
    k, n = hm.shape
    if n_chains < k:
        raise ConfigError(f"need at least as many RF chains as users ({n_chains} < {k})")
    cols = [hm[i].conj() for i in range(k)]
    cols += _steering_columns(spec, n, n_chains - k)
    g = np.column_stack(cols)
    a0 = np.exp(1j * np.angle(g))
    return _finish_init(a0, hm, power)


def init_random(h, seed: int, power: float, n_chains: int) -> Precoders:
    """Uniform random analog phases; digital stage fit to the random analog stage."""
    hm = _chan(h)
    _, n = hm.shape
    rng = np.random.default_rng(seed)
    a0 = np.exp(2j * np.pi * rng.random((n, n_chains)))
    d0 = pseudo_inverse(hm @ a0)
    d0 = project_digital(a0, d0, power)
    return Precoders(analog=a0, digital=d0)


def init_svd(h, spec, power: float, n_chains: int) -> Precoders:
    """Analog columns from dominant channel singular vectors, phase-projected."""
    hm = _chan(h)
    k, n = hm.shape
    if n_chains < k:
        raise ConfigError(f"need at least as many RF chains as users ({n_chains} < {k})")
    _, _, vh = np.linalg.svd(hm, full_matrices=False)
    cols = [vh[i].conj() for i in range(k)]
    cols += _steering_columns(spec, n, n_chains - k)
    a0 = project_analog(np.column_stack(cols))
    return _finish_init(a0, hm, power)
