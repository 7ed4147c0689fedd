"""Design objective: sum rate, beampattern error, and their closed-form gradients.

The optimizer maximizes ``rate - omega * beam_error`` over a hybrid precoder
pair subject to unit-modulus analog entries and a total power constraint on
the effective precoder. All four gradients here are closed-form conjugate
gradients (see :mod:`jcashbf.numerics` for the convention) and are validated
against the finite-difference oracle in the test suite.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .backend import kernels
from .channel import ChannelSet


@dataclass(frozen=True)
class Precoders:
    """Analog (N, M) phase-shifter stage and digital (M, K) stage."""

    analog: np.ndarray
    digital: np.ndarray

    @property
    def effective(self) -> np.ndarray:
        """Full N x K precoder applied to the data vector."""
        return self.analog @ self.digital

    @property
    def covariance(self) -> np.ndarray:
        f = self.effective
        return f @ f.conj().T


@dataclass(frozen=True)
class SystemParams:
    """Transmit power, noise variance, and tradeoff weights.

    ``eta`` rebalances the beam-error gradient in the digital update; the
    default (used when None) is 1/N because that gradient's entries are larger
    than the analog one's by roughly the antenna count.
    """

    power: float
    noise_var: float = 1.0
    omega: float = 0.3
    eta: Optional[float] = None

    def __post_init__(self):
        if self.power <= 0:
            raise ValueError("power must be positive")
        if self.noise_var <= 0:
            raise ValueError("noise_var must be positive")
        if self.omega < 0:
            raise ValueError("omega must be nonnegative")
        if self.eta is not None and self.eta <= 0:
            raise ValueError("eta must be positive")

    def eta_for(self, n_antennas: int) -> float:
        return self.eta if self.eta is not None else 1.0 / n_antennas


def _chan(h) -> np.ndarray:
    m = h.matrix if isinstance(h, ChannelSet) else np.asarray(h)
    return np.ascontiguousarray(m, dtype=np.complex128)


def _mat(x) -> np.ndarray:
    return np.ascontiguousarray(x, dtype=np.complex128)


def sum_rate(h, pc: Precoders, noise_var: float) -> float:
    """Downlink sum rate (bits/s/Hz) under inter-user interference."""
    return kernels.sum_rate(_chan(h), _mat(pc.analog), _mat(pc.digital), float(noise_var))


def beam_error(pc: Precoders, target_cov) -> float:
    """Squared Frobenius distance between realized and target covariance."""
    return kernels.beam_error(_mat(pc.analog), _mat(pc.digital), _mat(target_cov))


def grad_rate_analog(h, pc: Precoders, noise_var: float) -> np.ndarray:
    return kernels.grad_rate_analog(_chan(h), _mat(pc.analog), _mat(pc.digital),
                                    float(noise_var))


def grad_rate_digital(h, pc: Precoders, noise_var: float) -> np.ndarray:
    return kernels.grad_rate_digital(_chan(h), _mat(pc.analog), _mat(pc.digital),
                                     float(noise_var))


def grad_beam_error_analog(pc: Precoders, target_cov) -> np.ndarray:
    return kernels.grad_beam_error_analog(_mat(pc.analog), _mat(pc.digital),
                                          _mat(target_cov))


def grad_beam_error_digital(pc: Precoders, target_cov) -> np.ndarray:
    return kernels.grad_beam_error_digital(_mat(pc.analog), _mat(pc.digital),
                                           _mat(target_cov))


def tradeoff_objective(h, pc: Precoders, target_cov, params: SystemParams) -> float:
    """The maximized quantity: sum rate minus omega times beam error."""
    r = sum_rate(h, pc, params.noise_var)
    if params.omega == 0.0:
        return r
    return r - params.omega * beam_error(pc, target_cov)
