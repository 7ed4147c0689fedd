"""Dense complex linear algebra helpers and a numerical complex-gradient oracle.

Everything here is a pure function of its inputs, safe to call from multiple
threads. Gradients of real-valued functions of complex matrices follow the
conjugate convention: the (r, c) entry of a gradient is the derivative with
respect to the conjugated (r, c) entry of the argument, i.e.
``0.5 * (d/dRe + 1j * d/dIm)``.
"""

from dataclasses import dataclass

import numpy as np

from .errors import NumericalError

# Relative cutoff below which singular values are treated as zero.
PINV_RTOL = 1e-12


@dataclass(frozen=True)
class HermitianEig:
    """Eigendecomposition of a Hermitian matrix, eigenvalues ascending."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def fro_norm(x) -> float:
    """Frobenius norm sqrt(sum |x_ij|^2)."""
    return float(np.linalg.norm(np.asarray(x)))


def pseudo_inverse(x) -> np.ndarray:
    """Moore-Penrose pseudo-inverse.

    Singular values below ``PINV_RTOL`` times the largest one are truncated,
    so rank-deficient inputs are fine.
    """
    x = np.asarray(x, dtype=complex)
    return np.linalg.pinv(x, rcond=PINV_RTOL)


def hermitian_eig(x) -> HermitianEig:
    """Eigendecomposition of the Hermitian part of a square matrix."""
    x = np.asarray(x, dtype=complex)
    if x.ndim != 2 or x.shape[0] != x.shape[1]:
        raise ValueError(f"square matrix required, got shape {x.shape}")
    w, v = np.linalg.eigh(0.5 * (x + x.conj().T))
    return HermitianEig(eigenvalues=w, eigenvectors=v)


def psd_project(x) -> np.ndarray:
    """Nearest positive-semidefinite matrix (Frobenius) to the Hermitian part.

    Symmetrizes, then clips negative eigenvalues to zero.
    """
    eig = hermitian_eig(x)
    clipped = np.maximum(eig.eigenvalues, 0.0)
    out = (eig.eigenvectors * clipped) @ eig.eigenvectors.conj().T
    return 0.5 * (out + out.conj().T)


def wirtinger_fd_gradient(f, x, h: float = 1e-5) -> np.ndarray:
    """Central-difference conjugate gradient of a real scalar function ``f``.

    Entry (r, c) is ``0.5 * (df/dRe[x]_rc + 1j * df/dIm[x]_rc)``, each partial
    estimated by central differences with step ``h``. This is the independent
    oracle used to validate every closed-form gradient in the package.
    """
    if not (1e-7 <= h <= 1e-4):
        raise ValueError(f"step h must lie in [1e-7, 1e-4], got {h}")
    x = np.asarray(x, dtype=complex)
    grad = np.empty_like(x)
    inv2h = 0.5 / h

    def probe(delta):
        val = f(x + delta)
        if not np.isfinite(val):
            raise NumericalError(f"non-finite function value {val!r} during finite differences")
        return val

    delta = np.zeros_like(x)
    for r in range(x.shape[0]):
        for c in range(x.shape[1]):
            delta[r, c] = h
            d_re = (probe(delta) - probe(-delta)) * inv2h
            delta[r, c] = 1j * h
            d_im = (probe(delta) - probe(-delta)) * inv2h
            delta[r, c] = 0.0
            grad[r, c] = 0.5 * (d_re + 1j * d_im)
    return grad
