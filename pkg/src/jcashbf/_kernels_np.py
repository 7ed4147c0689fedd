"""Pure-numpy gradient and objective kernels (reference backend).

Shapes: ``h`` is (K, N) with user rows already conjugated, ``a`` is the
(N, M) analog precoder, ``d`` the (M, K) digital precoder, ``target`` the
(N, N) Hermitian target transmit covariance. All closed-form gradients use
the conjugate convention described in :mod:`jcashbf.numerics`, so they match
``wirtinger_fd_gradient`` directly.

The compiled backend in ``jcashbf._core`` mirrors this module exactly; this
one stays as the readable reference and the import-time fallback.
"""

import numpy as np


def _sinr_parts(h, a, d, noise_var):
    """Effective gains e = h a d plus per-user total/interference denominators."""
    g = h @ a
    e = g @ d
    p = np.abs(e) ** 2
    total = p.sum(axis=1) + noise_var
    interf = total - np.diagonal(p)
    return g, e, total, interf


def sum_rate(h, a, d, noise_var):
    """Sum over users of log2(1 + SINR_k), in bits/s/Hz."""
    _, _, total, interf = _sinr_parts(h, a, d, noise_var)
    return float(np.sum(np.log2(total) - np.log2(interf)))


def beam_error(a, d, target):
    """Squared Frobenius distance between realized covariance and target."""
    f = a @ d
    return float(np.linalg.norm(f @ f.conj().T - target) ** 2)


def _rate_weights(h, a, d, noise_var):
    """Per-user weight matrix z with rows e_k/total_k - ebar_k/interf_k.

    Both rate gradients factor through z: grad wrt the digital precoder is
    xi * (h a)^H z and grad wrt the analog precoder is xi * h^H (z d^H),
    with xi = 1/ln 2.
    """
    g, e, total, interf = _sinr_parts(h, a, d, noise_var)
    k = e.shape[0]
    ebar = e.copy()
    ebar[np.arange(k), np.arange(k)] = 0.0
    xi = 1.0 / np.log(2.0)
    z = xi * (e / total[:, None] - ebar / interf[:, None])
    return g, z


def grad_rate_analog(h, a, d, noise_var):
    _, z = _rate_weights(h, a, d, noise_var)
    return h.conj().T @ (z @ d.conj().T)


def grad_rate_digital(h, a, d, noise_var):
    g, z = _rate_weights(h, a, d, noise_var)
    return g.conj().T @ z


def grad_beam_error_analog(a, d, target):
    f = a @ d
    return 2.0 * ((f @ f.conj().T - target) @ f) @ d.conj().T


def grad_beam_error_digital(a, d, target):
    f = a @ d
    return 2.0 * a.conj().T @ ((f @ f.conj().T - target) @ f)


def ascend_analog(h, a, d, target, noise_var, omega, mus):
    """Run len(mus) unprojected ascent steps on the analog precoder.

    The digital precoder stays fixed; each step adds
    ``mu_j * (grad rate - omega * grad beam error)`` evaluated at the current
    iterate. When omega is zero the beam-error gradient is never computed, so
    the result cannot depend on ``target``.
    """
    a = a.copy()
    for mu in mus:
        step = grad_rate_analog(h, a, d, noise_var)
        if omega != 0.0:
            step = step - omega * grad_beam_error_analog(a, d, target)
        a += mu * step
    return a
