# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled gradient and objective kernels.

Mirrors :mod:`jcashbf._kernels_np` function for function; the backend module
picks whichever is importable. Matrix products go straight to BLAS zgemm and
the per-user bookkeeping runs in tight C loops, which is what makes unrolled
forward passes (many small gradient evaluations) cheap.
"""

import numpy as np

from libc.math cimport log, log2
from scipy.linalg.cython_blas cimport zgemm

ctypedef double complex zc

# Row-major wrappers around column-major zgemm: computing out = x @ y row-major
# is the same memory result as out^T = y^T @ x^T column-major, so operands are
# swapped and leading dimensions are the row lengths. 78 = 'N', 67 = 'C'.

cdef void _mm_nn(zc* out, zc* x, zc* y, int m, int kk, int n, zc alpha) noexcept nogil:
    # out(m,n) = alpha * x(m,kk) @ y(kk,n)
    cdef char tn = 78
    cdef zc zero = 0.0
    zgemm(&tn, &tn, &n, &m, &kk, &alpha, y, &n, x, &kk, &zero, out, &n)


cdef void _mm_nh(zc* out, zc* x, zc* y, int m, int kk, int n, zc alpha) noexcept nogil:
    # out(m,n) = alpha * x(m,kk) @ y(n,kk)^H
    cdef char tc = 67, tn = 78
    cdef zc zero = 0.0
    zgemm(&tc, &tn, &n, &m, &kk, &alpha, y, &kk, x, &kk, &zero, out, &n)


cdef void _mm_hn(zc* out, zc* x, zc* y, int m, int kk, int n, zc alpha) noexcept nogil:
    # out(m,n) = alpha * x(kk,m)^H @ y(kk,n)
    cdef char tn = 78, tc = 67
    cdef zc zero = 0.0
    zgemm(&tn, &tc, &n, &m, &kk, &alpha, y, &n, x, &m, &zero, out, &n)


cdef inline double _abs2(zc v) noexcept nogil:
    return v.real * v.real + v.imag * v.imag


cdef void _denoms(zc[:, ::1] e, double noise_var, double[::1] total,
                  double[::1] interf) noexcept nogil:
    cdef int k_users = e.shape[0]
    cdef int k, j
    cdef double s
    for k in range(k_users):
        s = 0.0
        for j in range(k_users):
            s += _abs2(e[k, j])
        total[k] = s + noise_var
        interf[k] = s - _abs2(e[k, k]) + noise_var


cdef void _weights(zc[:, ::1] e, double[::1] total, double[::1] interf,
                   zc[:, ::1] z) noexcept nogil:
    # z rows: xi * (e_k / total_k - ebar_k / interf_k), xi = 1/ln 2
    cdef int k_users = e.shape[0]
    cdef int k, j
    cdef double xi = 1.0 / log(2.0)
    cdef double wt, wi
    for k in range(k_users):
        wt = xi / total[k]
        wi = xi / interf[k]
        for j in range(k_users):
            z[k, j] = e[k, j] * wt - e[k, j] * wi
        z[k, k] = e[k, k] * wt
    return


cdef class _Workspace:
    """Scratch buffers sized once per (K, N, M) problem."""
    cdef zc[:, ::1] g, e, z, zdh, gr_a, f, r0, t, gp_a
    cdef double[::1] total, interf

    def __cinit__(self, int k_users, int n_ant, int m_rf):
        self.g = np.empty((k_users, m_rf), dtype=np.complex128)
        self.e = np.empty((k_users, k_users), dtype=np.complex128)
        self.z = np.empty((k_users, k_users), dtype=np.complex128)
        self.zdh = np.empty((k_users, m_rf), dtype=np.complex128)
        self.gr_a = np.empty((n_ant, m_rf), dtype=np.complex128)
        self.f = np.empty((n_ant, k_users), dtype=np.complex128)
        self.r0 = np.empty((n_ant, n_ant), dtype=np.complex128)
        self.t = np.empty((n_ant, k_users), dtype=np.complex128)
        self.gp_a = np.empty((n_ant, m_rf), dtype=np.complex128)
        self.total = np.empty(k_users, dtype=np.float64)
        self.interf = np.empty(k_users, dtype=np.float64)


cdef void _grad_rate_analog(zc[:, ::1] h, zc[:, ::1] a, zc[:, ::1] d,
                            double noise_var, _Workspace w, zc[:, ::1] out) noexcept nogil:
    cdef int k_users = h.shape[0], n_ant = h.shape[1], m_rf = a.shape[1]
    _mm_nn(&w.g[0, 0], &h[0, 0], &a[0, 0], k_users, n_ant, m_rf, 1.0)
    _mm_nn(&w.e[0, 0], &w.g[0, 0], &d[0, 0], k_users, m_rf, k_users, 1.0)
    _denoms(w.e, noise_var, w.total, w.interf)
    _weights(w.e, w.total, w.interf, w.z)
    _mm_nh(&w.zdh[0, 0], &w.z[0, 0], &d[0, 0], k_users, k_users, m_rf, 1.0)
    _mm_hn(&out[0, 0], &h[0, 0], &w.zdh[0, 0], n_ant, k_users, m_rf, 1.0)


cdef void _residual_cov(zc[:, ::1] a, zc[:, ::1] d, zc[:, ::1] target,
                        _Workspace w) noexcept nogil:
    # w.f = a @ d, w.r0 = f f^H - target
    cdef int n_ant = a.shape[0], m_rf = a.shape[1], k_users = d.shape[1]
    cdef int i, j
    _mm_nn(&w.f[0, 0], &a[0, 0], &d[0, 0], n_ant, m_rf, k_users, 1.0)
    _mm_nh(&w.r0[0, 0], &w.f[0, 0], &w.f[0, 0], n_ant, k_users, n_ant, 1.0)
    for i in range(n_ant):
        for j in range(n_ant):
            w.r0[i, j] = w.r0[i, j] - target[i, j]


cdef void _grad_beam_analog(zc[:, ::1] a, zc[:, ::1] d, zc[:, ::1] target,
                            _Workspace w, zc[:, ::1] out) noexcept nogil:
    cdef int n_ant = a.shape[0], m_rf = a.shape[1], k_users = d.shape[1]
    _residual_cov(a, d, target, w)
    _mm_nn(&w.t[0, 0], &w.r0[0, 0], &w.f[0, 0], n_ant, n_ant, k_users, 1.0)
    _mm_nh(&out[0, 0], &w.t[0, 0], &d[0, 0], n_ant, k_users, m_rf, 2.0)


cdef _as_c(x):
    return np.ascontiguousarray(x, dtype=np.complex128)


def sum_rate(h, a, d, double noise_var):
    """Sum over users of log2(1 + SINR_k), in bits/s/Hz."""
    cdef zc[:, ::1] hv = _as_c(h), av = _as_c(a), dv = _as_c(d)
    cdef int k_users = hv.shape[0], n_ant = hv.shape[1], m_rf = av.shape[1]
    cdef _Workspace w = _Workspace(k_users, n_ant, m_rf)
    cdef double r = 0.0
    cdef int k
    with nogil:
        _mm_nn(&w.g[0, 0], &hv[0, 0], &av[0, 0], k_users, n_ant, m_rf, 1.0)
        _mm_nn(&w.e[0, 0], &w.g[0, 0], &dv[0, 0], k_users, m_rf, k_users, 1.0)
        _denoms(w.e, noise_var, w.total, w.interf)
        for k in range(k_users):
            r += log2(w.total[k]) - log2(w.interf[k])
    return r


def beam_error(a, d, target):
    """Squared Frobenius distance between realized covariance and target."""
    cdef zc[:, ::1] av = _as_c(a), dv = _as_c(d), tv = _as_c(target)
    cdef int n_ant = av.shape[0], m_rf = av.shape[1], k_users = dv.shape[1]
    cdef _Workspace w = _Workspace(k_users, n_ant, m_rf)
    cdef double err = 0.0
    cdef int i, j
    with nogil:
        _residual_cov(av, dv, tv, w)
        for i in range(n_ant):
            for j in range(n_ant):
                err += _abs2(w.r0[i, j])
    return err


def grad_rate_analog(h, a, d, double noise_var):
    cdef zc[:, ::1] hv = _as_c(h), av = _as_c(a), dv = _as_c(d)
    cdef int k_users = hv.shape[0], n_ant = hv.shape[1], m_rf = av.shape[1]
    cdef _Workspace w = _Workspace(k_users, n_ant, m_rf)
    out = np.empty((n_ant, m_rf), dtype=np.complex128)
    cdef zc[:, ::1] ov = out
    with nogil:
        _grad_rate_analog(hv, av, dv, noise_var, w, ov)
    return out


def grad_rate_digital(h, a, d, double noise_var):
    cdef zc[:, ::1] hv = _as_c(h), av = _as_c(a), dv = _as_c(d)
    cdef int k_users = hv.shape[0], n_ant = hv.shape[1], m_rf = av.shape[1]
    cdef _Workspace w = _Workspace(k_users, n_ant, m_rf)
    out = np.empty((m_rf, k_users), dtype=np.complex128)
    cdef zc[:, ::1] ov = out
    with nogil:
        _mm_nn(&w.g[0, 0], &hv[0, 0], &av[0, 0], k_users, n_ant, m_rf, 1.0)
        _mm_nn(&w.e[0, 0], &w.g[0, 0], &dv[0, 0], k_users, m_rf, k_users, 1.0)
        _denoms(w.e, noise_var, w.total, w.interf)
        _weights(w.e, w.total, w.interf, w.z)
        _mm_hn(&ov[0, 0], &w.g[0, 0], &w.z[0, 0], m_rf, k_users, k_users, 1.0)
    return out


def grad_beam_error_analog(a, d, target):
    cdef zc[:, ::1] av = _as_c(a), dv = _as_c(d), tv = _as_c(target)
    cdef int n_ant = av.shape[0], m_rf = av.shape[1], k_users = dv.shape[1]
    cdef _Workspace w = _Workspace(k_users, n_ant, m_rf)
    out = np.empty((n_ant, m_rf), dtype=np.complex128)
    cdef zc[:, ::1] ov = out
    with nogil:
        _grad_beam_analog(av, dv, tv, w, ov)
    return out


def grad_beam_error_digital(a, d, target):
    cdef zc[:, ::1] av = _as_c(a), dv = _as_c(d), tv = _as_c(target)
    cdef int n_ant = av.shape[0], m_rf = av.shape[1], k_users = dv.shape[1]
    cdef _Workspace w = _Workspace(k_users, n_ant, m_rf)
    out = np.empty((m_rf, k_users), dtype=np.complex128)
    cdef zc[:, ::1] ov = out
    with nogil:
        _residual_cov(av, dv, tv, w)
        _mm_nn(&w.t[0, 0], &w.r0[0, 0], &w.f[0, 0], n_ant, n_ant, k_users, 1.0)
        _mm_hn(&ov[0, 0], &av[0, 0], &w.t[0, 0], m_rf, n_ant, k_users, 2.0)
    return out


def ascend_analog(h, a, d, target, double noise_var, double omega, mus):
    """Run len(mus) unprojected ascent steps on the analog precoder.

    Matches the reference backend: digital precoder fixed, step j adds
    ``mu_j * (grad rate - omega * grad beam error)`` at the current iterate,
    and the beam-error term is skipped entirely when omega is zero.
    """
    out = np.array(a, dtype=np.complex128, order="C", copy=True)
    cdef zc[:, ::1] av = out
    cdef zc[:, ::1] hv = _as_c(h), dv = _as_c(d), tv = _as_c(target)
    cdef double[::1] muv = np.ascontiguousarray(mus, dtype=np.float64)
    cdef int k_users = hv.shape[0], n_ant = hv.shape[1], m_rf = av.shape[1]
    cdef _Workspace w = _Workspace(k_users, n_ant, m_rf)
    cdef int j, r, c
    cdef zc mu, step
    with nogil:
        for j in range(muv.shape[0]):
            mu = muv[j]
            _grad_rate_analog(hv, av, dv, noise_var, w, w.gr_a)
            if omega != 0.0:
                _grad_beam_analog(av, dv, tv, w, w.gp_a)
                for r in range(n_ant):
                    for c in range(m_rf):
                        step = w.gr_a[r, c] - omega * w.gp_a[r, c]
                        av[r, c] = av[r, c] + mu * step
            else:
                for r in range(n_ant):
                    for c in range(m_rf):
                        av[r, c] = av[r, c] + mu * w.gr_a[r, c]
    return out
