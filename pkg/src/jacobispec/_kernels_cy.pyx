# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: transfer-matrix products over energy grids and the
cyclic rotation eigensolver. Contracts match jacobispec._kernels_py."""

import numpy as np

from libc.math cimport fabs, sqrt, hypot, copysign, ldexp

from .errors import NumericFailure

cdef double RESCALE = 2.0 ** 512
cdef double RESCALE_INV = 2.0 ** -512


def disc_batch(a, b, energies):
    """Discriminant and its energy derivative at each energy."""
    a_arr = np.ascontiguousarray(a, dtype=np.float64)
    b_arr = np.ascontiguousarray(b, dtype=np.float64)
    E_arr = np.ascontiguousarray(np.atleast_1d(energies), dtype=np.float64)
    shape = E_arr.shape
    E_flat = E_arr.reshape(-1)
    D = np.empty_like(E_flat)
    dD = np.empty_like(E_flat)
    cdef const double[::1] av = a_arr
    cdef const double[::1] bv = b_arr
    cdef const double[::1] Ev = E_flat
    cdef double[::1] Dv = D
    cdef double[::1] dDv = dD
    cdef Py_ssize_t p = av.shape[0], n = Ev.shape[0], i, j
    cdef double E, inv, aj, t11
    cdef double m11, m12, m21, m22, d11, d12, d21, d22
    cdef double n11, n12, e11, e12, mag
    cdef long ex
    for i in range(n):
        E = Ev[i]
        m11 = 1.0; m12 = 0.0; m21 = 0.0; m22 = 1.0
        d11 = 0.0; d12 = 0.0; d21 = 0.0; d22 = 0.0
        ex = 0
        for j in range(p):
            inv = 1.0 / av[j]
            aj = av[j]
            t11 = (E - bv[j]) * inv
            n11 = t11 * m11 - inv * m21
            n12 = t11 * m12 - inv * m22
            e11 = t11 * d11 - inv * d21 + inv * m11
            e12 = t11 * d12 - inv * d22 + inv * m12
            m21 = aj * m11; m22 = aj * m12
            d21 = aj * d11; d22 = aj * d12
            m11 = n11; m12 = n12
            d11 = e11; d12 = e12
            mag = fabs(m11)
            if fabs(m12) > mag: mag = fabs(m12)
            if fabs(m21) > mag: mag = fabs(m21)
            if fabs(m22) > mag: mag = fabs(m22)
            if mag > RESCALE:
                m11 *= RESCALE_INV; m12 *= RESCALE_INV
                m21 *= RESCALE_INV; m22 *= RESCALE_INV
                d11 *= RESCALE_INV; d12 *= RESCALE_INV
                d21 *= RESCALE_INV; d22 *= RESCALE_INV
                ex += 512
            elif mag < RESCALE_INV and mag > 0.0:
                m11 *= RESCALE; m12 *= RESCALE
                m21 *= RESCALE; m22 *= RESCALE
                d11 *= RESCALE; d12 *= RESCALE
                d21 *= RESCALE; d22 *= RESCALE
                ex -= 512
        Dv[i] = ldexp(m11 + m22, ex)
        dDv[i] = ldexp(d11 + d22, ex)
    return D.reshape(shape), dD.reshape(shape)


def monodromy_batch(a, b, energies):
    """One-period transfer product at each energy, shape (n, 2, 2)."""
    a_arr = np.ascontiguousarray(a, dtype=np.float64)
    b_arr = np.ascontiguousarray(b, dtype=np.float64)
    E_arr = np.ascontiguousarray(np.atleast_1d(energies), dtype=np.float64)
    shape = E_arr.shape
    E_flat = E_arr.reshape(-1)
    out = np.empty((E_flat.shape[0], 4))
    cdef const double[::1] av = a_arr
    cdef const double[::1] bv = b_arr
    cdef const double[::1] Ev = E_flat
    cdef double[:, ::1] ov = out
    cdef Py_ssize_t p = av.shape[0], n = Ev.shape[0], i, j
    cdef double E, inv, aj, t11, m11, m12, m21, m22, n11, n12, mag
    cdef long ex
    for i in range(n):
        E = Ev[i]
        m11 = 1.0; m12 = 0.0; m21 = 0.0; m22 = 1.0
        ex = 0
        for j in range(p):
            inv = 1.0 / av[j]
            aj = av[j]
            t11 = (E - bv[j]) * inv
            n11 = t11 * m11 - inv * m21
            n12 = t11 * m12 - inv * m22
            m21 = aj * m11; m22 = aj * m12
            m11 = n11; m12 = n12
            mag = fabs(m11)
            if fabs(m12) > mag: mag = fabs(m12)
            if fabs(m21) > mag: mag = fabs(m21)
            if fabs(m22) > mag: mag = fabs(m22)
            if mag > RESCALE:
                m11 *= RESCALE_INV; m12 *= RESCALE_INV
                m21 *= RESCALE_INV; m22 *= RESCALE_INV
                ex += 512
            elif mag < RESCALE_INV and mag > 0.0:
                m11 *= RESCALE; m12 *= RESCALE
                m21 *= RESCALE; m22 *= RESCALE
                ex -= 512
        ov[i, 0] = ldexp(m11, ex)
        ov[i, 1] = ldexp(m12, ex)
        ov[i, 2] = ldexp(m21, ex)
        ov[i, 3] = ldexp(m22, ex)
    return out.reshape(shape + (2, 2))


def monodromy_with_derivative(a, b, energy):
    """Scalar monodromy matrix and its energy derivative (two 2x2 arrays)."""
    a_arr = np.ascontiguousarray(a, dtype=np.float64)
    b_arr = np.ascontiguousarray(b, dtype=np.float64)
    cdef const double[::1] av = a_arr
    cdef const double[::1] bv = b_arr
    cdef Py_ssize_t p = av.shape[0], j
    cdef double E = float(energy)
    cdef double inv, aj, t11, mag
    cdef double m11 = 1.0, m12 = 0.0, m21 = 0.0, m22 = 1.0
    cdef double d11 = 0.0, d12 = 0.0, d21 = 0.0, d22 = 0.0
    cdef double n11, n12, e11, e12
    cdef long ex = 0
    for j in range(p):
        inv = 1.0 / av[j]
        aj = av[j]
        t11 = (E - bv[j]) * inv
        n11 = t11 * m11 - inv * m21
        n12 = t11 * m12 - inv * m22
        e11 = t11 * d11 - inv * d21 + inv * m11
        e12 = t11 * d12 - inv * d22 + inv * m12
        m21 = aj * m11; m22 = aj * m12
        d21 = aj * d11; d22 = aj * d12
        m11 = n11; m12 = n12
        d11 = e11; d12 = e12
        mag = fabs(m11)
        if fabs(m12) > mag: mag = fabs(m12)
        if fabs(m21) > mag: mag = fabs(m21)
        if fabs(m22) > mag: mag = fabs(m22)
        if mag > RESCALE:
            m11 *= RESCALE_INV; m12 *= RESCALE_INV
            m21 *= RESCALE_INV; m22 *= RESCALE_INV
            d11 *= RESCALE_INV; d12 *= RESCALE_INV
            d21 *= RESCALE_INV; d22 *= RESCALE_INV
            ex += 512
        elif mag < RESCALE_INV and mag > 0.0:
            m11 *= RESCALE; m12 *= RESCALE
            m21 *= RESCALE; m22 *= RESCALE
            d11 *= RESCALE; d12 *= RESCALE
            d21 *= RESCALE; d22 *= RESCALE
            ex -= 512
    m = np.array([[ldexp(m11, ex), ldexp(m12, ex)],
                  [ldexp(m21, ex), ldexp(m22, ex)]])
    dm = np.array([[ldexp(d11, ex), ldexp(d12, ex)],
                   [ldexp(d21, ex), ldexp(d22, ex)]])
    return m, dm


def symmetric_eigenvalues(mat, double tol=1e-12, int max_sweeps=60):
    """All eigenvalues of a real symmetric matrix, ascending (rotation sweeps)."""
    A = np.array(mat, dtype=np.float64, order="C")
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise NumericFailure("matrix must be square")
    cdef Py_ssize_t n = A.shape[0]
    if n == 1:
        return A[0, :1].copy()
    cdef double[:, ::1] Av = A
    cdef Py_ssize_t i, j, k, sweep
    cdef double norm = 0.0, off, apq, tau, t, c, s, aki, akj
    for i in range(n):
        for j in range(n):
            norm += Av[i, j] * Av[i, j]
    norm = sqrt(norm)
    if norm == 0.0:
        return np.zeros(n)
    off = _off_norm(Av, n)
    for sweep in range(max_sweeps):
        if off <= tol * norm:
            break
        for i in range(n - 1):
            for j in range(i + 1, n):
                apq = Av[i, j]
                if apq == 0.0:
                    continue
                tau = (Av[j, j] - Av[i, i]) / (2.0 * apq)
                if fabs(tau) > 1e12:
                    t = 1.0 / (2.0 * tau)
                else:
                    t = copysign(1.0, tau) / (fabs(tau) + hypot(1.0, tau))
                c = 1.0 / sqrt(1.0 + t * t)
                s = t * c
                Av[i, i] -= t * apq
                Av[j, j] += t * apq
                Av[i, j] = 0.0
                Av[j, i] = 0.0
                for k in range(n):
                    if k == i or k == j:
                        continue
                    aki = Av[k, i]
                    akj = Av[k, j]
                    Av[k, i] = c * aki - s * akj
                    Av[i, k] = Av[k, i]
                    Av[k, j] = s * aki + c * akj
                    Av[j, k] = Av[k, j]
        off = _off_norm(Av, n)
    else:
        raise NumericFailure(
            f"rotation sweep did not converge: off-norm {off:.3e} vs "
            f"target {tol * norm:.3e} after {max_sweeps} sweeps"
        )
    return np.sort(A.diagonal().copy())


cdef double _off_norm(double[:, ::1] Av, Py_ssize_t n):
    cdef Py_ssize_t i, j
    cdef double acc = 0.0
    for i in range(n - 1):
        for j in range(i + 1, n):
            acc += Av[i, j] * Av[i, j]
    return sqrt(2.0 * acc)
