"""Reference numpy implementation of the hot kernels.

Same contracts as the compiled module jacobispec._kernels_cy; this one is
the fallback selected at import when the extension is unavailable (or when
JACOBISPEC_PURE=1). Transfer products carry a power-of-two exponent so that
long periods neither overflow nor drown in rounding.
"""

import math

import numpy as np

from .errors import NumericFailure

_RESCALE = 2.0**512
_RESCALE_INV = 2.0**-512


def disc_batch(a, b, energies):
    """Discriminant and its energy derivative at each energy.

    a, b: one period of the Jacobi coefficients (equal lengths, a > 0).
    Returns (D, dD) as float arrays shaped like ``energies``.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    E = np.atleast_1d(np.asarray(energies, dtype=float))
    m11 = np.ones_like(E)
    m12 = np.zeros_like(E)
    m21 = np.zeros_like(E)
    m22 = np.zeros_like(E)
    d11 = np.zeros_like(E)
    d12 = np.zeros_like(E)
    d21 = np.zeros_like(E)
    d22 = np.zeros_like(E)
    ex = np.zeros(E.shape, dtype=np.int64)
    for j in range(a.size):
        inv = 1.0 / a[j]
        aj = a[j]
        t11 = (E - b[j]) * inv
        n11 = t11 * m11 - inv * m21
        n12 = t11 * m12 - inv * m22
        e11 = t11 * d11 - inv * d21 + inv * m11
        e12 = t11 * d12 - inv * d22 + inv * m12
        m21, m22, d21, d22 = aj * m11, aj * m12, aj * d11, aj * d12
        m11, m12, d11, d12 = n11, n12, e11, e12
        mag = np.maximum(np.abs(m11), np.abs(m22))
        np.maximum(mag, np.abs(m12), out=mag)
        np.maximum(mag, np.abs(m21), out=mag)
        big = mag > _RESCALE
        if big.any():
            for arr in (m11, m12, m21, m22, d11, d12, d21, d22):
                arr[big] *= _RESCALE_INV
            ex[big] += 512
        small = (mag < _RESCALE_INV) & (mag > 0)
        if small.any():
            for arr in (m11, m12, m21, m22, d11, d12, d21, d22):
                arr[small] *= _RESCALE
            ex[small] -= 512
    with np.errstate(over="ignore"):
        D = np.ldexp(m11 + m22, ex)
        dD = np.ldexp(d11 + d22, ex)
    return D, dD


def monodromy_batch(a, b, energies):
    """One-period transfer product at each energy, shape (n, 2, 2)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    E = np.atleast_1d(np.asarray(energies, dtype=float))
    m11 = np.ones_like(E)
    m12 = np.zeros_like(E)
    m21 = np.zeros_like(E)
    m22 = np.zeros_like(E)
    ex = np.zeros(E.shape, dtype=np.int64)
    for j in range(a.size):
        inv = 1.0 / a[j]
        aj = a[j]
        t11 = (E - b[j]) * inv
        n11 = t11 * m11 - inv * m21
        n12 = t11 * m12 - inv * m22
        m21, m22 = aj * m11, aj * m12
        m11, m12 = n11, n12
        mag = np.maximum(np.abs(m11), np.abs(m22))
        np.maximum(mag, np.abs(m12), out=mag)
        np.maximum(mag, np.abs(m21), out=mag)
        big = mag > _RESCALE
        if big.any():
            for arr in (m11, m12, m21, m22):
                arr[big] *= _RESCALE_INV
            ex[big] += 512
        small = (mag < _RESCALE_INV) & (mag > 0)
        if small.any():
            for arr in (m11, m12, m21, m22):
                arr[small] *= _RESCALE
            ex[small] -= 512
    out = np.empty(E.shape + (2, 2))
    with np.errstate(over="ignore"):
        out[..., 0, 0] = np.ldexp(m11, ex)
        out[..., 0, 1] = np.ldexp(m12, ex)
        out[..., 1, 0] = np.ldexp(m21, ex)
        out[..., 1, 1] = np.ldexp(m22, ex)
    return out


def monodromy_with_derivative(a, b, energy):
    """Scalar monodromy matrix and its energy derivative (two 2x2 arrays)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    E = float(energy)
    m = np.eye(2)
    dm = np.zeros((2, 2))
    ex = 0
    for j in range(a.size):
        inv = 1.0 / a[j]
        t = np.array([[(E - b[j]) * inv, -inv], [a[j], 0.0]])
        dt = np.array([[inv, 0.0], [0.0, 0.0]])
        dm = t @ dm + dt @ m
        m = t @ m
        mag = np.abs(m).max()
        if mag > _RESCALE:
            m *= _RESCALE_INV
            dm *= _RESCALE_INV
            ex += 512
        elif 0 < mag < _RESCALE_INV:
            m *= _RESCALE
            dm *= _RESCALE
            ex -= 512
    with np.errstate(over="ignore"):
        return np.ldexp(m, ex), np.ldexp(dm, ex)


def symmetric_eigenvalues(mat, tol=1e-12, max_sweeps=60):
    """All eigenvalues of a real symmetric matrix, ascending.

    Cyclic rotation sweeps; stops once the off-diagonal Frobenius norm falls
    below tol times the Frobenius norm of the input.
    """
    A = np.array(mat, dtype=float)
    n = A.shape[0]
    if A.shape != (n, n):
        raise NumericFailure("matrix must be square")
    if n == 1:
        return A[0, :1].copy()
    rows = [list(map(float, A[i])) for i in range(n)]
    norm = math.sqrt(sum(x * x for row in rows for x in row))
    if norm == 0.0:
        return np.zeros(n)
    off = _off_norm(rows, n)
    for _ in range(max_sweeps):
        if off <= tol * norm:
            break
        for i in range(n - 1):
            ri = rows[i]
            for j in range(i + 1, n):
                rj = rows[j]
                apq = ri[j]
                if apq == 0.0:
                    continue
                tau = (rj[j] - ri[i]) / (2.0 * apq)
                if abs(tau) > 1e12:
                    t = 1.0 / (2.0 * tau)
                else:
                    t = math.copysign(1.0, tau) / (abs(tau) + math.hypot(1.0, tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                ri[i] -= t * apq
                rj[j] += t * apq
                ri[j] = rj[i] = 0.0
                for k in range(n):
                    if k == i or k == j:
                        continue
                    rk = rows[k]
                    aki, akj = rk[i], rk[j]
                    rk[i] = ri[k] = c * aki - s * akj
                    rk[j] = rj[k] = s * aki + c * akj
        off = _off_norm(rows, n)
    else:
        raise NumericFailure(
            f"rotation sweep did not converge: off-norm {off:.3e} vs "
            f"target {tol * norm:.3e} after {max_sweeps} sweeps"
        )
    return np.sort(np.array([rows[i][i] for i in range(n)]))


def _off_norm(rows, n):
    acc = 0.0
    for i in range(n - 1):
        ri = rows[i]
        for j in range(i + 1, n):
            acc += ri[j] * ri[j]
    return math.sqrt(2.0 * acc)
