"""Periodic Jacobi operators: transfer matrices, monodromy, discriminant
with derivative, and the periodic/antiperiodic restrictions whose
eigenvalues are the band edges."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import InvalidArgument

__all__ = [
    "PeriodicSequence",
    "PeriodicJacobi",
    "Mat2",
    "FloquetRestriction",
    "transfer_matrix",
    "monodromy",
    "discriminant",
    "discriminant_many",
    "floquet_restriction",
]


class PeriodicSequence:
    """Real values (s(1), ..., s(p)) extended p-periodically to all of Z."""

    __slots__ = ("values",)

    def __init__(self, values):
        v = np.array(values, dtype=float)
        if v.ndim != 1 or v.size < 1:
            raise InvalidArgument("a periodic sequence needs at least one value")
        if not np.all(np.isfinite(v)):
            raise InvalidArgument("sequence values must be finite")
        v.flags.writeable = False
        self.values = v

    @property
    def period(self):
        return self.values.size

    def value_at(self, n):
        """s(n) for any integer n (1-based within a period)."""
        return float(self.values[(n - 1) % self.period])

    def tiled(self, k):
        return PeriodicSequence(np.tile(self.values, k))

    def extended(self, period):
        if period % self.period:
            raise InvalidArgument(
                f"cannot extend period {self.period} to non-multiple {period}"
            )
        return self.tiled(period // self.period)

    def __eq__(self, other):
        return (
            isinstance(other, PeriodicSequence)
            and self.values.shape == other.values.shape
            and bool(np.all(self.values == other.values))
        )

    def __repr__(self):
        return f"PeriodicSequence({self.values.tolist()!r})"


class PeriodicJacobi:
    """Two-sided Jacobi operator with periodic coefficients a > 0 and b.

    (J u)(n) = a(n-1) u(n-1) + a(n) u(n+1) + b(n) u(n); both sequences are
    stored extended to their least common period.
    """

    __slots__ = ("a", "b")

    def __init__(self, a, b):
        if not isinstance(a, PeriodicSequence):
            a = PeriodicSequence(a)
        if not isinstance(b, PeriodicSequence):
            b = PeriodicSequence(b)
        if np.any(a.values <= 0):
            raise InvalidArgument("off-diagonal sequence a must be positive")
        p = math.lcm(a.period, b.period)
        self.a = a.extended(p)
        self.b = b.extended(p)

    @property
    def period(self):
        return self.a.period

    def coupling(self):
        """max(1, a(1), ..., a(p)), the constant in the band-length bound."""
        return max(1.0, float(self.a.values.max()))

    def spectrum_bounds(self):
        amax = float(self.a.values.max())
        return (
            float(self.b.values.min()) - 2.0 * amax,
            float(self.b.values.max()) + 2.0 * amax,
        )

    def scale(self):
        lo, hi = self.spectrum_bounds()
        return max(1.0, abs(lo), abs(hi))

    def to_json_dict(self):
        return {
            "p": self.period,
            "a": self.a.values.tolist(),
            "b": self.b.values.tolist(),
        }

    @classmethod
    def from_json_dict(cls, data):
        try:
            a, b = data["a"], data["b"]
        except (KeyError, TypeError):
            raise InvalidArgument("operator JSON needs keys 'a' and 'b'")
        op = cls(a, b)
        if "p" in data and int(data["p"]) != op.period:
            raise InvalidArgument(
                f"declared period {data['p']} != common period {op.period}"
            )
        return op

    def __repr__(self):
        return f"PeriodicJacobi(a={self.a.values.tolist()}, b={self.b.values.tolist()})"


@dataclass(frozen=True)
class Mat2:
    """Real 2x2 matrix; transfer and monodromy matrices have det 1."""

    m11: float
    m12: float
    m21: float
    m22: float

    def trace(self):
        return self.m11 + self.m22

    def det(self):
        return self.m11 * self.m22 - self.m12 * self.m21

    def __matmul__(self, other):
        return Mat2(
            self.m11 * other.m11 + self.m12 * other.m21,
            self.m11 * other.m12 + self.m12 * other.m22,
            self.m21 * other.m11 + self.m22 * other.m21,
            self.m21 * other.m12 + self.m22 * other.m22,
        )

    def inverse(self):
        d = self.det()
        if d == 0:
            raise InvalidArgument("singular 2x2 matrix")
        return Mat2(self.m22 / d, -self.m12 / d, -self.m21 / d, self.m11 / d)

    def mobius(self, z):
        """Linear fractional action on the upper half plane."""
        return (self.m11 * z + self.m12) / (self.m21 * z + self.m22)

    def hs_norm_sq(self):
        return self.m11**2 + self.m12**2 + self.m21**2 + self.m22**2

    def as_array(self):
        return np.array([[self.m11, self.m12], [self.m21, self.m22]])

    @classmethod
    def from_array(cls, arr):
        return cls(float(arr[0][0]), float(arr[0][1]), float(arr[1][0]), float(arr[1][1]))

    @classmethod
    def identity(cls):
        return cls(1.0, 0.0, 0.0, 1.0)


@dataclass
class FloquetRestriction:
    """Symmetric p x p restriction with periodic (+) or antiperiodic (-)
    coupling; at p = 2 the corner lands on the off-diagonal entry and the
    two contributions add, and at p = 1 the matrix is the scalar
    b(1) ± 2 a(1)."""

    sign: int
    diagonal: np.ndarray
    off: np.ndarray
    corner: float

    @property
    def size(self):
        return self.diagonal.size

    def matrix(self):
        p = self.size
        if p == 1:
            return np.array([[self.diagonal[0] + self.sign * 2.0 * self.corner]])
        m = np.diag(self.diagonal.astype(float))
        for i in range(p - 1):
            m[i, i + 1] = m[i + 1, i] = self.off[i]
        m[0, p - 1] += self.sign * self.corner
        m[p - 1, 0] += self.sign * self.corner
        return m

    def eigenvalues(self):
        return kernels.symmetric_eigenvalues(self.matrix())


def transfer_matrix(operator, energy, n):
    """Single-site transfer factor (1/a(n)) [[E - b(n), -1], [a(n)^2, 0]]."""
    a_n = operator.a.value_at(n)
    b_n = operator.b.value_at(n)
    return Mat2((energy - b_n) / a_n, -1.0 / a_n, a_n, 0.0)


def monodromy(operator, energy):
    """Transfer product over one full period, rightmost factor at site 1."""
    m = kernels.monodromy_batch(operator.a.values, operator.b.values, [energy])[0]
    return Mat2.from_array(m)


def discriminant(operator, energy):
    """Trace of the monodromy matrix and its energy derivative."""
    D, dD = kernels.disc_batch(
        operator.a.values, operator.b.values, [float(energy)]
    )
    return float(D[0]), float(dD[0])


def discriminant_many(operator, energies):
    """Vectorized discriminant over an energy grid."""
    return kernels.disc_batch(operator.a.values, operator.b.values, energies)


def floquet_restriction(operator, sign):
    """Restriction to one period with periodic (+1) or antiperiodic (-1)
    boundary coupling."""
    if sign not in (1, -1):
        raise InvalidArgument("sign must be +1 or -1")
    a = operator.a.values
    b = operator.b.values
    return FloquetRestriction(
        sign=sign,
        diagonal=b.copy(),
        off=a[:-1].copy(),
        corner=float(a[-1]),
    )
