"""Integrated density of states of periodic Jacobi operators.

The density comes from the discriminant phase: with 2 cos(theta) = D(E) on
a band interior, dk/dE = |dtheta/dE| / (pi p). The site-shifted monodromies
are elliptic there; their fixed points in the upper half plane yield the
explicit rotation conjugacies whose Hilbert-Schmidt norms give the lower
bound dk/dE >= sum_j ||M_j||^2 / (4 pi A^2 p) and, integrated over a band,
the band-length bound 2 pi A^2 / p.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import EdgeSingularity, InvalidArgument, NotElliptic, NumericFailure
from .floquet import band_spectrum
from .jacobi import Mat2, discriminant, discriminant_many, transfer_matrix

__all__ = [
    "anti_trace",
    "elliptic_fixed_point",
    "conjugacy_to_rotation",
    "EllipticData",
    "elliptic_chain",
    "ids_density",
    "hs_lower_bound",
    "phase_increment",
    "BandLengthReport",
    "band_length_check",
]

DEFAULT_EDGE_MARGIN = 1e-6  # relative to band length; dk/dE blows up at edges


def anti_trace(m):
    """m21 - m12; invariant under conjugation by rotations."""
    return m.m21 - m.m12


def elliptic_fixed_point(m, det_tol=1e-8):
    """Unique fixed point in the upper half plane of an elliptic SL(2, R)
    matrix, i.e. the root with positive imaginary part of
    m21 z^2 + (m22 - m11) z - m12 = 0."""
    tr = m.trace()
    if not abs(tr) < 2.0:
        raise NotElliptic(f"|trace| = {abs(tr)!r} >= 2")
    scale = max(1.0, m.hs_norm_sq())
    if abs(m.det() - 1.0) > det_tol * scale:
        raise InvalidArgument(f"determinant {m.det()!r} too far from 1")
    if m.m21 == 0.0:
        # with det 1 and |trace| < 2 the eigenvalues would be real, so this
        # only happens for inputs that are not honestly SL(2, R)
        raise NotElliptic("m21 = 0 is incompatible with unit det and |trace| < 2")
    re = (m.m11 - m.m22) / (2.0 * m.m21)
    im = math.sqrt(4.0 - tr * tr) / (2.0 * abs(m.m21))
    return complex(re, im)


def conjugacy_to_rotation(m):
    """The upper-triangular M with M m M^{-1} in SO(2), built from the
    fixed point z: (Im z)^{-1/2} [[1, -Re z], [0, Im z]]."""
    z = elliptic_fixed_point(m)
    s = 1.0 / math.sqrt(z.imag)
    return Mat2(s, -s * z.real, 0.0, s * z.imag)


@dataclass
class EllipticData:
    """Site-shifted monodromies at one energy: fixed points z_j, rotation
    conjugacies M_j and their squared Hilbert-Schmidt norms
    (1 + |z_j|^2) / Im z_j."""

    energy: float
    shifted_monodromies: list
    fixed_points: list
    conjugacies: list
    hs_norms_sq: list


def elliptic_chain(operator, energy):
    """Build the whole-period chain at a band-interior energy.

    The shift by j conjugates the monodromy with the prefix transfer
    product over sites 1..j-1, so the chain costs O(p) matrix products.
    Raises EdgeSingularity if any shifted monodromy fails to be elliptic.
    """
    p = operator.period
    prefix = Mat2.identity()
    prefixes = [prefix]
    for n in range(1, p):
        prefix = transfer_matrix(operator, energy, n) @ prefix
        prefixes.append(prefix)
    base = transfer_matrix(operator, energy, p) @ prefix
    shifted = []
    fixed = []
    conjugacies = []
    norms = []
    for j in range(p):
        phi = prefixes[j] @ base @ prefixes[j].inverse()
        try:
            z = elliptic_fixed_point(phi)
        except NotElliptic as exc:
            raise EdgeSingularity(
                f"shifted monodromy at site {j + 1} is not elliptic at "
                f"E={energy!r}: {exc}"
            ) from exc
        shifted.append(phi)
        fixed.append(z)
        conjugacies.append(conjugacy_to_rotation(phi))
        norms.append((1.0 + abs(z) ** 2) / z.imag)
    return EllipticData(
        energy=float(energy),
        shifted_monodromies=shifted,
        fixed_points=fixed,
        conjugacies=conjugacies,
        hs_norms_sq=norms,
    )


def _interior_band(operator, energy, spectrum, edge_margin):
    if spectrum is None:
        spectrum = band_spectrum(operator)
    for idx, (lo, hi) in enumerate(spectrum.bands):
        margin = edge_margin * (hi - lo)
        if lo + margin < energy < hi - margin:
            return idx, spectrum
    raise EdgeSingularity(
        f"E={energy!r} is not inside a band interior "
        f"(relative edge margin {edge_margin!r})"
    )


def ids_density(operator, energy, spectrum=None, edge_margin=DEFAULT_EDGE_MARGIN):
    """dk/dE = |D'(E)| / (pi p sqrt(4 - D(E)^2)) strictly inside a band."""
    _interior_band(operator, energy, spectrum, edge_margin)
    disc, d_disc = discriminant(operator, energy)
    radicand = 4.0 - disc * disc
    if radicand <= 0.0:
        raise EdgeSingularity(f"|D(E)| >= 2 at E={energy!r}")
    return abs(d_disc) / (math.pi * operator.period * math.sqrt(radicand))


def hs_lower_bound(operator, energy, spectrum=None, edge_margin=DEFAULT_EDGE_MARGIN):
    """sum_j (1 + |z_j|^2) / Im z_j divided by 4 pi A^2 p; never exceeds
    ids_density at the same energy."""
    _interior_band(operator, energy, spectrum, edge_margin)
    chain = elliptic_chain(operator, energy)
    coupling = operator.coupling()
    return sum(chain.hs_norms_sq) / (
        4.0 * math.pi * coupling**2 * operator.period
    )


def phase_increment(operator, band_index, spectrum=None, max_refinements=18):
    """Total phase swept across one band, divided by pi p.

    The edges carry D = +2 and D = -2 by construction, so their phases are
    pinned to 0 and pi; the refinement grid only validates that the phase
    moves monotonically in steps below pi/4, doubling until it does.
    Returns 1/p whenever that validation succeeds.
    """
    if spectrum is None:
        spectrum = band_spectrum(operator)
    if not 0 <= band_index < spectrum.band_count:
        raise InvalidArgument(f"band index {band_index} out of range")
    lo, hi = spectrum.bands[band_index]
    m = 8
    for _ in range(max_refinements + 1):
        grid = np.linspace(lo, hi, m + 1)
        disc, _ = discriminant_many(operator, grid)
        theta = np.arccos(np.clip(disc / 2.0, -1.0, 1.0))
        theta[0] = 0.0 if disc[0] > 0 else math.pi
        theta[-1] = 0.0 if disc[-1] > 0 else math.pi
        diffs = np.diff(theta)
        rising = theta[-1] >= theta[0]
        monotone = bool(
            np.all(diffs >= -1e-12) if rising else np.all(diffs <= 1e-12)
        )
        if monotone and float(np.abs(diffs).max()) < math.pi / 4.0:
            return abs(theta[-1] - theta[0]) / (math.pi * operator.period)
        m *= 2
    raise NumericFailure(
        f"phase tracking failed on band {band_index}: the discriminant is "
        f"not monotone there or the grid kept aliasing"
    )


@dataclass
class BandLengthReport:
    """Max band length against the 2 pi A^2 / p ceiling."""

    band_lengths: list
    max_band_length: float
    bound: float
    slack: float
    ok: bool

    def to_json_dict(self):
        return {
            "band_lengths": self.band_lengths,
            "max_band_length": self.max_band_length,
            "bound": self.bound,
            "slack": self.slack,
            "ok": self.ok,
        }


def band_length_check(operator, spectrum=None):
    """Compare every band length against 2 pi A^2 / p. This is a theorem,
    so the report never fails on honestly computed spectra; the slack is
    what is worth reading."""
    if spectrum is None:
        spectrum = band_spectrum(operator)
    lengths = spectrum.band_lengths()
    bound = 2.0 * math.pi * operator.coupling() ** 2 / operator.period
    longest = max(lengths)
    return BandLengthReport(
        band_lengths=lengths,
        max_band_length=longest,
        bound=bound,
        slack=bound - longest,
        ok=longest <= bound * (1.0 + 1e-12),
    )
