"""Band spectra, spectral gaps, break points and genericity metrics of
periodic Jacobi operators.

Band edges come from the two boundary restrictions via the rotation-sweep
eigensolver; every edge is cross-checked against |D| = 2. Break points are
located by bisection on the discriminant, which is monotone across each
band, so no large eigenproblems are ever solved for them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgument, NumericFailure
from .intervals import IntervalSet
from .jacobi import discriminant_many, floquet_restriction

__all__ = [
    "BandSpectrum",
    "BreakPoint",
    "BreakPointSet",
    "Metrics",
    "band_spectrum",
    "break_points",
    "genericity_metrics",
]

DEFAULT_MERGE_TOL = 1e-10  # relative closed-gap threshold, above solver noise
EDGE_DISC_TOL = 1e-8  # relative tolerance for |D(edge)| = 2
BISECT_TOL = 1e-13
DEFAULT_GAP_TOL = 1e-9  # relative floor below which a gap cannot be certified


@dataclass
class BandSpectrum:
    """Closed bands [(lo_1, hi_1), ..., (lo_p, hi_p)] in increasing order,
    with a closed/open flag for each of the p - 1 interlacing gaps."""

    bands: list
    closed_gap_flags: list

    @property
    def band_count(self):
        return len(self.bands)

    def hull(self):
        return self.bands[0][0], self.bands[-1][1]

    def scale(self):
        lo, hi = self.hull()
        return max(1.0, abs(lo), abs(hi))

    def band_lengths(self):
        return [hi - lo for lo, hi in self.bands]

    def min_band_length(self):
        return min(self.band_lengths())

    def all_gaps(self):
        """The p - 1 gap spans (possibly zero length when closed)."""
        return [
            (self.bands[i][1], self.bands[i + 1][0])
            for i in range(len(self.bands) - 1)
        ]

    def open_gaps(self):
        return [
            gap
            for gap, closed in zip(self.all_gaps(), self.closed_gap_flags)
            if not closed
        ]

    def min_open_gap_length(self):
        lengths = [hi - lo for lo, hi in self.open_gaps()]
        return min(lengths) if lengths else math.inf

    def interval_set(self):
        return IntervalSet(self.bands)

    def to_json_dict(self):
        gamma = self.min_open_gap_length()
        return {
            "p": self.band_count,
            "bands": [[lo, hi] for lo, hi in self.bands],
            "gaps": [[lo, hi] for lo, hi in self.open_gaps()],
            "closed_gaps": list(self.closed_gap_flags),
            "lambda": self.min_band_length(),
            "gamma": None if math.isinf(gamma) else gamma,
        }


def band_spectrum(operator, merge_tol=DEFAULT_MERGE_TOL):
    """Bands of the periodic spectrum from the two boundary restrictions.

    The sorted 2p eigenvalues pair up as consecutive (lo, hi) couples; a gap
    is flagged closed when its endpoints agree within merge_tol * scale.
    Raises NumericFailure if any computed edge fails the |D| = 2 check.
    """
    p = operator.period
    plus = floquet_restriction(operator, +1).eigenvalues()
    minus = floquet_restriction(operator, -1).eigenvalues()
    edges = np.sort(np.concatenate([plus, minus]))
    scale = max(1.0, float(np.abs(edges).max()))
    disc, _ = discriminant_many(operator, edges)
    residual = np.abs(np.abs(disc) - 2.0)
    if residual.max() > EDGE_DISC_TOL * scale:
        worst = int(residual.argmax())
        raise NumericFailure(
            f"band edge E={edges[worst]!r} has |D|={abs(disc[worst])!r}, "
            f"off the spectral condition |D|=2 by {residual[worst]:.3e} "
            f"(tolerance {EDGE_DISC_TOL * scale:.3e})"
        )
    bands = []
    for i in range(p):
        lo, hi = float(edges[2 * i]), float(edges[2 * i + 1])
        if not hi > lo:
            raise NumericFailure(
                f"degenerate band [{lo}, {hi}]; eigenvalue pairing failed"
            )
        bands.append((lo, hi))
    flags = [
        (bands[i + 1][0] - bands[i][1]) <= merge_tol * scale for i in range(p - 1)
    ]
    return BandSpectrum(bands=bands, closed_gap_flags=flags)


@dataclass(frozen=True)
class BreakPoint:
    energy: float
    j_index: int
    proper: bool


@dataclass
class BreakPointSet:
    """Per-band solutions of D(E) = 2 cos(pi j / k), j = 0..k, sorted by
    energy. Improper points (j = 0 or k) are the band edges themselves."""

    k: int
    points: list
    dedupe_tol: float

    def proper_points(self):
        return [pt for pt in self.points if pt.proper]

    def energies(self, proper_only=False):
        return [pt.energy for pt in self.points if pt.proper or not proper_only]

    def min_spacing(self, proper_only=False):
        """Minimal distance between consecutive distinct points; duplicates
        closer than dedupe_tol (closed-gap edge pairs) collapse first."""
        energies = sorted(self.energies(proper_only))
        distinct = []
        for e in energies:
            if not distinct or e - distinct[-1] > self.dedupe_tol:
                distinct.append(e)
        if len(distinct) < 2:
            return math.inf
        return min(b - a for a, b in zip(distinct, distinct[1:]))

    def to_json_dict(self):
        return {
            "k": self.k,
            "min_spacing": self.min_spacing(),
            "points": [
                {"E": pt.energy, "j": pt.j_index, "proper": pt.proper}
                for pt in self.points
            ],
        }


def break_points(operator, k, spectrum=None, merge_tol=DEFAULT_MERGE_TOL):
    """All k-break points of a periodic operator.

    Each band carries one point per target 2 cos(pi j / k); D is monotone
    between its edge values ±2, so per-band bisection brackets are valid.
    """
    if int(k) != k or k < 2:
        raise InvalidArgument("k must be an integer >= 2")
    k = int(k)
    if spectrum is None:
        spectrum = band_spectrum(operator, merge_tol=merge_tol)
    targets = [2.0 * math.cos(math.pi * j / k) for j in range(k + 1)]
    lo_edges = np.array([b[0] for b in spectrum.bands])
    hi_edges = np.array([b[1] for b in spectrum.bands])
    disc_lo, _ = discriminant_many(operator, lo_edges)

    points = []
    root_lo, root_hi, root_target, root_sign, root_meta = [], [], [], [], []
    for idx, (lo, hi) in enumerate(spectrum.bands):
        sign = 1.0 if disc_lo[idx] > 0 else -1.0
        j_at_lo, j_at_hi = (0, k) if sign > 0 else (k, 0)
        points.append(BreakPoint(energy=lo, j_index=j_at_lo, proper=False))
        points.append(BreakPoint(energy=hi, j_index=j_at_hi, proper=False))
        for j in range(1, k):
            root_lo.append(lo)
            root_hi.append(hi)
            root_target.append(targets[j])
            root_sign.append(sign)
            root_meta.append(j)
    if root_lo:
        roots = _bisect_discriminant(
            operator,
            np.array(root_lo),
            np.array(root_hi),
            np.array(root_target),
            np.array(root_sign),
        )
        for energy, j in zip(roots, root_meta):
            points.append(BreakPoint(energy=float(energy), j_index=j, proper=True))
    points.sort(key=lambda pt: pt.energy)
    dedupe = merge_tol * spectrum.scale()
    return BreakPointSet(k=k, points=points, dedupe_tol=dedupe)


def _bisect_discriminant(operator, lo, hi, target, sign_at_lo, max_iter=120):
    """Vectorized bisection for D(E) = target on brackets where the sign of
    D - target at the lower edge is sign_at_lo."""
    disc_hi, _ = discriminant_many(operator, hi)
    bad = np.sign(disc_hi - target) == sign_at_lo
    if bad.any():
        idx = int(np.argmax(bad))
        raise NumericFailure(
            f"no sign change for target {target[idx]!r} on band "
            f"[{lo[idx]!r}, {hi[idx]!r}]: discriminant not monotone there"
        )
    lo = lo.copy()
    hi = hi.copy()
    tol = BISECT_TOL * np.maximum(1.0, np.maximum(np.abs(lo), np.abs(hi)))
    for _ in range(max_iter):
        if np.all(hi - lo <= tol):
            break
        mid = 0.5 * (lo + hi)
        disc_mid, _ = discriminant_many(operator, mid)
        move_lo = np.sign(disc_mid - target) == sign_at_lo
        lo = np.where(move_lo, mid, lo)
        hi = np.where(move_lo, hi, mid)
    return 0.5 * (lo + hi)


@dataclass
class Metrics:
    """Shortest band, shortest open gap, minimal break-point spacing for the
    next refinement, and the all-gaps-open verdict."""

    shortest_band: float
    shortest_gap: float
    break_spacing: float
    is_generic: bool
    gap_tol: float

    def to_json_dict(self):
        gamma = self.shortest_gap
        return {
            "lambda": self.shortest_band,
            "gamma": None if math.isinf(gamma) else gamma,
            "t": None if math.isinf(self.break_spacing) else self.break_spacing,
            "is_generic": self.is_generic,
            "gap_tol": self.gap_tol,
        }


def genericity_metrics(
    operator,
    k_next,
    gap_tol=None,
    spectrum=None,
    merge_tol=DEFAULT_MERGE_TOL,
    spacing_proper_only=False,
):
    """Band/gap metrics plus the minimal k_next-break-point spacing.

    is_generic means every one of the p - 1 gaps is longer than gap_tol;
    gaps below the eigensolver's resolution cannot be certified open, hence
    the relative default floor.
    """
    if spectrum is None:
        spectrum = band_spectrum(operator, merge_tol=merge_tol)
    if gap_tol is None:
        gap_tol = DEFAULT_GAP_TOL * spectrum.scale()
    bp = break_points(operator, k_next, spectrum=spectrum, merge_tol=merge_tol)
    gap_lengths = [hi - lo for lo, hi in spectrum.all_gaps()]
    return Metrics(
        shortest_band=spectrum.min_band_length(),
        shortest_gap=spectrum.min_open_gap_length(),
        break_spacing=bp.min_spacing(proper_only=spacing_proper_only),
        is_generic=all(length > gap_tol for length in gap_lengths),
        gap_tol=float(gap_tol),
    )
