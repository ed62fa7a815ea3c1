"""Gap opening: tile the potential over k periods, shift the last entry,
and search the shift schedule for a perturbation that opens every gap."""

from __future__ import annotations

import numpy as np

from .errors import InvalidArgument, SearchFailure
from .floquet import DEFAULT_MERGE_TOL, band_spectrum
from .jacobi import PeriodicJacobi, PeriodicSequence

__all__ = ["perturb_last", "find_generic"]


def perturb_last(potential, k, t):
    """k-fold tiling of a p-periodic potential with entry kp shifted by t.

    The sup-norm distance to the tiled original is exactly |t|.
    """
    if int(k) != k or k < 2:
        raise InvalidArgument("k must be an integer >= 2")
    vals = np.tile(potential.values, int(k))
    vals[-1] += t
    return PeriodicSequence(vals)


def _candidate_shifts(eps_budget, max_candidates):
    # Magnitudes eps/2, eps/4, 3 eps/8, 7 eps/16, ...: distinct dyadic
    # fractions climbing back toward eps/2, so a finite bad set is never
    # hit twice and early candidates keep the new gaps as wide as possible.
    mags = [eps_budget / 2.0]
    i = 2
    while 2 * len(mags) < max_candidates:
        mags.append(eps_budget * (2.0 ** (i - 1) - 1.0) / 2.0**i)
        i += 1
    shifts = []
    for m in mags:
        shifts.append(m)
        shifts.append(-m)
    return shifts[:max_candidates]


def find_generic(
    operator,
    k,
    eps_budget,
    gap_tol,
    max_candidates=64,
    merge_tol=DEFAULT_MERGE_TOL,
):
    """Find a shift 0 < |t| < eps_budget whose perturbed potential has all
    k*p gaps open beyond gap_tol.

    Only finitely many shifts can fail, so the dyadic schedule terminates
    for any honest gap_tol; new gap widths scale like |t|, hence the
    gap_tol <= eps_budget / 100 entry requirement. On exhaustion the raised
    SearchFailure carries the best minimal gap seen, a direct hint that
    gap_tol was too large for the budget.
    """
    if not eps_budget > 0:
        raise InvalidArgument("eps_budget must be positive")
    if not 0 < gap_tol <= eps_budget / 100.0:
        raise InvalidArgument(
            f"gap_tol must lie in (0, eps_budget/100]; got {gap_tol!r} "
            f"for budget {eps_budget!r}"
        )
    seed_spectrum = band_spectrum(operator, merge_tol=merge_tol)
    seed_gaps = [hi - lo for lo, hi in seed_spectrum.all_gaps()]
    if not all(g > gap_tol for g in seed_gaps):
        raise InvalidArgument("starting operator is not generic at this gap_tol")
    best_min_gap = None
    for t in _candidate_shifts(eps_budget, max_candidates):
        candidate = perturb_last(operator.b, k, t)
        trial = PeriodicJacobi(operator.a, candidate)
        spectrum = band_spectrum(trial, merge_tol=merge_tol)
        min_gap = min(hi - lo for lo, hi in spectrum.all_gaps())
        if min_gap > gap_tol:
            return candidate, float(t)
        if best_min_gap is None or min_gap > best_min_gap:
            best_min_gap = min_gap
    raise SearchFailure(
        f"no generic perturbation within {max_candidates} candidates; "
        f"best minimal gap {best_min_gap!r} vs gap_tol {gap_tol!r}",
        smallest_gap=best_min_gap,
    )
