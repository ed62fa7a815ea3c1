"""Exact arithmetic on finite unions of closed intervals.

Measures, ball clippings and Hausdorff distances are computed directly from
interval endpoints with no internal tolerance; any fuzz belongs to callers.
This is what makes the homogeneity and Cantor certificates auditable.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass

from .errors import InvalidArgument

__all__ = [
    "IntervalSet",
    "HomogeneityReport",
    "hausdorff_distance",
    "homogeneity_profile",
    "log_grid",
    "sample_points",
]


class IntervalSet:
    """Sorted closed intervals with pairwise disjoint interiors.

    Touching intervals are legal and kept distinct ([−2,0] and [0,2] stay two
    components), as are degenerate [x, x] points.
    """

    __slots__ = ("intervals",)

    def __init__(self, intervals=()):
        ivs = []
        for lo, hi in intervals:
            lo = float(lo)
            hi = float(hi)
            if not (math.isfinite(lo) and math.isfinite(hi)):
                raise InvalidArgument("interval endpoints must be finite")
            if lo > hi:
                raise InvalidArgument(f"interval [{lo}, {hi}] has lo > hi")
            ivs.append((lo, hi))
        ivs.sort()
        kept = []
        for lo, hi in ivs:
            if kept:
                plo, phi = kept[-1]
                if lo == hi and plo <= lo <= phi:
                    continue  # point already covered
                if plo == phi and lo == plo:
                    kept[-1] = (lo, hi)  # swallow a covered point
                    continue
                if lo < phi:
                    raise InvalidArgument(
                        f"interval interiors overlap: [{plo}, {phi}] and [{lo}, {hi}]"
                    )
            kept.append((lo, hi))
        self.intervals = kept

    # -- basic protocol ----------------------------------------------------

    def __len__(self):
        return len(self.intervals)

    def __iter__(self):
        return iter(self.intervals)

    def __eq__(self, other):
        return isinstance(other, IntervalSet) and self.intervals == other.intervals

    def __repr__(self):
        return f"IntervalSet({self.intervals!r})"

    def is_empty(self):
        return not self.intervals

    def bounds(self):
        if not self.intervals:
            raise InvalidArgument("empty set has no bounds")
        return self.intervals[0][0], self.intervals[-1][1]

    def contains(self, x):
        for lo, hi in self.intervals:
            if lo <= x <= hi:
                return True
            if lo > x:
                break
        return False

    # -- measure and set operations ----------------------------------------

    def measure(self):
        """Total Lebesgue measure; shared endpoints never double-count."""
        return float(sum(hi - lo for lo, hi in self.intervals))

    def intersect_ball(self, center, radius):
        """Clip to the open ball (center − radius, center + radius)."""
        if not radius > 0:
            raise InvalidArgument("radius must be positive")
        center = float(center)
        radius = float(radius)
        lo_b, hi_b = center - radius, center + radius
        out = []
        for lo, hi in self.intervals:
            if hi < lo_b or lo > hi_b:
                continue
            nlo, nhi = max(lo, lo_b), min(hi, hi_b)
            if nlo < nhi:
                out.append((nlo, nhi))
            elif lo == hi and lo_b < lo < hi_b:
                out.append((lo, hi))  # isolated point strictly inside the ball
        return IntervalSet(out)

    def ball_intersection_measure(self, center, radius):
        """Measure of the clipping to (center - radius, center + radius).

        Agrees with intersect_ball(...).measure() but works in coordinates
        relative to the center, so the result keeps full relative precision
        even when the radius is many orders below |center|. Certificates
        probing tiny radii rely on this.
        """
        if not radius > 0:
            raise InvalidArgument("radius must be positive")
        center = float(center)
        radius = float(radius)
        total = 0.0
        for lo, hi in self.intervals:
            rel_lo = lo - center
            rel_hi = hi - center
            if rel_hi <= -radius or rel_lo >= radius:
                continue
            total += min(rel_hi, radius) - max(rel_lo, -radius)
        return total

    def intersection(self, other):
        out = []
        i = j = 0
        a, b = self.intervals, other.intervals
        while i < len(a) and j < len(b):
            lo = max(a[i][0], b[j][0])
            hi = min(a[i][1], b[j][1])
            if lo <= hi:
                out.append((lo, hi))
            if a[i][1] < b[j][1]:
                i += 1
            else:
                j += 1
        return IntervalSet(out)

    def union(self, other):
        """Union as a point set; overlapping or touching parts coalesce."""
        merged = []
        for lo, hi in sorted(self.intervals + other.intervals):
            if merged and lo <= merged[-1][1]:
                merged[-1][1] = max(merged[-1][1], hi)
            else:
                merged.append([lo, hi])
        return IntervalSet(tuple(map(tuple, merged)))

    def distance_to(self, x):
        """Distance from the point x to the set."""
        if not self.intervals:
            raise InvalidArgument("empty set")
        x = float(x)
        los = [iv[0] for iv in self.intervals]
        idx = bisect_right(los, x)
        best = math.inf
        if idx > 0:
            lo, hi = self.intervals[idx - 1]
            best = 0.0 if x <= hi else x - hi
        if idx < len(self.intervals) and best > 0.0:
            best = min(best, self.intervals[idx][0] - x)
        return best

    def gap_spans(self):
        """Open intervals between consecutive components (may be empty)."""
        return [
            (a[1], b[0])
            for a, b in zip(self.intervals, self.intervals[1:])
            if a[1] < b[0]
        ]

    # -- serialization -------------------------------------------------------

    def to_json(self):
        return [[lo, hi] for lo, hi in self.intervals]

    @classmethod
    def from_json(cls, data):
        return cls(data)


def hausdorff_distance(first, second):
    """Hausdorff distance between two nonempty interval sets.

    Exact: the directed distance is maximized either at an endpoint of the
    source set or at the midpoint of a gap of the target set, so scanning
    those finitely many candidates suffices.
    """
    if first.is_empty() or second.is_empty():
        raise InvalidArgument("hausdorff_distance requires nonempty sets")
    return max(_directed_hausdorff(first, second), _directed_hausdorff(second, first))


def _directed_hausdorff(src, dst):
    best = 0.0
    for lo, hi in src.intervals:
        best = max(best, dst.distance_to(lo), dst.distance_to(hi))
    for g_lo, g_hi in dst.gap_spans():
        mid = 0.5 * (g_lo + g_hi)
        if src.contains(mid):
            best = max(best, dst.distance_to(mid))
    # points of src beyond dst's hull are farthest at src's outer endpoints,
    # already scanned above
    return best


@dataclass
class HomogeneityReport:
    """Worst-case relative density of a set over a (point, radius) sweep."""

    tau: float
    min_ratio: float
    argmin_x: float
    argmin_delta: float
    passed: bool
    n_delta: int
    n_x: int

    def to_json_dict(self):
        return {
            "tau": self.tau,
            "min_ratio": self.min_ratio,
            "argmin_x": self.argmin_x,
            "argmin_delta": self.argmin_delta,
            "pass": self.passed,
        }


def log_grid(lo, hi, n):
    """Logarithmically spaced grid from lo to hi inclusive."""
    if n < 2:
        return [hi]
    ratio = (hi / lo) ** (1.0 / (n - 1))
    grid = [lo * ratio**i for i in range(n - 1)]
    grid.append(hi)
    return grid


def sample_points(sets, n_interior):
    """All endpoints plus interior points spread proportionally to length."""
    xs = []
    total = sets.measure()
    for lo, hi in sets.intervals:
        xs.append(lo)
        if hi > lo:
            xs.append(hi)
            if n_interior > 0 and total > 0:
                ni = max(1, round(n_interior * (hi - lo) / total))
                step = (hi - lo) / (ni + 1)
                xs.extend(lo + step * (t + 1) for t in range(ni))
    return xs


def homogeneity_profile(sets, tau, delta_max, n_delta=64, n_points=64, delta_min=None):
    """Sweep min_{x, delta} |ball(x, delta) ∩ S| / delta over a log-spaced
    radius grid and an endpoint-plus-interior point grid.

    The worst case sits at or near component endpoints, so every endpoint is
    a mandatory grid member. Passes iff the minimum ratio is at least tau.
    """
    if not (0 < tau < 1):
        raise InvalidArgument("tau must lie in (0, 1)")
    if not delta_max > 0:
        raise InvalidArgument("delta_max must be positive")
    if sets.is_empty():
        raise InvalidArgument("cannot profile the empty set")
    if delta_min is None:
        delta_min = delta_max * 1e-8
    deltas = log_grid(delta_min, delta_max, max(int(n_delta), 2))
    xs = sample_points(sets, n_points)
    min_ratio = math.inf
    arg_x = arg_d = float("nan")
    for x in xs:
        for d in deltas:
            ratio = sets.ball_intersection_measure(x, d) / d
            if ratio < min_ratio:
                min_ratio, arg_x, arg_d = ratio, x, d
    return HomogeneityReport(
        tau=float(tau),
        min_ratio=min_ratio,
        argmin_x=arg_x,
        argmin_delta=arg_d,
        passed=min_ratio >= tau,
        n_delta=len(deltas),
        n_x=len(xs),
    )
