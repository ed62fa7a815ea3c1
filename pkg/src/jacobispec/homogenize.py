"""Iterated gap opening under a five-way shrink schedule.

Each refinement multiplies the period by k, keeps every old gap, and opens
tiny new gaps near the break points of the previous operator. The budgets
shrink fast enough that a uniform density floor survives every step, the
limit spectrum is nowhere dense, and (optionally) the perturbation decay
needed for purely absolutely continuous spectrum is met. All three claims
are checked on the recorded steps by exact interval arithmetic, and the
reports are the product.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgument
from .floquet import (
    DEFAULT_GAP_TOL,
    DEFAULT_MERGE_TOL,
    BandSpectrum,
    Metrics,
    band_spectrum,
    genericity_metrics,
)
from .gapopen import find_generic
from .intervals import log_grid, sample_points
from .jacobi import PeriodicJacobi, PeriodicSequence

__all__ = [
    "schedule_r",
    "EpsilonBound",
    "epsilon_bound",
    "ConstructionStep",
    "ConstructionRun",
    "construct",
    "StepHomogeneityReport",
    "verify_step_homogeneity",
    "CantorReport",
    "cantor_certificate",
    "DecayReport",
    "ac_decay_certificate",
]

SATURATION_REL = 1e-15  # budgets below this * scale cannot move the potential
SAFETY = 0.9  # strictness margin on the five-way bound
GAP_TOL_FRACTION = 1e-3  # per-step gap tolerance as a fraction of the budget


def schedule_r(tau, n):
    """Per-step density-loss shares (1 - tau) * 2^-(l+1), l = 1..n.

    Strictly decreasing with full infinite sum (1 - tau)/2, comfortably
    below the allowed total of 1 - tau.
    """
    if not 0 < tau < 1:
        raise InvalidArgument("tau must lie in (0, 1)")
    return [(1.0 - tau) * 2.0 ** -(l + 1) for l in range(1, n + 1)]


@dataclass
class EpsilonBound:
    """Step budget with its log-space value and per-term breakdown."""

    value: float
    log_value: float
    terms: dict
    underflow: bool | None


def epsilon_bound(
    metrics_prev,
    eps_prev,
    r_j,
    j,
    p_next2,
    ac_term=True,
    log_mode=False,
    ref_scale=1.0,
    safety=SAFETY,
):
    """Budget for step j: safety times the five-way minimum of
    gamma/5, eps_prev/5, t/2, r t / (2r + 5) and exp(-j * p_{j+1}).

    An infinite gamma (gapless seed) simply drops that term. In log_mode
    the decay term is tracked in log space and ``underflow`` reports
    whether the budget is too small to change a potential of magnitude
    ref_scale in double precision.
    """
    gamma = metrics_prev.shortest_gap
    spacing = metrics_prev.break_spacing
    if not gamma > 0:
        raise InvalidArgument("previous minimal gap must be positive")
    if not (spacing > 0 and math.isfinite(spacing)):
        raise InvalidArgument("previous break spacing must be positive and finite")
    if not eps_prev > 0:
        raise InvalidArgument("previous budget must be positive")
    if not r_j > 0:
        raise InvalidArgument("density share must be positive")
    if int(j) != j or j < 1 or int(p_next2) != p_next2 or p_next2 < 1:
        raise InvalidArgument("step index and lookahead period must be positive")
    terms = {
        "gap": gamma / 5.0,
        "prev_budget": eps_prev / 5.0,
        "spacing": spacing / 2.0,
        "spacing_density": r_j * spacing / (2.0 * r_j + 5.0),
    }
    log_terms = {
        name: math.log(v) for name, v in terms.items() if math.isfinite(v)
    }
    if ac_term:
        log_terms["decay"] = -float(j) * float(p_next2)
        terms["decay"] = math.exp(log_terms["decay"]) if log_terms["decay"] > -745 else 0.0
    log_value = math.log(safety) + min(log_terms.values())
    value = safety * min(v for v in terms.values() if math.isfinite(v))
    underflow = None
    if log_mode:
        underflow = log_value < math.log(SATURATION_REL * ref_scale)
    return EpsilonBound(value=value, log_value=log_value, terms=terms, underflow=underflow)


@dataclass
class ConstructionStep:
    """One recorded refinement (index 0 is the seed row)."""

    index: int
    multiplier: int  # period factor applied at this step; 1 for the seed
    density_share: float  # this step's share of the density loss; 0 for seed
    budget: float  # perturbation budget; the seed row carries the base one
    log_budget: float
    shift: float  # signed shift actually applied; 0 for the seed
    period: int
    period_next: int  # lookahead period used by the decay term
    potential: PeriodicSequence
    spectrum: BandSpectrum
    metrics: Metrics

    def to_json_dict(self):
        return {
            "index": self.index,
            "k": self.multiplier,
            "r": self.density_share,
            "eps": self.budget,
            "log_eps": self.log_budget,
            "shift": self.shift,
            "period": self.period,
            "period_next": self.period_next,
            "b": self.potential.values.tolist(),
            "spectrum": self.spectrum.to_json_dict(),
            "metrics": self.metrics.to_json_dict(),
        }

    @classmethod
    def from_json_dict(cls, data):
        spec_data = data["spectrum"]
        spectrum = BandSpectrum(
            bands=[tuple(bb) for bb in spec_data["bands"]],
            closed_gap_flags=list(spec_data["closed_gaps"]),
        )
        met = data["metrics"]
        metrics = Metrics(
            shortest_band=met["lambda"],
            shortest_gap=math.inf if met["gamma"] is None else met["gamma"],
            break_spacing=math.inf if met["t"] is None else met["t"],
            is_generic=met["is_generic"],
            gap_tol=met["gap_tol"],
        )
        return cls(
            index=data["index"],
            multiplier=data["k"],
            density_share=data["r"],
            budget=data["eps"],
            log_budget=data["log_eps"],
            shift=data["shift"],
            period=data["period"],
            period_next=data["period_next"],
            potential=PeriodicSequence(data["b"]),
            spectrum=spectrum,
            metrics=metrics,
        )


@dataclass
class ConstructionRun:
    """Full trace of an iterated refinement, seed row included."""

    tau: float
    eps: float
    eps0: float
    ks: list
    ac_term: bool
    status: str  # "completed" or "float-saturated"
    a: PeriodicSequence
    steps: list

    def refinement_count(self):
        return len(self.steps) - 1

    def coupling(self):
        return max(1.0, float(self.a.values.max()))

    def density_floor(self, n):
        """1 minus the density shares spent through step n."""
        return 1.0 - sum(s.density_share for s in self.steps[1 : n + 1])

    def recorded_tail(self, n):
        """Sum of recorded budgets strictly after step n."""
        return sum(s.budget for s in self.steps[n + 1 :])

    def tail_budget(self, n):
        """Recorded tail plus a bound on the unrecorded continuation: the
        next budget obeys safety * min(gamma_N, eps_N) / 5, so the whole
        continuation sums below safety * min(gamma_N, eps_N) / 4."""
        last = self.steps[-1]
        continuation = SAFETY * min(last.budget, last.metrics.shortest_gap) / 4.0
        return self.recorded_tail(n) + continuation

    def to_json_dict(self):
        return {
            "tau": self.tau,
            "eps": self.eps,
            "eps0": self.eps0,
            "ks": list(self.ks),
            "ac_term": self.ac_term,
            "status": self.status,
            "a": self.a.values.tolist(),
            "steps": [s.to_json_dict() for s in self.steps],
        }

    @classmethod
    def from_json_dict(cls, data):
        return cls(
            tau=data["tau"],
            eps=data["eps"],
            eps0=data["eps0"],
            ks=list(data["ks"]),
            ac_term=data["ac_term"],
            status=data["status"],
            a=PeriodicSequence(data["a"]),
            steps=[ConstructionStep.from_json_dict(s) for s in data["steps"]],
        )


def construct(
    b0,
    a,
    tau,
    eps,
    ks,
    n_steps,
    ac_term=True,
    merge_tol=DEFAULT_MERGE_TOL,
    max_candidates=64,
):
    """Run n_steps refinements from a generic seed potential.

    Stops early with status "float-saturated" once the budget cannot move
    the stored potential in double precision; that is not an error, since
    every finite-step certificate stands on its own. A failed candidate
    search propagates as SearchFailure.
    """
    if not 0 < tau < 1:
        raise InvalidArgument("tau must lie in (0, 1)")
    if not eps > 0:
        raise InvalidArgument("eps must be positive")
    if int(n_steps) != n_steps or n_steps < 0:
        raise InvalidArgument("n_steps must be a nonnegative integer")
    ks = [int(k) for k in ks]
    if any(k < 2 for k in ks):
        raise InvalidArgument("every period multiplier must be >= 2")
    if len(ks) < n_steps:
        raise InvalidArgument(f"need at least {n_steps} period multipliers")

    seed = PeriodicJacobi(a, b0)
    scale = seed.scale()
    k_next = ks[0] if ks else 2
    spectrum0 = band_spectrum(seed, merge_tol=merge_tol)
    metrics0 = genericity_metrics(
        seed, k_next, gap_tol=DEFAULT_GAP_TOL * scale, spectrum=spectrum0
    )
    if not metrics0.is_generic:
        raise InvalidArgument("seed potential is not generic: some gap is closed")
    eps0 = min(metrics0.shortest_gap, 4.0 * eps)
    shares = schedule_r(tau, n_steps)
    steps = [
        ConstructionStep(
            index=0,
            multiplier=1,
            density_share=0.0,
            budget=eps0,
            log_budget=math.log(eps0),
            shift=0.0,
            period=seed.period,
            period_next=seed.period * k_next,
            potential=seed.b,
            spectrum=spectrum0,
            metrics=metrics0,
        )
    ]
    status = "completed"
    operator = seed
    metrics = metrics0
    eps_prev = eps0
    for j in range(1, n_steps + 1):
        k_j = ks[j - 1]
        # lookahead multiplier for the decay term; repeat the last k when
        # the list is exhausted
        k_ahead = ks[j] if j < len(ks) else ks[-1]
        period_j = operator.period * k_j
        period_next = period_j * k_ahead
        bound = epsilon_bound(
            metrics,
            eps_prev,
            shares[j - 1],
            j,
            period_next,
            ac_term=ac_term,
            log_mode=True,
            ref_scale=scale,
        )
        if bound.underflow:
            status = "float-saturated"
            break
        budget = bound.value
        gap_tol = budget * GAP_TOL_FRACTION
        b_new, shift = find_generic(
            operator,
            k_j,
            budget,
            gap_tol,
            max_candidates=max_candidates,
            merge_tol=merge_tol,
        )
        operator = PeriodicJacobi(seed.a, b_new)
        spectrum = band_spectrum(operator, merge_tol=merge_tol)
        metrics = genericity_metrics(
            operator, k_ahead, gap_tol=gap_tol, spectrum=spectrum
        )
        steps.append(
            ConstructionStep(
                index=j,
                multiplier=k_j,
                density_share=shares[j - 1],
                budget=budget,
                log_budget=bound.log_value,
                shift=shift,
                period=period_j,
                period_next=period_next,
                potential=operator.b,
                spectrum=spectrum,
                metrics=metrics,
            )
        )
        eps_prev = budget
    return ConstructionRun(
        tau=float(tau),
        eps=float(eps),
        eps0=float(eps0),
        ks=ks,
        ac_term=bool(ac_term),
        status=status,
        a=seed.a,
        steps=steps,
    )


@dataclass
class StepHomogeneityReport:
    """Worst slack of the per-step density floor over a (point, radius) sweep."""

    step: int
    density_floor: float
    min_ratio: float
    min_slack: float
    argmin_x: float
    argmin_delta: float
    delta_max: float
    n_delta: int
    n_x: int
    passed: bool

    def to_json_dict(self):
        return {
            "step": self.step,
            "density_floor": self.density_floor,
            "min_ratio": self.min_ratio,
            "min_slack": self.min_slack,
            "argmin_x": self.argmin_x,
            "argmin_delta": self.argmin_delta,
            "delta_max": self.delta_max,
            "pass": self.passed,
        }


def verify_step_homogeneity(
    run, n, n_delta=64, n_interior=64, delta_min=None, slack_tol=1e-12
):
    """Check that ball density in the step-n spectrum stays above the
    density floor 1 - sum of shares, for radii up to the seed's shortest
    band and centers on the endpoint-plus-interior grid.

    Endpoints are always on the grid: the worst case sits at band edges.
    slack_tol only absorbs float rounding in endpoint differences.
    """
    if not 0 <= n < len(run.steps):
        raise InvalidArgument(f"step {n} not recorded")
    sigma = run.steps[n].spectrum.interval_set()
    delta_max = run.steps[0].metrics.shortest_band
    floor = run.density_floor(n)
    if delta_min is None:
        delta_min = delta_max * 1e-8
    deltas = log_grid(delta_min, delta_max, max(int(n_delta), 2))
    xs = sample_points(sigma, n_interior)
    min_ratio = math.inf
    arg_x = arg_d = float("nan")
    for x in xs:
        for d in deltas:
            ratio = sigma.ball_intersection_measure(x, d) / d
            if ratio < min_ratio:
                min_ratio, arg_x, arg_d = ratio, x, d
    min_slack = min_ratio - floor
    return StepHomogeneityReport(
        step=n,
        density_floor=floor,
        min_ratio=min_ratio,
        min_slack=min_slack,
        argmin_x=arg_x,
        argmin_delta=arg_d,
        delta_max=delta_max,
        n_delta=len(deltas),
        n_x=len(xs),
        passed=min_slack >= -slack_tol,
    )


@dataclass
class CantorReport:
    """Sliding-window witness that the limit spectrum is nowhere dense."""

    status: str  # "pass", "fail" or "insufficient-depth"
    window_len: float
    step_used: int | None
    period: int | None
    threshold: float | None  # 4 pi A^2 / p_n for the step used
    gamma: float | None
    tail_budget: float | None
    tail_ok: bool | None  # tail < gamma / 4
    n_windows: int
    min_clearance: float | None
    worst_window: tuple | None
    worst_witness: float | None

    @property
    def passed(self):
        return self.status == "pass"

    def to_json_dict(self):
        return {
            "status": self.status,
            "window_len": self.window_len,
            "step_used": self.step_used,
            "period": self.period,
            "threshold": self.threshold,
            "gamma": self.gamma,
            "tail_budget": self.tail_budget,
            "tail_ok": self.tail_ok,
            "n_windows": self.n_windows,
            "min_clearance": self.min_clearance,
            "worst_window": list(self.worst_window) if self.worst_window else None,
            "worst_witness": self.worst_witness,
            "pass": self.passed,
        }


def _window_gap_witness(sigma, w_lo, w_hi, min_len, tail):
    """Best sub-gap of the window: a complement component of length at
    least min_len whose center clears the tail radius. Returns
    (component, center, clearance) or None."""
    pieces = []
    cursor = w_lo
    for lo, hi in sigma.intervals:
        if lo > cursor:
            pieces.append((cursor, min(lo, w_hi)))
        cursor = max(cursor, hi)
        if cursor >= w_hi:
            break
    if cursor < w_hi:
        pieces.append((cursor, w_hi))
    best = None
    for plo, phi in pieces:
        if phi - plo < min_len:
            continue
        center = 0.5 * (plo + phi)
        clearance = sigma.distance_to(center)
        if clearance > tail and (best is None or clearance > best[2]):
            best = ((plo, phi), center, clearance)
    return best


def cantor_certificate(run, window_len, n_windows=256):
    """Certify nowhere-density: every window of the given length meets a
    gap of some recorded spectrum that is long enough to survive the whole
    remaining perturbation tail.

    Needs a recorded step whose bands are shorter than half the window
    (4 pi A^2 / p_n < window_len); reports insufficient-depth otherwise.
    """
    if not window_len > 0:
        raise InvalidArgument("window_len must be positive")
    coupling = run.coupling()
    eligible = [
        s
        for s in run.steps
        if 4.0 * math.pi * coupling**2 / s.period < window_len
        and math.isfinite(s.metrics.shortest_gap)
    ]
    if not eligible:
        return CantorReport(
            status="insufficient-depth",
            window_len=float(window_len),
            step_used=None,
            period=None,
            threshold=None,
            gamma=None,
            tail_budget=None,
            tail_ok=None,
            n_windows=0,
            min_clearance=None,
            worst_window=None,
            worst_witness=None,
        )
    step = eligible[-1]
    n = step.index
    sigma = step.spectrum.interval_set()
    gamma = step.metrics.shortest_gap
    tail = run.tail_budget(n)
    tail_ok = tail < gamma / 4.0
    hull_lo, hull_hi = sigma.bounds()
    positions = np.linspace(hull_lo - window_len, hull_hi, int(n_windows))
    all_ok = True
    min_clearance = math.inf
    worst_window = worst_witness = None
    min_len = gamma * (1.0 - 1e-9)
    for x in positions:
        found = _window_gap_witness(sigma, float(x), float(x) + window_len, min_len, tail)
        if found is None:
            all_ok = False
            worst_window = (float(x), float(x) + window_len)
            worst_witness = None
            min_clearance = 0.0
            break
        _, center, clearance = found
        if clearance < min_clearance:
            min_clearance = clearance
            worst_window = (float(x), float(x) + window_len)
            worst_witness = center
    return CantorReport(
        status="pass" if all_ok and tail_ok else "fail",
        window_len=float(window_len),
        step_used=n,
        period=step.period,
        threshold=4.0 * math.pi * coupling**2 / step.period,
        gamma=gamma,
        tail_budget=tail,
        tail_ok=tail_ok,
        n_windows=int(n_windows),
        min_clearance=min_clearance,
        worst_window=worst_window,
        worst_witness=worst_witness,
    )


@dataclass
class DecayReport:
    """Log-space check of the decay hypothesis for absolutely continuous
    spectrum: log eps_j < -j p_{j+1}, plus a decreasing decay functional."""

    enforced: bool
    checks: list
    functional: list
    decreasing: bool
    passed: bool
    note: str

    def to_json_dict(self):
        return {
            "enforced": self.enforced,
            "checks": self.checks,
            "functional": self.functional,
            "decreasing": self.decreasing,
            "pass": self.passed,
            "note": self.note,
        }


def ac_decay_certificate(run, c_max=1.0):
    """Verify log eps_j < -j p_{j+1} at every recorded step and that
    c_max * p_{n+1} + log(recorded tail after n) decreases over recorded
    steps. Vacuous pass on a run with no refinements.

    This certifies the norm-decay hypothesis of the absolutely-continuous
    conclusion, never the conclusion itself.
    """
    checks = []
    for step in run.steps[1:]:
        required = -float(step.index) * float(step.period_next)
        checks.append(
            {
                "step": step.index,
                "log_eps": step.log_budget,
                "required": required,
                "ok": step.log_budget < required,
            }
        )
    functional = []
    last = len(run.steps) - 1
    for n in range(last):
        tail = run.recorded_tail(n)
        functional.append(
            {
                "n": n,
                "value": c_max * run.steps[n + 1].period + math.log(tail),
            }
        )
    decreasing = all(
        functional[i + 1]["value"] < functional[i]["value"]
        for i in range(len(functional) - 1)
    )
    per_step_ok = all(c["ok"] for c in checks)
    passed = per_step_ok and decreasing
    note = "" if run.ac_term else "decay term was disabled for this run"
    return DecayReport(
        enforced=run.ac_term,
        checks=checks,
        functional=functional,
        decreasing=decreasing,
        passed=passed,
        note=note,
    )
