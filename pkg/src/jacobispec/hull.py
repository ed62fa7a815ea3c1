"""Finite-quotient view of monothetic Cantor groups.

A divisibility chain n_1 | n_2 | ... stands in for the group through its
cyclic quotients; sampling functions are tables over cosets, the generator
is the coset of 1, and construction runs lift level by level. No infinite
group object is ever materialized: periodic sampling functions always live
on a finite quotient.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidArgument

__all__ = ["HullSpec", "SamplingFunction", "sample_sequence", "ks_from_hull", "lift_run"]


@dataclass
class HullSpec:
    """Chain of quotient orders; each entry divides the next."""

    indices: list
    label: str = ""

    def __post_init__(self):
        idx = [int(n) for n in self.indices]
        if not idx:
            raise InvalidArgument("hull chain must be nonempty")
        if idx[0] < 1:
            raise InvalidArgument("quotient orders must be >= 1")
        for a, b in zip(idx, idx[1:]):
            if b % a:
                raise InvalidArgument(f"chain not nested: {a} does not divide {b}")
        self.indices = idx

    @classmethod
    def padic(cls, base, depth):
        if base < 2 or depth < 1:
            raise InvalidArgument("need base >= 2 and depth >= 1")
        return cls(
            indices=[base**j for j in range(1, depth + 1)],
            label=f"{base}-adic",
        )

    @property
    def depth(self):
        return len(self.indices)

    def index_at(self, level):
        """Quotient order at a level; level 0 is the trivial quotient."""
        if level < 0 or level > self.depth:
            raise InvalidArgument(f"level {level} outside chain of depth {self.depth}")
        return 1 if level == 0 else self.indices[level - 1]


@dataclass
class SamplingFunction:
    """Function on the level-j quotient: one real value per coset."""

    level: int
    table: np.ndarray

    def __post_init__(self):
        self.table = np.asarray(self.table, dtype=float)

    @property
    def quotient_order(self):
        return self.table.size

    def to_json_dict(self):
        return {
            "level": self.level,
            "n": self.quotient_order,
            "table": self.table.tolist(),
        }


def sample_sequence(f, omega, length):
    """Orbit samples s(n) = table[(n + omega) mod n_j], n = 1..length."""
    n_j = f.quotient_order
    if not 0 <= omega < n_j:
        raise InvalidArgument(f"omega must lie in 0..{n_j - 1}")
    n = np.arange(1, int(length) + 1)
    return f.table[(n + int(omega)) % n_j]


def ks_from_hull(hull, q0, n_steps):
    """Consecutive quotient ratios starting above level q0; each must be at
    least 2 to refine the period."""
    if q0 < 0 or q0 + n_steps > hull.depth:
        raise InvalidArgument(
            f"levels q0={q0}..{q0 + n_steps} exceed chain depth {hull.depth}"
        )
    ks = []
    for j in range(1, n_steps + 1):
        ratio = hull.index_at(q0 + j) // hull.index_at(q0 + j - 1)
        if ratio < 2:
            raise InvalidArgument(
                f"quotient ratio 1 between levels {q0 + j - 1} and {q0 + j}"
            )
        ks.append(ratio)
    return ks


def lift_run(run, hull, q0):
    """Represent every recorded potential as a sampling function on the
    matching quotient: step j lives at level q0 + j.

    The run must have been built with multipliers matching the chain
    (periods p_j equal to the quotient orders), and the seed period must
    divide the level-q0 order.
    """
    functions = []
    for step in run.steps:
        level = q0 + step.index
        if level > hull.depth:
            raise InvalidArgument(
                f"step {step.index} needs level {level}, chain depth is {hull.depth}"
            )
        order = hull.index_at(level)
        if step.index == 0:
            if order % step.period:
                raise InvalidArgument(
                    f"seed period {step.period} does not divide level-{level} "
                    f"order {order}"
                )
        elif step.period != order:
            raise InvalidArgument(
                f"step {step.index} has period {step.period}, but level {level} "
                f"has order {order}; build the run with multipliers from "
                f"ks_from_hull"
            )
        table = np.array([step.potential.value_at(m) for m in range(order)])
        functions.append(SamplingFunction(level=level, table=table))
    return functions
