"""Window-scale bijections between functionals and time-invariant filters.

A functional H on semi-infinite sequences induces the causal time-invariant
filter whose output at time t is H applied to the input advanced so that time
t becomes time 0; conversely a filter collapses to a functional by reading its
time-0 output.  Both directions are implemented on explicit windows together
with a randomized time-invariance check.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .seqspace import FiniteSeq, shift

__all__ = [
    "WindowedFilter",
    "functional_to_filter",
    "filter_to_functional",
    "time_invariance_check",
]


@dataclass(frozen=True, eq=False)
class WindowedFilter:
    """Filter restricted to output times t = horizon..0.

    ``maps[i]`` evaluates the output at time ``horizon + i`` for a given
    input sequence.  Evaluators must be pure; they may be called concurrently.
    """

    horizon: int
    maps: tuple[Callable[[FiniteSeq], np.ndarray], ...]

    def __post_init__(self):
        if self.horizon > 0:
            raise ValueError("horizon must be non-positive")
        if len(self.maps) != -self.horizon + 1:
            raise ValueError("need one evaluator per window time index")

    def at(self, z: FiniteSeq, t: int) -> np.ndarray:
        """Output entry at time t (must lie inside the window)."""
        if not self.horizon <= t <= 0:
            raise ValueError(f"t={t} outside window [{self.horizon}, 0]")
        return np.atleast_1d(np.asarray(self.maps[t - self.horizon](z), dtype=float))

    def apply(self, z: FiniteSeq) -> np.ndarray:
        """All window outputs, rows ordered t = horizon..0."""
        return np.stack([self.at(z, t) for t in range(self.horizon, 1)])


def functional_to_filter(functional, horizon: int) -> WindowedFilter:
    """Filter with output (U z)_t = functional(z advanced by -t steps).

    Advancing drops entries newer than t, so the result is causal by
    construction and time-invariant wherever both sides of the defining
    identity stay inside the window.
    """
    if horizon > 0:
        raise ValueError("horizon must be non-positive")

    def make(t: int):
        return lambda z: functional(shift(z, -t))

    return WindowedFilter(horizon, tuple(make(t) for t in range(horizon, 1)))


def filter_to_functional(filt: WindowedFilter):
    """Functional reading the filter's time-0 output."""

    def functional(z: FiniteSeq) -> np.ndarray:
        return filt.at(z, 0)

    return functional


def time_invariance_check(
    filt: WindowedFilter,
    trials: int,
    dim: int = 1,
    seed: int = 0,
    depth: int | None = None,
):
    """Randomized check of (U(z shifted by -s))_t == (U z)_{t+s} on the window.

    Runs ``trials`` random inputs against every index pair (t, s) with both
    sides inside the window.  Returns (True, None) when all checks pass, else
    (False, (t, s, z)) with the first violating triple.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = np.random.default_rng(seed)
    depth = -filt.horizon + 4 if depth is None else depth
    for _ in range(trials):
        z = FiniteSeq(-depth, rng.standard_normal((depth + 1, dim)))
        for s in range(filt.horizon, 1):
            shifted = shift(z, -s)
            for t in range(filt.horizon, 1):
                if not filt.horizon <= t + s <= 0:
                    continue
                lhs = filt.at(shifted, t)
                rhs = filt.at(z, t + s)
                scale = max(1.0, float(np.linalg.norm(rhs)))
                if float(np.linalg.norm(lhs - rhs)) > 1e-12 * scale:
                    return False, (t, s, z)
    return True, None
