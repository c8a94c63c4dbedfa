"""Semi-infinite sequence arithmetic: norms, weighted norms, shifts, truncations.

Sequences are indexed by non-positive integers t <= 0 (t = 0 is the present,
negative t lies in the past) and are finitely supported: entries below the
stored support window are exactly zero.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "FiniteSeq",
    "WeightingSeq",
    "ExponentialWeighting",
    "PolynomialWeighting",
    "TabulatedWeighting",
    "include",
    "shift",
    "truncate",
    "lp_norm",
    "weighted_lp_norm",
    "finite_seq_from_csv",
]


@dataclass(frozen=True, eq=False)
class FiniteSeq:
    """Finitely supported sequence of vectors in R^d over time indices t <= 0.

    ``entries[i]`` is the vector at time ``start + i``; the rows run from the
    oldest index ``start`` up to 0.  Entries outside [start, 0] are implicitly
    the zero vector.  Instances are immutable; two sequences compare equal when
    they agree entrywise after zero extension, so leading zero blocks are not
    significant.
    """

    start: int
    entries: np.ndarray

    def __post_init__(self):
        ent = np.asarray(self.entries, dtype=float)
        if ent.ndim == 1:
            ent = ent[:, None]
        if ent.ndim != 2:
            raise ValueError("entries must be a (steps, dim) array")
        if not isinstance(self.start, (int, np.integer)) or self.start > 0:
            raise ValueError("start must be a non-positive integer")
        if ent.shape[0] != -self.start + 1:
            raise ValueError(
                f"expected {-self.start + 1} entries for start={self.start}, "
                f"got {ent.shape[0]}"
            )
        if ent.shape[1] < 1:
            raise ValueError("dim must be >= 1")
        if not np.all(np.isfinite(ent)):
            raise ValueError("entries must be finite")
        ent = ent.copy()
        ent.setflags(write=False)
        object.__setattr__(self, "start", int(self.start))
        object.__setattr__(self, "entries", ent)

    @classmethod
    def zero(cls, dim: int) -> "FiniteSeq":
        return cls(0, np.zeros((1, dim)))

    @property
    def dim(self) -> int:
        return self.entries.shape[1]

    @property
    def is_zero(self) -> bool:
        return not np.any(self.entries)

    def entry(self, t: int) -> np.ndarray:
        """Vector at time t, the zero vector outside the stored window."""
        if t > 0:
            raise ValueError("time indices are non-positive")
        if t < self.start:
            return np.zeros(self.dim)
        return self.entries[t - self.start]

    def window(self, from_t: int) -> np.ndarray:
        """Entries for t = from_t..0 as a dense array, zero-extended.

        Entries below ``from_t`` are discarded.
        """
        if from_t > 0:
            raise ValueError("from_t must be non-positive")
        out = np.zeros((-from_t + 1, self.dim))
        lo = max(from_t, self.start)
        out[lo - from_t :] = self.entries[lo - self.start :]
        return out

    def trimmed(self) -> "FiniteSeq":
        """Equivalent sequence with leading all-zero rows removed."""
        nz = np.flatnonzero(np.any(self.entries, axis=1))
        if nz.size == 0:
            return FiniteSeq.zero(self.dim)
        first = int(nz[0])
        return FiniteSeq(self.start + first, self.entries[first:])

    # -- value semantics -------------------------------------------------

    def __eq__(self, other) -> bool:
        if not isinstance(other, FiniteSeq):
            return NotImplemented
        if self.dim != other.dim:
            return False
        lo = min(self.start, other.start)
        return np.array_equal(self.window(lo), other.window(lo))

    __hash__ = None  # mutable-equality semantics: not hashable

    def __add__(self, other: "FiniteSeq") -> "FiniteSeq":
        if not isinstance(other, FiniteSeq):
            return NotImplemented
        if self.dim != other.dim:
            raise ValueError("dimension mismatch")
        lo = min(self.start, other.start)
        return FiniteSeq(lo, self.window(lo) + other.window(lo))

    def __sub__(self, other: "FiniteSeq") -> "FiniteSeq":
        return self + (-1.0) * other

    def __mul__(self, scalar: float) -> "FiniteSeq":
        return FiniteSeq(self.start, self.entries * float(scalar))

    __rmul__ = __mul__

    def __neg__(self) -> "FiniteSeq":
        return self * -1.0

    def __repr__(self) -> str:
        return f"FiniteSeq(start={self.start}, dim={self.dim})"

    # -- serialization ---------------------------------------------------

    def to_json_dict(self) -> dict:
        return {
            "dim": self.dim,
            "start": self.start,
            "entries": self.entries.tolist(),
        }

    @classmethod
    def from_json_dict(cls, doc: dict) -> "FiniteSeq":
        seq = cls(int(doc["start"]), np.asarray(doc["entries"], dtype=float))
        if "dim" in doc and int(doc["dim"]) != seq.dim:
            raise ValueError("declared dim does not match entries")
        return seq

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict())

    @classmethod
    def from_json(cls, text: str) -> "FiniteSeq":
        return cls.from_json_dict(json.loads(text))


def include(v, t: int) -> FiniteSeq:
    """Sequence with the single (possibly nonzero) entry ``v`` at time t."""
    if t > 0:
        raise ValueError("t must be non-positive")
    v = np.atleast_1d(np.asarray(v, dtype=float))
    entries = np.zeros((-t + 1, v.shape[0]))
    entries[0] = v
    return FiniteSeq(t, entries)


def shift(z: FiniteSeq, s: int) -> FiniteSeq:
    """Shift by s >= 0 steps: result_t = z_{t-s}.

    Entries pushed past t = 0 are discarded.  Worked example:
    shift(include(v, -3), 1) == include(v, -2) and
    shift(include(v, 0), 1) is the zero sequence.
    """
    if s < 0 or not isinstance(s, (int, np.integer)):
        raise ValueError("shift amount must be a non-negative integer")
    s = int(s)
    if s == 0:
        return z
    length = z.entries.shape[0]
    if s >= length:
        return FiniteSeq.zero(z.dim)
    return FiniteSeq(z.start + s, z.entries[: length - s])


def truncate(z: FiniteSeq, T: int) -> FiniteSeq:
    """Keep entries with T <= t <= 0, zeroing everything older."""
    if T > 0:
        raise ValueError("T must be non-positive")
    T = int(T)
    if T <= z.start:
        return z
    return FiniteSeq(T, z.entries[T - z.start :])


def lp_norm(z: FiniteSeq, p: float) -> float:
    """The l^p norm (sum over time of Euclidean entry norms): p in [1, inf]."""
    if p < 1:
        raise ValueError("p must be >= 1")
    row_norms = np.linalg.norm(z.entries, axis=1)
    if math.isinf(p):
        return float(row_norms.max(initial=0.0))
    return float(np.sum(row_norms**p) ** (1.0 / p))


def weighted_lp_norm(z: FiniteSeq, w: "WeightingSeq", p: float) -> float:
    """Weighted l^p norm (sum_t w_t ||z_t||^p)^(1/p); sup_t w_t ||z_t|| for p = inf."""
    if p < 1:
        raise ValueError("p must be >= 1")
    row_norms = np.linalg.norm(z.entries, axis=1)
    weights = w.weights(z.start)
    if math.isinf(p):
        return float((weights * row_norms).max(initial=0.0))
    return float(np.sum(weights * row_norms**p) ** (1.0 / p))


# -- weighting sequences --------------------------------------------------


class WeightingSeq:
    """Monotone map from non-positive time indices to (0, 1], vanishing at -inf."""

    def weight(self, t: int) -> float:
        raise NotImplementedError

    def weights(self, start: int) -> np.ndarray:
        """Weights for t = start..0 as an array."""
        return np.array([self.weight(t) for t in range(start, 1)])


@dataclass(frozen=True)
class ExponentialWeighting(WeightingSeq):
    """w_t = rate^|t| with rate in (0, 1)."""

    rate: float

    def __post_init__(self):
        if not 0.0 < self.rate < 1.0:
            raise ValueError("rate must lie in (0, 1)")

    def weight(self, t: int) -> float:
        if t > 0:
            raise ValueError("time indices are non-positive")
        return self.rate ** (-t)

    def weights(self, start: int) -> np.ndarray:
        return self.rate ** (-np.arange(start, 1, dtype=float))


@dataclass(frozen=True)
class PolynomialWeighting(WeightingSeq):
    """w_t = (1 - t)^(-power) with power > 0."""

    power: float

    def __post_init__(self):
        if not self.power > 0.0:
            raise ValueError("power must be positive")

    def weight(self, t: int) -> float:
        if t > 0:
            raise ValueError("time indices are non-positive")
        return (1.0 - t) ** (-self.power)

    def weights(self, start: int) -> np.ndarray:
        return (1.0 - np.arange(start, 1, dtype=float)) ** (-self.power)


@dataclass(frozen=True, eq=False)
class TabulatedWeighting(WeightingSeq):
    """Explicit table for t = table_start..0 plus a geometric tail rule.

    Below the table the weights continue as w_t = values[0] * tail_ratio^k
    where k is the distance to the table edge.  A decaying tail ratio is
    required; constant extension is rejected because the weights must vanish
    at -inf.
    """

    table_start: int
    values: np.ndarray
    tail_ratio: float

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.ndim != 1 or vals.shape[0] != -self.table_start + 1:
            raise ValueError("values must cover t = table_start..0")
        if np.any(vals <= 0.0) or np.any(vals > 1.0):
            raise ValueError("weights must lie in (0, 1]")
        if np.any(np.diff(vals) < 0.0):
            raise ValueError("weights must be monotone non-decreasing in t")
        if not 0.0 < self.tail_ratio < 1.0:
            raise ValueError("tail_ratio must lie in (0, 1); weights must decay")
        vals = vals.copy()
        vals.setflags(write=False)
        object.__setattr__(self, "table_start", int(self.table_start))
        object.__setattr__(self, "values", vals)

    def weight(self, t: int) -> float:
        if t > 0:
            raise ValueError("time indices are non-positive")
        if t >= self.table_start:
            return float(self.values[t - self.table_start])
        return float(self.values[0] * self.tail_ratio ** (self.table_start - t))


# -- file ingestion --------------------------------------------------------


def finite_seq_from_csv(path) -> FiniteSeq:
    """Read one sequence from CSV: one row per time step, oldest first."""
    rows = []
    with open(path, newline="") as fh:
        for record in csv.reader(fh):
            if not record:
                continue
            rows.append([float(x) for x in record])
    if not rows:
        raise ValueError("empty CSV")
    entries = np.asarray(rows, dtype=float)
    return FiniteSeq(-(entries.shape[0] - 1), entries)
