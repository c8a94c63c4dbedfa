"""Input validation helpers for the estimator front end."""

from __future__ import annotations

import numpy as np

from .seqspace import FiniteSeq

__all__ = ["as_finite_seq", "check_sequences", "check_targets"]


def as_finite_seq(obj, dim: int | None = None) -> FiniteSeq:
    """Coerce one sample to a FiniteSeq.

    Accepts a FiniteSeq, a (steps, dim) array with rows ordered oldest first
    and the last row at time 0, or a 1-d array of scalars.
    """
    if isinstance(obj, FiniteSeq):
        seq = obj
    else:
        arr = np.asarray(obj, dtype=float)
        if arr.ndim == 1:
            arr = arr[:, None]
        if arr.ndim != 2 or arr.shape[0] < 1:
            raise ValueError(
                "each sample must be a FiniteSeq or a (steps, dim) array"
            )
        seq = FiniteSeq(-(arr.shape[0] - 1), arr)
    if dim is not None and seq.dim != dim:
        raise ValueError(f"sample has dim {seq.dim}, expected {dim}")
    return seq


def check_sequences(X, dim: int | None = None) -> list[FiniteSeq]:
    """Coerce a batch of samples to FiniteSeq with a common dimension."""
    if isinstance(X, (FiniteSeq, np.ndarray)) and getattr(X, "ndim", None) != 3:
        X = [X]
    seqs = [as_finite_seq(x, dim) for x in X]
    if not seqs:
        raise ValueError("need at least one sample")
    first = seqs[0].dim
    for seq in seqs[1:]:
        if seq.dim != first:
            raise ValueError("samples disagree on input dimension")
    return seqs


def check_targets(y, n_samples: int) -> np.ndarray:
    """Validate a target vector of the expected length."""
    arr = np.asarray(y, dtype=float).reshape(-1)
    if arr.shape[0] != n_samples:
        raise ValueError(f"expected {n_samples} targets, got {arr.shape[0]}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("targets must be finite")
    return arr
