"""Sequence kernels induced by linear functionals and kernel ridge regression.

Two kernel kinds are supported: the kernel induced by an explicit matrix
kernel (inner product of the functional outputs) and the exponentially
discounted kernel K(z1, z2) = sum_t lam^(2|t|) <z1_t, z2_t>, whose two-term
recursion K = <z1_0, z2_0> + lam^2 K(shifted tails) makes Gram matrices cheap.
For the discounted kernel the per-time feature subspaces are orthogonal, so a
ridge fit on truncated samples coincides with the best finite-memory
functional; both sides of that equivalence are implemented independently.

A note on geometry: the fitted functional f = <y, H(.)> has norm ||y||, while
its image under the dual pairing z -> <H(y), z> has norm sqrt(K(y, y)).  For
lam < 1 these disagree as soon as y has support in the past (the embedding
into the dual of the square-summable sequences is injective but not
norm-preserving); the tests pin this with an explicit mismatch witness.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .convrep import KernelSeq, evaluate
from .exceptions import OrthogonalityNotCertified
from .seqspace import FiniteSeq, truncate

__all__ = [
    "LambdaKernel",
    "InducedKernel",
    "RidgeFit",
    "kernel_eval",
    "gram",
    "gram_oracle",
    "ridge_fit",
    "predict",
    "truncated_fit",
    "finite_memory_fit",
    "finite_memory_predict",
    "rkhs_norm",
    "load_dataset",
    "save_dataset_csv",
]


@dataclass(frozen=True)
class LambdaKernel:
    """Exponentially discounted sequence kernel with decay lam in (0, 1]."""

    lam: float
    dim: int

    def __post_init__(self):
        if not 0.0 < self.lam <= 1.0:
            raise ValueError("lam must lie in (0, 1]")
        if self.dim < 1:
            raise ValueError("dim must be >= 1")

    def to_json_dict(self) -> dict:
        return {"kind": "lambda", "lam": self.lam, "dim": self.dim}


@dataclass(frozen=True, eq=False)
class InducedKernel:
    """Kernel induced by a matrix-kernel functional: K = <H(z1), H(z2)>."""

    kernel_seq: KernelSeq

    @property
    def dim(self) -> int:
        return self.kernel_seq.in_dim

    def to_json_dict(self) -> dict:
        return {"kind": "induced", "kernel_seq": self.kernel_seq.to_json_dict()}


SeqKernel = LambdaKernel | InducedKernel


def kernel_eval(kernel: SeqKernel, z1: FiniteSeq, z2: FiniteSeq) -> float:
    """Evaluate the kernel on a pair of sequences.

    The discounted kind runs the backward recursion acc <- lam^2 acc + <z1_t, z2_t>
    from the oldest overlapping entry; the induced kind takes the inner
    product of the two functional outputs (window underflow propagates).
    """
    if z1.dim != z2.dim or z1.dim != kernel.dim:
        raise ValueError("dimension mismatch")
    if isinstance(kernel, LambdaKernel):
        lo = max(z1.start, z2.start)
        rows1 = z1.entries[lo - z1.start :]
        rows2 = z2.entries[lo - z2.start :]
        dots = np.einsum("td,td->t", rows1, rows2)
        lam_sq = kernel.lam**2
        acc = 0.0
        for d in dots:
            acc = lam_sq * acc + d
        return float(acc)
    if isinstance(kernel, InducedKernel):
        y1 = evaluate(kernel.kernel_seq, z1)
        y2 = evaluate(kernel.kernel_seq, z2)
        return float(y1 @ y2)
    raise TypeError(f"unsupported kernel kind {type(kernel).__name__}")


def _worker_count() -> int:
    raw = os.environ.get("FADEKIT_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def gram(kernel: SeqKernel, samples: list[FiniteSeq]) -> np.ndarray:
    """Symmetric PSD matrix of pairwise kernel evaluations.

    Row assembly may run on a thread pool capped by FADEKIT_THREADS; the
    result is identical either way.
    """
    M = len(samples)
    if M < 1:
        raise ValueError("need at least one sample")
    out = np.zeros((M, M))

    def fill_row(i: int) -> None:
        for j in range(i, M):
            out[i, j] = kernel_eval(kernel, samples[i], samples[j])

    workers = _worker_count()
    if workers > 1 and M > 4:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(fill_row, range(M)))
    else:
        for i in range(M):
            fill_row(i)
    upper = np.triu(out)
    return upper + upper.T - np.diag(np.diag(out))


def gram_oracle(kernel: LambdaKernel, samples: list[FiniteSeq]) -> np.ndarray:
    """Direct double-sum Gram matrix, bypassing the recursion (test oracle)."""
    M = len(samples)
    out = np.zeros((M, M))
    for i in range(M):
        for j in range(M):
            lo = min(samples[i].start, samples[j].start)
            weights = kernel.lam ** (-2.0 * np.arange(lo, 1, dtype=float))
            dots = np.einsum("td,td->t", samples[i].window(lo), samples[j].window(lo))
            out[i, j] = float(np.sum(weights * dots))
    return out


@dataclass(frozen=True, eq=False)
class RidgeFit:
    """Kernel ridge solution alpha of (gram + gamma * M * I) alpha = targets.

    The convention pairs a mean-square error over the M samples with the
    Tikhonov penalty gamma * ||f||^2, which puts gamma * M on the diagonal of
    the normal equations.
    """

    kernel: SeqKernel
    samples: tuple[FiniteSeq, ...]
    gram: np.ndarray
    gamma: float
    alpha: np.ndarray
    targets: np.ndarray

    def to_json_dict(self) -> dict:
        digests = [
            hashlib.sha256(
                json.dumps(s.to_json_dict(), sort_keys=True).encode()
            ).hexdigest()
            for s in self.samples
        ]
        return {
            "schema_version": 1,
            "kernel": self.kernel.to_json_dict(),
            "gamma": self.gamma,
            "alpha": self.alpha.tolist(),
            "sample_digests": digests,
        }


def ridge_fit(
    kernel: SeqKernel,
    samples: list[FiniteSeq],
    targets,
    gamma: float,
) -> RidgeFit:
    """Solve the regularized least-squares problem in its kernel form."""
    if gamma <= 0.0:
        raise ValueError("gamma must be positive")
    samples = tuple(samples)
    M = len(samples)
    if M < 1:
        raise ValueError("need at least one sample")
    targets = np.asarray(targets, dtype=float).reshape(M)
    G = gram(kernel, list(samples))
    system = G + gamma * M * np.eye(M)
    try:
        alpha = np.linalg.solve(system, targets)
    except np.linalg.LinAlgError:  # pragma: no cover - gamma > 0 prevents this
        alpha = np.linalg.lstsq(system, targets, rcond=None)[0]
    return RidgeFit(kernel, samples, G, float(gamma), alpha, targets)


def predict(fit: RidgeFit, z: FiniteSeq) -> float:
    """Representer-form prediction: sum_i alpha_i K(sample_i, z)."""
    return float(
        sum(a * kernel_eval(fit.kernel, s, z) for a, s in zip(fit.alpha, fit.samples))
    )


def truncated_fit(
    kernel: SeqKernel,
    samples: list[FiniteSeq],
    targets,
    gamma: float,
    T: int,
) -> RidgeFit:
    """Ridge fit with every sample truncated to the window [T, 0]."""
    if T > 0:
        raise ValueError("T must be non-positive")
    return ridge_fit(kernel, [truncate(s, T) for s in samples], targets, gamma)


def _feature_weights(lam: float, T: int, dim: int) -> np.ndarray:
    """Per-coordinate penalty weights lam^(2t) for the stacked window t = T..0.

    A functional f(z) = sum_t <b_t, z_t> corresponds to the feature-space
    element with block y_t = lam^(-|t|) b_t, so its squared norm is
    sum_t lam^(-2|t|) ||b_t||^2 = sum_t lam^(2t) ||b_t||^2.
    """
    times = np.arange(T, 1, dtype=float)
    return np.repeat(lam ** (2.0 * times), dim)


def finite_memory_fit(
    kernel: SeqKernel,
    samples: list[FiniteSeq],
    targets,
    gamma: float,
    T: int,
) -> np.ndarray:
    """Best finite-memory functional over the window [T, 0], in primal form.

    Solves the Tikhonov problem over f(z) = sum_{t=T}^0 <b_t, z_t> by normal
    equations on the stacked window features, with the penalty weighted per
    time index to match the kernel's norm.  Returns the stacked coefficients
    b (blocks ordered t = T..0).  Only the discounted kernel certifies the
    orthogonality of per-time feature subspaces that makes this problem
    equivalent to the truncated kernel fit, so other kinds are rejected.
    """
    if not isinstance(kernel, LambdaKernel):
        raise OrthogonalityNotCertified(
            "per-time feature subspaces are certified orthogonal only for the "
            "discounted kernel"
        )
    if gamma <= 0.0:
        raise ValueError("gamma must be positive")
    if T > 0:
        raise ValueError("T must be non-positive")
    M = len(samples)
    if M < 1:
        raise ValueError("need at least one sample")
    targets = np.asarray(targets, dtype=float).reshape(M)
    for s in samples:
        if s.dim != kernel.dim:
            raise ValueError("dimension mismatch")

    features = np.stack([s.window(T).ravel() for s in samples])
    penalty = np.diag(_feature_weights(kernel.lam, T, kernel.dim))
    system = features.T @ features + gamma * M * penalty
    rhs = features.T @ targets
    return np.linalg.solve(system, rhs)


def finite_memory_predict(weights: np.ndarray, T: int, z: FiniteSeq) -> float:
    """Apply a primal finite-memory functional to a sequence."""
    weights = np.asarray(weights, dtype=float)
    steps = -T + 1
    if weights.size % steps != 0:
        raise ValueError("weight vector does not tile the window")
    return float(weights @ z.window(T).ravel())


def rkhs_norm(fit: RidgeFit) -> float:
    """Norm of the fitted functional: sqrt(alpha' G alpha)."""
    return math.sqrt(max(0.0, float(fit.alpha @ fit.gram @ fit.alpha)))


# -- dataset I/O -------------------------------------------------------------
#
# CSV layout: header ``seq_id,t,x0,...,x{d-1},target`` with one row per time
# step; the target is read from each sequence's t = 0 row.  A JSON manifest
# {"schema_version": 1, "csv": <path>, "dim": <d>} may wrap the CSV.


def load_dataset(path) -> tuple[list[FiniteSeq], np.ndarray]:
    """Load samples and targets from a dataset CSV or its JSON manifest."""
    path = os.fspath(path)
    declared_dim = None
    if path.endswith(".json"):
        with open(path) as fh:
            manifest = json.load(fh)
        csv_path = manifest["csv"]
        if not os.path.isabs(csv_path):
            csv_path = os.path.join(os.path.dirname(path), csv_path)
        declared_dim = manifest.get("dim")
        path = csv_path
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise ValueError("empty dataset")
        header = [h.strip() for h in header]
        if header[:2] != ["seq_id", "t"] or header[-1] != "target":
            raise ValueError("expected header seq_id,t,x0,...,target")
        dim = len(header) - 3
        if dim < 1:
            raise ValueError("dataset needs at least one component column")
        if declared_dim is not None and int(declared_dim) != dim:
            raise ValueError("manifest dim does not match CSV header")
        groups: dict[str, list[tuple[int, list[float], str]]] = {}
        order: list[str] = []
        for record in reader:
            if not record:
                continue
            seq_id, t_raw = record[0], record[1]
            if seq_id not in groups:
                groups[seq_id] = []
                order.append(seq_id)
            groups[seq_id].append(
                (int(t_raw), [float(x) for x in record[2 : 2 + dim]], record[-1])
            )
    samples: list[FiniteSeq] = []
    targets: list[float] = []
    for seq_id in order:
        rows = sorted(groups[seq_id], key=lambda item: item[0])
        times = [t for t, _, _ in rows]
        start = times[0]
        if times != list(range(start, 1)):
            raise ValueError(f"sequence {seq_id!r} must cover t = {start}..0")
        target_raw = rows[-1][2].strip()
        if not target_raw:
            raise ValueError(f"sequence {seq_id!r} is missing its target (t = 0 row)")
        samples.append(FiniteSeq(start, np.array([vec for _, vec, _ in rows])))
        targets.append(float(target_raw))
    if not samples:
        raise ValueError("dataset has no sequences")
    return samples, np.asarray(targets)


def save_dataset_csv(path, samples: list[FiniteSeq], targets) -> None:
    """Write samples and targets in the dataset CSV layout."""
    targets = np.asarray(targets, dtype=float).reshape(len(samples))
    dim = samples[0].dim
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["seq_id", "t"] + [f"x{j}" for j in range(dim)] + ["target"])
        for idx, (z, y) in enumerate(zip(samples, targets)):
            for t in range(z.start, 1):
                row = [f"s{idx}", t] + [repr(float(x)) for x in z.entry(t)]
                row.append(repr(float(y)) if t == 0 else "")
                writer.writerow(row)
