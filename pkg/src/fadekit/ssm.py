"""Linear state-space realizations of fading-memory functionals.

A system (A, C, h) drives the recursion x_t = A x_{t-1} + C z_t with readout
h x_0.  For a stable state matrix the same functional is available as a
matrix kernel kappa_t = h A^|t| C with a certified geometric tail, so the
recurrent and the convolution evaluation can be cross-checked against each
other.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .convrep import GeometricTail, KernelSeq, ZeroTail, op_norm
from .exceptions import NumericalFailure, StabilityUndecided, Unstable
from .seqspace import FiniteSeq

__all__ = [
    "LinearSSM",
    "StabilityReport",
    "UnstableWitness",
    "STABLE_YES",
    "STABLE_NO",
    "STABLE_UNDECIDED",
    "spectral_radius",
    "ssm_to_kernel",
    "run_recurrent",
    "unstable_witness",
]

STABLE_YES = "yes"
STABLE_NO = "no"
STABLE_UNDECIDED = "margin-undecided"

_MAX_SQUARINGS = 20
_SCAN_LIMIT = 256  # explicit power scan cap for the geometric constant


@dataclass(frozen=True, eq=False)
class LinearSSM:
    """State-space triple: A (n x n), C (n x d), h (m x n)."""

    A: np.ndarray
    C: np.ndarray
    h: np.ndarray

    def __post_init__(self):
        A = np.atleast_2d(np.asarray(self.A, dtype=float))
        C = np.atleast_2d(np.asarray(self.C, dtype=float))
        h = np.atleast_2d(np.asarray(self.h, dtype=float))
        n = A.shape[0]
        if A.shape != (n, n):
            raise ValueError("A must be square")
        if C.shape[0] != n:
            raise ValueError("C must have as many rows as A")
        if h.shape[1] != n:
            raise ValueError("h must have as many columns as A")
        for mat in (A, C, h):
            if not np.all(np.isfinite(mat)):
                raise ValueError("system matrices must be finite")
        for name, mat in (("A", A), ("C", C), ("h", h)):
            mat = mat.copy()
            mat.setflags(write=False)
            object.__setattr__(self, name, mat)

    @property
    def state_dim(self) -> int:
        return self.A.shape[0]

    @property
    def input_dim(self) -> int:
        return self.C.shape[1]

    @property
    def output_dim(self) -> int:
        return self.h.shape[0]

    def to_json_dict(self) -> dict:
        return {"A": self.A.tolist(), "C": self.C.tolist(), "h": self.h.tolist()}

    @classmethod
    def from_json_dict(cls, doc: dict) -> "LinearSSM":
        return cls(
            np.asarray(doc["A"], float),
            np.asarray(doc["C"], float),
            np.asarray(doc["h"], float),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict())

    @classmethod
    def from_json(cls, text: str) -> "LinearSSM":
        return cls.from_json_dict(json.loads(text))


@dataclass(frozen=True)
class StabilityReport:
    """Certified spectral-radius interval and the derived geometric bound.

    ``rho_lower <= rho(A) <= rho_upper`` always holds; ``stable`` is decided
    only when the interval clears the margin around 1.  When stable,
    ``geometric_bound = (M, r)`` certifies ||A^j|| <= M * r^j for all j >= 0.
    ``gelfand_k`` is the squaring depth whose norm estimate backs the bound.
    """

    rho_lower: float
    rho_upper: float
    stable: str
    gelfand_k: int
    geometric_bound: tuple[float, float] | None

    def to_json_dict(self) -> dict:
        doc = {
            "schema_version": 1,
            "rho_lower": self.rho_lower,
            "rho_upper": self.rho_upper,
            "stable": self.stable,
            "gelfand_k": self.gelfand_k,
        }
        if self.geometric_bound is not None:
            doc["geometric_bound"] = {
                "M": self.geometric_bound[0],
                "r": self.geometric_bound[1],
            }
        return doc


def _log_norm_sequence(A: np.ndarray) -> tuple[list[float], list[np.ndarray], list[float]]:
    """Scaled repeated squaring: log ||A^(2^k)|| for k = 0.._MAX_SQUARINGS.

    Returns (log norms, scaled matrices N_k with A^(2^k) = exp(logscale_k) N_k,
    log scales).  Stops early when a power vanishes exactly (nilpotent case).
    """
    log_norms: list[float] = []
    scaled: list[np.ndarray] = []
    log_scales: list[float] = []
    norm0 = op_norm(A)
    if norm0 == 0.0:
        return [-math.inf], [A], [0.0]
    N = A / norm0
    logscale = math.log(norm0)
    for _ in range(_MAX_SQUARINGS + 1):
        log_norms.append(logscale)  # ||N|| == 1 by construction
        scaled.append(N)
        log_scales.append(logscale)
        Q = N @ N
        q = op_norm(Q)
        if q == 0.0:
            log_norms.append(-math.inf)
            scaled.append(Q)
            log_scales.append(-math.inf)
            break
        N = Q / q
        logscale = 2.0 * logscale + math.log(q)
    return log_norms, scaled, log_scales


def spectral_radius(A, margin: float = 1e-6) -> StabilityReport:
    """Certified spectral-radius interval via norms of repeated squarings.

    Upper estimates u_k = ||A^(2^k)||^(2^-k) are rigorous by
    submultiplicativity; lower estimates come from |trace(A^(2^k))/n|^(2^-k),
    |det A|^(1/n), and (for normal matrices) Rayleigh quotients at computed
    eigenvectors.  ``stable`` is "yes" when the upper end clears 1 - margin,
    "no" when the lower end reaches 1, and "margin-undecided" otherwise.
    """
    A = np.atleast_2d(np.asarray(A, dtype=float))
    n = A.shape[0]
    if A.shape != (n, n) or n < 1:
        raise ValueError("A must be a square matrix")
    if not np.all(np.isfinite(A)):
        raise ValueError("A must be finite")
    if margin <= 0.0:
        raise ValueError("margin must be positive")

    log_norms, scaled, log_scales = _log_norm_sequence(A)
    uppers = [math.exp(ln / 2**k) if not math.isinf(ln) else 0.0
              for k, ln in enumerate(log_norms)]
    best_k = int(np.argmin(uppers))
    upper = uppers[best_k]

    lower = 0.0
    for k, (N, ls) in enumerate(zip(scaled, log_scales)):
        if math.isinf(ls):
            continue
        tr = abs(float(np.trace(N)))
        if tr > 0.0:
            # |trace(A^m)| <= n * rho^m with m = 2^k
            lower = max(lower, math.exp((ls + math.log(tr) - math.log(n)) / 2**k))
    det = abs(float(np.linalg.det(A)))
    if det > 0.0:
        lower = max(lower, det ** (1.0 / n))
    lower = max(lower, _rayleigh_lower(A))
    lower = min(lower, upper)

    if upper < 1.0 - margin:
        stable = STABLE_YES
    elif lower >= 1.0:
        stable = STABLE_NO
    else:
        stable = STABLE_UNDECIDED

    geometric = None
    gelfand_k = best_k
    if stable == STABLE_YES:
        r = upper + margin / 2.0
        gelfand_k, M = _geometric_constant(A, r, uppers, log_norms)
        geometric = (M, r)
    return StabilityReport(lower, upper, stable, gelfand_k, geometric)


def _rayleigh_lower(A: np.ndarray) -> float:
    """Rayleigh-quotient lower estimate, valid only for normal matrices.

    For normal A the field of values is the convex hull of the spectrum, so
    |v* A v| / (v* v) <= rho(A) for every probe vector; probing at computed
    eigenvectors recovers the radius itself.
    """
    scale = float(np.linalg.norm(A))
    if scale == 0.0:
        return 0.0
    commutator = float(np.linalg.norm(A @ A.T - A.T @ A))
    if commutator > 1e-13 * scale**2:
        return 0.0
    try:
        _, vecs = np.linalg.eig(A)
    except np.linalg.LinAlgError:
        return 0.0
    best = 0.0
    for j in range(vecs.shape[1]):
        v = vecs[:, j]
        denom = float(np.real(np.vdot(v, v)))
        if denom <= 0.0:
            continue
        best = max(best, abs(np.vdot(v, A @ v)) / denom)
    return best


def _geometric_constant(
    A: np.ndarray, r: float, uppers: list[float], log_norms: list[float]
) -> tuple[int, float]:
    """Smallest-depth constant M with ||A^j|| <= M r^j for all j >= 0.

    Uses the first squaring depth k with u_k <= r: writing j = q 2^k + s, the
    block of q full squarings contributes at most r^(q 2^k) and the remainder
    s < 2^k is covered either by an explicit norm scan (small depths) or by
    the product of the stored squaring norms over the binary digits of s.
    """
    depth = next(k for k, u in enumerate(uppers) if u <= r)
    span = 2**depth
    log_r = math.log(r)

    # Bit-decomposition bound: valid at any depth, cheap to evaluate.
    log_m = 0.0
    for b in range(depth):
        log_m += max(0.0, log_norms[b] - 2**b * log_r)
    M = math.exp(log_m)

    if span <= _SCAN_LIMIT:
        # Explicit scan is tighter; Frobenius norms dominate spectral norms.
        P = np.eye(A.shape[0])
        best = 1.0
        for s in range(1, span):
            P = A @ P
            best = max(best, float(np.linalg.norm(P)) / r**s)
        M = min(M, best)
    return depth, max(M, 1.0)


def ssm_to_kernel(sys: LinearSSM, eps: float) -> KernelSeq:
    """Materialize the kernel kappa_t = h A^|t| C with certified tail <= eps.

    The window depth is chosen from the geometric bound (M, r) of the state
    matrix so that the absolute sum of the kernel norms below the window is
    at most eps.  Requires a stable system; raises Unstable or
    StabilityUndecided otherwise.  An exactly vanishing state power truncates
    the kernel to a zero tail (finite memory).
    """
    if eps <= 0.0:
        raise ValueError("eps must be positive")
    report = spectral_radius(sys.A)
    if report.stable == STABLE_NO:
        raise Unstable(report)
    if report.stable == STABLE_UNDECIDED:
        raise StabilityUndecided(report)

    prefactor = op_norm(sys.h) * op_norm(sys.C)
    if prefactor == 0.0:
        return KernelSeq(0, (sys.h @ sys.C)[None], ZeroTail())

    M, r = report.geometric_bound
    tail_scale = prefactor * M
    # Depth with tail_scale * r^(depth+1) / (1 - r) <= eps.
    target = eps * (1.0 - r) / tail_scale
    depth = 0 if target >= 1.0 else math.ceil(math.log(target) / math.log(r)) - 1
    depth = max(0, depth)
    while tail_scale * r ** (depth + 1) / (1.0 - r) > eps:
        depth += 1

    mats = [sys.h @ sys.C]
    P = np.eye(sys.state_dim)
    for _ in range(depth):
        P = sys.A @ P
        if not np.any(P):
            # Nilpotent state matrix: everything older is exactly zero.
            return KernelSeq(-(len(mats) - 1), np.array(mats[::-1]), ZeroTail())
        mats.append(sys.h @ P @ sys.C)
    return KernelSeq(-depth, np.array(mats[::-1]), GeometricTail(tail_scale, r))


def run_recurrent(sys: LinearSSM, z: FiniteSeq) -> np.ndarray:
    """Drive the state recursion from rest through the input and read out.

    Zero initialization one step before the support is exact: the input is
    finitely supported, so the unique bounded solution agrees with the
    zero-started recursion.
    """
    if sys.input_dim != z.dim:
        raise ValueError(
            f"dimension mismatch: system expects {sys.input_dim}, input has {z.dim}"
        )
    x = np.zeros(sys.state_dim)
    for row in z.entries:
        x = sys.A @ x + sys.C @ row
    return sys.h @ x


@dataclass(frozen=True, eq=False)
class UnstableWitness:
    """Closed-form bounded nonzero solution of the homogeneous state equation.

    The trajectory x_t = Re(lambda^t v) for t <= 0 stays bounded by ||v||
    because |lambda| >= 1, yet satisfies x_t = A x_{t-1}; together with the
    constant zero solution it witnesses non-uniqueness for the unstable state
    matrix.
    """

    eigenvalue: complex
    eigenvector: np.ndarray
    window: int
    max_residual: float

    def trajectory(self, steps: int | None = None) -> np.ndarray:
        """States x_t for t = -steps..0, one row per time index."""
        steps = self.window if steps is None else int(steps)
        times = np.arange(-steps, 1)
        powers = self.eigenvalue ** times.astype(complex)
        return np.real(powers[:, None] * self.eigenvector[None, :])

    def to_json_dict(self) -> dict:
        return {
            "eigenvalue": {"re": self.eigenvalue.real, "im": self.eigenvalue.imag},
            "eigenvector_re": np.real(self.eigenvector).tolist(),
            "eigenvector_im": np.imag(self.eigenvector).tolist(),
            "window": self.window,
            "max_residual": self.max_residual,
        }


_UNIT_MODULUS_TOL = 1e-12
_WITNESS_WINDOW = 64
_WITNESS_RESIDUAL = 1e-9


def unstable_witness(A, window: int = _WITNESS_WINDOW) -> UnstableWitness | None:
    """Witness of instability, or None when all eigenvalues lie inside the disc.

    Any eigenvalue of modulus >= 1 yields the bounded homogeneous solution
    x_t = Re(lambda^t v); the witness is verified on the requested window
    before being returned.
    """
    A = np.atleast_2d(np.asarray(A, dtype=float))
    if A.shape[0] != A.shape[1]:
        raise ValueError("A must be square")
    try:
        values, vectors = np.linalg.eig(A)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(f"eigensolve failed: {exc}") from exc
    idx = int(np.argmax(np.abs(values)))
    lam = complex(values[idx])
    if abs(lam) < 1.0 - _UNIT_MODULUS_TOL:
        return None
    v = vectors[:, idx]
    v = v / np.linalg.norm(v)

    times = np.arange(-window, 1)
    states = np.real((lam ** times.astype(complex))[:, None] * v[None, :])
    residual = float(
        np.max(np.linalg.norm(states[1:] - states[:-1] @ A.T, axis=1), initial=0.0)
    )
    if residual > _WITNESS_RESIDUAL:
        raise NumericalFailure(
            f"witness residual {residual:.3g} exceeds {_WITNESS_RESIDUAL:g}"
        )
    return UnstableWitness(lam, v, window, residual)
