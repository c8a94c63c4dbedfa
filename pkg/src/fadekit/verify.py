"""Seeded verification battery behind the ``fadekit verify`` command.

Each check exercises one of the toolkit's certified inequalities or
roundtrips on randomized instances and reports the trial count, violation
count, and worst error.  The battery is deterministic for a fixed seed.
"""

from __future__ import annotations

import math

import numpy as np

from . import convrep, duality, rkhs, seqspace, ssm
from .convrep import GeometricTail, KernelSeq, ZeroTail
from .seqspace import ExponentialWeighting, FiniteSeq, PolynomialWeighting

__all__ = ["run_battery", "random_kernel", "random_stable_system", "random_seq"]


def random_seq(rng, dim: int, max_depth: int, scale: float = 1.0) -> FiniteSeq:
    depth = int(rng.integers(0, max_depth + 1))
    return FiniteSeq(-depth, scale * rng.standard_normal((depth + 1, dim)))


def random_kernel(
    rng, in_dim: int, out_dim: int, window: int, with_tail: bool = True
) -> KernelSeq:
    mats = rng.standard_normal((window + 1, out_dim, in_dim))
    # Taper the window so the norms roughly follow the tail profile.
    ratio = float(rng.uniform(0.3, 0.9))
    taper = ratio ** np.arange(window, -1, -1, dtype=float)
    mats = mats * taper[:, None, None]
    if with_tail:
        scale = float(
            max(convrep.op_norm(m) for m in mats) / ratio**window + rng.uniform(0, 1)
        )
        tail = GeometricTail(scale, ratio)
    else:
        tail = ZeroTail()
    return KernelSeq(-window, mats, tail)


def random_stable_system(
    rng, n: int, d: int, m: int, rho_target: float
) -> ssm.LinearSSM:
    A = rng.standard_normal((n, n))
    radius = float(np.max(np.abs(np.linalg.eigvals(A))))
    if radius > 0.0:
        A = A * (rho_target / radius)
    else:
        A = np.zeros((n, n))
    return ssm.LinearSSM(A, rng.standard_normal((n, d)), rng.standard_normal((m, n)))


def _result(name: str, trials: int, violations: int, max_error: float) -> dict:
    return {
        "name": name,
        "trials": trials,
        "violations": violations,
        "max_error": max_error,
        "passed": violations == 0,
    }


def check_dual_mode(seed: int, systems: int = 20, eps: float = 1e-8) -> dict:
    """Recurrent and convolution evaluations agree within the certified tail."""
    rng = np.random.default_rng(seed)
    violations = 0
    worst = 0.0
    for _ in range(systems):
        n, d, m = (int(rng.integers(1, 7)), int(rng.integers(1, 4)), int(rng.integers(1, 4)))
        sys_ = random_stable_system(rng, n, d, m, float(rng.uniform(0.05, 0.9)))
        kernel = ssm.ssm_to_kernel(sys_, eps)
        z = random_seq(rng, d, 128)
        rec = ssm.run_recurrent(sys_, z)
        conv = convrep.evaluate(kernel, seqspace.truncate(z, kernel.window_start))
        err = float(np.max(np.abs(rec - conv)))
        bound = eps * seqspace.lp_norm(z, math.inf)
        worst = max(worst, err)
        if err > bound + 1e-15:
            violations += 1
    return _result("dual_mode_equivalence", systems, violations, worst)


def check_hoelder_bound(seed: int, trials: int = 100) -> dict:
    """||H(z)|| <= continuity_bound * weighted norm for p in {2, inf}."""
    rng = np.random.default_rng(seed)
    violations = 0
    worst = 0.0
    for _ in range(trials):
        d, m = int(rng.integers(1, 4)), int(rng.integers(1, 4))
        kernel = random_kernel(rng, d, m, int(rng.integers(1, 8)))
        p = [2.0, math.inf][int(rng.integers(0, 2))]
        if rng.uniform() < 0.5:
            w = PolynomialWeighting(float(rng.uniform(0.5, 3.0)))
        else:
            ratio = kernel.tail.ratio
            r = 1.0 if math.isinf(p) else 1.0 / p
            # Rate above ratio^(1/r) keeps the bound finite.
            w = ExponentialWeighting(float(min(0.999, ratio ** (1.0 / r) + 0.05)))
        bound = convrep.continuity_bound(kernel, w, p)
        if math.isinf(bound):
            continue
        z = random_seq(rng, d, -kernel.window_start, scale=2.0)
        lhs = float(np.linalg.norm(convrep.evaluate(kernel, z)))
        rhs = bound * seqspace.weighted_lp_norm(z, w, p)
        worst = max(worst, lhs - rhs)
        if lhs > rhs * (1.0 + 1e-12) + 1e-12:
            violations += 1
    return _result("hoelder_bound", trials, violations, max(worst, 0.0))


def check_weighting_certificate(seed: int, kernels: int = 20, probes: int = 10) -> dict:
    """||H(z)|| <= sup max(1, ||kappa_t||) * ||z||_{w,1} with the built weighting."""
    rng = np.random.default_rng(seed)
    violations = 0
    worst = 0.0
    for _ in range(kernels):
        d, m = int(rng.integers(1, 4)), int(rng.integers(1, 4))
        kernel = random_kernel(rng, d, m, int(rng.integers(1, 8)))
        w = convrep.construct_weighting(kernel)
        tail_sup = kernel.tail.scale * kernel.tail.ratio ** (-kernel.window_start + 1)
        big_c = max(1.0, float(kernel.window_op_norms().max()), tail_sup)
        for _ in range(probes):
            z = random_seq(rng, d, -kernel.window_start, scale=2.0)
            lhs = float(np.linalg.norm(convrep.evaluate(kernel, z)))
            rhs = big_c * seqspace.weighted_lp_norm(z, w, 1.0)
            worst = max(worst, lhs - rhs)
            if lhs > rhs * (1.0 + 1e-12) + 1e-12:
                violations += 1
    return _result("weighting_certificate", kernels * probes, violations, max(worst, 0.0))


def check_cone_partition(seed: int, trials: int = 300) -> dict:
    """Orthant certificates hold; same-orthant batches obey the sqrt(2) bound."""
    rng = np.random.default_rng(seed)
    violations = 0
    worst = 0.0
    for _ in range(trials):
        d, m = int(rng.integers(1, 4)), int(rng.integers(1, 4))
        kernel = random_kernel(rng, d, m, int(rng.integers(1, 10)))
        z = random_seq(rng, d, -kernel.window_start, scale=2.0)
        cert = convrep.cone_certificate(kernel, z)
        worst = max(worst, cert.lhs - cert.rhs)
        if not cert.holds:
            violations += 1
    for _ in range(trials):
        m = int(rng.integers(1, 4))
        signs = np.where(rng.uniform(size=m) < 0.5, -1.0, 1.0)
        batch = np.abs(rng.standard_normal((int(rng.integers(1, 12)), m))) * signs
        lhs = float(np.sum(np.linalg.norm(batch, axis=1)))
        rhs = math.sqrt(2.0) * float(np.linalg.norm(batch.sum(axis=0)))
        if lhs > rhs * (1.0 + 1e-12) + 1e-12:
            violations += 1
    return _result("cone_partition", 2 * trials, violations, max(worst, 0.0))


def check_kernel_recursion(seed: int, trials: int = 300) -> dict:
    """Discounted kernel satisfies its two-term recursion; Gram matches the oracle."""
    rng = np.random.default_rng(seed)
    violations = 0
    worst = 0.0
    for _ in range(trials):
        d = int(rng.integers(1, 4))
        lam = float(rng.uniform(0.2, 1.0))
        kern = rkhs.LambdaKernel(lam, d)
        z1 = random_seq(rng, d, 8)
        z2 = random_seq(rng, d, 8)
        full = rkhs.kernel_eval(kern, z1, z2)
        head = float(z1.entry(0) @ z2.entry(0))
        shifted = lam**2 * rkhs.kernel_eval(
            kern, seqspace.shift(z1, 1), seqspace.shift(z2, 1)
        )
        err = abs(full - (head + shifted)) / max(1.0, abs(full))
        worst = max(worst, err)
        if err > 1e-12:
            violations += 1
    rng2 = np.random.default_rng(seed + 1)
    for _ in range(10):
        d = int(rng2.integers(1, 3))
        kern = rkhs.LambdaKernel(float(rng2.uniform(0.3, 1.0)), d)
        samples = [random_seq(rng2, d, 6) for _ in range(5)]
        err = float(
            np.max(np.abs(rkhs.gram(kern, samples) - rkhs.gram_oracle(kern, samples)))
        )
        worst = max(worst, err)
        if err > 1e-12:
            violations += 1
    return _result("kernel_recursion", trials + 10, violations, worst)


def check_truncation_equivalence(seed: int, problems: int = 5, probes: int = 40) -> dict:
    """Truncated kernel fit and primal finite-memory fit predict identically."""
    rng = np.random.default_rng(seed)
    violations = 0
    worst = 0.0
    for _ in range(problems):
        d = int(rng.integers(1, 4))
        lam = float(rng.uniform(0.3, 0.95))
        kern = rkhs.LambdaKernel(lam, d)
        M = int(rng.integers(2, 10))
        T = int(-rng.integers(0, 6))
        samples = [random_seq(rng, d, 8) for _ in range(M)]
        targets = rng.standard_normal(M)
        gamma = float(rng.uniform(1e-3, 1.0))
        tfit = rkhs.truncated_fit(kern, samples, targets, gamma, T)
        weights = rkhs.finite_memory_fit(kern, samples, targets, gamma, T)
        for _ in range(probes):
            z = random_seq(rng, d, 10)
            a = rkhs.predict(tfit, z)
            b = rkhs.finite_memory_predict(weights, T, z)
            err = abs(a - b) / max(1.0, abs(a))
            worst = max(worst, err)
            if err > 1e-8:
                violations += 1
    return _result("truncation_equivalence", problems * probes, violations, worst)


def check_filter_roundtrips(seed: int, trials: int = 50) -> dict:
    """Functional/filter bijections invert each other on the window."""
    rng = np.random.default_rng(seed)
    violations = 0
    worst = 0.0
    for _ in range(trials):
        d, m = int(rng.integers(1, 4)), int(rng.integers(1, 4))
        kernel = random_kernel(rng, d, m, int(rng.integers(1, 6)), with_tail=False)

        def functional(z, kernel=kernel):
            return convrep.evaluate(kernel, z)

        filt = duality.functional_to_filter(functional, horizon=-4)
        back = duality.filter_to_functional(filt)
        z = random_seq(rng, d, 6)
        err = float(np.max(np.abs(functional(z) - back(z))))
        worst = max(worst, err)
        if err > 1e-12:
            violations += 1
    return _result("filter_roundtrips", trials, violations, worst)


def check_extraction_roundtrip(seed: int, trials: int = 10) -> dict:
    """Probing a kernel evaluator recovers its window matrices exactly."""
    rng = np.random.default_rng(seed)
    violations = 0
    worst = 0.0
    for _ in range(trials):
        d, m = int(rng.integers(1, 4)), int(rng.integers(1, 4))
        kernel = random_kernel(rng, d, m, int(rng.integers(0, 6)), with_tail=False)
        recovered = convrep.extract_kernel(
            lambda z: convrep.evaluate(kernel, z), d, kernel.window_start
        )
        err = float(np.max(np.abs(recovered.matrices - kernel.matrices)))
        worst = max(worst, err)
        if err > 1e-12:
            violations += 1
    return _result("extraction_roundtrip", trials, violations, worst)


_CHECKS = (
    check_dual_mode,
    check_hoelder_bound,
    check_weighting_certificate,
    check_cone_partition,
    check_kernel_recursion,
    check_truncation_equivalence,
    check_filter_roundtrips,
    check_extraction_roundtrip,
)


def run_battery(seed: int) -> dict:
    """Run every check with sub-seeds derived from ``seed``."""
    results = [check(seed + i) for i, check in enumerate(_CHECKS)]
    return {
        "schema_version": 1,
        "seed": seed,
        "checks": results,
        "all_passed": all(r["passed"] for r in results),
    }
