"""Acceptance suite: one test per criterion, each printing a pass/fail line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
lines.  Every tolerance is pinned in the assertions below.
"""

import math
import time

import numpy as np
import pytest

from fadekit.convrep import (
    GeometricTail,
    KernelSeq,
    ZeroTail,
    classify,
    classify_constant_norm,
    classify_power_law,
    cone_certificate,
    construct_weighting,
    continuity_bound,
    evaluate,
    extract_kernel,
)
from fadekit.duality import filter_to_functional, functional_to_filter
from fadekit.exceptions import NotLinear
from fadekit.rkhs import (
    LambdaKernel,
    finite_memory_fit,
    finite_memory_predict,
    gram,
    gram_oracle,
    kernel_eval,
    predict,
    rkhs_norm,
    truncated_fit,
)
from fadekit.seqspace import (
    ExponentialWeighting,
    FiniteSeq,
    PolynomialWeighting,
    include,
    lp_norm,
    shift,
    truncate,
    weighted_lp_norm,
)
from fadekit.ssm import run_recurrent, ssm_to_kernel, unstable_witness
from fadekit.verify import random_kernel, random_seq, random_stable_system


def report(num: int, name: str, ok: bool, detail: str = ""):
    status = "PASS" if ok else "FAIL"
    print(f"\n[{status}] criterion {num:02d}: {name} {detail}".rstrip())
    assert ok, f"criterion {num} failed: {detail}"


def test_criterion_01_dual_mode_equivalence():
    eps = 1e-10
    rng = np.random.default_rng(101)
    tic = time.perf_counter()
    worst = 0.0
    for _ in range(200):
        n = int(rng.integers(1, 9))
        d = int(rng.integers(1, 5))
        m = int(rng.integers(1, 5))
        sys_ = random_stable_system(rng, n, d, m, float(rng.uniform(0.05, 0.9)))
        kernel = ssm_to_kernel(sys_, eps)
        length = int(rng.integers(1, 257))
        z = FiniteSeq(-(length - 1), rng.standard_normal((length, d)))
        rec = run_recurrent(sys_, z)
        conv = evaluate(kernel, truncate(z, kernel.window_start))
        err = float(np.max(np.abs(rec - conv)))
        bound = eps * lp_norm(z, math.inf)
        worst = max(worst, err)
        if err > bound:
            report(1, "dual-mode equivalence", False, f"error {err} > bound {bound}")
    elapsed = time.perf_counter() - tic
    report(
        1,
        "dual-mode equivalence",
        elapsed < 30.0,
        f"(200 systems, worst error {worst:.2e}, {elapsed:.1f}s < 30s)",
    )


def test_criterion_02_classifier_truth_tables():
    H, F = "holds", "fails"

    def table(pw, cont, minimal, product):
        return {
            "p_weighted_fmp": pw,
            "p_continuity": cont,
            "minimal_fmp_and_continuity": minimal,
            "product_fmp": product,
        }

    geometric = KernelSeq(
        -4,
        np.array([[[0.5**k]] for k in range(4, -1, -1)]),
        GeometricTail(1.0, 0.5),
    )
    finite = KernelSeq(-2, np.array([[[0.1]], [[2.0]], [[1.0]]]), ZeroTail())

    failures = []
    for p in (1.0, 2.0, math.inf):
        expected_summable = table(H, H, H, F)
        if classify(geometric, p).verdicts != expected_summable:
            failures.append(f"geometric@p={p}")
        for omega in (0.5, 1.0, 2.0):
            if classify_power_law(omega, p).verdicts != expected_summable:
                failures.append(f"power_law(omega={omega})@p={p}")
        if classify(finite, p).verdicts != table(H, H, H, H):
            failures.append(f"finite_memory@p={p}")
        if p == 1.0:
            expected_constant = table(F, H, H, F)  # 1-continuous, no weighted FMP
        else:
            expected_constant = table(F, F, F, F)  # sum of q-th powers diverges
        if classify_constant_norm(1.0, p).verdicts != expected_constant:
            failures.append(f"constant@p={p}")
    report(
        2,
        "classifier matches analytic truth tables",
        not failures,
        f"({'; '.join(failures) if failures else '4 families x p in {1,2,inf}'})",
    )


def test_criterion_03_weighting_certificates():
    rng = np.random.default_rng(103)
    violations = 0
    checks = 0
    for _ in range(100):
        d = int(rng.integers(1, 4))
        m = int(rng.integers(1, 4))
        kernel = random_kernel(rng, d, m, int(rng.integers(0, 9)))
        w = construct_weighting(kernel)
        tail_sup = kernel.tail.scale * kernel.tail.ratio ** (-kernel.window_start + 1)
        c = max(1.0, float(kernel.window_op_norms().max()), tail_sup)
        for _ in range(10):
            z = random_seq(rng, d, -kernel.window_start, scale=2.0)
            lhs = float(np.linalg.norm(evaluate(kernel, z)))
            rhs = c * weighted_lp_norm(z, w, 1.0)
            checks += 1
            if lhs > rhs + 1e-12 * (1.0 + rhs):
                violations += 1
    report(
        3,
        "constructed weighting certifies the sup-bound",
        violations == 0,
        f"({checks} checks, {violations} violations)",
    )


def test_criterion_04_hoelder_bounds():
    rng = np.random.default_rng(104)
    violations = 0
    checks = 0
    while checks < 1000:
        d = int(rng.integers(1, 4))
        m = int(rng.integers(1, 4))
        kernel = random_kernel(rng, d, m, int(rng.integers(0, 8)))
        p = [2.0, math.inf][int(rng.integers(2))]
        r = 1.0 if math.isinf(p) else 1.0 / p
        if rng.uniform() < 0.5:
            w = PolynomialWeighting(float(rng.uniform(0.5, 3.0)))
        else:
            w = ExponentialWeighting(
                float(min(0.99, kernel.tail.ratio ** (1.0 / r) + 0.05))
            )
        bound = continuity_bound(kernel, w, p)
        if math.isinf(bound):
            continue
        z = random_seq(rng, d, -kernel.window_start, scale=3.0)
        lhs = float(np.linalg.norm(evaluate(kernel, z)))
        rhs = bound * weighted_lp_norm(z, w, p)
        checks += 1
        if lhs > rhs + 1e-12 * (1.0 + rhs):
            violations += 1
    report(
        4,
        "Hoelder continuity bounds",
        violations == 0,
        f"({checks} random (kernel, weighting, p, input) checks)",
    )


def test_criterion_05_cone_certificates():
    rng = np.random.default_rng(105)
    cert_failures = 0
    for _ in range(10_000):
        d = int(rng.integers(1, 4))
        m = int(rng.integers(1, 4))
        kernel = random_kernel(rng, d, m, int(rng.integers(0, 8)))
        z = random_seq(rng, d, -kernel.window_start, scale=2.0)
        if not cone_certificate(kernel, z).holds:
            cert_failures += 1
    batch_failures = 0
    for _ in range(10_000):
        m = int(rng.integers(1, 4))
        signs = np.where(rng.uniform(size=m) < 0.5, -1.0, 1.0)
        batch = np.abs(rng.standard_normal((int(rng.integers(1, 16)), m))) * signs
        lhs = float(np.sum(np.linalg.norm(batch, axis=1)))
        rhs = math.sqrt(2.0) * float(np.linalg.norm(batch.sum(axis=0)))
        if lhs > rhs + 1e-12 * (1.0 + rhs):
            batch_failures += 1
    report(
        5,
        "orthant-partition certificates",
        cert_failures == 0 and batch_failures == 0,
        f"(10^4 certificates, 10^4 same-orthant batches)",
    )


def test_criterion_06_truncation_finite_memory_equivalence():
    rng = np.random.default_rng(106)
    worst_pred = 0.0
    worst_obj = 0.0
    for problem in range(50):
        d = int(rng.integers(1, 4))
        lam = float(rng.uniform(0.3, 0.95))
        kern = LambdaKernel(lam, d)
        M = int(rng.integers(2, 21))
        T = [0, -1, -4, -8][problem % 4]
        samples = [random_seq(rng, d, 10) for _ in range(M)]
        targets = rng.standard_normal(M)
        gamma = float(rng.uniform(1e-3, 1.0))

        tfit = truncated_fit(kern, samples, targets, gamma, T)
        weights = finite_memory_fit(kern, samples, targets, gamma, T)

        for _ in range(1000):
            z = random_seq(rng, d, 12)
            a = predict(tfit, z)
            b = finite_memory_predict(weights, T, z)
            err = abs(a - b) / max(1.0, abs(a))
            worst_pred = max(worst_pred, err)

        preds_kernel = np.array([predict(tfit, z) for z in samples])
        preds_primal = np.array([finite_memory_predict(weights, T, z) for z in samples])
        penalty = np.repeat(lam ** (2.0 * np.arange(T, 1, dtype=float)), d)
        obj_kernel = float(np.mean((preds_kernel - targets) ** 2)) + gamma * rkhs_norm(
            tfit
        ) ** 2
        obj_primal = float(np.mean((preds_primal - targets) ** 2)) + gamma * float(
            penalty @ weights**2
        )
        worst_obj = max(
            worst_obj, abs(obj_kernel - obj_primal) / max(1.0, abs(obj_kernel))
        )
    ok = worst_pred <= 1e-8 and worst_obj <= 1e-8
    report(
        6,
        "truncated fit equals finite-memory fit",
        ok,
        f"(50 problems, worst prediction gap {worst_pred:.2e}, "
        f"worst objective gap {worst_obj:.2e})",
    )


def test_criterion_07_discounted_kernel_recursion_and_gram():
    rng = np.random.default_rng(107)
    worst = 0.0
    for _ in range(10_000):
        d = int(rng.integers(1, 4))
        lam = float(rng.uniform(0.1, 1.0))
        kern = LambdaKernel(lam, d)
        z1 = random_seq(rng, d, 8)
        z2 = random_seq(rng, d, 8)
        full = kernel_eval(kern, z1, z2)
        parts = float(z1.entry(0) @ z2.entry(0)) + lam**2 * kernel_eval(
            kern, shift(z1, 1), shift(z2, 1)
        )
        worst = max(worst, abs(full - parts) / max(1.0, abs(full)))
    gram_worst = 0.0
    for _ in range(20):
        d = int(rng.integers(1, 3))
        kern = LambdaKernel(float(rng.uniform(0.3, 1.0)), d)
        samples = [random_seq(rng, d, 8) for _ in range(6)]
        gap = np.max(np.abs(gram(kern, samples) - gram_oracle(kern, samples)))
        gram_worst = max(gram_worst, float(gap))
    ok = worst <= 1e-12 and gram_worst <= 1e-12
    report(
        7,
        "discounted-kernel recursion and Gram oracle",
        ok,
        f"(10^4 pairs, worst {worst:.2e}; 20 Gram matrices, worst {gram_worst:.2e})",
    )


def test_criterion_08_filter_functional_roundtrips():
    rng = np.random.default_rng(108)
    worst = 0.0
    causality_violations = 0
    for _ in range(1000):
        d = int(rng.integers(1, 4))
        m = int(rng.integers(1, 4))
        kernel = random_kernel(rng, d, m, int(rng.integers(0, 5)), with_tail=False)

        def functional(z, kernel=kernel):
            return evaluate(kernel, z)

        filt = functional_to_filter(functional, horizon=-4)
        back = filter_to_functional(filt)
        z = random_seq(rng, d, 7)
        worst = max(worst, float(np.max(np.abs(back(z) - functional(z)))))

        rebuilt = functional_to_filter(back, horizon=-4)
        t = int(rng.integers(-4, 1))
        worst = max(
            worst, float(np.max(np.abs(rebuilt.at(z, t) - filt.at(z, t))))
        )

        if t < 0:
            s = int(rng.integers(t + 1, 1))
            perturbed = z + include(rng.standard_normal(d), s)
            if not np.array_equal(filt.at(perturbed, t), filt.at(z, t)):
                causality_violations += 1
    ok = worst <= 1e-12 and causality_violations == 0
    report(
        8,
        "functional/filter roundtrips and causality",
        ok,
        f"(10^3 instances, worst roundtrip error {worst:.2e}, "
        f"{causality_violations} causality violations)",
    )


def test_criterion_09_instability_witnesses():
    rng = np.random.default_rng(109)
    failures = []
    for trial in range(50):
        n = int(rng.integers(2, 7))
        A = rng.standard_normal((n, n))
        radius = float(np.max(np.abs(np.linalg.eigvals(A))))
        A *= float(rng.uniform(1.0, 1.5)) / radius
        witness = unstable_witness(A)
        if witness is None:
            failures.append(f"unstable #{trial}: no witness")
            continue
        states = witness.trajectory(64)
        residual = float(np.max(np.linalg.norm(states[1:] - states[:-1] @ A.T, axis=1)))
        if residual > 1e-9:
            failures.append(f"unstable #{trial}: residual {residual:.2e}")
        if float(np.max(np.linalg.norm(states, axis=1))) > 1.0 + 1e-9:
            failures.append(f"unstable #{trial}: unbounded trajectory")
    for trial in range(50):
        n = int(rng.integers(2, 7))
        A = rng.standard_normal((n, n))
        radius = float(np.max(np.abs(np.linalg.eigvals(A))))
        A *= float(rng.uniform(0.2, 0.95)) / radius
        if unstable_witness(A) is not None:
            failures.append(f"stable #{trial}: spurious witness")
    report(
        9,
        "instability witnesses",
        not failures,
        f"({'; '.join(failures[:3]) if failures else '50 unstable + 50 stable'})",
    )


def test_criterion_10_extraction_roundtrip():
    rng = np.random.default_rng(110)
    worst = 0.0
    for _ in range(100):
        d = int(rng.integers(1, 4))
        m = int(rng.integers(1, 4))
        kernel = random_kernel(rng, d, m, int(rng.integers(0, 7)), with_tail=False)
        recovered = extract_kernel(
            lambda z: evaluate(kernel, z), d, kernel.window_start
        )
        worst = max(worst, float(np.max(np.abs(recovered.matrices - kernel.matrices))))
    nonlinear_caught = False
    try:
        extract_kernel(lambda z: np.array([lp_norm(z, 2.0) ** 2]), 2, -3)
    except NotLinear:
        nonlinear_caught = True
    ok = worst <= 1e-12 and nonlinear_caught
    report(
        10,
        "kernel extraction roundtrip",
        ok,
        f"(100 kernels, worst window error {worst:.2e}, "
        f"nonlinear box {'caught' if nonlinear_caught else 'MISSED'})",
    )
