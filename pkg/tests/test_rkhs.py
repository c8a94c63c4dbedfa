import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fadekit.convrep import extract_kernel
from fadekit.exceptions import OrthogonalityNotCertified
from fadekit.rkhs import (
    InducedKernel,
    LambdaKernel,
    finite_memory_fit,
    finite_memory_predict,
    gram,
    gram_oracle,
    kernel_eval,
    load_dataset,
    predict,
    ridge_fit,
    rkhs_norm,
    save_dataset_csv,
    truncated_fit,
)
from fadekit.seqspace import FiniteSeq, include, lp_norm, shift, truncate
from fadekit.ssm import LinearSSM, run_recurrent
from fadekit.verify import random_seq


# -- kernel_eval --------------------------------------------------------------


def test_kernel_eval_zero_argument():
    kern = LambdaKernel(0.5, 2)
    z = random_seq(np.random.default_rng(0), 2, 5)
    assert kernel_eval(kern, z, FiniteSeq.zero(2)) == 0.0


def test_kernel_eval_present_inclusion():
    kern = LambdaKernel(0.5, 2)
    z = include([1.0, 0.0], 0)
    assert kernel_eval(kern, z, z) == pytest.approx(1.0)


def test_kernel_eval_two_step_recursion_value():
    kern = LambdaKernel(0.5, 1)
    z = FiniteSeq(-1, np.ones((2, 1)))
    assert kernel_eval(kern, z, z) == pytest.approx(1.25)  # 1 + lam^2


def test_kernel_eval_closed_form_oracle():
    rng = np.random.default_rng(1)
    for _ in range(30):
        d = int(rng.integers(1, 4))
        lam = float(rng.uniform(0.2, 1.0))
        kern = LambdaKernel(lam, d)
        z1, z2 = random_seq(rng, d, 7), random_seq(rng, d, 7)
        lo = min(z1.start, z2.start)
        weights = lam ** (-2.0 * np.arange(lo, 1, dtype=float))
        dots = np.einsum("td,td->t", z1.window(lo), z2.window(lo))
        expected = float(np.sum(weights * dots))
        assert kernel_eval(kern, z1, z2) == pytest.approx(expected, rel=1e-12)


@settings(max_examples=60, deadline=None)
@given(
    lam=st.floats(0.1, 1.0),
    depth1=st.integers(0, 6),
    depth2=st.integers(0, 6),
    seed=st.integers(0, 10_000),
)
def test_kernel_recursion_identity(lam, depth1, depth2, seed):
    rng = np.random.default_rng(seed)
    kern = LambdaKernel(lam, 2)
    z1 = FiniteSeq(-depth1, rng.standard_normal((depth1 + 1, 2)))
    z2 = FiniteSeq(-depth2, rng.standard_normal((depth2 + 1, 2)))
    full = kernel_eval(kern, z1, z2)
    head = float(z1.entry(0) @ z2.entry(0))
    rest = lam**2 * kernel_eval(kern, shift(z1, 1), shift(z2, 1))
    assert full == pytest.approx(head + rest, rel=1e-12, abs=1e-12)


def test_kernel_eval_symmetry():
    rng = np.random.default_rng(2)
    kern = LambdaKernel(0.7, 3)
    for _ in range(20):
        z1, z2 = random_seq(rng, 3, 6), random_seq(rng, 3, 6)
        assert kernel_eval(kern, z1, z2) == pytest.approx(kernel_eval(kern, z2, z1))


def test_induced_kernel_matches_manual_inner_product():
    from fadekit.convrep import evaluate
    from fadekit.verify import random_kernel

    rng = np.random.default_rng(3)
    ks = random_kernel(rng, 2, 3, 5, with_tail=False)
    kern = InducedKernel(ks)
    z1, z2 = random_seq(rng, 2, 5), random_seq(rng, 2, 5)
    expected = float(evaluate(ks, z1) @ evaluate(ks, z2))
    assert kernel_eval(kern, z1, z2) == pytest.approx(expected)


def test_kernel_dimension_mismatch():
    with pytest.raises(ValueError):
        kernel_eval(LambdaKernel(0.5, 2), FiniteSeq.zero(2), FiniteSeq.zero(3))
    with pytest.raises(ValueError):
        LambdaKernel(1.5, 2)
    with pytest.raises(ValueError):
        LambdaKernel(0.5, 0)


# -- gram ---------------------------------------------------------------------


def test_gram_single_zero_sample():
    assert np.array_equal(gram(LambdaKernel(0.5, 1), [FiniteSeq.zero(1)]), [[0.0]])


def test_gram_orthogonal_inclusions_diagonal():
    kern = LambdaKernel(0.5, 2)
    samples = [include([1.0, 0.0], -1), include([0.0, 1.0], 0)]
    G = gram(kern, samples)
    assert G[0, 1] == 0.0 and G[1, 0] == 0.0
    assert G[0, 0] == pytest.approx(0.25)
    assert G[1, 1] == pytest.approx(1.0)


def test_gram_matches_double_sum_oracle():
    rng = np.random.default_rng(4)
    kern = LambdaKernel(0.6, 2)
    samples = [random_seq(rng, 2, 6) for _ in range(3)]
    assert np.allclose(gram(kern, samples), gram_oracle(kern, samples), atol=1e-12)


def test_gram_psd_and_symmetric():
    rng = np.random.default_rng(5)
    for lam in (0.3, 0.8, 1.0):
        kern = LambdaKernel(lam, 2)
        samples = [random_seq(rng, 2, 6) for _ in range(8)]
        G = gram(kern, samples)
        assert np.array_equal(G, G.T)
        eigs = np.linalg.eigvalsh(G)
        assert eigs.min() >= -1e-9 * np.trace(G)


def test_gram_threaded_matches_serial(monkeypatch):
    rng = np.random.default_rng(6)
    kern = LambdaKernel(0.5, 2)
    samples = [random_seq(rng, 2, 5) for _ in range(9)]
    serial = gram(kern, samples)
    monkeypatch.setenv("FADEKIT_THREADS", "4")
    assert np.array_equal(gram(kern, samples), serial)


# -- ridge_fit / predict ------------------------------------------------------


def test_ridge_fit_zero_targets():
    rng = np.random.default_rng(7)
    samples = [random_seq(rng, 1, 4) for _ in range(4)]
    fit = ridge_fit(LambdaKernel(0.5, 1), samples, np.zeros(4), 0.1)
    assert np.allclose(fit.alpha, 0.0)
    assert rkhs_norm(fit) == 0.0


def test_ridge_fit_single_sample_closed_form():
    z = include([2.0], 0)
    fit = ridge_fit(LambdaKernel(0.5, 1), [z], [3.0], 0.5)
    g = 4.0  # K(z, z)
    assert fit.alpha[0] == pytest.approx(3.0 / (g + 0.5))
    assert predict(fit, z) == pytest.approx(fit.alpha[0] * g)
    assert rkhs_norm(fit) == pytest.approx(abs(fit.alpha[0]) * math.sqrt(g))


def test_ridge_fit_two_sample_closed_form():
    rng = np.random.default_rng(8)
    kern = LambdaKernel(0.7, 2)
    samples = [random_seq(rng, 2, 4) for _ in range(2)]
    targets = rng.standard_normal(2)
    gamma = 0.3
    fit = ridge_fit(kern, samples, targets, gamma)
    G = gram(kern, samples)
    A = G + gamma * 2.0 * np.eye(2)
    det = A[0, 0] * A[1, 1] - A[0, 1] * A[1, 0]
    inv = np.array([[A[1, 1], -A[0, 1]], [-A[1, 0], A[0, 0]]]) / det
    assert np.allclose(fit.alpha, inv @ targets, rtol=1e-10)


def test_ridge_fit_residual_invariant():
    rng = np.random.default_rng(9)
    kern = LambdaKernel(0.9, 2)
    samples = [random_seq(rng, 2, 6) for _ in range(12)]
    targets = rng.standard_normal(12)
    fit = ridge_fit(kern, samples, targets, 1e-3)
    system = fit.gram + fit.gamma * 12 * np.eye(12)
    residual = np.linalg.norm(system @ fit.alpha - targets)
    assert residual <= 1e-10 * np.linalg.norm(targets)


def test_ridge_fit_rejects_bad_gamma():
    with pytest.raises(ValueError):
        ridge_fit(LambdaKernel(0.5, 1), [FiniteSeq.zero(1)], [0.0], 0.0)


def test_predict_interpolates_at_tiny_gamma():
    rng = np.random.default_rng(10)
    kern = LambdaKernel(0.5, 1)
    samples = [include([1.0], 0), include([1.0], -1)]
    targets = np.array([1.0, -2.0])
    fit = ridge_fit(kern, samples, targets, 1e-12)
    for z, y in zip(samples, targets):
        assert predict(fit, z) == pytest.approx(y, rel=1e-6)


# -- truncated_fit ------------------------------------------------------------


def test_truncated_fit_deep_window_matches_plain_fit():
    rng = np.random.default_rng(11)
    kern = LambdaKernel(0.6, 2)
    samples = [random_seq(rng, 2, 5) for _ in range(5)]
    targets = rng.standard_normal(5)
    full = ridge_fit(kern, samples, targets, 0.1)
    trunc = truncated_fit(kern, samples, targets, 0.1, -10)
    assert np.allclose(full.alpha, trunc.alpha)


def test_truncated_fit_at_zero_keeps_present_only():
    rng = np.random.default_rng(12)
    kern = LambdaKernel(0.6, 2)
    samples = [random_seq(rng, 2, 5) for _ in range(5)]
    targets = rng.standard_normal(5)
    trunc = truncated_fit(kern, samples, targets, 0.1, 0)
    oracle = ridge_fit(kern, [include(z.entry(0), 0) for z in samples], targets, 0.1)
    assert np.allclose(trunc.alpha, oracle.alpha)


def test_truncated_gram_matches_windowed_sums():
    rng = np.random.default_rng(13)
    lam = 0.5
    kern = LambdaKernel(lam, 2)
    samples = [random_seq(rng, 2, 6) for _ in range(4)]
    T = -3
    trunc = truncated_fit(kern, samples, rng.standard_normal(4), 0.2, T)
    for i in range(4):
        for j in range(4):
            windows_i = samples[i].window(T)
            windows_j = samples[j].window(T)
            weights = lam ** (-2.0 * np.arange(T, 1, dtype=float))
            expected = float(
                np.sum(weights * np.einsum("td,td->t", windows_i, windows_j))
            )
            assert trunc.gram[i, j] == pytest.approx(expected, rel=1e-12, abs=1e-12)


# -- finite_memory_fit --------------------------------------------------------


def test_finite_memory_fit_zero_targets():
    rng = np.random.default_rng(14)
    kern = LambdaKernel(0.5, 2)
    samples = [random_seq(rng, 2, 4) for _ in range(3)]
    weights = finite_memory_fit(kern, samples, np.zeros(3), 0.1, -2)
    assert np.allclose(weights, 0.0)
    assert weights.shape == (6,)


def test_finite_memory_fit_scalar_ridge_closed_form():
    # T = 0, d = 1: plain scalar ridge on the present entries.
    kern = LambdaKernel(0.5, 1)
    xs = np.array([1.0, 2.0, -1.0])
    ys = np.array([2.0, 1.0, 0.5])
    gamma = 0.25
    samples = [include([x], 0) for x in xs]
    weights = finite_memory_fit(kern, samples, ys, gamma, 0)
    expected = float(xs @ ys) / (float(xs @ xs) + gamma * 3.0)
    assert weights == pytest.approx([expected])


def test_finite_memory_fit_requires_discounted_kernel():
    from fadekit.verify import random_kernel

    ks = random_kernel(np.random.default_rng(15), 2, 2, 3, with_tail=False)
    with pytest.raises(OrthogonalityNotCertified):
        finite_memory_fit(InducedKernel(ks), [FiniteSeq.zero(2)], [0.0], 0.1, -1)


def test_truncation_equivalence_predictions_objectives_norms():
    rng = np.random.default_rng(16)
    for trial in range(8):
        d = int(rng.integers(1, 4))
        lam = float(rng.uniform(0.3, 0.95))
        kern = LambdaKernel(lam, d)
        M = int(rng.integers(2, 8))
        T = [0, -1, -4, -8][trial % 4]
        samples = [random_seq(rng, d, 8) for _ in range(M)]
        targets = rng.standard_normal(M)
        gamma = float(rng.uniform(1e-3, 1.0))

        tfit = truncated_fit(kern, samples, targets, gamma, T)
        weights = finite_memory_fit(kern, samples, targets, gamma, T)

        for _ in range(50):
            z = random_seq(rng, d, 10)
            a = predict(tfit, z)
            b = finite_memory_predict(weights, T, z)
            assert a == pytest.approx(b, rel=1e-8, abs=1e-8)

        # identical objective values: mse + gamma * ||f||^2
        preds_kernel = np.array([predict(tfit, z) for z in samples])
        preds_primal = np.array(
            [finite_memory_predict(weights, T, z) for z in samples]
        )
        times = np.arange(T, 1, dtype=float)
        penalty = np.repeat(lam ** (2.0 * times), d)
        norm_primal = math.sqrt(float(penalty @ (weights**2)))
        obj_kernel = float(np.mean((preds_kernel - targets) ** 2)) + gamma * rkhs_norm(
            tfit
        ) ** 2
        obj_primal = float(
            np.mean((preds_primal - targets) ** 2)
        ) + gamma * norm_primal**2
        assert obj_kernel == pytest.approx(obj_primal, rel=1e-8)
        assert rkhs_norm(tfit) == pytest.approx(norm_primal, rel=1e-8)


def test_representer_optimality():
    # random perturbations of alpha never reduce the regularized objective
    rng = np.random.default_rng(17)
    kern = LambdaKernel(0.6, 2)
    samples = [random_seq(rng, 2, 5) for _ in range(6)]
    targets = rng.standard_normal(6)
    gamma = 0.05
    fit = ridge_fit(kern, samples, targets, gamma)
    G = fit.gram

    def objective(alpha):
        preds = G @ alpha
        return float(np.mean((preds - targets) ** 2)) + gamma * float(alpha @ G @ alpha)

    base = objective(fit.alpha)
    for _ in range(100):
        direction = rng.standard_normal(6)
        assert objective(fit.alpha + 1e-3 * direction) >= base - 1e-12


# -- feature-map geometry -----------------------------------------------------


def feature_vector(z: FiniteSeq, lam: float) -> np.ndarray:
    """Explicit feature embedding: block at time t is lam^|t| z_t."""
    scales = lam ** (-np.arange(z.start, 1, dtype=float))
    return (scales[:, None] * z.entries).ravel()


def test_kernel_matches_feature_inner_product():
    rng = np.random.default_rng(18)
    lam = 0.5
    kern = LambdaKernel(lam, 2)
    for _ in range(20):
        depth = int(rng.integers(0, 6))
        z1 = FiniteSeq(-depth, rng.standard_normal((depth + 1, 2)))
        z2 = FiniteSeq(-depth, rng.standard_normal((depth + 1, 2)))
        expected = float(feature_vector(z1, lam) @ feature_vector(z2, lam))
        assert kernel_eval(kern, z1, z2) == pytest.approx(expected, rel=1e-12)


def test_dual_embedding_is_not_an_isometry():
    # The image of f = <y, H(.)> under the dual embedding has norm
    # ||H(y)|| = sqrt(K(y, y)), while ||f|| = ||y||; they differ whenever the
    # support reaches into the past and lam < 1.
    lam = 0.5
    kern = LambdaKernel(lam, 1)
    y_past = include([1.0], -1)
    assert math.sqrt(kernel_eval(kern, y_past, y_past)) == pytest.approx(lam)
    assert lp_norm(y_past, 2.0) == 1.0  # norms disagree: not an isometry
    y_present = include([1.0], 0)
    assert math.sqrt(kernel_eval(kern, y_present, y_present)) == pytest.approx(
        lp_norm(y_present, 2.0)
    )


def block_shift_realization(lam: float, d: int, depth: int) -> LinearSSM:
    """State buffers the last ``depth + 1`` inputs with geometric discounting."""
    n = (depth + 1) * d
    A = np.zeros((n, n))
    for j in range(depth):
        A[(j + 1) * d : (j + 2) * d, j * d : (j + 1) * d] = lam * np.eye(d)
    C = np.zeros((n, d))
    C[:d, :] = np.eye(d)
    return LinearSSM(A, C, np.eye(n))


def test_induced_kernel_of_buffer_realization_matches_discounted_kernel():
    lam, d, depth = 0.5, 2, 4
    sys_ = block_shift_realization(lam, d, depth)
    extracted = extract_kernel(
        lambda z: run_recurrent(sys_, z), d, -depth
    )
    induced = InducedKernel(extracted)
    reference = LambdaKernel(lam, d)
    rng = np.random.default_rng(19)
    for _ in range(20):
        z1 = FiniteSeq(-depth, rng.standard_normal((depth + 1, d)))
        z2 = FiniteSeq(-depth, rng.standard_normal((depth + 1, d)))
        assert kernel_eval(induced, z1, z2) == pytest.approx(
            kernel_eval(reference, z1, z2), rel=1e-12
        )


# -- dataset I/O --------------------------------------------------------------


def test_dataset_roundtrip(tmp_path):
    rng = np.random.default_rng(20)
    samples = [random_seq(rng, 2, 4) for _ in range(5)]
    targets = rng.standard_normal(5)
    path = tmp_path / "data.csv"
    save_dataset_csv(path, samples, targets)
    loaded, y = load_dataset(path)
    assert len(loaded) == 5
    assert np.allclose(y, targets)
    for a, b in zip(loaded, samples):
        assert a == b


def test_dataset_manifest(tmp_path):
    rng = np.random.default_rng(21)
    samples = [random_seq(rng, 3, 3) for _ in range(3)]
    targets = rng.standard_normal(3)
    csv_path = tmp_path / "data.csv"
    save_dataset_csv(csv_path, samples, targets)
    manifest = tmp_path / "data.json"
    manifest.write_text('{"schema_version": 1, "csv": "data.csv", "dim": 3}')
    loaded, y = load_dataset(manifest)
    assert len(loaded) == 3 and np.allclose(y, targets)
    bad = tmp_path / "bad.json"
    bad.write_text('{"schema_version": 1, "csv": "data.csv", "dim": 7}')
    with pytest.raises(ValueError):
        load_dataset(bad)


def test_dataset_missing_target(tmp_path):
    path = tmp_path / "data.csv"
    path.write_text("seq_id,t,x0,target\na,-1,1.0,\na,0,2.0,\n")
    with pytest.raises(ValueError):
        load_dataset(path)


def test_ridge_fit_serialization():
    rng = np.random.default_rng(22)
    kern = LambdaKernel(0.5, 2)
    samples = [random_seq(rng, 2, 3) for _ in range(3)]
    fit = ridge_fit(kern, samples, rng.standard_normal(3), 0.1)
    doc = fit.to_json_dict()
    assert doc["kernel"] == {"kind": "lambda", "lam": 0.5, "dim": 2}
    assert len(doc["sample_digests"]) == 3
    assert len(set(doc["sample_digests"])) == 3
    assert doc["schema_version"] == 1
