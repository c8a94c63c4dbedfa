"""Command-line front end: classify, realize, regress, verify, bench."""

from __future__ import annotations

import json
import math
import statistics
import sys
import time

import click
import numpy as np

from . import convrep, rkhs, seqspace, ssm, verify
from .exceptions import FadekitError, StabilityUndecided, Unstable

_EXIT_BAD_INPUT = 2
_EXIT_UNSTABLE = 3


def _fail(code: int, message: str):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _load_json(path) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except FileNotFoundError:
        _fail(_EXIT_BAD_INPUT, f"no such file: {path}")
    except json.JSONDecodeError as exc:
        _fail(_EXIT_BAD_INPUT, f"malformed JSON in {path}: {exc}")


def _emit(doc: dict, output, fmt: str, renderer) -> None:
    if fmt == "json":
        text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    else:
        text = renderer(doc)
    if output:
        with open(output, "w") as fh:
            fh.write(text)
    else:
        click.echo(text, nl=False)


def _parse_p(raw: str) -> float:
    try:
        p = math.inf if raw.strip().lower() in ("inf", "infinity") else float(raw)
    except ValueError:
        _fail(_EXIT_BAD_INPUT, f"cannot parse p: {raw!r}")
    if p < 1:
        _fail(_EXIT_BAD_INPUT, "p must be >= 1")
    return p


_format_option = click.option(
    "--format", "fmt", type=click.Choice(["json", "text"]), default="json",
    show_default=True, help="Report format.",
)
_output_option = click.option(
    "--output", type=click.Path(dir_okay=False, writable=True), default=None,
    help="Write the report to this path instead of stdout.",
)


@click.group()
def main():
    """Fading-memory toolkit: kernels, realizations, regression, checks."""


@main.command()
@click.option("--input", "input_path", required=True, type=click.Path(dir_okay=False))
@click.option("--p", "p_raw", required=True, help="Norm exponent in [1, inf].")
@_output_option
@_format_option
def classify(input_path, p_raw, output, fmt):
    """Classify the fading-memory properties of a kernel spec.

    The input is a kernel JSON document; the two documented analytic families
    are accepted as {"analytic": "power_law", "omega": w} and
    {"analytic": "constant_norm", "level": c}.
    """
    p = _parse_p(p_raw)
    doc = _load_json(input_path)
    try:
        if "analytic" in doc:
            family = doc["analytic"]
            if family == "power_law":
                report = convrep.classify_power_law(float(doc["omega"]), p)
            elif family == "constant_norm":
                report = convrep.classify_constant_norm(float(doc["level"]), p)
            else:
                raise ValueError(f"unknown analytic family {family!r}")
        else:
            kernel = convrep.KernelSeq.from_json_dict(doc)
            report = convrep.classify(kernel, p)
    except (ValueError, KeyError, FadekitError) as exc:
        _fail(_EXIT_BAD_INPUT, str(exc))
    _emit(report.to_json_dict(), output, fmt, _render_classify)


def _render_classify(doc: dict) -> str:
    lines = [
        f"p = {doc['p']}  (conjugate q = {doc['q']})",
        f"q-norm in [{doc['q_norm_lower']:.12g}, {doc['q_norm_upper']:.12g}]",
        f"sup-norm in [{doc['sup_norm_lower']:.12g}, {doc['sup_norm_upper']:.12g}]",
        f"decays to zero: {doc['decays_to_zero']}   finite memory: {doc['finite_memory']}",
    ]
    lines += [f"{name}: {verdict}" for name, verdict in sorted(doc["verdicts"].items())]
    return "\n".join(lines) + "\n"


@main.command()
@click.option("--input", "input_path", required=True, type=click.Path(dir_okay=False))
@click.option("--eps", type=float, default=1e-8, show_default=True,
              help="Certified bound on the dropped kernel tail.")
@_output_option
@_format_option
def realize(input_path, eps, output, fmt):
    """Materialize the kernel of a state-space system, with stability report."""
    doc = _load_json(input_path)
    try:
        system = ssm.LinearSSM.from_json_dict(doc)
    except (ValueError, KeyError) as exc:
        _fail(_EXIT_BAD_INPUT, str(exc))
    report = ssm.spectral_radius(system.A)
    if report.stable == ssm.STABLE_NO:
        witness = ssm.unstable_witness(system.A)
        out = {
            "schema_version": 1,
            "stability": report.to_json_dict(),
            "unstable_witness": witness.to_json_dict() if witness else None,
        }
        _emit(out, output, fmt, _render_witness)
        sys.exit(_EXIT_UNSTABLE)
    try:
        kernel = ssm.ssm_to_kernel(system, eps)
    except (Unstable, StabilityUndecided) as exc:
        _fail(_EXIT_UNSTABLE, str(exc))
    except ValueError as exc:
        _fail(_EXIT_BAD_INPUT, str(exc))
    out = {
        "schema_version": 1,
        "kernel": kernel.to_json_dict(),
        "stability": report.to_json_dict(),
    }
    _emit(out, output, fmt, _render_realize)


def _render_witness(doc: dict) -> str:
    stab = doc["stability"]
    lines = [f"unstable: rho in [{stab['rho_lower']:.12g}, {stab['rho_upper']:.12g}]"]
    wit = doc.get("unstable_witness")
    if wit:
        lam = wit["eigenvalue"]
        lines.append(
            f"witness eigenvalue {lam['re']:.12g}{lam['im']:+.12g}i, "
            f"residual {wit['max_residual']:.3g} on a {wit['window']}-step window"
        )
    return "\n".join(lines) + "\n"


def _render_realize(doc: dict) -> str:
    kern = doc["kernel"]
    stab = doc["stability"]
    tail = kern["tail"]
    tail_text = "zero" if tail["kind"] == "zero" else (
        f"geometric(M={tail['M']:.6g}, rho={tail['rho']:.6g})"
    )
    lines = [
        f"window_start = {kern['window_start']}  ({len(kern['matrices'])} matrices)",
        f"tail: {tail_text}",
        f"stable: {stab['stable']}  rho in [{stab['rho_lower']:.12g}, {stab['rho_upper']:.12g}]",
    ]
    return "\n".join(lines) + "\n"


@main.command()
@click.option("--input", "input_path", required=True, type=click.Path(dir_okay=False),
              help="Dataset CSV or JSON manifest.")
@click.option("--kernel", "kernel_kind", type=click.Choice(["lambda", "induced"]),
              default="lambda", show_default=True)
@click.option("--lam", type=float, default=0.5, show_default=True,
              help="Decay of the discounted kernel.")
@click.option("--kernel-spec", type=click.Path(dir_okay=False), default=None,
              help="Kernel JSON backing the induced kind.")
@click.option("--gamma", type=float, required=True, help="Regularizer strength > 0.")
@click.option("--truncate", "truncate_t", type=int, default=None,
              help="Truncate samples to [T, 0] before fitting.")
@_output_option
@_format_option
def regress(input_path, kernel_kind, lam, kernel_spec, gamma, truncate_t, output, fmt):
    """Kernel ridge regression on a sequence dataset."""
    if gamma <= 0.0:
        _fail(_EXIT_BAD_INPUT, "gamma must be positive")
    try:
        samples, targets = rkhs.load_dataset(input_path)
    except FileNotFoundError:
        _fail(_EXIT_BAD_INPUT, f"no such file: {input_path}")
    except (ValueError, KeyError, json.JSONDecodeError) as exc:
        _fail(_EXIT_BAD_INPUT, f"bad dataset: {exc}")
    dim = samples[0].dim
    try:
        if kernel_kind == "lambda":
            kern = rkhs.LambdaKernel(lam, dim)
        else:
            if kernel_spec is None:
                _fail(_EXIT_BAD_INPUT, "--kernel induced requires --kernel-spec")
            kern = rkhs.InducedKernel(convrep.KernelSeq.from_json_dict(_load_json(kernel_spec)))
        if truncate_t is not None:
            fit = rkhs.truncated_fit(kern, samples, targets, gamma, truncate_t)
        else:
            fit = rkhs.ridge_fit(kern, samples, targets, gamma)
        preds = np.array([rkhs.predict(fit, z) for z in samples])
        out = fit.to_json_dict()
        out["rkhs_norm"] = rkhs.rkhs_norm(fit)
        out["train_mse"] = float(np.mean((preds - targets) ** 2))
        if kernel_kind == "lambda":
            out["equivalence_residual"] = _equivalence_residual(
                kern, samples, targets, gamma, truncate_t
            )
    except FadekitError as exc:
        _fail(_EXIT_BAD_INPUT, str(exc))
    except ValueError as exc:
        _fail(_EXIT_BAD_INPUT, str(exc))
    _emit(out, output, fmt, _render_regress)


def _equivalence_residual(kern, samples, targets, gamma, truncate_t) -> float:
    """Worst disagreement between the truncated fit and the primal
    finite-memory fit, over the training samples."""
    T = truncate_t if truncate_t is not None else min(z.start for z in samples)
    tfit = rkhs.truncated_fit(kern, samples, targets, gamma, T)
    weights = rkhs.finite_memory_fit(kern, samples, targets, gamma, T)
    worst = 0.0
    for z in samples:
        a = rkhs.predict(tfit, z)
        b = rkhs.finite_memory_predict(weights, T, z)
        worst = max(worst, abs(a - b) / max(1.0, abs(a)))
    return worst


def _render_regress(doc: dict) -> str:
    lines = [
        f"samples: {len(doc['alpha'])}   gamma = {doc['gamma']:.6g}",
        f"rkhs_norm = {doc['rkhs_norm']:.12g}",
        f"train_mse = {doc['train_mse']:.12g}",
    ]
    if "equivalence_residual" in doc:
        lines.append(f"equivalence_residual = {doc['equivalence_residual']:.3g}")
    lines.append("alpha = " + ", ".join(f"{a:.12g}" for a in doc["alpha"]))
    return "\n".join(lines) + "\n"


@main.command(name="verify")
@click.option("--seed", type=int, default=0, show_default=True)
@_output_option
@_format_option
def verify_cmd(seed, output, fmt):
    """Run the randomized verification battery (deterministic per seed)."""
    report = verify.run_battery(seed)
    _emit(report, output, fmt, _render_verify)
    if not report["all_passed"]:
        sys.exit(1)


def _render_verify(doc: dict) -> str:
    lines = []
    for check in doc["checks"]:
        status = "PASS" if check["passed"] else "FAIL"
        lines.append(
            f"{status} {check['name']} (trials={check['trials']}, "
            f"violations={check['violations']}, max_error={check['max_error']:.3g})"
        )
    lines.append("all passed" if doc["all_passed"] else "FAILURES present")
    return "\n".join(lines) + "\n"


@main.command()
@click.option("--input", "input_path", required=True, type=click.Path(dir_okay=False))
@click.option("--lengths", default="256,1024,4096", show_default=True,
              help="Comma-separated input lengths.")
@click.option("--eps", type=float, default=1e-8, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@_output_option
@_format_option
def bench(input_path, lengths, eps, seed, output, fmt):
    """Time recurrent vs convolution evaluation of one system."""
    doc = _load_json(input_path)
    try:
        system = ssm.LinearSSM.from_json_dict(doc)
        length_list = [int(x) for x in lengths.split(",") if x.strip()]
        if not length_list or any(L < 1 for L in length_list):
            raise ValueError("lengths must be positive integers")
        kernel = ssm.ssm_to_kernel(system, eps)
    except (Unstable, StabilityUndecided) as exc:
        _fail(_EXIT_UNSTABLE, str(exc))
    except (ValueError, KeyError) as exc:
        _fail(_EXIT_BAD_INPUT, str(exc))

    rng = np.random.default_rng(seed)
    rows = []
    for L in length_list:
        # inputs bounded by 1 so the discrepancy is directly comparable to eps
        z = seqspace.FiniteSeq(-(L - 1), rng.uniform(-1.0, 1.0, (L, system.input_dim)))
        z_win = seqspace.truncate(z, kernel.window_start)
        rec = ssm.run_recurrent(system, z)
        conv = convrep.evaluate(kernel, z_win)
        rows.append({
            "length": L,
            "recurrent_ms": _median_ms(lambda: ssm.run_recurrent(system, z)),
            "convolution_ms": _median_ms(lambda: convrep.evaluate(kernel, z_win)),
            "max_discrepancy": float(np.max(np.abs(rec - conv))),
        })
    out = {"schema_version": 1, "seed": seed, "eps": eps, "rows": rows}
    _emit(out, output, fmt, _render_bench)


def _median_ms(fn, repetitions: int = 11) -> float:
    times = []
    for _ in range(repetitions):
        tic = time.perf_counter()
        fn()
        times.append((time.perf_counter() - tic) * 1e3)
    return statistics.median(times)


def _render_bench(doc: dict) -> str:
    lines = [f"{'length':>8} {'recurrent_ms':>14} {'convolution_ms':>16} {'max_discrepancy':>16}"]
    for row in doc["rows"]:
        lines.append(
            f"{row['length']:>8} {row['recurrent_ms']:>14.4f} "
            f"{row['convolution_ms']:>16.4f} {row['max_discrepancy']:>16.3e}"
        )
    return "\n".join(lines) + "\n"


if __name__ == "__main__":
    main()
