"""Scikit-learn compatible front end for sequence-kernel ridge regression."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.exceptions import NotFittedError

from . import rkhs
from .rkhs import InducedKernel, LambdaKernel
from .validation import check_sequences, check_targets

__all__ = ["SequenceKernelRidge"]


class SequenceKernelRidge(BaseEstimator, RegressorMixin):
    """Kernel ridge regression on semi-infinite input sequences.

    Samples are sequences over time indices t <= 0 (``FiniteSeq`` instances or
    (steps, dim) arrays with rows ordered oldest first).  With the default
    discounted kernel, fitting on samples truncated to a window is exactly the
    best finite-memory fit over that window.

    Parameters
    ----------
    kernel : {"lambda", "induced"}, default="lambda"
        Kernel kind.  "lambda" is the exponentially discounted sequence
        kernel; "induced" evaluates an explicit matrix kernel (pass
        ``kernel_seq``).
    lam : float, default=0.5
        Decay of the discounted kernel, in (0, 1].  Ignored for "induced".
    gamma : float, default=1e-3
        Tikhonov regularizer strength; must be positive.
    truncate : int or None, default=None
        When set (non-positive), samples are truncated to [truncate, 0]
        before fitting.
    kernel_seq : KernelSeq or None, default=None
        Matrix kernel backing the "induced" kind.

    Attributes
    ----------
    fit_ : RidgeFit
        The underlying kernel ridge solution.
    alpha_ : ndarray of shape (n_samples,)
        Representer coefficients.
    dim_ : int
        Input dimension seen during fit.
    """

    def __init__(
        self,
        kernel="lambda",
        lam=0.5,
        gamma=1e-3,
        truncate=None,
        kernel_seq=None,
    ):
        self.kernel = kernel
        self.lam = lam
        self.gamma = gamma
        self.truncate = truncate
        self.kernel_seq = kernel_seq

    def _make_kernel(self, dim: int):
        if self.kernel == "lambda":
            return LambdaKernel(self.lam, dim)
        if self.kernel == "induced":
            if self.kernel_seq is None:
                raise ValueError("kernel='induced' requires kernel_seq")
            return InducedKernel(self.kernel_seq)
        raise ValueError(f"unknown kernel kind {self.kernel!r}")

    def fit(self, X, y):
        """Fit the ridge solution on sequence samples.

        Parameters
        ----------
        X : list of FiniteSeq or array-likes
            Training sequences.
        y : array-like of shape (n_samples,)
            Targets.

        Returns
        -------
        self
        """
        samples = check_sequences(X)
        targets = check_targets(y, len(samples))
        self.dim_ = samples[0].dim
        kern = self._make_kernel(self.dim_)
        if self.truncate is not None:
            self.fit_ = rkhs.truncated_fit(
                kern, samples, targets, self.gamma, int(self.truncate)
            )
        else:
            self.fit_ = rkhs.ridge_fit(kern, samples, targets, self.gamma)
        self.alpha_ = self.fit_.alpha
        return self

    def predict(self, X):
        """Predict targets for sequence samples."""
        if not hasattr(self, "fit_"):
            raise NotFittedError("call fit before predict")
        samples = check_sequences(X, dim=self.dim_)
        return np.array([rkhs.predict(self.fit_, z) for z in samples])

    def rkhs_norm(self) -> float:
        """Norm of the fitted functional."""
        if not hasattr(self, "fit_"):
            raise NotFittedError("call fit before rkhs_norm")
        return rkhs.rkhs_norm(self.fit_)
