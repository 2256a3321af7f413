"""Scikit-learn style wrapper around the adaptive-regularization fit."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .fitting import FitConfig, PointCloud, fit

__all__ = ["AdaptiveSplineRegressor"]


class AdaptiveSplineRegressor(RegressorMixin, BaseEstimator):
    """Tensor-product B-spline regressor with adaptive derivative penalties.

    Fits a spline field to scattered samples ``(X, y)`` and evaluates it with
    ``predict``. Where the training data are dense the fit is plain least
    squares; where the data thin out, curvature penalties ramp up until each
    control point is constrained as strongly as the threshold ``s_star``
    demands, and gradient penalties pin down regions with no data at all.

    Parameters
    ----------
    degree : int or tuple of int, default=3
        Spline degree, shared or per input dimension.
    controls : int or tuple of int, default=20
        Control-grid size, shared or per input dimension.
    s_star : float, default=1.0
        Regularization threshold; 0 disables all penalties.
    second_derivative, first_derivative : bool, default=True
        Which derivative penalties participate.
    solver : {"direct", "cg"}, default="direct"
        Sparse normal-equation factorization, or conjugate-gradient-type
        iterations on the stacked system.
    tol : float, default=1e-10
        Convergence tolerance of the iterative solver.
    max_iter : int or None, default=None
        Iteration cap for the iterative solver (None picks a size-based cap).
    compute_condition : bool, default=False
        Also estimate the stacked-system condition number during fit.

    Attributes
    ----------
    model_ : TensorSpline
        The fitted spline field.
    report_ : FitReport
        Column sums, adaptive strengths and solver diagnostics.
    """

    def __init__(self, degree=3, controls=20, s_star=1.0, second_derivative=True,
                 first_derivative=True, solver="direct", tol=1e-10, max_iter=None,
                 compute_condition=False):
        self.degree = degree
        self.controls = controls
        self.s_star = s_star
        self.second_derivative = second_derivative
        self.first_derivative = first_derivative
        self.solver = solver
        self.tol = tol
        self.max_iter = max_iter
        self.compute_condition = compute_condition

    def _config(self, d):
        degrees = self.degree if np.iterable(self.degree) else (self.degree,) * d
        controls = self.controls if np.iterable(self.controls) else (self.controls,) * d
        solver = {"direct": "normal-direct", "cg": "normal-iterative"}.get(
            self.solver, self.solver)
        return FitConfig(degrees=tuple(degrees), control_dims=tuple(controls),
                         s_star=self.s_star,
                         use_second_deriv=self.second_derivative,
                         use_first_deriv=self.first_derivative,
                         solver=solver, iterative_tol=self.tol,
                         iterative_max_iter=self.max_iter,
                         compute_condition=self.compute_condition)

    def fit(self, X, y):
        X = check_array(X, dtype=float)
        y = check_array(y, dtype=float, ensure_2d=False)
        if y.shape[0] != X.shape[0]:
            raise ValueError("X and y have inconsistent sample counts")
        self._y_was_1d = y.ndim == 1
        cloud = PointCloud(X, y if y.ndim == 2 else y[:, None])
        self.model_, self.report_ = fit(cloud, self._config(X.shape[1]))
        self.n_features_in_ = X.shape[1]
        return self

    def predict(self, X):
        check_is_fitted(self, "model_")
        X = check_array(X, dtype=float)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(
                f"expected {self.n_features_in_} features, got {X.shape[1]}")
        values = self.model_.eval_many(self.model_.param_from_physical(X))
        return values[:, 0] if self._y_was_1d else values
