"""Penalized B-spline regression with a categorical fixed effect.

The model is f0 ~ category + per-category smooth of normalized time:
an intercept, reference-coded category contrasts, and one B-spline smooth
block per category. Each smooth block is column-centered over its own
category's rows (a sum-to-zero identifiability constraint), its roughness
is penalized by a second-difference penalty, and one shared smoothing
parameter is selected by generalized cross-validation over a geometric
grid.

Because a clamped B-spline basis is a partition of unity, a centered block
maps the all-ones coefficient vector to zero, and the difference penalty
does too; the penalized normal matrix therefore carries one structural
null direction per block at every lambda. The solver factorizes the
symmetric system by eigendecomposition and pseudo-inverts those directions;
the system is always consistent there, so fitted values, rss, and edf are
unique and the reported coefficients are the minimum-norm representative.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy import stats
from sklearn.base import BaseEstimator, RegressorMixin

from .errors import ParameterError, SingularModelError
from .splines import bspline_design, difference_penalty, make_knots

LAMBDA_MIN = 1e-4
LAMBDA_MAX = 1e6
LAMBDA_STEPS = 41


@dataclass
class GamSpec:
    """Structural choices for the model; defaults are the toolkit's."""

    basis_dim: int = 10
    spline_degree: int = 3
    penalty_order: int = 2
    lambda_min: float = LAMBDA_MIN
    lambda_max: float = LAMBDA_MAX
    lambda_steps: int = LAMBDA_STEPS

    def __post_init__(self) -> None:
        if self.basis_dim <= self.spline_degree + 1:
            raise ParameterError("basis_dim must exceed spline_degree + 1")
        if not (0 < self.lambda_min < self.lambda_max):
            raise ParameterError("need 0 < lambda_min < lambda_max")
        if self.lambda_steps < 1:
            raise ParameterError("lambda_steps must be >= 1")

    @property
    def lambda_grid(self) -> np.ndarray:
        return np.geomspace(self.lambda_min, self.lambda_max, self.lambda_steps)


@dataclass
class TermBlock:
    """Column range and kind of one model term."""

    name: str
    kind: str  # "parametric" | "smooth"
    columns: slice


@dataclass
class Design:
    """Assembled design matrix, response, penalty, and term map."""

    X: np.ndarray
    y: np.ndarray
    S: np.ndarray
    terms: list[TermBlock]
    category_labels: list[str]
    centers: np.ndarray  # (n_categories, basis_dim) column-centering offsets
    spec: GamSpec
    warnings: list[str] = field(default_factory=list)


@dataclass
class TermTest:
    name: str
    kind: str
    statistic: float
    df: float
    p: float
    testable: bool = True


@dataclass
class GamFit:
    """One penalized fit: coefficients, complexity, and fit quality.

    ``cov_unscaled`` (the pseudo-inverse of the penalized normal matrix)
    and ``col_edf`` (per-column effective degrees of freedom) are solver
    byproducts consumed by term significance tests.
    """

    coefficients: np.ndarray
    lam: float
    edf: float
    rss: float
    tss: float
    adjusted_r2: float
    r2_defined: bool
    n_obs: int
    gcv: float
    cov_unscaled: np.ndarray
    col_edf: np.ndarray
    term_tests: list[TermTest] = field(default_factory=list)


def build_design(
    t: np.ndarray,
    categories: np.ndarray,
    y: np.ndarray,
    spec: Optional[GamSpec] = None,
    category_labels: Optional[Sequence[str]] = None,
) -> Design:
    """Build the design matrix, response, and block-diagonal penalty.

    ``t`` is normalized time in [0, 1]; ``categories`` are integer codes
    0..K-1 (reference category is code 0). Columns are: intercept, K-1
    reference-coded dummies, then one basis_dim-wide smooth block per
    category, each block column-centered over its category's rows. A
    category with fewer distinct time points than basis_dim gets a
    rank-deficiency warning attached to the design.
    """
    if spec is None:
        spec = GamSpec()
    t = np.asarray(t, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    categories = np.asarray(categories, dtype=np.int64)
    if not (len(t) == len(categories) == len(y)):
        raise ParameterError("t, categories, and y must have equal lengths")
    if np.any(np.isnan(y)) or np.any(np.isnan(t)):
        raise ParameterError("rows with missing response or time must be dropped first")
    codes = np.unique(categories)
    n_cat = len(codes)
    if n_cat < 2:
        raise ParameterError(f"need at least 2 categories, got {n_cat}")
    if not np.array_equal(codes, np.arange(n_cat)):
        raise ParameterError("category codes must be 0..K-1")
    if category_labels is None:
        category_labels = [str(c) for c in codes]
    elif len(category_labels) != n_cat:
        raise ParameterError("category_labels length must match category count")

    n = len(y)
    bdim = spec.basis_dim
    p = 1 + (n_cat - 1) + n_cat * bdim
    knots = make_knots(bdim, spec.spline_degree)
    basis = bspline_design(t, knots, spec.spline_degree)

    X = np.zeros((n, p))
    X[:, 0] = 1.0
    terms = [TermBlock(name="intercept", kind="parametric", columns=slice(0, 1))]
    for k in range(1, n_cat):
        X[:, k] = categories == k
        terms.append(
            TermBlock(
                name=f"category[{category_labels[k]}]",
                kind="parametric",
                columns=slice(k, k + 1),
            )
        )

    S = np.zeros((p, p))
    block_penalty = difference_penalty(bdim, spec.penalty_order)
    centers = np.zeros((n_cat, bdim))
    warnings = []
    offset = n_cat  # first smooth column
    for k in range(n_cat):
        cols = slice(offset + k * bdim, offset + (k + 1) * bdim)
        rows = categories == k
        centers[k] = basis[rows].mean(axis=0)
        X[rows, cols] = basis[rows] - centers[k]
        S[cols, cols] = block_penalty
        terms.append(
            TermBlock(name=f"smooth[{category_labels[k]}]", kind="smooth", columns=cols)
        )
        if len(np.unique(t[rows])) < bdim:
            warnings.append(
                f"category {category_labels[k]} has fewer than {bdim} distinct "
                "time points; smooth block is rank-deficient"
            )

    return Design(
        X=X,
        y=y,
        S=S,
        terms=terms,
        category_labels=list(category_labels),
        centers=centers,
        spec=spec,
        warnings=warnings,
    )


def _pseudo_solve(M: np.ndarray) -> tuple[np.ndarray, int]:
    """Symmetric pseudo-inverse via eigendecomposition; returns (M+, rank)."""
    w, v = np.linalg.eigh(M)
    cutoff = np.max(np.abs(w)) * M.shape[0] * np.finfo(np.float64).eps if len(w) else 0.0
    keep = w > cutoff
    inv_w = np.zeros_like(w)
    inv_w[keep] = 1.0 / w[keep]
    return (v * inv_w) @ v.T, int(keep.sum())


def fit_penalized(X: np.ndarray, y: np.ndarray, S: np.ndarray, lam: float) -> GamFit:
    """Solve (X'X + lam*S) beta = X'y and report fit statistics.

    At lam = 0 a rank-deficient normal matrix raises
    :class:`SingularModelError`; at lam > 0 the structural sum-to-zero
    null directions are pseudo-inverted (see module docstring).
    """
    if lam < 0:
        raise ParameterError(f"lambda must be >= 0, got {lam}")
    n, p = X.shape
    if len(y) != n:
        raise ParameterError("design rows must equal response length")
    A = X.T @ X
    M = A + lam * S
    M_inv, rank = _pseudo_solve(M)
    if lam == 0 and rank < p:
        raise SingularModelError(
            "normal matrix is singular at lambda = 0; use a positive lambda"
        )
    beta = M_inv @ (X.T @ y)
    fitted = X @ beta
    residuals = y - fitted
    rss = float(residuals @ residuals)
    tss = float(np.sum((y - y.mean()) ** 2))
    col_edf = np.einsum("ij,ji->i", M_inv, A)
    edf = float(col_edf.sum())
    r2_defined = tss > 0
    if r2_defined and n - edf > 0:
        adjusted_r2 = 1.0 - (rss / (n - edf)) / (tss / (n - 1))
    else:
        adjusted_r2 = float("nan")
    gcv = n * rss / (n - edf) ** 2 if n - edf > 0 else float("inf")
    return GamFit(
        coefficients=beta,
        lam=float(lam),
        edf=edf,
        rss=rss,
        tss=tss,
        adjusted_r2=adjusted_r2,
        r2_defined=r2_defined,
        n_obs=n,
        gcv=gcv,
        cov_unscaled=M_inv,
        col_edf=col_edf,
    )


def select_lambda(
    X: np.ndarray, y: np.ndarray, S: np.ndarray, spec: Optional[GamSpec] = None
) -> GamFit:
    """Pick the grid lambda minimizing GCV = n*rss/(n-edf)^2.

    Ties break toward the larger (smoother) lambda. Raises
    :class:`SingularModelError` only if every grid point fails.
    """
    if spec is None:
        spec = GamSpec()
    grid = spec.lambda_grid
    best: Optional[GamFit] = None
    failures = 0
    for lam in grid:
        try:
            fit = fit_penalized(X, y, S, lam)
        except SingularModelError:
            failures += 1
            continue
        if best is None or fit.gcv <= best.gcv:
            best = fit
    if best is None:
        raise SingularModelError(f"all {failures} lambda grid points were singular")
    return best


def term_significance(fit: GamFit, design: Design) -> list[TermTest]:
    """Approximate Wald tests for every parametric and smooth term.

    Parametric terms use t = beta/se with n - edf degrees of freedom
    (two-sided); each smooth block uses beta' V^-1 beta against a
    chi-square with the block's edf rounded up (upper tail), with V the
    scaled pseudo-covariance. These are approximations, comparable across
    runs at the reject/non-reject level rather than digit-for-digit.
    """
    n = fit.n_obs
    resid_df = n - fit.edf
    if resid_df <= 0:
        raise ParameterError("residual degrees of freedom must be positive")
    sigma2 = fit.rss / resid_df
    V = sigma2 * fit.cov_unscaled
    tests: list[TermTest] = []
    for term in design.terms:
        cols = term.columns
        beta = fit.coefficients[cols]
        if term.kind == "parametric":
            se = float(np.sqrt(V[cols.start, cols.start]))
            if se == 0 or not np.isfinite(se):
                tests.append(TermTest(term.name, term.kind, float("nan"), resid_df,
                                      float("nan"), testable=False))
                continue
            stat = float(beta[0] / se)
            p = 2.0 * float(stats.t.sf(abs(stat), resid_df))
            tests.append(TermTest(term.name, term.kind, stat, resid_df, p))
        else:
            V_bb = V[cols, cols]
            V_inv, rank = _pseudo_solve(V_bb)
            if rank == 0:
                tests.append(TermTest(term.name, term.kind, float("nan"), 0.0,
                                      float("nan"), testable=False))
                continue
            stat = float(beta @ V_inv @ beta)
            df = int(np.ceil(max(fit.col_edf[cols].sum(), 1e-9)))
            p = float(stats.chi2.sf(stat, df))
            tests.append(TermTest(term.name, term.kind, stat, df, p))
    return tests


def fit_gam(
    t: np.ndarray,
    categories: np.ndarray,
    y: np.ndarray,
    spec: Optional[GamSpec] = None,
    category_labels: Optional[Sequence[str]] = None,
    lam: Optional[float] = None,
) -> tuple[GamFit, Design]:
    """Build the design, select (or fix) lambda, and attach term tests."""
    design = build_design(t, categories, y, spec=spec, category_labels=category_labels)
    if lam is not None:
        fit = fit_penalized(design.X, design.y, design.S, lam)
    else:
        fit = select_lambda(design.X, design.y, design.S, design.spec)
    fit.term_tests = term_significance(fit, design)
    return fit, design


def predict_design_rows(
    design: Design, t: np.ndarray, categories: np.ndarray
) -> np.ndarray:
    """Design rows for new points, reusing the training centering offsets."""
    t = np.asarray(t, dtype=np.float64)
    categories = np.asarray(categories, dtype=np.int64)
    n_cat = len(design.category_labels)
    if np.any((categories < 0) | (categories >= n_cat)):
        raise ParameterError("unknown category code in prediction input")
    bdim = design.spec.basis_dim
    knots = make_knots(bdim, design.spec.spline_degree)
    basis = bspline_design(t, knots, design.spec.spline_degree)
    X = np.zeros((len(t), design.X.shape[1]))
    X[:, 0] = 1.0
    for k in range(1, n_cat):
        X[:, k] = categories == k
    offset = n_cat
    for k in range(n_cat):
        rows = categories == k
        cols = slice(offset + k * bdim, offset + (k + 1) * bdim)
        X[rows, cols] = basis[rows] - design.centers[k]
    return X


class ToneGam(BaseEstimator, RegressorMixin):
    """Estimator API over the penalized categorical-smooth regression.

    Parameters mirror :class:`GamSpec`; ``lam`` fixes the smoothing
    parameter and skips GCV selection when given. ``fit`` expects
    ``X[:, 0]`` = normalized time in [0, 1] and ``X[:, 1]`` = category
    (codes or labels); ``y`` = F0 in Hz.
    """

    def __init__(
        self,
        basis_dim: int = 10,
        spline_degree: int = 3,
        penalty_order: int = 2,
        lambda_min: float = LAMBDA_MIN,
        lambda_max: float = LAMBDA_MAX,
        lambda_steps: int = LAMBDA_STEPS,
        lam: Optional[float] = None,
    ):
        self.basis_dim = basis_dim
        self.spline_degree = spline_degree
        self.penalty_order = penalty_order
        self.lambda_min = lambda_min
        self.lambda_max = lambda_max
        self.lambda_steps = lambda_steps
        self.lam = lam

    def _spec(self) -> GamSpec:
        return GamSpec(
            basis_dim=self.basis_dim,
            spline_degree=self.spline_degree,
            penalty_order=self.penalty_order,
            lambda_min=self.lambda_min,
            lambda_max=self.lambda_max,
            lambda_steps=self.lambda_steps,
        )

    def fit(self, X, y):
        X = np.asarray(X)
        if X.ndim != 2 or X.shape[1] != 2:
            raise ParameterError("X must be (n, 2): time and category")
        t = X[:, 0].astype(np.float64)
        raw_cat = X[:, 1]
        labels = sorted({str(c) for c in raw_cat})
        code_of = {label: i for i, label in enumerate(labels)}
        codes = np.array([code_of[str(c)] for c in raw_cat], dtype=np.int64)
        started = time.perf_counter()
        fit, design = fit_gam(
            t, codes, np.asarray(y, dtype=np.float64),
            spec=self._spec(), category_labels=labels, lam=self.lam,
        )
        self.fit_seconds_ = time.perf_counter() - started
        self.design_ = design
        self.result_ = fit
        self.coef_ = fit.coefficients
        self.lambda_ = fit.lam
        self.edf_ = fit.edf
        self.adjusted_r2_ = fit.adjusted_r2
        self.rss_ = fit.rss
        self.tss_ = fit.tss
        self.n_obs_ = fit.n_obs
        self.gcv_ = fit.gcv
        self.terms_ = fit.term_tests
        self.category_labels_ = labels
        self.warnings_ = design.warnings
        return self

    def predict(self, X):
        X = np.asarray(X)
        t = X[:, 0].astype(np.float64)
        code_of = {label: i for i, label in enumerate(self.category_labels_)}
        codes = np.array([code_of[str(c)] for c in X[:, 1]], dtype=np.int64)
        rows = predict_design_rows(self.design_, t, codes)
        return rows @ self.coef_

    def category_curve(self, label: str, n_points: int = 50) -> np.ndarray:
        """Fitted F0 curve for one category over an even time grid."""
        grid = np.arange(n_points) / (n_points - 1)
        X = np.column_stack([grid, np.full(n_points, label, dtype=object)])
        return self.predict(X)
