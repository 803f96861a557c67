"""Penalized-spline regression: solver oracles, GCV, and term tests."""

from __future__ import annotations

import numpy as np
import pytest
from sklearn.base import clone

from tonelens import (
    GamSpec,
    SingularModelError,
    ToneGam,
    build_design,
    fit_gam,
    fit_penalized,
    select_lambda,
    term_significance,
)
from tonelens.gam import predict_design_rows

from conftest import GAM_CURVES, build_gam_corpus


def small_corpus(n_per_category=10, sigma=5.0, seed=0):
    return build_gam_corpus(n_per_category=n_per_category, sigma=sigma, seed=seed)


class TestBuildDesign:
    def test_column_arithmetic_four_categories(self):
        t, codes, y, labels = small_corpus()
        design = build_design(t, codes, y, category_labels=labels)
        assert design.X.shape[1] == 1 + 3 + 40
        assert design.S.shape == (44, 44)
        assert [b.name for b in design.terms[:4]] == [
            "intercept", "category[rising]", "category[dipping]", "category[flat]",
        ]
        assert [b.name for b in design.terms[4:]] == [
            "smooth[falling]", "smooth[rising]", "smooth[dipping]", "smooth[flat]",
        ]

    def test_reference_coding(self):
        t, codes, y, labels = small_corpus()
        design = build_design(t, codes, y, category_labels=labels)
        reference_rows = codes == 0
        assert np.all(design.X[reference_rows, 1:4] == 0.0)
        rows_k2 = codes == 2
        assert np.all(design.X[rows_k2, 2] == 1.0)
        assert np.all(design.X[rows_k2, 1] == 0.0)
        assert np.all(design.X[rows_k2, 3] == 0.0)

    def test_centered_blocks_sum_to_zero_over_their_category(self):
        t, codes, y, labels = small_corpus()
        design = build_design(t, codes, y, category_labels=labels)
        for k, block in enumerate(design.terms[4:]):
            rows = codes == k
            sums = design.X[rows, block.columns].sum(axis=0)
            assert np.max(np.abs(sums)) < 1e-9
            # other categories' rows stay exactly zero in this block
            assert np.all(design.X[~rows, block.columns] == 0.0)

    def test_penalty_positive_semidefinite(self):
        t, codes, y, labels = small_corpus()
        design = build_design(t, codes, y, category_labels=labels)
        rng = np.random.default_rng(8)
        for _ in range(100):
            beta = rng.normal(size=design.S.shape[0])
            assert beta @ design.S @ beta >= -1e-12

    def test_rank_deficiency_warning(self):
        # one category sampled at only 3 distinct time points
        rng = np.random.default_rng(9)
        t = np.concatenate([np.tile([0.0, 0.5, 1.0], 20), rng.uniform(0, 1, 60)])
        codes = np.concatenate([np.zeros(60, dtype=int), np.ones(60, dtype=int)])
        y = rng.normal(200, 5, 120)
        design = build_design(t, codes, y)
        assert any("0" in w and "distinct" in w for w in design.warnings)

    def test_needs_two_categories(self):
        grid = np.arange(50) / 49
        with pytest.raises(Exception):
            build_design(grid, np.zeros(50, dtype=int), np.full(50, 200.0))


class TestFitPenalized:
    def test_lambda_zero_matches_ols_oracle(self):
        rng = np.random.default_rng(10)
        for _ in range(20):
            n, p = int(rng.integers(30, 120)), int(rng.integers(3, 12))
            X = rng.normal(size=(n, p))
            y = rng.normal(size=n)
            fit = fit_penalized(X, y, np.zeros((p, p)), 0.0)
            beta = np.linalg.solve(X.T @ X, X.T @ y)
            scale = np.max(np.abs(X @ beta)) or 1.0
            assert np.max(np.abs(X @ fit.coefficients - X @ beta)) / scale < 1e-8
            assert fit.edf == pytest.approx(p, rel=1e-9)

    def test_structural_singularity_at_lambda_zero(self):
        t, codes, y, labels = small_corpus()
        design = build_design(t, codes, y, category_labels=labels)
        with pytest.raises(SingularModelError, match="positive lambda"):
            fit_penalized(design.X, design.y, design.S, 0.0)

    def test_constant_response_degenerate_flag(self):
        t, codes, _, labels = small_corpus()
        y = np.full(len(t), 137.0)
        design = build_design(t, codes, y, category_labels=labels)
        fit = fit_penalized(design.X, design.y, design.S, 1.0)
        assert fit.rss == pytest.approx(0.0, abs=1e-12)
        assert not fit.r2_defined
        assert np.isnan(fit.adjusted_r2)
        assert design.X @ fit.coefficients == pytest.approx(np.full(len(t), 137.0))

    def test_large_lambda_shrinks_to_penalty_null_space(self):
        t, codes, y, labels = small_corpus(sigma=10.0, seed=3)
        design = build_design(t, codes, y, category_labels=labels)
        lo = fit_penalized(design.X, design.y, design.S, 1e-4)
        hi = fit_penalized(design.X, design.y, design.S, 1e9)
        ones = np.ones(10) / np.sqrt(10)
        linear = np.arange(10.0) - 4.5
        linear /= np.linalg.norm(linear)
        for block in design.terms[4:]:
            beta = hi.coefficients[block.columns]
            inside = (beta @ ones) * ones + (beta @ linear) * linear
            assert np.linalg.norm(beta - inside) < 1e-3 * max(np.linalg.norm(beta), 1.0)
        assert hi.edf < lo.edf
        assert hi.edf == pytest.approx(8.0, abs=0.1)

    def test_rss_never_exceeds_tss_with_intercept(self):
        t, codes, y, labels = small_corpus(seed=5)
        design = build_design(t, codes, y, category_labels=labels)
        for lam in (1e-4, 1.0, 1e6):
            fit = fit_penalized(design.X, design.y, design.S, lam)
            assert fit.rss <= fit.tss * (1 + 1e-9)
            assert 1.0 <= fit.edf <= design.X.shape[1]

    def test_intercept_shift_invariance_at_fixed_lambda(self):
        t, codes, y, labels = small_corpus(seed=6)
        design = build_design(t, codes, y, category_labels=labels)
        shift = 37.5
        design_b = build_design(t, codes, y + shift, category_labels=labels)
        a = fit_penalized(design.X, design.y, design.S, 0.1)
        b = fit_penalized(design_b.X, design_b.y, design_b.S, 0.1)
        assert b.coefficients[0] - a.coefficients[0] == pytest.approx(shift, rel=1e-9)
        assert b.coefficients[1:] == pytest.approx(a.coefficients[1:], abs=1e-8)
        assert b.edf == pytest.approx(a.edf, rel=1e-12)
        assert b.rss == pytest.approx(a.rss, rel=1e-9)
        assert b.adjusted_r2 == pytest.approx(a.adjusted_r2, rel=1e-9)
        fitted_a = design.X @ a.coefficients
        fitted_b = design_b.X @ b.coefficients
        assert fitted_b - fitted_a == pytest.approx(np.full(len(t), shift), rel=1e-9)

    def test_gcv_selection_shift_invariant(self):
        t, codes, y, labels = small_corpus(seed=13)
        design = build_design(t, codes, y, category_labels=labels)
        design_b = build_design(t, codes, y + 11.0, category_labels=labels)
        a = select_lambda(design.X, design.y, design.S)
        b = select_lambda(design_b.X, design_b.y, design_b.S)
        assert a.lam == b.lam


class TestSelectLambda:
    def test_edf_non_increasing_over_grid(self):
        t, codes, y, labels = small_corpus(seed=7)
        design = build_design(t, codes, y, category_labels=labels)
        edfs = [
            fit_penalized(design.X, design.y, design.S, lam).edf
            for lam in GamSpec().lambda_grid
        ]
        assert all(a >= b - 1e-9 for a, b in zip(edfs, edfs[1:]))

    def test_argmin_matches_exhaustive_grid(self):
        t, codes, y, labels = small_corpus(seed=8)
        design = build_design(t, codes, y, category_labels=labels)
        best = select_lambda(design.X, design.y, design.S)
        gcvs = {
            lam: fit_penalized(design.X, design.y, design.S, lam).gcv
            for lam in GamSpec().lambda_grid
        }
        assert best.gcv == pytest.approx(min(gcvs.values()), rel=1e-12)
        winners = [lam for lam, g in gcvs.items() if g == pytest.approx(best.gcv, rel=1e-12)]
        assert best.lam == max(winners)  # ties break toward the smoother fit

    def test_noise_free_response_prefers_smallest_lambda(self):
        t, codes, _, labels = small_corpus()
        grid_truth = np.select(
            [codes == i for i in range(4)],
            [GAM_CURVES[label](t) for label in labels],
        )
        design = build_design(t, codes, grid_truth, category_labels=labels)
        best = select_lambda(design.X, design.y, design.S)
        assert best.lam == pytest.approx(GamSpec().lambda_min)

    def test_gcv_hand_arithmetic_on_five_observations(self):
        X = np.column_stack([np.ones(5), np.arange(5.0)])
        y = np.array([1.0, 1.5, 1.2, 2.0, 2.6])
        S = np.diag([0.0, 1.0])
        lam = 2.0
        fit = fit_penalized(X, y, S, lam)
        M = np.linalg.inv(X.T @ X + lam * S)
        beta = M @ X.T @ y
        rss = float(np.sum((y - X @ beta) ** 2))
        edf = float(np.trace(X @ M @ X.T))
        expected = 5 * rss / (5 - edf) ** 2
        assert fit.gcv == pytest.approx(expected, rel=1e-12)
        assert fit.edf == pytest.approx(edf, rel=1e-12)


class TestTermSignificance:
    def test_null_dummy_calibrated_under_montecarlo(self):
        # two categories with identical flat truth: the contrast is a true null
        rng = np.random.default_rng(123)
        n_tok, n_pts = 25, 50
        grid = np.tile(np.arange(n_pts) / (n_pts - 1), 2 * n_tok)
        codes = np.repeat([0, 1], n_tok * n_pts)
        design0 = build_design(grid, codes, np.full(len(grid), 200.0), category_labels=["a", "b"])
        lam = 1.0
        rejections = 0
        n_sims = 1000
        for _ in range(n_sims):
            y = 200.0 + rng.normal(0, 5.0, len(grid))
            fit = fit_penalized(design0.X, y, design0.S, lam)
            tests = term_significance(fit, design0)
            p = next(t.p for t in tests if t.name == "category[b]")
            if p < 0.001:
                rejections += 1
        assert rejections < 0.01 * n_sims

    def test_fifty_hz_effect_detected(self):
        rng = np.random.default_rng(77)
        n_tok, n_pts = 100, 50
        grid = np.tile(np.arange(n_pts) / (n_pts - 1), 2 * n_tok)
        codes = np.repeat([0, 1], n_tok * n_pts)
        y = np.where(codes == 1, 250.0, 200.0) + rng.normal(0, 5.0, len(grid))
        fit, design = fit_gam(grid, codes, y, category_labels=["base", "shifted"])
        p = next(t.p for t in fit.term_tests if t.name == "category[shifted]")
        assert p < 0.001

    def test_nonconstant_smooths_detected(self):
        t, codes, y, labels = small_corpus(n_per_category=40, seed=20)
        fit, design = fit_gam(t, codes, y, category_labels=labels)
        for label in ("falling", "rising", "dipping"):
            p = next(tt.p for tt in fit.term_tests if tt.name == f"smooth[{label}]")
            assert p < 0.001


class TestToneGamEstimator:
    def test_fit_predict_recovers_truth(self):
        t, codes, y, labels = small_corpus(n_per_category=40, seed=30)
        X = np.column_stack([t, np.array(labels, dtype=object)[codes]])
        model = ToneGam().fit(X, y)
        grid = np.arange(50) / 49
        for label, curve in GAM_CURVES.items():
            pred = model.category_curve(label)
            rmse = np.sqrt(np.mean((pred - curve(grid)) ** 2))
            assert rmse < 3.0
        assert 0 < model.edf_ < 44
        assert model.adjusted_r2_ == pytest.approx(
            1 - 25.0 / np.var(y), abs=0.05
        )

    def test_sklearn_protocol(self):
        model = ToneGam(basis_dim=8, lam=0.5)
        cloned = clone(model)
        assert cloned.get_params() == model.get_params()
        t, codes, y, labels = small_corpus(n_per_category=5, seed=31)
        X = np.column_stack([t, codes]).astype(object)
        fitted = cloned.fit(X, y)
        assert fitted.lambda_ == 0.5
        assert fitted.predict(X).shape == y.shape
        # RegressorMixin score = R^2 of predictions
        assert 0.5 < fitted.score(X, y) <= 1.0

    def test_category_labels_sorted_fixes_reference(self):
        t, codes, y, labels = small_corpus(n_per_category=5, seed=32)
        X = np.column_stack([t, np.array(labels, dtype=object)[codes]])
        model = ToneGam(lam=1.0).fit(X, y)
        assert model.category_labels_ == sorted(labels)
