from __future__ import annotations

import math
from types import SimpleNamespace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from empirical_o.errors import DiagnosticsUndefinedError, InvalidParameterError, SingularDesignError
from empirical_o.harness import ResponseTable
from empirical_o.published import load_column
from empirical_o.statfit import (CONST, FULL, N, NLOGN, NLOGN_MODEL, NSQUARED, TermSet, f_upper_p, fit_ols,
                                 residual_report, t_two_sided_p)
from oracles import ols_oracle, rel_close, t_p_oracle

TERM_CHOICES = [(CONST, N), (CONST, N, NLOGN), (CONST, N, NLOGN, NSQUARED), (CONST, NLOGN),
                (CONST, N, NSQUARED), (N, NLOGN), (N, NLOGN, NSQUARED)]


def random_instance(rng: np.random.Generator):
    terms = TERM_CHOICES[rng.integers(len(TERM_CHOICES))]
    p = len(terms)
    m = int(rng.integers(p + 2, 13))
    ns = np.sort(rng.choice(np.arange(16, 200_000), size=m, replace=False)).astype(float)
    ts = TermSet(terms)
    X = ts.design(ns)
    # every term contributes a comparable amount at the largest n
    beta = rng.uniform(0.5, 2.0, p) * rng.choice([-1, 1], p) / np.abs(X[-1])
    y = X @ beta
    y = y - min(0.0, y.min()) + 1.0
    y = y + rng.normal(0, 1e-3 * np.abs(y).max(), m)
    return ts, ResponseTable.from_arrays(ns, np.abs(y))


@pytest.fixture(scope="module")
def instances():
    rng = np.random.default_rng(12345)
    return [random_instance(rng) for _ in range(200)]


def test_coefficients_match_oracle(instances):
    for ts, table in instances:
        fit = fit_ols(table, ts)
        ref = ols_oracle(table.n, table.y, ts.terms)
        for est, b, se in zip(fit.estimates, ref["beta"], ref["se"]):
            assert rel_close(est.coef, b, 1e-8), (ts.terms, est.term, est.coef, b)
            assert rel_close(est.se_coef, se, 1e-8)
        assert rel_close(fit.sse, ref["sse"], 1e-8)
        assert rel_close(fit.S, ref["S"], 1e-8)


def test_decomposition_invariants(instances):
    for ts, table in instances:
        fit = fit_ols(table, ts)
        a = fit.anova
        assert rel_close(a.ss_total, a.ss_regression + a.ss_residual, 1e-9)
        assert rel_close(sum(fit.seq_ss.values()), a.ss_regression, 1e-9)
        assert fit.leverage.sum() == pytest.approx(len(ts.terms), rel=1e-9)
        assert np.all((fit.leverage > 0) & (fit.leverage <= 1 + 1e-12))
        assert fit.press >= fit.sse * (1 - 1e-12)
        assert np.array_equal(fit.large_flags, np.abs(fit.std_resid) > 2)
        X = ts.design(table.n)
        beta = np.array([e.coef for e in fit.estimates])
        assert np.allclose(fit.fitted, X @ beta, rtol=1e-9, atol=1e-9 * np.abs(table.y).max())
        e = fit.residuals
        bound = 1e-8 * np.linalg.norm(X, axis=0) * np.linalg.norm(table.y)
        assert np.all(np.abs(X.T @ e) <= bound)


def test_log_base_invariance(instances):
    for ts, table in instances:
        if NLOGN not in ts.terms:
            continue
        a = fit_ols(table, ts)
        b = fit_ols(table, TermSet(ts.terms, math.e))
        for ea, eb in zip(a.estimates, b.estimates):
            assert rel_close(ea.t, eb.t, 1e-9, 1e-12)
            assert rel_close(ea.p, eb.p, 1e-9, 1e-15)
        assert rel_close(a.S, b.S, 1e-9)
        assert rel_close(a.r2, b.r2, 1e-9)
        assert rel_close(a.anova.f, b.anova.f, 1e-9)
        assert np.allclose(a.fitted, b.fitted, rtol=1e-9)
        # only the NLogN coefficient moves, by the ratio of logs
        assert rel_close(b[NLOGN].coef, a[NLOGN].coef * math.log2(math.e), 1e-9)


def test_row_permutation_invariance():
    t = load_column("table1.csv", "500")
    fit = fit_ols(t, FULL)
    perm = np.random.default_rng(0).permutation(len(t))
    fit2 = fit_ols(SimpleNamespace(n=t.n[perm], y=t.y[perm]), FULL)
    assert rel_close(fit.S, fit2.S, 1e-9)
    assert rel_close(fit.anova.f, fit2.anova.f, 1e-7)
    for k in fit.seq_ss:
        assert rel_close(fit.seq_ss[k], fit2.seq_ss[k], 1e-7)


def test_term_order_changes_seq_ss():
    t = load_column("table1.csv", "500")
    a = fit_ols(t, TermSet((CONST, N, NLOGN, NSQUARED)))
    b = fit_ols(t, TermSet((CONST, NSQUARED, NLOGN, N)))
    assert rel_close(a.S, b.S, 1e-9)
    assert not rel_close(a.seq_ss[N], b.seq_ss[N], 1e-3)


def test_table_2a_anchor_values():
    fit = fit_ols(load_column("table1.csv", "500"), FULL)
    assert f"{fit.S:.7f}" == "0.0876502"
    assert abs(fit.anova.f - 720573.28) / 720573.28 < 1e-3
    assert [f"{e.t:.2f}" for e in fit.estimates] == ["-1.48", "2.22", "-2.23", "62.14"]
    assert [f"{v:.1f}" for v in fit.seq_ss.values()] == ["15770.1", "807.8", "29.7"]


def test_table_4a_residuals():
    fit = fit_ols(load_column("table3.csv", "1"), NLOGN_MODEL)
    rows = residual_report(fit)
    assert f"{rows[0].std_resid:.2f}" == "-2.22" and rows[0].flag
    assert f"{rows[9].std_resid:.2f}" == "1.75" and not rows[9].flag
    assert f"{fit.press:.7f}" == "0.0164288"
    assert f"{100 * fit.r2_pred:.2f}" == "99.86"


def test_table_5_obs_6():
    fit = fit_ols(load_column("table5.csv", "T"), FULL)
    row = residual_report(fit)[5]
    assert f"{row.residual:.4f}" == "0.0396"
    assert f"{row.std_resid:.2f}" == "1.87"
    # printed 34.79; the table's inputs carry 4 decimals, so one unit of slack
    assert abs(fit[NSQUARED].t - 34.79) <= 0.01 * (1 + 1e-9)


def test_exact_linear_fit():
    t = ResponseTable.from_arrays([1, 2, 3, 4, 5], [2, 4, 6, 8, 10])
    fit = fit_ols(t, TermSet((CONST, N)))
    assert fit.coef == pytest.approx([0, 2], abs=1e-12)
    assert fit.sse == pytest.approx(0, abs=1e-20)
    assert fit.r2 == 1.0
    assert not any(r.flag for r in residual_report(fit))
    assert all(r.residual == pytest.approx(0, abs=1e-12) for r in residual_report(fit))


def test_zero_df_rejected():
    t = ResponseTable.from_arrays([1, 2, 3, 4], [1, 3, 2, 5])
    with pytest.raises(DiagnosticsUndefinedError):
        fit_ols(t, FULL)


def test_too_few_rows_rejected():
    t = ResponseTable.from_arrays([1, 2, 3], [1, 3, 2])
    with pytest.raises(SingularDesignError):
        fit_ols(t, FULL)


def test_singular_design_names_term():
    constant_n = SimpleNamespace(n=[5.0] * 6, y=[1, 2, 3, 4, 5, 6])
    with pytest.raises(SingularDesignError) as info:
        fit_ols(constant_n, TermSet((CONST, N)))
    assert info.value.term == N
    with pytest.raises(InvalidParameterError):
        TermSet((CONST, N, N))


def test_singular_design_at_n_equal_one():
    # n log n vanishes at n = 1, so with n in {1, 2} only, Const, N and NLogN are collinear
    t = ResponseTable.from_arrays([1, 2], [1, 2])
    with pytest.raises(SingularDesignError):
        fit_ols(t, NLOGN_MODEL)


@pytest.mark.parametrize("t, df, printed", [(2.22, 6, "0.068"), (-12.74, 7, "0.000"), (62.14, 6, "0.000"),
                                            (-1.48, 6, "0.189")])
def test_t_p_printed(t, df, printed):
    assert f"{t_two_sided_p(t, df):.3f}" == printed


def test_t_p_symmetry_and_errors():
    assert t_two_sided_p(0.0, 5) == 1.0
    assert t_two_sided_p(math.inf, 5) == 0.0
    with pytest.raises(InvalidParameterError):
        t_two_sided_p(1.0, 0)


@given(t=st.floats(-40, 40), df=st.integers(1, 60))
@settings(max_examples=150, deadline=None)
def test_t_p_against_quadrature(t, df):
    assert abs(t_two_sided_p(t, df) - t_p_oracle(t, df)) < 1e-10


def test_f_p_matches_t_p_for_one_df():
    for t in (0.3, 1.7, 4.0):
        assert f_upper_p(t * t, 1, 9) == pytest.approx(t_two_sided_p(t, 9), rel=1e-12)


def test_termset_parsing():
    assert TermSet.parse("Const,n,nlogn,n^2").terms == FULL.terms
    with pytest.raises(InvalidParameterError):
        TermSet.parse("N,Const")
    with pytest.raises(InvalidParameterError):
        TermSet.parse("Const,cubic")
    with pytest.raises(InvalidParameterError):
        TermSet(FULL.terms, 1.0)
    assert TermSet(FULL.terms, 2).label(NLOGN) == "nlgn"
    assert TermSet(FULL.terms, math.e).label(NLOGN) == "nlogn"
