"""Ordinary least squares with ANOVA and per-observation diagnostics.

The basis is restricted to the growth terms used for complexity fitting:
constant, ``n``, ``n log n`` and ``n^2``.  Columns are scaled to unit maximum
before a Householder QR factorisation, because ``n^2`` over realistic size
ranges spans ~1e13 and the raw cross-product matrix is hopeless in double
precision.  Coefficients are unscaled afterwards.

p-values come from the regularized incomplete beta function.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.linalg import solve_triangular
from scipy.special import betainc

from .errors import DiagnosticsUndefinedError, InvalidParameterError, SingularDesignError

CONST = "Const"
N = "N"
NLOGN = "NLogN"
NSQUARED = "NSquared"
TERMS = (CONST, N, NLOGN, NSQUARED)

_ALIASES = {
    "const": CONST, "constant": CONST, "1": CONST,
    "n": N, "linear": N,
    "nlogn": NLOGN, "nlgn": NLOGN, "n log n": NLOGN, "nlog": NLOGN,
    "nsquared": NSQUARED, "n^2": NSQUARED, "n2": NSQUARED, "n**2": NSQUARED,
}

# A fit whose residual norm is below this fraction of ||y|| is treated as
# exact: rounding noise would otherwise masquerade as a finite S.
EXACT_FIT_RTOL = 1e-10

LARGE_STD_RESID = 2.0


def parse_term(name: str) -> str:
    key = name.strip().lower()
    if name in TERMS:
        return name
    if key in _ALIASES:
        return _ALIASES[key]
    raise InvalidParameterError(f"unknown term {name!r}; expected one of {', '.join(TERMS)}")


@dataclass(frozen=True)
class TermSet:
    terms: tuple[str, ...] = (CONST, N, NLOGN, NSQUARED)
    log_base: float = 2.0

    def __post_init__(self):
        terms = tuple(parse_term(t) for t in self.terms)
        object.__setattr__(self, "terms", terms)
        if not terms:
            raise InvalidParameterError("term set is empty")
        if len(set(terms)) != len(terms):
            raise InvalidParameterError(f"duplicate terms in {terms}")
        if CONST in terms and terms[0] != CONST:
            raise InvalidParameterError("the constant term must come first")
        if not (self.log_base > 0 and self.log_base != 1 and math.isfinite(self.log_base)):
            raise InvalidParameterError(f"log base must be positive and != 1, got {self.log_base}")

    @classmethod
    def parse(cls, text: str, log_base: float = 2.0) -> "TermSet":
        return cls(tuple(t for t in text.split(",") if t.strip()), log_base)

    @property
    def has_constant(self) -> bool:
        return self.terms[0] == CONST

    def column(self, term: str, n: np.ndarray) -> np.ndarray:
        if term == CONST:
            return np.ones_like(n)
        if term == N:
            return n.copy()
        if term == NLOGN:
            return n * (np.log(n) / math.log(self.log_base))
        return n * n

    def design(self, n) -> np.ndarray:
        n = np.asarray(n, dtype=np.float64)
        return np.column_stack([self.column(t, n) for t in self.terms])

    def label(self, term: str) -> str:
        if term == CONST:
            return "Constant"
        if term == N:
            return "n"
        if term == NSQUARED:
            return "n^2"
        if self.log_base == 2:
            return "nlgn"
        if self.log_base == math.e:
            return "nlogn"
        return f"nlog{self.log_base:g}n"


FULL = TermSet((CONST, N, NLOGN, NSQUARED))
NLOGN_MODEL = TermSet((CONST, N, NLOGN))


def t_two_sided_p(t: float, df: int) -> float:
    """Two-sided Student-t tail probability ``2 * (1 - F_t(|t|; df))``."""
    if df is None or df < 1 or int(df) != df:
        raise InvalidParameterError(f"degrees of freedom must be a positive integer, got {df}")
    if math.isnan(t):
        return math.nan
    if math.isinf(t):
        return 0.0
    df = float(df)
    t2 = t * t
    if t2 < df:
        # df / (df + t^2) rounds towards 1 here; use the complementary tail
        return float(1.0 - betainc(0.5, df / 2.0, t2 / (df + t2)))
    return float(betainc(df / 2.0, 0.5, df / (df + t2)))


def f_upper_p(f: float, df_num: int, df_den: int) -> float:
    """Upper-tail probability of the F distribution."""
    if df_num < 1 or df_den < 1:
        raise InvalidParameterError("F degrees of freedom must be positive")
    if math.isnan(f):
        return math.nan
    if math.isinf(f):
        return 0.0
    if f <= 0:
        return 1.0
    a, b = df_num / 2.0, df_den / 2.0
    x = df_num * f
    if x < df_den:
        return float(1.0 - betainc(a, b, x / (df_den + x)))
    return float(betainc(b, a, df_den / (df_den + x)))


@dataclass(frozen=True)
class TermEstimate:
    term: str
    label: str
    coef: float
    se_coef: float
    t: float
    p: float


@dataclass(frozen=True)
class Anova:
    df_regression: int
    ss_regression: float
    ms_regression: float
    df_residual: int
    ss_residual: float
    ms_residual: float
    df_total: int
    ss_total: float
    f: float
    p: float


@dataclass
class RegressionFit:
    termset: TermSet
    n: np.ndarray
    y: np.ndarray
    estimates: list[TermEstimate]
    S: float
    r2: float
    r2_adj: float
    press: float
    r2_pred: float
    anova: Anova
    seq_ss: dict[str, float]
    fitted: np.ndarray
    se_fit: np.ndarray
    residuals: np.ndarray
    std_resid: np.ndarray
    leverage: np.ndarray
    exact: bool = False
    _by_term: dict[str, TermEstimate] = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self._by_term = {e.term: e for e in self.estimates}

    def __getitem__(self, term: str) -> TermEstimate:
        return self._by_term[parse_term(term)]

    @property
    def coef(self) -> np.ndarray:
        return np.array([e.coef for e in self.estimates])

    @property
    def large_flags(self) -> np.ndarray:
        return np.abs(self.std_resid) > LARGE_STD_RESID

    @property
    def sse(self) -> float:
        return self.anova.ss_residual

    def predict(self, n) -> np.ndarray:
        return self.termset.design(n) @ self.coef


def _scaled_qr(X: np.ndarray, termset: TermSet):
    scale = np.abs(X).max(axis=0)
    for j, s in enumerate(scale):
        if not s > 0:
            raise SingularDesignError(termset.terms[j], f"column for term {termset.terms[j]!r} is identically zero")
    Xs = X / scale
    Q, R = np.linalg.qr(Xs, mode="reduced")
    diag = np.abs(np.diag(R))
    # rank test in entry order: a collapsing pivot names the dependent term
    tol = max(X.shape) * np.finfo(float).eps * 1e3
    for j, d in enumerate(diag):
        if d <= tol * max(1.0, diag[: j + 1].max()):
            raise SingularDesignError(termset.terms[j])
    return Q, R, scale


def fit_ols(table, terms: TermSet | Sequence[str] = FULL, log_base: float | None = None) -> RegressionFit:
    """Least-squares fit of ``y`` on the growth terms of ``n``.

    ``table`` is a ResponseTable or anything with ``n`` and ``y`` arrays.
    """
    if not isinstance(terms, TermSet):
        terms = TermSet(tuple(terms), 2.0 if log_base is None else log_base)
    elif log_base is not None and log_base != terms.log_base:
        terms = TermSet(terms.terms, log_base)
    n = np.asarray(table.n, dtype=np.float64)
    y = np.asarray(table.y, dtype=np.float64)
    if n.shape != y.shape or n.ndim != 1:
        raise InvalidParameterError("n and y must be 1-d arrays of equal length")
    if not (np.all(np.isfinite(n)) and np.all(np.isfinite(y))):
        raise InvalidParameterError("n and y must be finite")
    if (NLOGN in terms.terms) and np.any(n <= 0):
        raise InvalidParameterError("n log n term needs n > 0")
    m, p = n.size, len(terms.terms)
    if m < p:
        raise SingularDesignError(terms.terms[m], f"{m} observations cannot determine {p} coefficients")
    X = terms.design(n)
    Q, R, scale = _scaled_qr(X, terms)
    df_resid = m - p
    if df_resid == 0:
        raise DiagnosticsUndefinedError(f"{m} observations and {p} terms leave no residual degrees of freedom")

    qty = Q.T @ y
    beta_s = solve_triangular(R, qty)
    beta = beta_s / scale
    fitted = Q @ qty
    resid = y - fitted
    h = np.einsum("ij,ij->i", Q, Q)
    sse = float(resid @ resid)

    y_norm = float(np.linalg.norm(y))
    exact = math.sqrt(sse) <= EXACT_FIT_RTOL * y_norm
    if exact:
        sse = 0.0
        resid = np.zeros_like(resid)
    S = math.sqrt(sse / df_resid)

    Rinv = solve_triangular(R, np.eye(p))
    se = S * np.linalg.norm(Rinv, axis=1) / scale
    if exact:
        tvals = _exact_fit_t(X, y, terms, beta)
    else:
        tvals = beta / se
    pvals = np.array([t_two_sided_p(t, df_resid) for t in tvals])

    if terms.has_constant:
        sst = float(((y - y.mean()) ** 2).sum())
        df_reg = p - 1
        seq = {t: float(qty[j] ** 2) for j, t in enumerate(terms.terms) if j > 0}
    else:
        sst = float(y @ y)
        df_reg = p
        seq = {t: float(qty[j] ** 2) for j, t in enumerate(terms.terms)}
    df_total = df_reg + df_resid
    ssr = max(sst - sse, 0.0) if exact else float(sum(seq.values()))

    mse = sse / df_resid
    if df_reg > 0:
        msr = ssr / df_reg
        if mse > 0:
            F = msr / mse
        else:
            F = math.inf if msr > 0 else math.nan
        p_F = f_upper_p(F, df_reg, df_resid)
    else:
        msr, F, p_F = math.nan, math.nan, math.nan
    anova = Anova(df_reg, ssr, msr, df_resid, sse, mse, df_total, sst, F, p_F)

    if sst > 0:
        r2 = ssr / sst
        r2_adj = 1.0 - (sse / df_resid) / (sst / df_total) if df_total > 0 else math.nan
    else:
        r2 = r2_adj = math.nan

    one_minus_h = 1.0 - h
    with np.errstate(divide="ignore", invalid="ignore"):
        press_terms = np.where(one_minus_h > 0, resid / one_minus_h, np.where(resid == 0, 0.0, np.inf))
        press = float((press_terms**2).sum())
        if S > 0:
            std_resid = np.where(one_minus_h > 0, resid / (S * np.sqrt(one_minus_h)), np.nan)
        else:
            std_resid = np.zeros_like(resid)
    r2_pred = 1.0 - press / sst if sst > 0 else math.nan
    se_fit = S * np.sqrt(h)

    estimates = [
        TermEstimate(t, terms.label(t), float(beta[j]), float(se[j]), float(tvals[j]), float(pvals[j]))
        for j, t in enumerate(terms.terms)
    ]
    return RegressionFit(
        termset=terms, n=n, y=y, estimates=estimates, S=S, r2=r2, r2_adj=r2_adj,
        press=press, r2_pred=r2_pred, anova=anova, seq_ss=seq, fitted=fitted,
        se_fit=se_fit, residuals=resid, std_resid=std_resid, leverage=h, exact=exact,
    )


def _exact_fit_t(X, y, terms: TermSet, beta) -> np.ndarray:
    """t statistics for a zero-residual fit.

    With S = 0 every standard error is zero, so a term is scored by whether
    the fit stays exact without it: dispensable terms get t = 0, necessary
    ones t = +/-inf with the sign of their coefficient.
    """
    y_norm = float(np.linalg.norm(y))
    out = np.zeros(len(terms.terms))
    for j in range(len(terms.terms)):
        keep = [k for k in range(len(terms.terms)) if k != j]
        if not keep:
            needed = y_norm > 0
        else:
            Xk = X[:, keep] / np.abs(X[:, keep]).max(axis=0)
            coef, *_ = np.linalg.lstsq(Xk, y, rcond=None)
            needed = np.linalg.norm(y - Xk @ coef) > EXACT_FIT_RTOL * y_norm
        out[j] = math.copysign(math.inf, beta[j]) if needed else 0.0
    return out


@dataclass(frozen=True)
class ResidualRow:
    obs: int
    n: float
    y: float
    fit: float
    se_fit: float
    residual: float
    std_resid: float
    flag: bool


def residual_report(fit: RegressionFit) -> list[ResidualRow]:
    """Per-observation fit table in input order (1-based ``obs``)."""
    flags = fit.large_flags
    return [
        ResidualRow(i + 1, float(fit.n[i]), float(fit.y[i]), float(fit.fitted[i]), float(fit.se_fit[i]),
                    float(fit.residuals[i]), float(fit.std_resid[i]), bool(flags[i]))
        for i in range(fit.n.size)
    ]
