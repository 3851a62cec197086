"""Plain-text regression reports in the Minitab block layout."""

from __future__ import annotations

import math

from .statfit import CONST, RegressionFit, residual_report


def _decimals_for(se: float, lo: int = 3, hi: int = 8) -> int:
    if not se > 0 or not math.isfinite(se):
        return hi
    return min(hi, max(lo, 3 - math.floor(math.log10(se))))


def _sig(x: float, digits: int = 6) -> str:
    if not math.isfinite(x):
        return str(x)
    if x == 0:
        return "0"
    return f"{x:#.{digits}g}".rstrip(".")


def _ss_decimals(sst: float) -> int:
    if not sst > 0 or not math.isfinite(sst):
        return 4
    return max(0, 5 - math.floor(math.log10(sst)))


def _p(p: float) -> str:
    return "*" if math.isnan(p) else f"{p:.3f}"


def equation(fit: RegressionFit, response: str = "y") -> str:
    parts = []
    for est in fit.estimates:
        if est.term == CONST:
            parts.append(f"{est.coef:.3g}")
            continue
        mag = f"{abs(est.coef):.6f}"
        sign = "-" if est.coef < 0 else "+"
        if not parts:
            parts.append(f"{'-' if sign == '-' else ''}{mag} {est.label}")
        else:
            parts.append(f"{sign} {mag} {est.label}")
    return f"{response} = " + " ".join(parts)


def render(fit: RegressionFit, response: str = "y", residuals: bool = False) -> str:
    labels = [e.label for e in fit.estimates if e.term != CONST]
    lines = [f"Regression Analysis: {response} versus {', '.join(labels)}", "",
             "The regression equation is", equation(fit, response), ""]

    width = max(9, *(len(e.label) for e in fit.estimates)) + 2
    lines.append(f"{'Predictor':<{width}}{'Coef':>14}{'SE Coef':>14}{'T':>9}{'P':>7}")
    for e in fit.estimates:
        d = _decimals_for(e.se_coef)
        t = f"{e.t:.2f}" if math.isfinite(e.t) else ("inf" if e.t > 0 else "-inf")
        lines.append(f"{e.label:<{width}}{e.coef:>14.{d}f}{e.se_coef:>14.{d}f}{t:>9}{_p(e.p):>7}")
    lines.append("")

    r2 = lambda v: "*" if math.isnan(v) else f"{100 * v:.1f}%"
    lines.append(f"S = {_sig(fit.S)}   R-Sq = {r2(fit.r2)}   R-Sq(adj) = {r2(fit.r2_adj)}")
    pred = "*" if math.isnan(fit.r2_pred) else f"{100 * fit.r2_pred:.2f}%"
    lines.append(f"PRESS = {_sig(fit.press)}   R-Sq(pred) = {pred}")
    lines.append("")

    a = fit.anova
    d = _ss_decimals(a.ss_total)
    ss = lambda v: f"{v:.{d}f}"
    f_text = "*" if math.isnan(a.f) else (f"{a.f:.2f}" if math.isfinite(a.f) else "inf")
    cells = [ss(a.ss_regression), ss(a.ms_regression), ss(a.ss_residual), ss(a.ms_residual), ss(a.ss_total)]
    cells += [ss(v) for v in fit.seq_ss.values()]
    w = max(16, max(len(c) for c in cells) + 2)
    fw = max(14, len(f_text) + 2)
    lines += [
        "Analysis of Variance", "",
        f"{'Source':<16}{'DF':>4}{'SS':>{w}}{'MS':>{w}}{'F':>{fw}}{'P':>7}",
        f"{'Regression':<16}{a.df_regression:>4}{cells[0]:>{w}}{cells[1]:>{w}}{f_text:>{fw}}{_p(a.p):>7}",
        f"{'Residual Error':<16}{a.df_residual:>4}{cells[2]:>{w}}{cells[3]:>{w}}",
        f"{'Total':<16}{a.df_total:>4}{cells[4]:>{w}}",
        "",
        f"{'Source':<16}{'DF':>4}{'Seq SS':>{w}}",
    ]
    for term, value in fit.seq_ss.items():
        lines.append(f"{fit.termset.label(term):<16}{1:>4}{ss(value):>{w}}")
    lines.append("")

    rows = residual_report(fit)
    shown = rows if residuals else [r for r in rows if r.flag]
    if shown:
        lines.append("Observations" if residuals else "Unusual Observations")
        lines.append(f"{'Obs':>4}{'n':>12}{response:>16}{'Fit':>16}{'SE Fit':>14}{'Residual':>14}{'St Resid':>11}")
        for r in shown:
            st = "*" if math.isnan(r.std_resid) else f"{r.std_resid:.2f}" + ("R" if r.flag else "")
            lines.append(f"{r.obs:>4}{r.n:>12.0f}{_sig(r.y):>16}{_sig(r.fit):>16}{_sig(r.se_fit, 4):>14}"
                         f"{_sig(r.residual, 4):>14}{st:>11}")
        lines.append("")
        lines.append("R denotes an observation with a large standardized residual.")
    else:
        lines.append("No observations with a large standardized residual.")
    return "\n".join(lines) + "\n"


def key_values(fit: RegressionFit) -> str:
    """Flat ``key=value`` dump with round-trip floats."""
    out = []
    for e in fit.estimates:
        out += [f"coef.{e.term}={e.coef!r}", f"se.{e.term}={e.se_coef!r}", f"t.{e.term}={e.t!r}", f"p.{e.term}={e.p!r}"]
    a = fit.anova
    out += [
        f"S={fit.S!r}", f"r2={fit.r2!r}", f"r2_adj={fit.r2_adj!r}", f"press={fit.press!r}", f"r2_pred={fit.r2_pred!r}",
        f"anova.df_regression={a.df_regression}", f"anova.ss_regression={a.ss_regression!r}",
        f"anova.ms_regression={a.ms_regression!r}", f"anova.df_residual={a.df_residual}",
        f"anova.ss_residual={a.ss_residual!r}", f"anova.ms_residual={a.ms_residual!r}",
        f"anova.df_total={a.df_total}", f"anova.ss_total={a.ss_total!r}", f"anova.F={a.f!r}", f"anova.p={a.p!r}",
    ]
    out += [f"seq_ss.{t}={v!r}" for t, v in fit.seq_ss.items()]
    for r in residual_report(fit):
        out += [f"obs.{r.obs}.fit={r.fit!r}", f"obs.{r.obs}.se_fit={r.se_fit!r}",
                f"obs.{r.obs}.residual={r.residual!r}", f"obs.{r.obs}.std_resid={r.std_resid!r}",
                f"obs.{r.obs}.large={int(r.flag)}"]
    return "\n".join(out) + "\n"


def plot_data(fits: dict[str, RegressionFit]) -> str:
    """Long-format CSV ``model,n,observed,fitted`` for external plotting."""
    lines = ["model,n,observed,fitted"]
    for name, fit in fits.items():
        for n, y, f in zip(fit.n, fit.y, fit.fitted):
            lines.append(f"{name},{n:.0f},{float(y)!r},{float(f)!r}")
    return "\n".join(lines) + "\n"
