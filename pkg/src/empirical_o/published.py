"""Bundled regression fixtures and printed-precision comparison.

Each fixture names an input column from a bundled CSV and lists statistics as
they were printed (strings).  A computed value matches when it lies within one
unit of the last printed digit; F statistics may alternatively match to 1e-3
relative because they are printed with many integer digits.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from decimal import Decimal
from functools import lru_cache
from importlib import resources

from .errors import EmpiricalOError
from .harness import ResponseTable
from .statfit import TermSet, fit_ols, residual_report
from .verdict import Label, SelectionPolicy, classify, detect_pseudo_linear

F_REL_TOL = 1e-3
MISSING = "***"


class UnknownFixtureError(EmpiricalOError):
    pass


@lru_cache(maxsize=None)
def _expected() -> dict:
    text = resources.files(__package__).joinpath("fixtures").joinpath("expected.json").read_text(encoding="utf-8")
    return json.loads(text)


def fixture_ids() -> list[str]:
    return list(_expected())


def fixture(fixture_id: str) -> dict:
    try:
        return _expected()[fixture_id]
    except KeyError:
        raise UnknownFixtureError(f"unknown fixture {fixture_id!r}; known: {', '.join(fixture_ids())}") from None


def raw_csv(name: str) -> str:
    return resources.files(__package__).joinpath("fixtures").joinpath(name).read_text(encoding="utf-8")


def load_column(name: str, column: str) -> ResponseTable:
    """One column of a bundled wide CSV; ``***`` cells are skipped."""
    reader = csv.DictReader(io.StringIO(raw_csv(name)))
    ns, ys = [], []
    for row in reader:
        cell = row[column].strip()
        if cell == MISSING:
            continue
        ns.append(float(row[reader.fieldnames[0]]))
        ys.append(float(cell))
    return ResponseTable.from_arrays(ns, ys)


def decimals(printed: str) -> int:
    exp = Decimal(printed).as_tuple().exponent
    return max(0, -exp)


@dataclass
class Comparison:
    name: str
    printed: str
    computed: float
    passed: bool
    note: str = ""

    def line(self) -> str:
        mark = "ok  " if self.passed else "FAIL"
        extra = f"  ({self.note})" if self.note else ""
        return f"  {mark} {self.name:<32s} printed={self.printed:<14s} computed={self.computed!r}{extra}"


def compare_printed(name: str, printed: str, computed: float, rel_fallback: float | None = None) -> Comparison:
    value = float(printed)
    unit = 10.0 ** -decimals(printed)
    if not math.isfinite(computed):
        return Comparison(name, printed, computed, False, "non-finite")
    diff = abs(computed - value)
    # slack for binary representation of the printed decimal
    if diff <= unit * (1 + 1e-9):
        return Comparison(name, printed, computed, True)
    if rel_fallback is not None and value != 0 and diff / abs(value) <= rel_fallback:
        return Comparison(name, printed, computed, True, f"within {rel_fallback:g} relative")
    return Comparison(name, printed, computed, False, f"off by {diff / unit:.3g} units")


def compare_exact(name: str, printed: str, computed) -> Comparison:
    return Comparison(name, printed, float(computed), str(computed) == printed)


@dataclass
class FixtureResult:
    fixture_id: str
    title: str
    comparisons: list[Comparison] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.comparisons)

    @property
    def failures(self) -> list[Comparison]:
        return [c for c in self.comparisons if not c.passed]

    def lines(self, verbose: bool = True) -> list[str]:
        status = "PASS" if self.passed else "FAIL"
        n_fail = len(self.failures)
        out = [f"{status} {self.fixture_id}: {len(self.comparisons)} values compared, {n_fail} mismatched  [{self.title}]"]
        for c in self.comparisons:
            if verbose or not c.passed:
                out.append(c.line())
        return out


def column_half_units(name: str, column: str) -> list[float]:
    """Half a unit in the last printed digit of every present cell."""
    reader = csv.DictReader(io.StringIO(raw_csv(name)))
    return [0.5 * 10.0 ** -decimals(row[column].strip()) for row in reader if row[column].strip() != MISSING]


def _regression_values(fx: dict, y) -> list[tuple[str, str, float, float | None]]:
    """``(name, printed, computed, rel_fallback)`` for every printed statistic."""
    table = load_column(fx["input"]["file"], fx["input"]["column"])
    table = ResponseTable.from_arrays(table.n, y)
    fit = fit_ols(table, TermSet(tuple(fx["terms"]), fx.get("log_base", 2.0)))
    out = []
    add = lambda name, printed, value, rel=None: out.append((name, printed, value, rel))

    for est, (label, coef, se, t, p) in zip(fit.estimates, fx["coefficients"]):
        add(f"{label} Coef", coef, est.coef)
        add(f"{label} SE Coef", se, est.se_coef)
        add(f"{label} T", t, est.t)
        add(f"{label} P", p, est.p)
    add("S", fx["S"], fit.S)
    add("R-Sq %", fx["R-Sq"], 100 * fit.r2)
    add("R-Sq(adj) %", fx["R-Sq(adj)"], 100 * fit.r2_adj)
    if "PRESS" in fx:
        add("PRESS", fx["PRESS"], fit.press)
        add("R-Sq(pred) %", fx["R-Sq(pred)"], 100 * fit.r2_pred)

    a = fit.anova
    df, ss, ms, f, p = fx["anova"]["Regression"]
    add("Regression SS", ss, a.ss_regression)
    add("Regression MS", ms, a.ms_regression)
    add("F", f, a.f, F_REL_TOL)
    add("F P", p, a.p)
    _, ss, ms = fx["anova"]["Residual Error"]
    add("Residual SS", ss, a.ss_residual)
    add("Residual MS", ms, a.ms_residual)
    _, ss = fx["anova"]["Total"]
    add("Total SS", ss, a.ss_total)
    for (label, _, ss), value in zip(fx["seq_ss"], fit.seq_ss.values()):
        add(f"Seq SS {label}", ss, value)

    for printed, row in zip(fx.get("observations", []), residual_report(fit)):
        obs, _, y_p, fitted, se_fit, resid, st = printed
        tag = f"obs {obs}"
        add(f"{tag} y", y_p, row.y)
        add(f"{tag} Fit", fitted, row.fit)
        add(f"{tag} SE Fit", se_fit, row.se_fit)
        add(f"{tag} Residual", resid, row.residual)
        add(f"{tag} St Resid", st.rstrip("R"), row.std_resid)
    return out


def rounding_envelope(fx: dict, name: str) -> float:
    """First-order spread of one statistic when every input cell moves by
    half a unit of its printed precision."""
    table = load_column(fx["input"]["file"], fx["input"]["column"])
    half = column_half_units(fx["input"]["file"], fx["input"]["column"])
    y0 = table.y
    base = dict((k, v) for k, _, v, _ in _regression_values(fx, y0))[name]
    spread = 0.0
    for i, h in enumerate(half):
        y = y0.copy()
        y[i] += h
        spread += abs(dict((k, v) for k, _, v, _ in _regression_values(fx, y))[name] - base)
    return spread


def _check_regression(fx: dict, result: FixtureResult) -> None:
    table = load_column(fx["input"]["file"], fx["input"]["column"])
    fit = fit_ols(table, TermSet(tuple(fx["terms"]), fx.get("log_base", 2.0)))
    add = result.comparisons.append
    for name, printed, value, rel in _regression_values(fx, table.y):
        c = compare_printed(name, printed, value, rel)
        if not c.passed:
            env = rounding_envelope(fx, name) / 10.0 ** -decimals(printed)
            c.note += f"; input rounding alone can move it by up to {env:.3g} units"
        add(c)

    a = fit.anova
    add(compare_exact("Regression DF", fx["anova"]["Regression"][0], a.df_regression))
    add(compare_exact("Residual DF", fx["anova"]["Residual Error"][0], a.df_residual))
    add(compare_exact("Total DF", fx["anova"]["Total"][0], a.df_total))
    for label, df, _ in fx["seq_ss"]:
        add(compare_exact(f"Seq SS {label} DF", df, 1))
    for printed, row in zip(fx.get("observations", []), residual_report(fit)):
        obs, n, *_, st = printed
        flagged = st.endswith("R")
        add(compare_exact(f"obs {obs} n", n, int(row.n)))
        add(Comparison(f"obs {obs} large-residual flag", "R" if flagged else "-", float(row.flag), row.flag == flagged))


def _check_verdict(fx: dict, result: FixtureResult) -> None:
    table = load_column(fx["input"]["file"], fx["input"]["column"])
    policy = SelectionPolicy(**fx.get("policy", {}))
    reference = None
    if "reference" in fx:
        reference = load_column(fx["reference"]["file"], fx["reference"]["column"])
    verdict = classify(table, policy, fx.get("log_base", 2.0), reference)
    expected = fx["verdict"]
    result.comparisons.append(Comparison("verdict", expected, math.nan, verdict.label == Label(expected),
                                         f"computed label {verdict.label}"))
    if reference is not None:
        dominated = detect_pseudo_linear(table, reference)
        result.comparisons.append(Comparison("pointwise domination", "True", float(dominated), dominated))


def reproduce(fixture_id: str) -> FixtureResult:
    fx = fixture(fixture_id)
    result = FixtureResult(fixture_id, fx.get("title", fixture_id))
    if "verdict" in fx:
        _check_verdict(fx, result)
    else:
        _check_regression(fx, result)
    return result


def reproduce_all(ids: list[str] | None = None) -> list[FixtureResult]:
    return [reproduce(i) for i in (ids or fixture_ids())]
