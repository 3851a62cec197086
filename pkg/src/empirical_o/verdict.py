"""Complexity verdicts from response tables.

Decision procedure for one curve:

1. Fit the full model ``{Const, N, NLogN, NSquared}`` and the reduced model
   ``{Const, N, NLogN}``.
2. Quadratic when the ``n^2`` coefficient is significant at ``alpha`` in the
   full model and dropping it inflates S by at least ``s_ratio_min``.
3. Otherwise, in the reduced model: Inconclusive when neither growth term is
   significant; Linear when the ``n`` coefficient is positive and its |t|
   beats that of ``n log n``; NLogN when ``n log n`` has the larger (or equal)
   |t|.  A dominant but negative ``n`` term is Inconclusive.

A Linear curve becomes PseudoLinear when it pointwise dominates a Quadratic
reference curve measured on the same size grid.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .errors import InvalidPairingError, InvalidParameterError, PreconditionError
from .harness import ResponseTable, TieDensity, WorkloadSpec, run_experiment
from .statfit import CONST, N, NLOGN, NSQUARED, RegressionFit, TermSet, fit_ols


class Label(str, enum.Enum):
    LINEAR = "Linear"
    PSEUDO_LINEAR = "PseudoLinear"
    NLOGN = "NLogN"
    QUADRATIC = "Quadratic"
    INCONCLUSIVE = "Inconclusive"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class SelectionPolicy:
    alpha: float = 0.05
    s_ratio_min: float = 2.0

    def __post_init__(self):
        if not 0 < self.alpha < 1:
            raise InvalidParameterError(f"alpha must lie in (0, 1), got {self.alpha}")
        if not self.s_ratio_min >= 1:
            raise InvalidParameterError(f"s_ratio_min must be >= 1, got {self.s_ratio_min}")


@dataclass
class ComplexityVerdict:
    label: Label
    evidence: dict = field(default_factory=dict)
    fits: dict[str, RegressionFit] = field(default_factory=dict, repr=False)
    reference: "ComplexityVerdict | None" = field(default=None, repr=False)

    @property
    def definite(self) -> bool:
        return self.label is not Label.INCONCLUSIVE

    def evidence_lines(self) -> list[str]:
        return [f"{k} = {_fmt(v)}" for k, v in self.evidence.items()]


MIN_ROWS = 6


def _fmt(v) -> str:
    if isinstance(v, bool) or v is None:
        return str(v)
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _s_ratio(s_reduced: float, s_full: float) -> float:
    if s_full == 0.0:
        return 1.0 if s_reduced == 0.0 else math.inf
    return s_reduced / s_full


def select_model(table: ResponseTable, policy: SelectionPolicy = SelectionPolicy(),
                 log_base: float = 2.0) -> ComplexityVerdict:
    if len(table) < MIN_ROWS:
        raise PreconditionError(f"model selection needs at least {MIN_ROWS} rows, got {len(table)}")
    full = fit_ols(table, TermSet((CONST, N, NLOGN, NSQUARED), log_base))
    reduced = fit_ols(table, TermSet((CONST, N, NLOGN), log_base))

    p_sq = full[NSQUARED].p
    ratio = _s_ratio(reduced.S, full.S)
    ev = {
        "alpha": policy.alpha,
        "s_ratio_min": policy.s_ratio_min,
        "log_base": float(log_base),
        "rows": len(table),
        "full.S": full.S,
        "full.t(n^2)": full[NSQUARED].t,
        "full.p(n^2)": p_sq,
        "full.F": full.anova.f,
        "reduced.S": reduced.S,
        "reduced.F": reduced.anova.f,
        "S_ratio": ratio,
        "reduced.coef(n)": reduced[N].coef,
        "reduced.t(n)": reduced[N].t,
        "reduced.p(n)": reduced[N].p,
        "reduced.t(nlogn)": reduced[NLOGN].t,
        "reduced.p(nlogn)": reduced[NLOGN].p,
    }
    fits = {"full": full, "reduced": reduced}

    quad_significant = p_sq < policy.alpha
    ratio_ok = ratio >= policy.s_ratio_min
    ev["quadratic.p_test"] = quad_significant
    ev["quadratic.s_ratio_test"] = ratio_ok
    if quad_significant and ratio_ok:
        ev["decided_by"] = "p(n^2) < alpha and S_ratio >= s_ratio_min"
        return ComplexityVerdict(Label.QUADRATIC, ev, fits)

    t_n, t_nl = reduced[N].t, reduced[NLOGN].t
    if not (reduced[N].p < policy.alpha or reduced[NLOGN].p < policy.alpha):
        ev["decided_by"] = "no growth term significant in reduced model"
        return ComplexityVerdict(Label.INCONCLUSIVE, ev, fits)
    if abs(t_nl) >= abs(t_n):
        ev["decided_by"] = "|t(nlogn)| >= |t(n)|"
        return ComplexityVerdict(Label.NLOGN, ev, fits)
    if reduced[N].coef > 0:
        ev["decided_by"] = "coef(n) > 0 and |t(n)| > |t(nlogn)|"
        return ComplexityVerdict(Label.LINEAR, ev, fits)
    ev["decided_by"] = "|t(n)| > |t(nlogn)| but coef(n) <= 0"
    return ComplexityVerdict(Label.INCONCLUSIVE, ev, fits)


def detect_pseudo_linear(linear_curve: ResponseTable, reference_quadratic: ResponseTable) -> bool:
    """True when the linear curve is >= the reference at every shared size."""
    a, b = linear_curve.n, reference_quadratic.n
    if a.shape != b.shape or not np.array_equal(a, b):
        raise InvalidPairingError("curves must share an identical size grid")
    return bool(np.all(linear_curve.y >= reference_quadratic.y))


def classify(table: ResponseTable, policy: SelectionPolicy = SelectionPolicy(), log_base: float = 2.0,
             reference: ResponseTable | None = None) -> ComplexityVerdict:
    """select_model plus demotion of Linear against a Quadratic reference."""
    verdict = select_model(table, policy, log_base)
    if reference is None:
        return verdict
    ref = select_model(reference, policy, log_base)
    verdict.reference = ref
    verdict.evidence["reference.label"] = ref.label.value
    if verdict.label is not Label.LINEAR:
        verdict.evidence["demotion"] = "not applicable: curve is not Linear"
        return verdict
    if ref.label is not Label.QUADRATIC:
        verdict.evidence["demotion"] = "not applicable: reference is not Quadratic"
        return verdict
    dominated = detect_pseudo_linear(table, reference)
    verdict.evidence["dominates_reference"] = dominated
    if dominated:
        verdict.label = Label.PSEUDO_LINEAR
        verdict.evidence["demotion"] = "Linear -> PseudoLinear: curve >= quadratic reference at every n"
    else:
        verdict.evidence["demotion"] = "none: reference exceeds curve at some n"
    return verdict


@dataclass
class TieDensityEntry:
    t_d: float | None
    table: ResponseTable
    verdict: ComplexityVerdict


@dataclass
class Conjecture1Report:
    entries: list[TieDensityEntry]

    @property
    def labels(self) -> list[Label]:
        return [e.verdict.label for e in self.entries]

    @property
    def threshold(self) -> float | None:
        """Smallest tie density whose curve is labelled Linear."""
        for e in self.entries:
            if e.verdict.label is Label.LINEAR:
                return e.t_d
        return None

    @property
    def monotone(self) -> bool:
        """NLogN entries never follow a Linear one."""
        seen_linear = False
        for label in self.labels:
            if label is Label.LINEAR:
                seen_linear = True
            elif label is Label.NLOGN and seen_linear:
                return False
        return True

    def lines(self) -> list[str]:
        out = []
        for e in self.entries:
            td = "n" if e.t_d is None else f"{e.t_d:g}"
            out.append(f"t_d={td}: {e.verdict.label}")
            out.extend("    " + s for s in e.verdict.evidence_lines())
        thr = self.threshold
        out.append(f"threshold t_d (first Linear) = {'none' if thr is None else f'{thr:g}'}")
        out.append(f"monotone = {self.monotone}")
        return out


def conjecture1_check(t_d_grid: Sequence[float | None], base: WorkloadSpec,
                      policy: SelectionPolicy = SelectionPolicy(), log_base: float = 2.0) -> Conjecture1Report:
    """Run the tie-density sweep and label every curve.

    ``base`` supplies the size grid, trial policy, seed and response mode;
    its family is replaced by ``TieDensity(t_d)`` for each entry.  ``None``
    in the grid stands for ``t_d = n``.
    """
    finite = [t for t in t_d_grid if t is not None]
    if any(b <= a for a, b in zip(finite, finite[1:])):
        raise InvalidParameterError(f"t_d grid must be increasing, got {list(t_d_grid)}")
    entries = []
    for t_d in t_d_grid:
        spec = replace(base, family=TieDensity(t_d))
        table = run_experiment(spec)
        entries.append(TieDensityEntry(t_d, table, select_model(table, policy, log_base)))
    return Conjecture1Report(entries)
