"""Experiment config files and the generate -> measure -> fit -> verdict run.

Config files are INI-style, flat ``key = value`` pairs in fixed sections.
Unknown sections and keys are rejected.  Every key has a default::

    [experiment]
    family = uniform          ; uniform | tied | heavy-tail
    K = 1000                  ; uniform only
    t_d = 1                   ; tied only; "n" means t_d = n (all keys equal)
    exact = false             ; tied only: exact multiset instead of i.i.d.
    grid = 8192:131072:8192   ; list "a,b,c" (2^k allowed) or start:stop:step,
                              ; step "*2" for a doubling grid; stop inclusive
    trials_min = 30
    trials_max = 500
    rel_sem_target = 0.01
    seed = 0
    response = count          ; count | time
    weights = 1,1,1           ; comparisons, exchanges, partition calls

    [reference]               ; optional quadratic reference curve, same grid
    family = uniform
    K = 16
    t_d = 1
    exact = false

    [fit]
    terms = Const,N,NLogN,NSquared
    log_base = 2

    [policy]
    alpha = 0.05
    s_ratio_min = 2.0

    [output]
    dir = .
    prefix =
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field, replace
from pathlib import Path

from .errors import EmpiricalOError, InvalidParameterError
from .harness import (Family, HeavyTail, ResponseTable, TieDensity, UniformK, WallTime, WeightedCount,
                      WorkloadSpec, run_experiment)
from .report import plot_data, render
from .sortlab import WeightVector
from .statfit import CONST, FULL, N, NLOGN, NSQUARED, RegressionFit, TermSet, fit_ols
from .verdict import ComplexityVerdict, SelectionPolicy, classify

DEFAULTS = {
    "experiment": {
        "family": "uniform", "K": "1000", "t_d": "1", "exact": "false", "grid": "8192:131072:8192",
        "trials_min": "30", "trials_max": "500", "rel_sem_target": "0.01", "seed": "0",
        "response": "count", "weights": "1,1,1",
    },
    "reference": {"family": "uniform", "K": "16", "t_d": "1", "exact": "false"},
    "fit": {"terms": "Const,N,NLogN,NSquared", "log_base": "2"},
    "policy": {"alpha": "0.05", "s_ratio_min": "2.0"},
    "output": {"dir": ".", "prefix": ""},
}

CANDIDATES = {
    "linear": TermSet((CONST, N)),
    "nlogn": TermSet((CONST, N, NLOGN)),
    "quadratic": TermSet((CONST, N, NLOGN, NSQUARED)),
}


class ConfigError(EmpiricalOError):
    pass


class StageError(EmpiricalOError):
    def __init__(self, stage: str, cause: BaseException):
        self.stage = stage
        self.__cause__ = cause
        super().__init__(f"[{stage}] {cause}")


def _int_token(tok: str) -> int:
    tok = tok.strip()
    if "^" in tok:
        base, exp = tok.split("^", 1)
        return int(base) ** int(exp)
    return int(tok)


def parse_grid(text: str) -> tuple[int, ...]:
    """``"1000,2000"``, ``"2^10,2^11"``, ``"8192:131072:8192"`` or ``"1024:131072:*2"``."""
    text = text.strip()
    try:
        if ":" in text:
            parts = text.split(":")
            if len(parts) != 3:
                raise ValueError("range needs start:stop:step")
            start, stop = _int_token(parts[0]), _int_token(parts[1])
            step = parts[2].strip()
            grid = []
            if step.startswith("*"):
                factor = _int_token(step[1:])
                if factor < 2 or start < 1:
                    raise ValueError("geometric grid needs start >= 1 and factor >= 2")
                n = start
                while n <= stop:
                    grid.append(n)
                    n *= factor
            else:
                inc = _int_token(step)
                if inc < 1:
                    raise ValueError("step must be positive")
                grid = list(range(start, stop + 1, inc))
        else:
            grid = [_int_token(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise InvalidParameterError(f"bad grid {text!r}: {exc}") from None
    if not grid:
        raise InvalidParameterError(f"grid {text!r} is empty")
    return tuple(grid)


def parse_family(name: str, K: str | None = None, t_d: str | None = None, exact: bool = False) -> Family:
    name = name.strip().lower()
    try:
        if name in ("uniform", "uniform-k", "uniformk"):
            return UniformK(_int_token(K if K is not None else DEFAULTS["experiment"]["K"]))
        if name in ("tied", "tie-density", "tiedensity"):
            t = (t_d if t_d is not None else DEFAULTS["experiment"]["t_d"]).strip()
            return TieDensity(None if t == "n" else float(_int_token(t) if "^" in t else float(t)), exact)
        if name in ("heavy-tail", "heavytail", "heavy"):
            return HeavyTail()
    except ValueError as exc:
        raise InvalidParameterError(f"bad family parameter: {exc}") from None
    raise InvalidParameterError(f"unknown family {name!r}; expected uniform, tied or heavy-tail")


def parse_response(name: str, weights: str = "1,1,1"):
    name = name.strip().lower()
    if name in ("count", "weighted-count", "weightedcount"):
        return WeightedCount(WeightVector.parse(weights))
    if name in ("time", "wall-time", "walltime"):
        return WallTime()
    raise InvalidParameterError(f"unknown response mode {name!r}; expected count or time")


def _bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise InvalidParameterError(f"not a boolean: {text!r}")


@dataclass
class ExperimentConfig:
    workload: WorkloadSpec
    terms: TermSet = FULL
    policy: SelectionPolicy = field(default_factory=SelectionPolicy)
    reference: Family | None = None
    out_dir: Path = Path(".")
    prefix: str = ""

    @classmethod
    def from_text(cls, text: str, source: str = "<config>") -> "ExperimentConfig":
        cp = configparser.ConfigParser(interpolation=None, default_section="__none__")
        cp.optionxform = str
        try:
            cp.read_string(text, source=source)
        except configparser.Error as exc:
            raise ConfigError(f"{source}: {exc}") from None
        for section in cp.sections():
            if section not in DEFAULTS:
                raise ConfigError(f"{source}: unknown section [{section}]")
            for key in cp[section]:
                if key not in DEFAULTS[section]:
                    raise ConfigError(f"{source}: unknown key {key!r} in [{section}]")

        def get(section, key):
            if cp.has_section(section) and key in cp[section]:
                return cp[section][key]
            return DEFAULTS[section][key]

        try:
            e = lambda k: get("experiment", k)
            workload = WorkloadSpec(
                family=parse_family(e("family"), e("K"), e("t_d"), _bool(e("exact"))),
                size_grid=parse_grid(e("grid")),
                trials_min=int(e("trials_min")),
                trials_max=int(e("trials_max")),
                rel_sem_target=float(e("rel_sem_target")),
                seed=int(e("seed")),
                response=parse_response(e("response"), e("weights")),
            )
            reference = None
            if cp.has_section("reference"):
                r = lambda k: get("reference", k)
                reference = parse_family(r("family"), r("K"), r("t_d"), _bool(r("exact")))
            terms = TermSet.parse(get("fit", "terms"), float(get("fit", "log_base")))
            policy = SelectionPolicy(float(get("policy", "alpha")), float(get("policy", "s_ratio_min")))
        except (ValueError, InvalidParameterError) as exc:
            raise ConfigError(f"{source}: {exc}") from None
        return cls(workload, terms, policy, reference, Path(get("output", "dir")), get("output", "prefix").strip())

    @classmethod
    def read(cls, path) -> "ExperimentConfig":
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
        return cls.from_text(text, str(path))


@dataclass
class RunResult:
    table: ResponseTable
    verdict: ComplexityVerdict
    reference_table: ResponseTable | None
    artifacts: dict[str, Path]


def _run_report(config: ExperimentConfig, table: ResponseTable, fit: RegressionFit,
                verdict: ComplexityVerdict) -> str:
    w = config.workload
    lines = [
        "Experiment",
        f"  family         {w.family.describe()}",
        f"  grid           {','.join(str(n) for n in w.size_grid)}",
        f"  trials         min={w.trials_min} max={w.trials_max} rel_sem_target={w.rel_sem_target!r}",
        f"  seed           {w.seed}",
        f"  response       {w.response.describe()}",
    ]
    if config.reference is not None:
        lines.append(f"  reference      {config.reference.describe()}")
    lines += ["", "Responses", table.to_csv().rstrip("\n"), ""]
    lines.append(render(fit, "y", residuals=True))
    lines += [f"Verdict: {verdict.label}", "Evidence:"]
    lines += ["  " + s for s in verdict.evidence_lines()]
    return "\n".join(lines) + "\n"


def end_to_end(config: ExperimentConfig) -> RunResult:
    """Measure, fit and classify; writes response CSV, report and plot data."""
    try:
        table = run_experiment(config.workload)
        reference_table = None
        if config.reference is not None:
            reference_table = run_experiment(replace(config.workload, family=config.reference))
    except EmpiricalOError as exc:
        raise StageError("measure", exc) from exc
    try:
        fits = {name: fit_ols(table, replace(ts, log_base=config.terms.log_base)) for name, ts in CANDIDATES.items()}
        chosen = fit_ols(table, config.terms)
    except EmpiricalOError as exc:
        raise StageError("fit", exc) from exc
    try:
        verdict = classify(table, config.policy, config.terms.log_base, reference_table)
    except EmpiricalOError as exc:
        raise StageError("verdict", exc) from exc

    try:
        config.out_dir.mkdir(parents=True, exist_ok=True)
        p = config.prefix
        artifacts = {
            "response": config.out_dir / f"{p}response.csv",
            "report": config.out_dir / f"{p}report.txt",
            "plot": config.out_dir / f"{p}plot.csv",
        }
        table.write_csv(artifacts["response"])
        if reference_table is not None:
            artifacts["reference"] = config.out_dir / f"{p}reference.csv"
            reference_table.write_csv(artifacts["reference"])
        _write(artifacts["report"], _run_report(config, table, chosen, verdict))
        _write(artifacts["plot"], plot_data(fits))
    except OSError as exc:
        raise StageError("write", exc) from exc
    return RunResult(table, verdict, reference_table, artifacts)


def _write(path: Path, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
