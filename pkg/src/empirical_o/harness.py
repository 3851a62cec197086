"""Designed experiments over the quicksort kernel.

Every trial draws a fresh input from a child seed keyed by ``(n, trial)``,
independent of the workload family.  Two families that resolve to the same
``K`` at the same ``n`` therefore sort identical inputs, which is what makes
the tie-density and uniform-K grids agree on their shared cells.

Replication is adaptive: after ``trials_min`` trials, sampling continues
until the relative standard error of the mean drops below
``rel_sem_target`` or ``trials_max`` is reached.
"""

from __future__ import annotations

import csv
import io
import math
import time
from dataclasses import dataclass, field
from typing import Iterable, Union

import numpy as np

from . import workloads
from .errors import EmpiricalOError, InvalidParameterError, TableFormatError
from .sortlab import UNIT_WEIGHTS, WeightVector, sort_in_place, weighted_cost


@dataclass(frozen=True)
class UniformK:
    K: int

    def __post_init__(self):
        if int(self.K) != self.K or self.K < 1:
            raise InvalidParameterError(f"K must be a positive integer, got {self.K}")

    def generate(self, n: int, seed: int) -> np.ndarray:
        return workloads.gen_uniform(workloads.UniformKSpec(n, int(self.K)), seed)

    def describe(self) -> str:
        return f"uniform K={self.K}"


@dataclass(frozen=True)
class TieDensity:
    """``t_d=None`` means ``t_d = n`` at every size (all keys equal)."""

    t_d: float | None
    exact: bool = False

    def generate(self, n: int, seed: int) -> np.ndarray:
        t_d = n if self.t_d is None else self.t_d
        return workloads.gen_tied(workloads.TieDensitySpec(n, t_d, self.exact), seed)

    def describe(self) -> str:
        return f"tied t_d={'n' if self.t_d is None else format_number(self.t_d)}"


@dataclass(frozen=True)
class HeavyTail:
    def generate(self, n: int, seed: int) -> np.ndarray:
        return workloads.gen_heavy_tail(workloads.HeavyTailSpec(n), seed)

    def describe(self) -> str:
        return "heavy-tail"


Family = Union[UniformK, TieDensity, HeavyTail]


@dataclass(frozen=True)
class WallTime:
    def describe(self) -> str:
        return "time"


@dataclass(frozen=True)
class WeightedCount:
    weights: WeightVector = UNIT_WEIGHTS

    def describe(self) -> str:
        return f"count weights={self.weights}"


Response = Union[WallTime, WeightedCount]


@dataclass(frozen=True)
class WorkloadSpec:
    family: Family
    size_grid: tuple[int, ...]
    trials_min: int = 30
    trials_max: int = 500
    rel_sem_target: float = 0.01
    seed: int = 0
    response: Response = field(default_factory=WeightedCount)

    def __post_init__(self):
        grid = tuple(int(n) for n in self.size_grid)
        object.__setattr__(self, "size_grid", grid)
        if not grid:
            raise InvalidParameterError("size grid is empty")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise InvalidParameterError(f"size grid must be strictly increasing, got {grid}")
        if grid[0] < 0:
            raise InvalidParameterError("sizes must be nonnegative")
        if not 1 <= self.trials_min <= self.trials_max:
            raise InvalidParameterError(
                f"need 1 <= trials_min <= trials_max, got {self.trials_min}, {self.trials_max}")
        if not self.rel_sem_target >= 0:
            raise InvalidParameterError("rel_sem_target must be >= 0")
        workloads.check_seed(self.seed)


@dataclass(frozen=True)
class ResponseRow:
    n: float
    y: float
    trials: int = 1
    stddev: float = 0.0


@dataclass
class ResponseTable:
    rows: list[ResponseRow] = field(default_factory=list)
    raw: dict[float, list[float]] | None = None
    key: str = "n"

    def __post_init__(self):
        ns = [r.n for r in self.rows]
        if any(b <= a for a, b in zip(ns, ns[1:])):
            raise InvalidParameterError(f"{self.key} must be strictly increasing")
        for r in self.rows:
            if r.trials < 1 or r.stddev < 0 or not (math.isfinite(r.y) and r.y >= 0):
                raise InvalidParameterError(f"invalid response row {r}")

    @classmethod
    def from_arrays(cls, n: Iterable, y: Iterable) -> "ResponseTable":
        return cls([ResponseRow(float(a), float(b)) for a, b in zip(n, y)])

    def __len__(self):
        return len(self.rows)

    @property
    def n(self) -> np.ndarray:
        return np.array([r.n for r in self.rows], dtype=np.float64)

    @property
    def y(self) -> np.ndarray:
        return np.array([r.y for r in self.rows], dtype=np.float64)

    def scaled(self, c: float) -> "ResponseTable":
        return ResponseTable([ResponseRow(r.n, r.y * c, r.trials, r.stddev * abs(c)) for r in self.rows], key=self.key)

    def to_csv(self, full: bool = True) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow([self.key, "y", "trials", "stddev"] if full else [self.key, "y"])
        for r in self.rows:
            row = [format_number(r.n), repr(float(r.y))]
            if full:
                row += [str(r.trials), repr(float(r.stddev))]
            w.writerow(row)
        return buf.getvalue()

    def write_csv(self, path, full: bool = True) -> None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(self.to_csv(full))

    @classmethod
    def from_csv(cls, text: str, path: str | None = None) -> "ResponseTable":
        lines = text.splitlines()
        if not lines:
            raise TableFormatError("empty response table", line=1, path=path)
        header = [h.strip() for h in lines[0].split(",")]
        if len(header) < 2 or header[1] != "y" or header[0] not in ("n", "K"):
            raise TableFormatError(f"header must start with 'n,y', got {lines[0]!r}", line=1, path=path)
        if header[2:] not in ([], ["trials"], ["trials", "stddev"]):
            raise TableFormatError(f"unexpected columns {header[2:]}", line=1, path=path)
        rows = []
        for lineno, line in enumerate(lines[1:], start=2):
            if not line.strip():
                continue
            cells = [c.strip() for c in line.split(",")]
            if len(cells) != len(header):
                raise TableFormatError(f"expected {len(header)} fields, got {len(cells)}", line=lineno, path=path)
            try:
                n = float(cells[0])
                y = float(cells[1])
                trials = int(cells[2]) if len(cells) > 2 else 1
                stddev = float(cells[3]) if len(cells) > 3 else 0.0
            except ValueError as exc:
                raise TableFormatError(f"bad value: {exc}", line=lineno, path=path) from None
            if not (math.isfinite(n) and math.isfinite(y) and math.isfinite(stddev)):
                raise TableFormatError("non-finite value", line=lineno, path=path)
            if trials < 1 or stddev < 0 or y < 0:
                raise TableFormatError("need y >= 0, trials >= 1 and stddev >= 0", line=lineno, path=path)
            if rows and n <= rows[-1].n:
                raise TableFormatError(f"{header[0]} must be strictly increasing", line=lineno, path=path)
            rows.append(ResponseRow(n, y, trials, stddev))
        return cls(rows, key=header[0])

    @classmethod
    def read_csv(cls, path) -> "ResponseTable":
        try:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise TableFormatError(f"cannot read: {exc.strerror}", path=str(path)) from None
        return cls.from_csv(text, path=str(path))


class ExperimentError(EmpiricalOError):
    """A sweep failed at one size; rows completed so far are kept."""

    def __init__(self, n: int, cause: BaseException, partial: ResponseTable):
        self.n = n
        self.partial = partial
        self.__cause__ = cause
        super().__init__(f"experiment aborted at n={n}: {type(cause).__name__}: {cause}")


def format_number(x: float) -> str:
    x = float(x)
    if x.is_integer() and abs(x) < 2**53:
        return str(int(x))
    return repr(x)


def trial_seed(seed: int, n: int, trial: int) -> int:
    return workloads.derive_seed(seed, n, trial)


def measure_once(family: Family, n: int, seed: int, response: Response) -> float:
    """Response of one quicksort run on a freshly generated input."""
    data = family.generate(n, seed)
    if isinstance(response, WallTime):
        start = time.perf_counter_ns()
        sort_in_place(data)
        return (time.perf_counter_ns() - start) * 1e-9
    return weighted_cost(sort_in_place(data), response.weights)


def _aggregate(values: list[float]) -> tuple[float, float]:
    arr = np.asarray(values, dtype=np.float64)
    mean = float(arr.mean())
    std = float(arr.std(ddof=1)) if arr.size > 1 else 0.0
    return mean, std


def _converged(mean: float, std: float, trials: int, target: float) -> bool:
    if trials < 2 or std == 0.0:
        return True
    if mean == 0.0:
        return False
    return std / math.sqrt(trials) / abs(mean) < target


def measure_point(family: Family, n: int, seed: int, response: Response, trials_min: int, trials_max: int,
                  rel_sem_target: float) -> tuple[ResponseRow, list[float]]:
    values: list[float] = []
    while True:
        values.append(measure_once(family, n, trial_seed(seed, n, len(values)), response))
        if len(values) >= trials_max:
            break
        if len(values) >= trials_min:
            mean, std = _aggregate(values)
            if _converged(mean, std, len(values), rel_sem_target):
                break
    mean, std = _aggregate(values)
    return ResponseRow(float(n), mean, len(values), std), values


def run_experiment(spec: WorkloadSpec, keep_raw: bool = False) -> ResponseTable:
    """Sweep the size grid; one aggregated row per size."""
    rows: list[ResponseRow] = []
    raw: dict[float, list[float]] | None = {} if keep_raw else None
    for n in spec.size_grid:
        try:
            row, values = measure_point(spec.family, n, spec.seed, spec.response, spec.trials_min,
                                        spec.trials_max, spec.rel_sem_target)
        except (MemoryError, RecursionError) as exc:
            raise ExperimentError(n, exc, ResponseTable(list(rows), raw)) from exc
        rows.append(row)
        if raw is not None:
            raw[row.n] = values
    return ResponseTable(rows, raw)


def sweep_k(n: int, k_grid: Iterable[int], trials_min: int = 30, seed: int = 0,
            response: Response | None = None, trials_max: int | None = None,
            rel_sem_target: float = 0.01, keep_raw: bool = False) -> ResponseTable:
    """Response against ``K`` at a fixed size; the table is keyed by ``K``.

    ``trials_max`` defaults to ``max(trials_min, 500)``.
    """
    response = response or WeightedCount()
    k_grid = [int(k) for k in k_grid]
    if not k_grid:
        raise InvalidParameterError("K grid is empty")
    if any(b <= a for a, b in zip(k_grid, k_grid[1:])):
        raise InvalidParameterError(f"K grid must be strictly increasing, got {k_grid}")
    trials_max = max(trials_min, 500) if trials_max is None else trials_max
    rows: list[ResponseRow] = []
    raw: dict[float, list[float]] | None = {} if keep_raw else None
    for K in k_grid:
        try:
            row, values = measure_point(UniformK(K), n, seed, response, trials_min, trials_max, rel_sem_target)
        except (MemoryError, RecursionError) as exc:
            raise ExperimentError(n, exc, ResponseTable(list(rows), raw, key="K")) from exc
        rows.append(ResponseRow(float(K), row.y, row.trials, row.stddev))
        if raw is not None:
            raw[float(K)] = values
    return ResponseTable(rows, raw, key="K")
