"""Instrumented quicksort with per-operation tallies.

The variant is fixed: last element as pivot, Lomuto partition using strict
``<``, both sides recursed, no cutoff and no randomisation.  Keys equal to
the pivot never move left of it, so heavily tied inputs degrade to quadratic
behaviour; that degradation is the effect the experiments measure.

Counted operations:

* ``comparisons``     one per ``key < pivot`` evaluation
* ``exchanges``       one per swap executed, self-swaps included, plus the
                      final pivot placement of every partition
* ``partition_calls`` one per partitioned sub-array (length >= 2)

Numeric inputs run through a numba kernel; anything else falls back to the
pure-Python loop, which performs the identical sequence of operations.
"""

from __future__ import annotations

from dataclasses import dataclass

import numba
import numpy as np

from .errors import InvalidParameterError

OPERATION_TYPES = ("comparisons", "exchanges", "partition_calls")


@dataclass(frozen=True)
class OperationCounts:
    comparisons: int = 0
    exchanges: int = 0
    partition_calls: int = 0

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.comparisons, self.exchanges, self.partition_calls)

    @property
    def total(self) -> int:
        return sum(self.as_tuple())


@dataclass(frozen=True)
class WeightVector:
    comparisons: float = 1.0
    exchanges: float = 1.0
    partition_calls: float = 1.0

    def __post_init__(self):
        w = self.as_tuple()
        if any(not np.isfinite(x) for x in w):
            raise InvalidParameterError(f"weights must be finite, got {w}")
        if any(x < 0 for x in w):
            raise InvalidParameterError(f"weights must be nonnegative, got {w}")
        if not any(x > 0 for x in w):
            raise InvalidParameterError("at least one weight must be positive")

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.comparisons, self.exchanges, self.partition_calls)

    @classmethod
    def parse(cls, text: str) -> "WeightVector":
        """``"1,0,0"`` -> comparisons only."""
        parts = [p.strip() for p in text.split(",")]
        if len(parts) != 3:
            raise InvalidParameterError(f"weight vector needs 3 comma-separated values, got {text!r}")
        try:
            return cls(*(float(p) for p in parts))
        except ValueError as exc:
            raise InvalidParameterError(f"bad weight vector {text!r}: {exc}") from None

    def __str__(self):
        return ",".join(repr(float(x)) for x in self.as_tuple())


UNIT_WEIGHTS = WeightVector()
COMPARISONS_ONLY = WeightVector(1.0, 0.0, 0.0)


def weighted_cost(counts: OperationCounts, w: WeightVector = UNIT_WEIGHTS) -> float:
    """Sum over operation types of count times weight."""
    if any(x < 0 for x in w.as_tuple()):
        raise InvalidParameterError("weights must be nonnegative")
    return float(sum(c * x for c, x in zip(counts.as_tuple(), w.as_tuple())))


@numba.njit(cache=True)
def _quicksort_kernel(a):
    n = a.shape[0]
    comparisons = 0
    exchanges = 0
    calls = 0
    if n < 2:
        return comparisons, exchanges, calls
    # each partition pushes at most one range; depth stays O(log n)
    stack = np.empty(2 * (64 + 2), dtype=np.int64)
    stack[0] = 0
    stack[1] = n - 1
    top = 1
    while top > 0:
        top -= 1
        lo = stack[2 * top]
        hi = stack[2 * top + 1]
        while lo < hi:
            calls += 1
            pivot = a[hi]
            i = lo - 1
            for j in range(lo, hi):
                comparisons += 1
                if a[j] < pivot:
                    i += 1
                    tmp = a[i]
                    a[i] = a[j]
                    a[j] = tmp
                    exchanges += 1
            p = i + 1
            tmp = a[p]
            a[p] = a[hi]
            a[hi] = tmp
            exchanges += 1
            # defer the larger side, continue with the smaller one
            if p - lo > hi - p:
                if lo < p - 1:
                    stack[2 * top] = lo
                    stack[2 * top + 1] = p - 1
                    top += 1
                lo = p + 1
            else:
                if p + 1 < hi:
                    stack[2 * top] = p + 1
                    stack[2 * top + 1] = hi
                    top += 1
                hi = p - 1
    return comparisons, exchanges, calls


def _quicksort_python(a: list) -> tuple[int, int, int]:
    comparisons = exchanges = calls = 0
    stack = [(0, len(a) - 1)]
    while stack:
        lo, hi = stack.pop()
        while lo < hi:
            calls += 1
            pivot = a[hi]
            i = lo - 1
            for j in range(lo, hi):
                comparisons += 1
                if a[j] < pivot:
                    i += 1
                    a[i], a[j] = a[j], a[i]
                    exchanges += 1
            p = i + 1
            a[p], a[hi] = a[hi], a[p]
            exchanges += 1
            if p - lo > hi - p:
                if lo < p - 1:
                    stack.append((lo, p - 1))
                lo = p + 1
            else:
                if p + 1 < hi:
                    stack.append((p + 1, hi))
                hi = p - 1
    return comparisons, exchanges, calls


def _as_numeric(keys) -> np.ndarray | None:
    if isinstance(keys, np.ndarray):
        arr = keys
    else:
        keys = list(keys)
        if not all(isinstance(k, (int, float, np.integer, np.floating)) and not isinstance(k, bool) for k in keys):
            return None
        try:
            arr = np.asarray(keys)
        except (OverflowError, ValueError):
            return None
    if arr.ndim != 1:
        return None
    if arr.dtype.kind in "iu":
        if arr.dtype.kind == "u" and arr.size and arr.max() > np.iinfo(np.int64).max:
            return None
        return arr.astype(np.int64, copy=True)
    if arr.dtype.kind == "f":
        if np.isnan(arr).any():
            # NaN breaks the total order the counts assume
            return None
        return arr.astype(np.float64, copy=True)
    return None


def quicksort_instrumented(keys) -> tuple[list | np.ndarray, OperationCounts]:
    """Sort ``keys`` and return ``(sorted, counts)``; the input is not modified.

    Numpy arrays and all-numeric sequences are sorted by the compiled kernel
    and come back as a numpy array; other sequences come back as a list.
    """
    arr = _as_numeric(keys)
    if arr is not None:
        counts = _quicksort_kernel(arr)
        return arr, OperationCounts(*(int(c) for c in counts))
    out = list(keys)
    counts = _quicksort_python(out)
    return out, OperationCounts(*counts)


def count_operations(keys) -> OperationCounts:
    return quicksort_instrumented(keys)[1]


def sort_in_place(arr: np.ndarray) -> OperationCounts:
    """Kernel entry for callers that own a contiguous int64/float64 buffer."""
    return OperationCounts(*(int(c) for c in _quicksort_kernel(arr)))
