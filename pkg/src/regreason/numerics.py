"""Dense numeric kernels shared by the scoring and loss modules.

Everything here works on float64 numpy arrays. The assignment solver is
backed by scipy's linear_sum_assignment with an extra canonicalization pass
so that ties always resolve to the lexicographically smallest pair list.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

# Tolerance used when testing whether a partial assignment can still reach
# the optimal total. Only affects tie-breaking, never reported cost.
_TIE_TOL = 1e-12


def as_array(values, *, name: str = "array") -> np.ndarray:
    """Coerce to a float64 array and reject non-finite entries."""
    arr = np.asarray(values, dtype=np.float64)
    if arr.size and not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries")
    return arr


def softmax_stable(v) -> np.ndarray:
    """Softmax with max-subtraction. Input must be a non-empty 1-D vector."""
    arr = as_array(v, name="softmax input")
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError("softmax_stable expects a non-empty vector")
    shifted = arr - arr.max()
    e = np.exp(shifted)
    return e / e.sum()


def log_softmax_stable(v) -> np.ndarray:
    arr = as_array(v, name="log-softmax input")
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError("log_softmax_stable expects a non-empty vector")
    shifted = arr - arr.max()
    return shifted - math.log(np.exp(shifted).sum())


@dataclass(frozen=True)
class Assignment:
    """Result of a rectangular linear assignment.

    pairs are (row, col) sorted by row; each row/col is used at most once and
    len(pairs) == min(n, m).
    """

    pairs: tuple[tuple[int, int], ...]
    cost: float


def _pairs_cost(cost: np.ndarray, pairs: Sequence[tuple[int, int]]) -> float:
    total = 0.0
    for r, c in pairs:
        total += float(cost[r, c])
    return total


def _optimal_cost(cost: np.ndarray) -> float:
    if cost.shape[0] == 0 or cost.shape[1] == 0:
        return 0.0
    rows, cols = linear_sum_assignment(cost)
    return _pairs_cost(cost, list(zip(rows.tolist(), cols.tolist())))


def hungarian(cost) -> Assignment:
    """Minimum-cost assignment on an n x m matrix.

    Returns the globally optimal assignment; among equally optimal ones the
    lexicographically smallest pair list wins. Rows beyond min(n, m) stay
    unassigned.
    """
    mat = as_array(cost, name="cost matrix")
    if mat.ndim != 2 or mat.shape[0] == 0 or mat.shape[1] == 0:
        raise ValueError("hungarian requires a non-empty 2-D cost matrix")
    n, m = mat.shape
    best = _optimal_cost(mat)

    # Greedy fix-and-verify: walk rows in order, pin the smallest column that
    # still permits an optimal completion. Lexicographic order on the pair
    # list is exactly "smallest column for the earliest row, then recurse".
    pairs: list[tuple[int, int]] = []
    avail_cols = list(range(m))
    fixed = 0.0
    for r in range(n):
        rows_left = n - r
        if not avail_cols:
            break
        must_assign = rows_left <= len(avail_cols)
        chosen = None
        for c in avail_cols:
            sub = mat[np.ix_(range(r + 1, n), [x for x in avail_cols if x != c])]
            candidate = fixed + float(mat[r, c]) + _optimal_cost(sub)
            if math.isclose(candidate, best, rel_tol=_TIE_TOL, abs_tol=_TIE_TOL):
                chosen = c
                break
        if chosen is None:
            if must_assign:
                raise RuntimeError("assignment canonicalization failed")
            continue  # row r stays unassigned; optimum uses later rows
        pairs.append((r, chosen))
        avail_cols.remove(chosen)
        fixed += float(mat[r, chosen])
        if len(pairs) == min(n, m):
            break
    return Assignment(pairs=tuple(pairs), cost=_pairs_cost(mat, pairs))


def finite_diff_grad(f: Callable[[np.ndarray], float], x, eps: float = 1e-4) -> np.ndarray:
    """Central-difference gradient of a scalar function at x."""
    base = np.array(x, dtype=np.float64)
    grad = np.zeros_like(base)
    flat = grad.reshape(-1)
    xflat = base.reshape(-1)
    for i in range(xflat.size):
        orig = xflat[i]
        xflat[i] = orig + eps
        hi = f(base)
        xflat[i] = orig - eps
        lo = f(base)
        xflat[i] = orig
        flat[i] = (hi - lo) / (2.0 * eps)
    return grad


def relative_error(analytic: np.ndarray, numeric: np.ndarray) -> float:
    """Normalized infinity-norm error between two gradient arrays."""
    a = np.asarray(analytic, dtype=np.float64)
    b = np.asarray(numeric, dtype=np.float64)
    scale = max(float(np.abs(a).max(initial=0.0)), float(np.abs(b).max(initial=0.0)), 1e-12)
    return float(np.abs(a - b).max(initial=0.0)) / scale
