"""Bilinear forms on cubes: the l_inf -> l_1 norm, trace duality, and a
lower-bound search for Grothendieck ratios.

For a real m x n matrix A the quantity

    max over v in [-1,1]^m, w in [-1,1]^n of  sum_{j,l} a_{jl} v_j w_l

is attained at sign vectors, and for fixed w the best v is sign(A w).  So the
norm is an enumeration over w in {+-1}^n; fixing w_1 = +1 halves the work.
A is *restricted* when this norm is at most 1.

:func:`grothendieck_ratio` replaces the signs by unit vectors in R^d and
climbs the objective sum a_{jl} <v_j, w_l> by alternating exact updates.  It
only ever reports a lower bound on the vector supremum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

MAX_ENUM = 25
GROTHENDIECK_K = (math.exp(math.pi / 2) - math.exp(-math.pi / 2)) / 2
MONOTONE_SLACK = 1e-10


def as_matrix(a) -> np.ndarray:
    a = np.array(a, dtype=np.float64)
    if a.ndim != 2 or 0 in a.shape:
        raise ValueError(f"expected a nonempty 2-d matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix entries must be finite")
    return a


class OperatorNorm(NamedTuple):
    norm: float
    w_star: np.ndarray


def sign_vectors(n: int, start: int = 0, stop: int | None = None) -> np.ndarray:
    """Rows are sign vectors with w_1 = +1; row i encodes bits of i in w_2..w_n."""
    stop = 1 << (n - 1) if stop is None else stop
    idx = np.arange(start, stop, dtype=np.int64)[:, None]
    bits = (idx >> np.arange(n - 1)[None, :]) & 1
    return np.concatenate([np.ones((idx.size, 1)), 1.0 - 2.0 * bits], axis=1)


def infty_to_one_norm(a, chunk: int = 1 << 15) -> OperatorNorm:
    """Exact max over w in {+-1}^n of sum_j |sum_l a_{jl} w_l|."""
    a = as_matrix(a)
    n = a.shape[1]
    if n > MAX_ENUM:
        raise ValueError(
            f"n={n} columns exceeds exact enumeration limit {MAX_ENUM}; "
            "use grothendieck_ratio with d=1 for a lower bound"
        )
    total = 1 << (n - 1)
    best, best_w = -1.0, None
    for start in range(0, total, chunk):
        W = sign_vectors(n, start, min(start + chunk, total))
        vals = np.abs(W @ a.T).sum(axis=1)
        i = int(np.argmax(vals))
        if vals[i] > best:
            best, best_w = float(vals[i]), W[i]
    return OperatorNorm(best, best_w)


def row_signs(a, w) -> np.ndarray:
    """Optimal v for a fixed w: sign(A w), with 0 mapped to +1."""
    y = as_matrix(a) @ np.asarray(w, dtype=np.float64)
    return np.where(y >= 0, 1.0, -1.0)


def bilinear_value(a, v, w) -> float:
    return float(np.asarray(v) @ as_matrix(a) @ np.asarray(w))


def image_l1_over_linf(a, x) -> float:
    """|y|_1 / |x|_inf for y_l = sum_j a_{jl} x_j (the restricted-matrix test)."""
    x = np.asarray(x, dtype=np.float64)
    return float(np.abs(as_matrix(a).T @ x).sum() / np.abs(x).max())


def restrict(a) -> np.ndarray:
    """Scale ``a`` so its l_inf -> l_1 norm is exactly 1."""
    a = as_matrix(a)
    if not np.any(a):
        raise ValueError("cannot restrict the zero matrix")
    return a / infty_to_one_norm(a).norm


def is_restricted(a, atol: float = 1e-12) -> bool:
    return infty_to_one_norm(a).norm <= 1.0 + atol


class TraceBound(NamedTuple):
    pairing: float
    bound: float
    witness: np.ndarray
    witness_pairing: float


def trace_pairing(a, t) -> float:
    """trace(T o A) = sum_{j,l} a_{jl} t_{lj} for A m x n and T n x m."""
    a, t = as_matrix(a), as_matrix(t)
    if t.shape != a.shape[::-1]:
        raise ValueError(f"T must have shape {a.shape[::-1]}, got {t.shape}")
    return float(np.sum(a * t.T))


def trace_bound(a, t) -> TraceBound:
    """Pairing, its bound sum|a| * max|t|, and the witness T = sign(A)^T attaining it."""
    a, t = as_matrix(a), as_matrix(t)
    witness = np.sign(a).T
    return TraceBound(
        trace_pairing(a, t),
        float(np.abs(a).sum() * np.abs(t).max()),
        witness,
        trace_pairing(a, witness),
    )


@dataclass
class GramConfiguration:
    d: int
    v: np.ndarray
    w: np.ndarray
    objective: float
    scalar_norm: float | None = None
    restart_objectives: list = field(default_factory=list)
    iterations: int = 0
    seed: int = 0
    tol: float = 1e-12

    @property
    def ratio(self) -> float | None:
        if not self.scalar_norm:
            return None
        return self.objective / self.scalar_norm

    def recompute(self, a) -> float:
        return float(np.sum(as_matrix(a) * (self.v @ self.w.T)))


def _normalize_rows(m: np.ndarray, keep: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(m, axis=1)
    out = keep.copy()
    nz = norms > 0
    # a zero row leaves the previous unit vector in place
    out[nz] = m[nz] / norms[nz, None]
    return out


def _climb(a: np.ndarray, w: np.ndarray, tol: float, max_iter: int):
    m = a.shape[0]
    v = np.zeros((m, w.shape[1]))
    v[:, 0] = 1.0
    obj = float(np.sum(a * (v @ w.T)))
    it = 0
    for it in range(1, max_iter + 1):
        prev = obj
        v = _normalize_rows(a @ w, v)
        half = float(np.sum(a * (v @ w.T)))
        w = _normalize_rows(a.T @ v, w)
        obj = float(np.sum(a * (v @ w.T)))
        scale = max(1.0, abs(prev))
        if half < prev - MONOTONE_SLACK * scale or obj < half - MONOTONE_SLACK * scale:
            raise RuntimeError(
                f"alternating update decreased the objective ({prev} -> {half} -> {obj})"
            )
        if abs(obj - prev) <= tol * max(abs(obj), 1e-300):
            break
    return v, w, obj, it


def grothendieck_ratio(
    a,
    d: int | None = None,
    restarts: int = 16,
    tol: float = 1e-12,
    seed: int = 0,
    initial_w=None,
    max_iter: int = 10_000,
) -> GramConfiguration:
    """Best unit-vector configuration found by alternating maximization.

    Starts are ``restarts`` random configurations (restart r seeded by
    ``seed + r``), any arrays in ``initial_w``, and, when the exact scalar
    norm is computable, the optimal sign vector embedded along the first
    axis, so the result is never below the scalar norm.
    """
    a = as_matrix(a)
    if not np.any(a):
        raise ValueError("zero matrix has no Grothendieck ratio")
    m, n = a.shape
    d = m + n if d is None else int(d)
    if d < 1:
        raise ValueError(f"dimension d must be positive, got {d}")

    starts = []
    scalar = None
    if n <= MAX_ENUM:
        norm = infty_to_one_norm(a)
        scalar = norm.norm
        w0 = np.zeros((n, d))
        w0[:, 0] = norm.w_star
        starts.append(w0)
    for w in initial_w or ():
        w = np.asarray(w, dtype=np.float64).reshape(n, -1)
        w0 = np.zeros((n, d))
        w0[:, : w.shape[1]] = w
        starts.append(w0 / np.linalg.norm(w0, axis=1, keepdims=True))
    for r in range(restarts):
        rng = np.random.default_rng(seed + r)
        g = rng.standard_normal((n, d))
        starts.append(g / np.linalg.norm(g, axis=1, keepdims=True))

    best = None
    objectives = []
    total_iter = 0
    for w0 in starts:
        v, w, obj, it = _climb(a, w0, tol, max_iter)
        total_iter += it
        objectives.append(obj)
        if best is None or obj > best[2]:
            best = (v, w, obj)
    v, w, obj = best
    return GramConfiguration(
        d=d,
        v=v,
        w=w,
        objective=obj,
        scalar_norm=scalar,
        restart_objectives=objectives,
        iterations=total_iter,
        seed=seed,
        tol=tol,
    )
