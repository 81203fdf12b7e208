"""Moments of Rademacher sums and empirical Khintchine constants.

For f = sum_j a_j r_j the even moments have the closed form

    E f^(2s) = sum over s_1 + ... + s_ell = s of
               (2s)! / prod (2 s_j)!  *  prod a_j^(2 s_j)

because odd powers of a coordinate average to zero.  Best constants at a
fixed ``ell`` are searched by projected gradient on the unit sphere of
coefficient vectors.  They are empirical values at that ``ell`` only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .cube import points

MAX_MOMENT_ELL = 16
MAX_MOMENT_S = 6

DEFAULT_RESTARTS = 32
MAX_ITER = 10_000
REL_STOP = 1e-12


@dataclass
class RatioResult:
    ratio: float
    vector: np.ndarray
    method: str
    ell: int
    exponent: float
    evaluations: int = 0
    restarts: list = field(default_factory=list)

    def __iter__(self):
        # unpack as (ratio, vector)
        yield self.ratio
        yield self.vector


def compositions(s: int, ell: int):
    """Weak compositions of ``s`` into ``ell`` nonnegative parts."""
    stack = [(0, s, ())]
    while stack:
        j, left, head = stack.pop()
        if j == ell - 1:
            yield head + (left,)
            continue
        for part in range(left, -1, -1):
            stack.append((j + 1, left - part, head + (part,)))


@lru_cache(maxsize=None)
def _moment_table(ell: int, s: int) -> tuple[np.ndarray, np.ndarray]:
    fact = [1.0]
    for i in range(1, 2 * s + 1):
        fact.append(fact[-1] * i)
    exps = np.array(list(compositions(s, ell)), dtype=np.int64)
    weights = np.array(
        [fact[2 * s] / math.prod(fact[2 * e] for e in row) for row in exps]
    )
    exps.setflags(write=False)
    weights.setflags(write=False)
    return exps, weights


def _check_sizes(ell: int, s: int):
    if isinstance(s, bool) or int(s) != s or s < 1:
        raise ValueError(f"s must be a positive integer, got {s}")
    if ell < 1:
        raise ValueError("coefficient vector must be nonempty")
    if ell > MAX_MOMENT_ELL or s > MAX_MOMENT_S:
        raise ValueError(
            f"closed-form moment limited to ell <= {MAX_MOMENT_ELL}, s <= {MAX_MOMENT_S}"
            f" (got ell={ell}, s={s})"
        )


def even_moments(a: np.ndarray, s: int) -> np.ndarray:
    """Row-wise E[(sum_j a_j r_j)^(2s)] for a ``(batch, ell)`` array."""
    a = np.atleast_2d(np.asarray(a, dtype=np.float64))
    ell = a.shape[1]
    _check_sizes(ell, s)
    exps, weights = _moment_table(ell, int(s))
    sq = a * a
    out = np.empty(a.shape[0])
    step = max(1, 2_000_000 // (exps.shape[0] * ell))
    for i in range(0, a.shape[0], step):
        terms = np.prod(sq[i : i + step, None, :] ** exps[None, :, :], axis=2)
        out[i : i + step] = terms @ weights
    return out


def even_moment(a, s: int) -> float:
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 1:
        raise ValueError("coefficient vector must be 1-d")
    if not np.all(np.isfinite(a)):
        raise ValueError("coefficients must be finite")
    return float(even_moments(a[None, :], s)[0])


def even_moment_gradient(a, s: int) -> np.ndarray:
    """Gradient of :func:`even_moment` with respect to ``a``."""
    a = np.asarray(a, dtype=np.float64)
    ell = a.size
    _check_sizes(ell, s)
    exps, weights = _moment_table(ell, int(s))
    sq = a * a
    grad = np.empty(ell)
    for i in range(ell):
        others = np.prod(np.delete(sq, i)[None, :] ** np.delete(exps, i, axis=1), axis=1)
        e = exps[:, i]
        own = np.where(e > 0, 2 * e * a[i] ** np.maximum(2 * e - 1, 0), 0.0)
        grad[i] = np.dot(weights, own * others)
    return grad


def enumerated_moment(a, p: float) -> float:
    """2^-ell sum_x |sum_j a_j x_j|^p by listing every point."""
    a = np.asarray(a, dtype=np.float64)
    return float(np.mean(np.abs(points(a.size) @ a) ** p))


def _unit(v: np.ndarray) -> np.ndarray:
    return v / np.linalg.norm(v)


def _structured_seeds(ell: int) -> list[np.ndarray]:
    seeds = [np.ones(ell), np.eye(ell)[0]]
    if ell >= 2:
        seeds.append(np.eye(ell)[0] + np.eye(ell)[1])
    return [_unit(s) for s in seeds]


def _sphere_search(objective, gradient, x0, sense: float):
    """Projected gradient on the unit sphere with step halving.

    ``sense`` is +1 to maximize, -1 to minimize.  Returns (x, value, evals).
    """
    x = _unit(np.asarray(x0, dtype=np.float64))
    val = objective(x)
    evals = 1
    step = 1.0
    for _ in range(MAX_ITER):
        full = sense * gradient(x)
        g = full - np.dot(full, x) * x
        gnorm = np.linalg.norm(g)
        # tangential part at roundoff level: stationary point
        if gnorm <= 1e-14 * max(np.linalg.norm(full), 1e-300):
            break
        improved = False
        while step > 1e-16:
            cand = _unit(x + (step / gnorm) * g)
            cval = objective(cand)
            evals += 1
            if sense * (cval - val) > 0:
                improved = True
                break
            step *= 0.5
        if not improved:
            break
        rel = abs(cval - val) / max(abs(val), 1e-300)
        x, val = cand, cval
        step = min(2.0 * step, 1.0)
        if rel < REL_STOP:
            break
    return x, val, evals


def _starts(ell: int, restarts: int, seed: int) -> list[np.ndarray]:
    starts = _structured_seeds(ell)
    for r in range(restarts):
        rng = np.random.default_rng(np.random.SeedSequence([seed, r]))
        starts.append(_unit(rng.standard_normal(ell)))
    return starts


def best_ratio_even(
    ell: int, s: int, restarts: int = DEFAULT_RESTARTS, seed: int = 0
) -> RatioResult:
    """Largest (E f^(2s))^(1/2s) / ||f||_2 over f in the Rademacher span."""
    if ell < 1:
        raise ValueError("ell must be positive")
    if s < 2:
        raise ValueError("s must be at least 2")
    best_val, best_x, evals, per_start = -np.inf, None, 0, []
    for x0 in _starts(ell, restarts, seed):
        x, val, n = _sphere_search(
            lambda a: even_moment(a, s), lambda a: even_moment_gradient(a, s), x0, 1.0
        )
        evals += n
        per_start.append(val ** (1.0 / (2 * s)))
        if val > best_val:
            best_val, best_x = val, x
    best_x = best_x * np.sign(best_x[np.argmax(np.abs(best_x))])
    return RatioResult(
        ratio=best_val ** (1.0 / (2 * s)),
        vector=best_x,
        method=f"projected gradient ascent, closed-form moment, {len(per_start)} starts",
        ell=ell,
        exponent=2.0 * s,
        evaluations=evals,
        restarts=per_start,
    )


def best_ratio_low(
    ell: int, q: float, restarts: int = DEFAULT_RESTARTS, seed: int = 0
) -> RatioResult:
    """Smallest ||f||_q / ||f||_2 over f in the Rademacher span, 0 < q < 2.

    The q-th moment is computed by enumerating the cube, so ``ell`` should
    stay small (the acceptance sweep uses ell <= 12).
    """
    if not 0 < q < 2:
        raise ValueError(f"q must lie in (0, 2), got {q}")
    if ell < 1:
        raise ValueError("ell must be positive")
    X = points(ell)

    def objective(a):
        return float(np.mean(np.abs(X @ a) ** q))

    def gradient(a):
        y = X @ a
        w = np.zeros_like(y)
        nz = y != 0
        # subgradient: zero where f vanishes
        w[nz] = np.sign(y[nz]) * np.abs(y[nz]) ** (q - 1)
        return q * (X.T @ w) / X.shape[0]

    best_val, best_x, evals, per_start = np.inf, None, 0, []
    for x0 in _starts(ell, restarts, seed):
        x, val, n = _sphere_search(objective, gradient, x0, -1.0)
        evals += n
        per_start.append(val ** (1.0 / q))
        if val < best_val:
            best_val, best_x = val, x
    best_x = best_x * np.sign(best_x[np.argmax(np.abs(best_x))])
    return RatioResult(
        ratio=best_val ** (1.0 / q),
        vector=best_x,
        method=f"projected gradient descent, cube enumeration, {len(per_start)} starts",
        ell=ell,
        exponent=float(q),
        evaluations=evals,
        restarts=per_start,
    )


def holder_reverse_constant(q: float) -> float:
    """Constant C with ||f||_2 <= C ||f||_q on the Rademacher span.

    Interpolating, ||f||_2 <= ||f||_q^t ||f||_4^(1-t) with t = q/(4-q), and
    ||f||_4 <= 3^(1/4) ||f||_2 gives C = 3^((1-t)/(4t)) = 3^((2-q)/(2q)).
    """
    if not 0 < q < 2:
        raise ValueError(f"q must lie in (0, 2), got {q}")
    return 3.0 ** ((2.0 - q) / (2.0 * q))


def khintchine_p4_closed_form(ell: int) -> float:
    """Exact best constant for p = 4 at dimension ``ell``: (3 - 2/ell)^(1/4)."""
    return (3.0 - 2.0 / ell) ** 0.25


def gaussian_dominant(s: int) -> float:
    """(2s)! / (2^s s!), the 2s-th moment of a standard normal."""
    return math.factorial(2 * s) / (2**s * math.factorial(s))
