"""Dyadic filtration on the cube: conditional expectations, blocks, maximal
and square functions, stopping-time (Calderon-Zygmund) blocks.

The level-k block through x is N_k(x) = {y : y_j = x_j for j <= k}.  With
the cube encoding a block is the set of indices sharing the low ``k`` bits
``prefix``, so E_k is an average over the high ``ell - k`` bits.

Most routines have a ``*_values`` twin that works on raw arrays whose last
axis has length ``2**ell``; leading axes are treated as a batch.  The sweeps
in :func:`empirical_constants` go through those.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .cube import CubeFunction, MAX_ELL, rademacher


def _ell_of(values: np.ndarray) -> int:
    n = values.shape[-1]
    if n < 2 or n & (n - 1):
        raise ValueError(f"last axis must have length 2**ell with ell >= 1, got {n}")
    return n.bit_length() - 1


def block_means(values: np.ndarray) -> list[np.ndarray]:
    """Block averages at every level, coarsest first.

    Entry ``k`` has last axis ``2**k``: the average of ``values`` over the
    level-k block with the given prefix.  Costs O(2**ell) in total.
    """
    values = np.asarray(values, dtype=np.float64)
    ell = _ell_of(values)
    levels = [values]
    c = values
    for k in range(ell - 1, -1, -1):
        half = 1 << k
        c = 0.5 * (c[..., :half] + c[..., half:])
        levels.append(c)
    levels.reverse()
    return levels


def _expand(c: np.ndarray, ell: int) -> np.ndarray:
    reps = (1 << ell) // c.shape[-1]
    return np.tile(c, (1,) * (c.ndim - 1) + (reps,))


def expectation_values(values: np.ndarray) -> list[np.ndarray]:
    """E_0 f, ..., E_ell f as full-length arrays (batched)."""
    values = np.asarray(values, dtype=np.float64)
    ell = _ell_of(values)
    return [_expand(c, ell) for c in block_means(values)]


def conditional_expectation(f: CubeFunction, k: int) -> CubeFunction:
    """E_k f: the average of f over N_k(x), as a function of x."""
    if not 0 <= k <= f.ell:
        raise ValueError(f"level k={k} outside [0, {f.ell}]")
    c = f.values
    for j in range(f.ell - 1, k - 1, -1):
        half = 1 << j
        c = 0.5 * (c[:half] + c[half:])
    return CubeFunction(f.ell, _expand(c, f.ell))


def expectation_levels(f: CubeFunction) -> list[CubeFunction]:
    return [CubeFunction(f.ell, e) for e in expectation_values(f.values)]


def martingale_differences(f: CubeFunction) -> list[CubeFunction]:
    """[E_0 f, E_1 f - E_0 f, ..., E_ell f - E_{ell-1} f]; these sum to f."""
    levels = expectation_levels(f)
    return [levels[0]] + [levels[k] - levels[k - 1] for k in range(1, len(levels))]


def depends_on_first(f: CubeFunction, k: int, atol: float = 1e-10) -> bool:
    """True if f is (numerically) a function of x_1..x_k alone."""
    return conditional_expectation(f, k).allclose(f, atol=atol)


def martingale_split(f: CubeFunction, k: int) -> tuple[CubeFunction, CubeFunction]:
    """Write f = f1 + r_{k+1} f2 with f1, f2 depending on x_1..x_k only.

    ``f`` must depend on the first ``k + 1`` coordinates only.  Then
    f1 = E_k f and f2 = E_k(r_{k+1} f).
    """
    if not 0 <= k < f.ell:
        raise ValueError(f"level k={k} outside [0, {f.ell - 1}]")
    if not depends_on_first(f, k + 1):
        raise ValueError(f"f depends on coordinates beyond x_{k + 1}")
    r = rademacher(f.ell, k + 1)
    return conditional_expectation(f, k), conditional_expectation(r * f, k)


def maximal_values(values: np.ndarray) -> np.ndarray:
    """max_k |E_k f| pointwise (batched)."""
    values = np.asarray(values, dtype=np.float64)
    ell = _ell_of(values)
    out = np.abs(values).copy()
    for c in block_means(values)[:-1]:
        np.maximum(out, _expand(np.abs(c), ell), out=out)
    return out


def maximal_function(f: CubeFunction) -> CubeFunction:
    return CubeFunction(f.ell, maximal_values(f.values))


def square_values(values: np.ndarray) -> np.ndarray:
    """(|E_0 f|^2 + sum_k |E_k f - E_{k-1} f|^2)^(1/2) pointwise (batched)."""
    levels = expectation_values(values)
    acc = levels[0] ** 2
    for k in range(1, len(levels)):
        acc += (levels[k] - levels[k - 1]) ** 2
    return np.sqrt(acc)


def square_function(f: CubeFunction) -> CubeFunction:
    return CubeFunction(f.ell, square_values(f.values))


def truncate_above(f: CubeFunction, lam: float) -> CubeFunction:
    """f where |f| > lam, zero elsewhere."""
    if not lam > 0:
        raise ValueError(f"lambda must be positive, got {lam}")
    v = f.values
    return CubeFunction(f.ell, np.where(np.abs(v) > lam, v, 0.0))


@dataclass(frozen=True, order=True)
class DyadicBlock:
    """The block N_k(x): all points agreeing with ``prefix`` in the low ``level`` bits."""

    ell: int
    level: int
    prefix: int

    def __post_init__(self):
        if not 1 <= self.ell <= MAX_ELL:
            raise ValueError(f"ell must lie in [1, {MAX_ELL}], got {self.ell}")
        if not 0 <= self.level <= self.ell:
            raise ValueError(f"level {self.level} outside [0, {self.ell}]")
        if not 0 <= self.prefix < 1 << self.level:
            raise ValueError(
                f"prefix {self.prefix} has bits at or above level {self.level}"
            )

    @classmethod
    def through(cls, ell: int, level: int, point: int) -> "DyadicBlock":
        """N_level(x) for the point with index ``point``."""
        return cls(ell, level, point & ((1 << level) - 1))

    @property
    def size(self) -> int:
        return 1 << (self.ell - self.level)

    @property
    def measure(self) -> float:
        return 2.0 ** -self.level

    def members(self) -> np.ndarray:
        hi = np.arange(1 << (self.ell - self.level), dtype=np.int64)
        return (hi << self.level) | self.prefix

    def __contains__(self, point: int) -> bool:
        return (point & ((1 << self.level) - 1)) == self.prefix

    def issubset(self, other: "DyadicBlock") -> bool:
        if self.ell != other.ell:
            raise ValueError("blocks live on different cubes")
        mask = (1 << other.level) - 1
        return self.level >= other.level and (self.prefix & mask) == other.prefix

    def isdisjoint(self, other: "DyadicBlock") -> bool:
        if self.ell != other.ell:
            raise ValueError("blocks live on different cubes")
        mask = (1 << min(self.level, other.level)) - 1
        return (self.prefix & mask) != (other.prefix & mask)

    def mean(self, f: CubeFunction) -> float:
        return float(np.mean(f.values[self.members()]))


def all_blocks(ell: int) -> Iterator[DyadicBlock]:
    for k in range(ell + 1):
        for p in range(1 << k):
            yield DyadicBlock(ell, k, p)


@dataclass(frozen=True)
class LevelSet:
    """Strict superlevel set {M f > lam} with its normalized measure."""

    lam: float
    members: frozenset
    measure: float

    def __post_init__(self):
        if not 0.0 <= self.measure <= 1.0:
            raise ValueError(f"measure {self.measure} outside [0, 1]")


def superlevel_set(f: CubeFunction, lam: float) -> LevelSet:
    if not lam > 0:
        raise ValueError(f"lambda must be positive, got {lam}")
    idx = np.flatnonzero(maximal_values(f.values) > lam)
    return LevelSet(float(lam), frozenset(int(i) for i in idx), idx.size / f.size)


def cz_blocks(f: CubeFunction, lam: float) -> list[DyadicBlock]:
    """Maximal dyadic blocks on which |average of f| exceeds ``lam``.

    Scans from the coarsest level down, stopping at the first block whose
    average exceeds ``lam`` and never descending into it.  The result is
    pairwise disjoint and its union is {M f > lam}.
    """
    if not lam > 0:
        raise ValueError(f"lambda must be positive, got {lam}")
    blocks = []
    active = np.ones(1, dtype=bool)
    for k, c in enumerate(block_means(f.values)):
        hit = active & (np.abs(c) > lam)
        blocks.extend(DyadicBlock(f.ell, k, int(p)) for p in np.flatnonzero(hit))
        active = np.tile(active & ~hit, 2)
    return blocks


def random_functions(
    rng: np.random.Generator, ell: int, count: int, kind: str = "gaussian"
) -> np.ndarray:
    """A ``(count, 2**ell)`` batch of random function values.

    ``gaussian``: iid standard normal; ``sign``: iid +-1; ``sparse``: normal
    values on a random support of density 2**-u, u uniform in [0, ell].
    Every row of the sparse ensemble has at least one nonzero entry.
    """
    n = 1 << ell
    if kind == "gaussian":
        return rng.standard_normal((count, n))
    if kind == "sign":
        return rng.choice([-1.0, 1.0], size=(count, n))
    if kind == "sparse":
        density = 2.0 ** -rng.uniform(0.0, ell, size=(count, 1))
        vals = rng.standard_normal((count, n)) * (rng.random((count, n)) < density)
        anchor = rng.integers(0, n, size=count)
        vals[np.arange(count), anchor] = rng.standard_normal(count) + 3.0
        return vals
    raise ValueError(f"unknown ensemble {kind!r}")


ENSEMBLES = ("gaussian", "sign", "sparse")


def _batch_norm(values: np.ndarray, p: float) -> np.ndarray:
    a = np.abs(values)
    if np.isinf(p):
        return a.max(axis=-1)
    return np.mean(a**p, axis=-1) ** (1.0 / p)


def empirical_constants(
    ell: int,
    count: int,
    seed: int,
    ps=(1.5, 2.0, 3.0, 4.0),
    chunk: int = 1024,
) -> dict:
    """Observed sup of ||M f||_p/||f||_p and ||S f||_4/||f||_4 at one ``ell``.

    ``count`` functions are split evenly over :data:`ENSEMBLES`; each
    ensemble draws from a generator seeded by (seed, ell, ensemble index).
    These are lower estimates of the true constants at this ``ell`` only.
    """
    best_m = {float(p): 0.0 for p in ps}
    best_s = 0.0
    base, extra = divmod(count, len(ENSEMBLES))
    for e, kind in enumerate(ENSEMBLES):
        rng = np.random.default_rng(np.random.SeedSequence([seed, ell, e]))
        left = base + (e < extra)
        while left > 0:
            b = min(chunk, left)
            left -= b
            vals = random_functions(rng, ell, b, kind)
            mvals = maximal_values(vals)
            for p in ps:
                r = _batch_norm(mvals, p) / _batch_norm(vals, p)
                best_m[float(p)] = max(best_m[float(p)], float(r.max()))
            svals = square_values(vals)
            r = _batch_norm(svals, 4.0) / _batch_norm(vals, 4.0)
            best_s = max(best_s, float(r.max()))
    return {
        "ell": ell,
        "samples": count,
        "maximal": {str(p): v for p, v in best_m.items()},
        "square_l4": best_s,
    }
