"""Real-valued functions on the Boolean cube {-1, +1}^ell.

A function is stored densely as ``2**ell`` doubles.  Entry ``b`` holds the
value at the point whose j-th coordinate is ``+1`` when bit ``j - 1`` of
``b`` is clear and ``-1`` when it is set.  So with ``ell = 2`` the points
are ordered ``(+,+), (-,+), (+,-), (-,-)`` and the first coordinate function
reads ``(1, -1, 1, -1)``.

All averages use the uniform probability measure on the cube.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

MAX_ELL = 24

Number = Union[int, float]


@dataclass(frozen=True, eq=False)
class CubeFunction:
    """Immutable real function on the cube of dimension ``ell``."""

    ell: int
    values: np.ndarray

    def __post_init__(self):
        if isinstance(self.ell, bool) or not isinstance(self.ell, (int, np.integer)):
            raise TypeError(f"ell must be an integer, got {self.ell!r}")
        if not 1 <= self.ell <= MAX_ELL:
            raise ValueError(f"ell must lie in [1, {MAX_ELL}], got {self.ell}")
        vals = np.array(self.values, dtype=np.float64)
        if vals.ndim != 1 or vals.shape[0] != 1 << self.ell:
            raise ValueError(
                f"values must have exactly 2**{self.ell} = {1 << self.ell} entries, "
                f"got shape {vals.shape}"
            )
        if not np.all(np.isfinite(vals)):
            bad = int(np.flatnonzero(~np.isfinite(vals))[0])
            raise ValueError(f"values[{bad}] is not finite")
        vals.setflags(write=False)
        object.__setattr__(self, "ell", int(self.ell))
        object.__setattr__(self, "values", vals)

    @property
    def size(self) -> int:
        return 1 << self.ell

    def _coerce(self, other) -> np.ndarray | float:
        if isinstance(other, CubeFunction):
            if other.ell != self.ell:
                raise ValueError(f"dimension mismatch: {self.ell} vs {other.ell}")
            return other.values
        return float(other)

    def __add__(self, other):
        return CubeFunction(self.ell, self.values + self._coerce(other))

    __radd__ = __add__

    def __sub__(self, other):
        return CubeFunction(self.ell, self.values - self._coerce(other))

    def __rsub__(self, other):
        return CubeFunction(self.ell, self._coerce(other) - self.values)

    def __mul__(self, other):
        return CubeFunction(self.ell, self.values * self._coerce(other))

    __rmul__ = __mul__

    def __neg__(self):
        return CubeFunction(self.ell, -self.values)

    def __abs__(self):
        return CubeFunction(self.ell, np.abs(self.values))

    def __repr__(self):
        return f"CubeFunction(ell={self.ell}, values={self.values.tolist()!r})"

    def allclose(self, other: "CubeFunction", atol: float = 1e-12) -> bool:
        return self.ell == other.ell and bool(
            np.max(np.abs(self.values - other.values)) <= atol
        )


def make_function(ell: int, values) -> CubeFunction:
    """Build a :class:`CubeFunction`, validating length and finiteness."""
    return CubeFunction(ell, values)


def constant(ell: int, c: Number = 1.0) -> CubeFunction:
    return CubeFunction(ell, np.full(1 << ell, float(c)))


def points(ell: int) -> np.ndarray:
    """All cube points as a ``(2**ell, ell)`` array of +-1, row ``b`` is x(b)."""
    b = np.arange(1 << ell)[:, None]
    bits = (b >> np.arange(ell)[None, :]) & 1
    return (1 - 2 * bits).astype(np.float64)


def rademacher(ell: int, j: int) -> CubeFunction:
    """The coordinate function r_j(x) = x_j, with ``1 <= j <= ell``."""
    if not 1 <= j <= ell:
        raise ValueError(f"coordinate index j={j} outside [1, {ell}]")
    b = np.arange(1 << ell)
    return CubeFunction(ell, 1.0 - 2.0 * ((b >> (j - 1)) & 1))


def lp_quantity(f: CubeFunction, p: float) -> float:
    """(2^-ell sum |f|^p)^(1/p) for any p > 0 (not a norm when p < 1)."""
    if not p > 0:
        raise ValueError(f"p must be positive, got {p}")
    if math.isinf(p):
        return float(np.max(np.abs(f.values)))
    a = np.abs(f.values)
    scale = float(a.max())
    if scale == 0.0:
        return 0.0
    # rescale so large p does not overflow
    return scale * float(np.mean((a / scale) ** p)) ** (1.0 / p)


def lp_norm(f: CubeFunction, p: float) -> float:
    """Normalized counting-measure p-norm, ``p >= 1`` or ``p = inf``."""
    if not (p >= 1):
        raise ValueError(
            f"lp_norm requires p >= 1 (got {p}); use lp_quantity for 0 < p < 1"
        )
    return lp_quantity(f, p)


def inner_product(f: CubeFunction, g: CubeFunction) -> float:
    if f.ell != g.ell:
        raise ValueError(f"dimension mismatch: {f.ell} vs {g.ell}")
    return float(np.dot(f.values, g.values)) / f.size
