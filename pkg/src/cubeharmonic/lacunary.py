"""Lacunary polynomials f(z) = sum_j c_j z^(2^j) on the unit circle.

Only the trivial coincidences 2^a + 2^b = 2^a + 2^b survive when |f|^4 is
expanded and integrated, which gives

    ||f||_4^4 = 2 (sum |c_j|^2)^2 - sum |c_j|^4.

The circle quadrature below averages |f|^p over M-th roots of unity.  For
even p and M larger than the top frequency of |f|^p it is exact, so it is
used as an oracle for the closed forms.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

MAX_M = 20


@dataclass(frozen=True, eq=False)
class LacunaryPolynomial:
    c: np.ndarray

    def __post_init__(self):
        c = np.array(self.c, dtype=np.complex128)
        if c.ndim != 1 or c.size == 0:
            raise ValueError("coefficients must form a nonempty 1-d array")
        if c.size - 1 > MAX_M:
            raise ValueError(f"at most {MAX_M + 1} coefficients (frequency 2^{MAX_M})")
        if not np.all(np.isfinite(c)):
            raise ValueError("coefficients must be finite")
        c.setflags(write=False)
        object.__setattr__(self, "c", c)

    @property
    def m(self) -> int:
        return self.c.size - 1

    def __call__(self, z):
        z = np.asarray(z, dtype=np.complex128)
        return sum(cj * z ** (1 << j) for j, cj in enumerate(self.c))


def _poly(f) -> LacunaryPolynomial:
    return f if isinstance(f, LacunaryPolynomial) else LacunaryPolynomial(f)


def l2_norm(f) -> float:
    f = _poly(f)
    return math.sqrt(math.fsum(np.abs(f.c) ** 2))


def l4_norm_closed(f) -> float:
    f = _poly(f)
    sq = np.abs(f.c) ** 2
    s2 = math.fsum(sq)
    return max(2.0 * s2 * s2 - math.fsum(sq * sq), 0.0) ** 0.25


def is_collision(j1: int, j2: int, l1: int, l2: int) -> bool:
    return (1 << j1) + (1 << j2) == (1 << l1) + (1 << l2)


def collision_check(max_j: int):
    """Check 2^j1 + 2^j2 = 2^l1 + 2^l2 iff {j1, j2} = {l1, l2} on [0, max_j]^4.

    Returns ``True``, or ``(False, tuple)`` with the first counterexample.
    """
    if not 0 <= max_j <= MAX_M:
        raise ValueError(f"max_j must lie in [0, {MAX_M}], got {max_j}")
    for t in itertools.product(range(max_j + 1), repeat=4):
        j1, j2, l1, l2 = t
        if is_collision(*t) != ((j1 == l1 and j2 == l2) or (j1 == l2 and j2 == l1)):
            return False, t
    return True


def _top_frequency(m: int, p: int) -> int:
    # |f|^p = f^(p/2) conj(f)^(p/2); frequencies of f lie in [1, 2^m]
    return (p // 2) * ((1 << m) - 1)


def default_points(m: int, p: int) -> int:
    """Smallest power of two exceeding p * 2^m + 1."""
    target = p * (1 << m) + 1
    return 1 << target.bit_length()


def circle_quadrature_norm(f, p: int, M: int | None = None) -> float:
    """((1/M) sum_k |f(e^{2 pi i k/M})|^p)^(1/p) for even ``p``."""
    f = _poly(f)
    if isinstance(p, bool) or int(p) != p or p <= 0 or p % 2:
        raise ValueError(f"p must be an even positive integer, got {p}")
    p = int(p)
    if M is None:
        M = default_points(f.m, p)
    if M <= _top_frequency(f.m, p):
        raise ValueError(
            f"M={M} too small: |f|^{p} has frequencies up to {_top_frequency(f.m, p)}"
        )
    roots = np.exp(2j * np.pi * np.arange(M) / M)
    k = np.arange(M, dtype=np.int64)
    vals = np.zeros(M, dtype=np.complex128)
    for j, cj in enumerate(f.c):
        vals += cj * roots[(k << j) % M]
    return math.fsum(np.abs(vals) ** p / M) ** (1.0 / p)
