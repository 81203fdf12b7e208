"""Absolute moments of the Gaussian weight exp(-pi x^2) and of linear
functionals x -> <x, v> on R^n under exp(-pi <x, x>).

The weight has total mass one, so its coordinates are iid normals with
variance 1/(2 pi).  The quadrature routines here are deliberately simple
(composite Gauss-Legendre on [-6, 6], tensor products for n <= 3) and serve
as an independent check of the closed forms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

CUTOFF = 6.0  # exp(-pi * 36) < 1e-49


@dataclass(frozen=True)
class GaussianMoment:
    p: float
    value: float

    @property
    def root(self) -> float:
        if self.p == 0:
            raise ValueError("root undefined for p = 0")
        return self.value ** (1.0 / self.p)


def _check_p(p: float, strict: bool = False):
    if not math.isfinite(p) or p < 0 or (strict and p == 0):
        bound = "> 0" if strict else ">= 0"
        raise ValueError(f"p must be finite and {bound}, got {p}")


def gaussian_moment(p: float) -> GaussianMoment:
    """int |x|^p exp(-pi x^2) dx = pi^(-(p+1)/2) Gamma((p+1)/2)."""
    _check_p(p)
    h = 0.5 * (p + 1.0)
    if h < 150.0:
        value = math.gamma(h) / math.pi**h
    else:
        value = math.exp(math.lgamma(h) - h * math.log(math.pi))
    return GaussianMoment(float(p), value)


@lru_cache(maxsize=None)
def _gl_rule(order: int) -> tuple[np.ndarray, np.ndarray]:
    return np.polynomial.legendre.leggauss(order)


def panel_rule(breaks, order: int = 20) -> tuple[np.ndarray, np.ndarray]:
    """Composite Gauss-Legendre nodes and weights over consecutive ``breaks``."""
    t, w = _gl_rule(order)
    breaks = np.asarray(breaks, dtype=np.float64)
    lo, hi = breaks[:-1, None], breaks[1:, None]
    half = 0.5 * (hi - lo)
    nodes = (lo + hi) * 0.5 + half * t[None, :]
    weights = half * w[None, :]
    return nodes.ravel(), weights.ravel()


def _half_line_breaks(panels: int, grading: int) -> np.ndarray:
    # geometric panels toward 0 absorb the |x|^p kink for non-integer p
    graded = CUTOFF / panels * 2.0 ** -np.arange(grading, 0, -1)
    uniform = np.linspace(0.0, CUTOFF, panels + 1)[1:]
    return np.concatenate([[0.0], graded, uniform])


def moment_quadrature(p: float, panels: int = 24, order: int = 20, grading: int = 40) -> float:
    """1-d absolute moment by composite Gauss-Legendre on [0, 6], doubled."""
    _check_p(p)
    x, w = panel_rule(_half_line_breaks(panels, grading), order)
    return 2.0 * math.fsum(w * x**p * np.exp(-math.pi * x * x))


def linear_functional_moment(v, p: float) -> float:
    """(int_{R^n} |<x, v>|^p exp(-pi <x, x>) dx)^(1/p) = |v| * gaussian_moment(p).root."""
    v = np.asarray(v, dtype=np.float64)
    if v.ndim != 1 or v.size == 0:
        raise ValueError("v must be a nonempty vector")
    if not np.all(np.isfinite(v)):
        raise ValueError("v must be finite")
    _check_p(p, strict=True)
    return float(np.linalg.norm(v)) * gaussian_moment(p).root


def tensor_quadrature(func, n: int, panels: int = 12, order: int = 16) -> float:
    """int_{[-6,6]^n} func(x) exp(-pi |x|^2) dx by a tensor Gauss-Legendre rule.

    ``func`` receives an array of shape ``(N, n)`` and returns ``N`` values.
    Only ``n <= 3`` is supported.
    """
    if not 1 <= n <= 3:
        raise ValueError(f"tensor quadrature supports 1 <= n <= 3, got {n}")
    x, w = panel_rule(np.linspace(-CUTOFF, CUTOFF, panels + 1), order)
    w = w * np.exp(-math.pi * x * x)
    grids = np.meshgrid(*([x] * n), indexing="ij")
    pts = np.stack([g.ravel() for g in grids], axis=1)
    wt = w
    for _ in range(n - 1):
        wt = np.multiply.outer(wt, w)
    return math.fsum(wt.ravel() * func(pts))


def linear_functional_moment_quadrature(v, p: float, **kw) -> float:
    """Same quantity as :func:`linear_functional_moment`, by n-dim quadrature."""
    v = np.asarray(v, dtype=np.float64)
    _check_p(p, strict=True)
    val = tensor_quadrature(lambda pts: np.abs(pts @ v) ** p, v.size, **kw)
    return val ** (1.0 / p)


def gaussian_khintchine_limit(p: float) -> float:
    """||g||_p / ||g||_2 for a centered normal g; 3**0.25 at p = 4."""
    if not p >= 1:
        raise ValueError(f"p must be >= 1, got {p}")
    return gaussian_moment(p).root / gaussian_moment(2.0).root
