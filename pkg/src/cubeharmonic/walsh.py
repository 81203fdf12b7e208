"""Walsh basis and the fast Walsh-Hadamard transform.

Spectra are indexed by subset bitmask: coefficient ``m`` belongs to the
Walsh function w_I with I = {j : bit j-1 of m is set}.  Under the cube
encoding, w_I(x(b)) = (-1)**popcount(m & b), so analysis and synthesis are
the same butterfly and differ only by the 2**-ell factor, which lives in
:func:`analyze`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cube import MAX_ELL, CubeFunction


@dataclass(frozen=True, eq=False)
class WalshSpectrum:
    ell: int
    coeffs: np.ndarray

    def __post_init__(self):
        if not 1 <= int(self.ell) <= MAX_ELL:
            raise ValueError(f"ell must lie in [1, {MAX_ELL}], got {self.ell}")
        c = np.array(self.coeffs, dtype=np.float64)
        if c.ndim != 1 or c.shape[0] != 1 << self.ell:
            raise ValueError(
                f"coeffs must have exactly {1 << self.ell} entries, got shape {c.shape}"
            )
        if not np.all(np.isfinite(c)):
            raise ValueError("coeffs must be finite")
        c.setflags(write=False)
        object.__setattr__(self, "ell", int(self.ell))
        object.__setattr__(self, "coeffs", c)

    def __getitem__(self, mask: int) -> float:
        return float(self.coeffs[mask])

    def support(self, atol: float = 1e-12) -> list[int]:
        return [int(m) for m in np.flatnonzero(np.abs(self.coeffs) > atol)]

    def energy(self) -> float:
        return float(np.dot(self.coeffs, self.coeffs))


def fwht(values: np.ndarray) -> np.ndarray:
    """Unnormalized Walsh-Hadamard transform along the last axis.

    Works on a private copy; the argument is never modified.  The last axis
    must have power-of-two length.
    """
    x = np.array(values, dtype=np.float64, copy=True)
    n = x.shape[-1]
    if n & (n - 1):
        raise ValueError(f"length {n} is not a power of two")
    lead = x.shape[:-1]
    h = 1
    while h < n:
        y = x.reshape(*lead, n // (2 * h), 2, h)
        a = y[..., 0, :].copy()
        b = y[..., 1, :]
        y[..., 0, :] += b
        y[..., 1, :] = a - b
        h *= 2
    return x


def subset_mask(subset) -> int:
    """Bitmask of a collection of 1-based coordinate indices."""
    m = 0
    for j in subset:
        if j < 1:
            raise ValueError(f"coordinate indices are 1-based, got {j}")
        m |= 1 << (j - 1)
    return m


def walsh_function(ell: int, subset) -> CubeFunction:
    """w_I as a cube function; ``subset`` is a bitmask or an iterable of indices."""
    mask = subset if isinstance(subset, (int, np.integer)) else subset_mask(subset)
    if not 0 <= mask < 1 << ell:
        raise ValueError(f"subset mask {mask} out of range for ell={ell}")
    b = np.arange(1 << ell, dtype=np.int64) & int(mask)
    parity = np.zeros_like(b)
    while np.any(b):
        parity ^= b & 1
        b >>= 1
    return CubeFunction(ell, 1.0 - 2.0 * parity)


def analyze(f: CubeFunction) -> WalshSpectrum:
    return WalshSpectrum(f.ell, fwht(f.values) / f.size)


def synthesize(s: WalshSpectrum) -> CubeFunction:
    return CubeFunction(s.ell, fwht(s.coeffs))


def rademacher_span(a) -> CubeFunction:
    """sum_j a_j r_j on the cube of dimension ``len(a)``."""
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 1 or a.size == 0:
        raise ValueError("coefficient vector must be a nonempty 1-d array")
    ell = a.size
    b = np.arange(1 << ell)[:, None]
    signs = 1.0 - 2.0 * ((b >> np.arange(ell)[None, :]) & 1)
    return CubeFunction(ell, signs @ a)
