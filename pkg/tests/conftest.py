"""Shared fixtures and brute-force oracles.

The oracles here work point by point on explicit +-1 tuples and never call
the transform or block-average code they are used to check.
"""

import itertools

import numpy as np
import pytest


def cube_points(ell):
    """Points in index order: bit j-1 of the index set <=> x_j = -1."""
    pts = []
    for b in range(1 << ell):
        pts.append(tuple(-1 if (b >> j) & 1 else 1 for j in range(ell)))
    return pts


def oracle_expectation(values, ell, k):
    pts = cube_points(ell)
    out = []
    for x in pts:
        block = [values[i] for i, y in enumerate(pts) if y[:k] == x[:k]]
        out.append(sum(block) / len(block))
    return np.array(out)


def oracle_walsh(ell, subset):
    return np.array([np.prod([x[j - 1] for j in subset]) if subset else 1.0
                     for x in cube_points(ell)], dtype=float)


def oracle_subsets(ell):
    for r in range(ell + 1):
        yield from itertools.combinations(range(1, ell + 1), r)


@pytest.fixture
def rng():
    return np.random.default_rng(20041)
