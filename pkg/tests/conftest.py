import numpy as np
import pytest

from ldpcsched.codegraph import BaseGraph, from_dense, lift_base_graph

TOY_H_4x8 = np.array([
    [1, 1, 0, 1, 0, 0, 1, 0],
    [0, 1, 1, 0, 1, 0, 0, 1],
    [1, 0, 1, 0, 0, 1, 1, 0],
    [0, 0, 0, 1, 1, 1, 0, 1],
], dtype=np.uint8)


@pytest.fixture
def toy48():
    return from_dense(TOY_H_4x8)


@pytest.fixture
def toy48_dense():
    return TOY_H_4x8.copy()


def random_code(rng, n_vars=None, n_checks=None, density=0.4):
    """Random regular-ish parity-check matrix with no empty rows/columns."""
    n = n_vars or int(rng.integers(8, 16))
    m = n_checks or int(rng.integers(4, n - 1))
    H = (rng.random((m, n)) < density).astype(np.uint8)
    for r in range(m):
        if H[r].sum() == 0:
            H[r, rng.integers(0, n)] = 1
    for c in range(n):
        if H[:, c].sum() == 0:
            H[rng.integers(0, m), c] = 1
    return H


@pytest.fixture
def small_lifted():
    """3x6 base, Z=4: a lifted code with layers for layer-mode tests."""
    bg = BaseGraph(
        3, 6,
        np.array([0, 0, 0, 0, 1, 1, 1, 1, 2, 2, 2, 2]),
        np.array([0, 1, 2, 3, 0, 2, 4, 5, 1, 3, 4, 5]),
        np.array([1, 0, 3, 2, 2, 1, 0, 3, 0, 1, 2, 3]),
    )
    graph, layers = lift_base_graph(bg, 4)
    return graph, layers
