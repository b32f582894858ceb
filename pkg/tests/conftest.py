import itertools
import random

import pytest

from bockstein.field_linalg import MatrixModP, Prime


def all_vectors(q, n):
    return [tuple(v) for v in itertools.product(range(q), repeat=n)]


def brute_image(psi):
    """Column space of psi, by applying it to every vector."""
    return {psi.matvec(v) for v in all_vectors(psi.p, psi.cols)}


def brute_kernel(psi):
    return {v for v in all_vectors(psi.p, psi.cols) if not any(psi.matvec(v))}


def random_matrix(rng, p, m, n):
    return MatrixModP(Prime(p), m, n, tuple(rng.randrange(p) for _ in range(m * n)))


@pytest.fixture
def rng():
    return random.Random(20261019)
