"""Shared fixtures and independent oracles used across the test suite.

The oracles here (exhaustive sign-vector scans, subset enumeration for graph
parameters, brute-force colouring) are deliberately naive so they stay
independent of the code paths they check.
"""
from __future__ import annotations

from itertools import combinations, product as iter_product

import numpy as np
import pytest

from syncgames import BinaryLinearSystem, Graph, mermin_peres_system, pauli_magic_square_rep


@pytest.fixture
def magic_square():
    return mermin_peres_system()


@pytest.fixture
def pauli_rep():
    return pauli_magic_square_rep()


def random_unitary(d: int, rng) -> np.ndarray:
    h = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    q, r = np.linalg.qr(h)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_exact_pvm(d: int, m: int, rng) -> list:
    """m orthogonal projections summing to the identity; zero members allowed."""
    u = random_unitary(d, rng)
    assign = rng.integers(0, m, size=d)
    return [u[:, assign == a] @ u[:, assign == a].conj().T for a in range(m)]


def random_hermitian(d: int, rng, scale: float = 1.0) -> np.ndarray:
    h = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    h = (h + h.conj().T) / 2
    return scale * h / np.linalg.norm(h, 2)


def random_system(rng, max_m: int = 6, max_n: int = 10) -> BinaryLinearSystem:
    m = int(rng.integers(1, max_m + 1))
    n = int(rng.integers(1, max_n + 1))
    rows = []
    for _ in range(m):
        size = int(rng.integers(1, min(n, 4) + 1))
        rows.append(frozenset(int(j) for j in rng.choice(np.arange(1, n + 1), size=size, replace=False)))
    b = tuple(int(v) for v in rng.integers(0, 2, size=m))
    return BinaryLinearSystem(m=m, n=n, rows=tuple(rows), b=b)


def exhaustive_solutions(sys: BinaryLinearSystem) -> list:
    """All global sign-vector solutions by scanning all 2^n assignments."""
    out = []
    for x in iter_product((-1, 1), repeat=sys.n):
        if all(sys.equation_holds(i, x) for i in range(1, sys.m + 1)):
            out.append(x)
    return out


def random_graph(rng, n: int, p: float = 0.5) -> Graph:
    edges = set()
    for u in range(n):
        for v in range(u + 1, n):
            if rng.random() < p:
                edges.add((u, v))
    return Graph(n=n, edges=frozenset(edges))


def brute_alpha(g: Graph) -> int:
    best = 0
    for size in range(g.n, 0, -1):
        if size <= best:
            break
        for subset in combinations(range(g.n), size):
            if all(not g.is_edge(u, v) for u, v in combinations(subset, 2)):
                return size
    return best


def brute_omega(g: Graph) -> int:
    return brute_alpha(g.complement())


def brute_chi(g: Graph) -> int:
    if g.n == 0:
        return 0
    for k in range(1, g.n + 1):
        for colours in iter_product(range(k), repeat=g.n):
            if all(colours[u] != colours[v] for u, v in g.edges):
                return k
    return g.n
