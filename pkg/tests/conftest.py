"""Shared fixtures: reference frameworks and random-framework generators."""

from __future__ import annotations

import math

import numpy as np
import pytest

from weakrig import Framework, TargetSpec, build_graph, canonical_targets

# Triangle used throughout the construction examples (near-equilateral, side ~2).
TRIANGLE_POS = np.array([[-1.732, 0.0], [0.0, 1.0], [0.0, -1.0]])

# Four-point rhombus used by the rigidity examples.
RHOMBUS_POS = np.array([[0.0, 1.0], [-1.732, 0.0], [0.0, -1.0], [1.732, 0.0]])

# The six constraint characterizations of the same rhombus shape, from five
# distance edges down to five angles.
RHOMBUS_VARIANTS = {
    "a": (((0, 1), (0, 3), (1, 2), (2, 3), (1, 3)), ()),
    "b": (((0, 3), (1, 2), (2, 3), (1, 3)), ((0, 1, 3),)),
    "c": (((0, 3), (1, 2), (2, 3)), ((0, 1, 3), (2, 1, 3))),
    "d": (((0, 3), (2, 3)), ((0, 1, 3), (2, 1, 3), (3, 1, 2))),
    "e": (((2, 3),), ((0, 1, 3), (2, 1, 3), (3, 1, 2), (1, 0, 3))),
    "f": ((), ((0, 1, 3), (2, 1, 3), (3, 1, 2), (1, 0, 3), (1, 2, 3))),
}

# Three-agent benchmark scenario: two squared distances and one 40-degree angle.
BENCH_INITIAL = np.array([[-3.0, 0.0], [1.0, 1.0], [-1.0, -3.0]])
BENCH_TARGETS = (8.0, 9.0, math.cos(math.radians(40.0)))


def rhombus_framework(variant: str) -> Framework:
    edges, angles = RHOMBUS_VARIANTS[variant]
    return Framework(build_graph(4, edges=edges, angles=angles), 2, RHOMBUS_POS)


@pytest.fixture
def triangle_k3() -> Framework:
    return Framework(build_graph(3, edges=[(0, 1), (0, 2), (1, 2)]), 2, TRIANGLE_POS)


@pytest.fixture
def triangle_two_edges_one_angle() -> Framework:
    return Framework(build_graph(3, edges=[(0, 1), (0, 2)], angles=[(0, 1, 2)]), 2, TRIANGLE_POS)


@pytest.fixture
def bench_initial() -> Framework:
    g = build_graph(3, edges=[(0, 1), (0, 2)], angles=[(0, 1, 2)])
    return Framework(g, 2, BENCH_INITIAL)


@pytest.fixture
def bench_targets() -> TargetSpec:
    return canonical_targets(*BENCH_TARGETS)


@pytest.fixture
def tetra_mixed_3d() -> Framework:
    g = build_graph(4, edges=[(0, 1), (0, 2), (0, 3)], angles=[(0, 1, 2), (0, 1, 3), (0, 2, 3)])
    pos = np.array([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
    return Framework(g, 3, pos)


def random_positions(rng, n, dim=2, min_sep=0.3):
    """Well-separated random points, rejection-sampled."""
    while True:
        pos = rng.normal(scale=2.0, size=(n, dim))
        ok = all(
            np.linalg.norm(pos[i] - pos[j]) > min_sep
            for i in range(n) for j in range(i + 1, n)
        )
        if ok:
            return pos


def random_framework(rng, n=None, allow_empty_edges=True, min_constraints=1):
    """Random 2D framework on 3..6 vertices with a mixed constraint set."""
    n = int(n or rng.integers(3, 7))
    pos = random_positions(rng, n)
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    triples = [
        (k, i, j)
        for k in range(n) for i in range(n) for j in range(i + 1, n)
        if k != i and k != j
    ]
    while True:
        if allow_empty_edges and rng.random() < 0.3:
            edges = []
        else:
            m = int(rng.integers(0, len(pairs) + 1))
            edges = [pairs[t] for t in rng.choice(len(pairs), size=m, replace=False)]
        q = int(rng.integers(0, min(len(triples), 6) + 1))
        angles = [triples[t] for t in rng.choice(len(triples), size=q, replace=False)]
        if len(edges) + len(angles) >= min_constraints:
            return Framework(build_graph(n, edges=edges, angles=angles), 2, pos)


def random_three_agent_state(rng):
    g = build_graph(3, edges=[(0, 1), (0, 2)], angles=[(0, 1, 2)])
    return Framework(g, 2, random_positions(rng, 3))


def random_targets(rng):
    return canonical_targets(
        float(rng.uniform(0.5, 12.0)),
        float(rng.uniform(0.5, 12.0)),
        float(rng.uniform(-0.95, 0.95)),
    )
