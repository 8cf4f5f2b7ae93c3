"""Graph/framework data model and geometric primitives.

A constraint graph carries an undirected edge set (distance constraints)
and a set of ordered angle triples ``(k, i, j)``: the angle at apex ``k``
subtended by the rays toward ``i`` and ``j``.  A framework attaches a 2D
or 3D configuration to the graph.  Vertices are 0-based everywhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    CollocatedPoints,
    DegenerateAngleTriple,
    DuplicateConstraint,
    EmptyEdgeSet,
    IndexOutOfRange,
    SelfLoop,
)

# Two points closer than this (relative to coordinate magnitude) count as one.
COLLOCATION_REL_TOL = 1e-9

Edge = tuple[int, int]
AngleTriple = tuple[int, int, int]


@dataclass(frozen=True)
class Graph:
    """Constraint graph: ``n`` vertices, normalized edges and angle triples.

    Edges are stored as ``(i, j)`` with ``i < j`` in input order; angle
    triples as ``(k, i, j)`` with ``i < j`` (apex first) in input order.
    Use :func:`build_graph` to construct one with validation.
    """

    n: int
    edges: tuple[Edge, ...] = ()
    angles: tuple[AngleTriple, ...] = ()

    @property
    def m(self) -> int:
        return len(self.edges)

    @property
    def q(self) -> int:
        return len(self.angles)

    @property
    def constraint_count(self) -> int:
        return len(self.edges) + len(self.angles)


def _check_index(v: int, n: int, what: str) -> None:
    if not (0 <= v < n):
        raise IndexOutOfRange(f"{what} refers to vertex {v}, valid range is 0..{n - 1}")


def build_graph(n, edges=(), angles=()) -> Graph:
    """Validate and normalize a constraint graph.

    Raises SelfLoop, DuplicateConstraint, IndexOutOfRange or
    DegenerateAngleTriple on malformed input.
    """
    if n < 1:
        raise IndexOutOfRange(f"vertex count must be positive, got {n}")
    norm_edges: list[Edge] = []
    seen_edges: set[Edge] = set()
    for (i, j) in edges:
        _check_index(i, n, f"edge ({i},{j})")
        _check_index(j, n, f"edge ({i},{j})")
        if i == j:
            raise SelfLoop(f"edge ({i},{j}) is a self-loop")
        e = (i, j) if i < j else (j, i)
        if e in seen_edges:
            raise DuplicateConstraint(f"edge {e} appears more than once")
        seen_edges.add(e)
        norm_edges.append(e)
    norm_angles: list[AngleTriple] = []
    seen_angles: set[AngleTriple] = set()
    for (k, i, j) in angles:
        for v in (k, i, j):
            _check_index(v, n, f"angle ({k},{i},{j})")
        if len({k, i, j}) != 3:
            raise DegenerateAngleTriple(f"angle ({k},{i},{j}) repeats a vertex")
        a = (k, i, j) if i < j else (k, j, i)
        if a in seen_angles:
            raise DuplicateConstraint(f"angle {a} appears more than once")
        seen_angles.add(a)
        norm_angles.append(a)
    return Graph(n=n, edges=tuple(norm_edges), angles=tuple(norm_angles))


def _support_edges(triple: AngleTriple) -> list[Edge]:
    k, i, j = triple
    sides = [(i, j), (i, k), (j, k)]
    return [(a, b) if a < b else (b, a) for (a, b) in sides]


def induced_angle_support(g: Graph) -> Graph:
    """Augment the edge set with the three support edges of every angle.

    Original edges come first in their input order; edges contributed by
    angles follow in sorted order.  Angle triples are kept.
    """
    present = set(g.edges)
    added: set[Edge] = set()
    for triple in g.angles:
        for e in _support_edges(triple):
            if e not in present:
                added.add(e)
    return Graph(n=g.n, edges=g.edges + tuple(sorted(added)), angles=g.angles)


def induced_distance_closure(g: Graph) -> Graph:
    """Convert every angle into its three support edges; drop all angles."""
    closed = induced_angle_support(g)
    return Graph(n=g.n, edges=closed.edges, angles=())


def incidence_matrix(g: Graph) -> np.ndarray:
    """Oriented incidence matrix, one row per edge in graph order.

    Row ``u`` for edge ``(i, j)`` with ``i < j`` has -1 at the source ``i``
    and +1 at the sink ``j``; every row sums to zero.
    """
    if not g.edges:
        raise EmptyEdgeSet("incidence matrix needs at least one edge")
    H = np.zeros((len(g.edges), g.n))
    for u, (i, j) in enumerate(g.edges):
        H[u, i] = -1.0
        H[u, j] = 1.0
    return H


def collocation_tolerance(positions: np.ndarray) -> float:
    """Separation below which two points count as collocated."""
    return COLLOCATION_REL_TOL * (1.0 + float(np.max(np.abs(positions), initial=0.0)))


def min_separation(positions: np.ndarray) -> float:
    """Smallest pairwise distance between the given points."""
    n = positions.shape[0]
    best = math.inf
    for i in range(n):
        for j in range(i + 1, n):
            best = min(best, float(np.linalg.norm(positions[i] - positions[j])))
    return best


@dataclass(frozen=True)
class Framework:
    """A graph together with a configuration in dimension 2 or 3."""

    graph: Graph
    dim: int
    positions: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.dim not in (2, 3):
            raise ValueError(f"dim must be 2 or 3, got {self.dim}")
        pos = np.asarray(self.positions, dtype=float)
        if pos.shape != (self.graph.n, self.dim):
            raise ValueError(
                f"positions must have shape ({self.graph.n}, {self.dim}), got {pos.shape}"
            )
        if self.graph.n >= 2 and min_separation(pos) < collocation_tolerance(pos):
            raise CollocatedPoints("two vertex positions coincide")
        pos.setflags(write=False)
        object.__setattr__(self, "positions", pos)

    @property
    def n(self) -> int:
        return self.graph.n

    def config(self) -> np.ndarray:
        """Stacked configuration vector (length ``dim * n``)."""
        return self.positions.ravel().copy()

    def with_positions(self, positions) -> "Framework":
        return Framework(graph=self.graph, dim=self.dim, positions=np.asarray(positions, float))


@dataclass(frozen=True)
class EdgeVectorSet:
    """Directed edge vectors ``z_u = p_i - p_j`` for edges ``(i, j)``, ``i < j``.

    The orientation (lower index is tail, vector points tail minus head)
    matches the distance rows of the rigidity matrices.  With the oriented
    incidence matrix H of the same edge list, ``stacked() == -(H (x) I) p``.
    """

    edges: tuple[Edge, ...]
    vectors: np.ndarray = field(repr=False)

    def stacked(self) -> np.ndarray:
        return self.vectors.ravel().copy()


def edge_vectors(f: Framework, g_edges) -> EdgeVectorSet:
    """Edge vectors of ``f`` for an ordered edge list (tail = smaller index)."""
    edges = tuple((i, j) if i < j else (j, i) for (i, j) in g_edges)
    vecs = np.array([f.positions[i] - f.positions[j] for (i, j) in edges])
    return EdgeVectorSet(edges=edges, vectors=vecs)


def cosine_of_angle(f: Framework, triple) -> float:
    """Cosine of the angle at apex ``k`` toward ``i`` and ``j``, clamped to [-1, 1].

    Evaluated as the normalized inner product of the two rays, which is the
    law-of-cosines expression in collocation-free configurations.
    """
    k, i, j = triple
    pos = f.positions
    tol = collocation_tolerance(pos)
    u = pos[i] - pos[k]
    v = pos[j] - pos[k]
    nu = float(np.linalg.norm(u))
    nv = float(np.linalg.norm(v))
    if nu < tol or nv < tol or float(np.linalg.norm(pos[i] - pos[j])) < tol:
        raise CollocatedPoints(f"angle ({k},{i},{j}) involves collocated points")
    c = float(u @ v) / (nu * nv)
    return max(-1.0, min(1.0, c))
