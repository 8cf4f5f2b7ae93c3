"""Gradient formation control for constraint targets, three-agent analysis.

The control law is the negative gradient of the potential
``V = 0.5 ||e||^2`` where ``e`` stacks squared-distance errors and cosine
errors, i.e. ``u = -R_W^T e``.  Stability analysis (equilibrium
classification, flow Jacobian, collinearity determinant) targets the
canonical three-agent topology: agents 0, 1, 2 with distance constraints
(0,1), (0,2) and the angle at agent 0 toward agents 1 and 2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import Framework, Graph, build_graph, collocation_tolerance, min_separation
from .errors import TargetMismatch, WrongTopology
from .rigidity import weak_rigidity_function, weak_rigidity_matrix

CANONICAL_EDGES = ((0, 1), (0, 2))
CANONICAL_ANGLES = ((0, 1, 2),)

# |det Z| below this (relative to the constrained squared lengths) counts
# as collinear.
COLLINEARITY_REL_TOL = 1e-8


def canonical_three_agent_graph() -> Graph:
    return build_graph(3, edges=CANONICAL_EDGES, angles=CANONICAL_ANGLES)


def is_three_agent_topology(g: Graph) -> bool:
    return g.n == 3 and g.edges == CANONICAL_EDGES and g.angles == CANONICAL_ANGLES


def _normalize_edge(e):
    i, j = e
    return (i, j) if i < j else (j, i)


def _normalize_triple(t):
    k, i, j = t
    return (k, i, j) if i < j else (k, j, i)


@dataclass(frozen=True)
class TargetSpec:
    """Desired squared distances per edge and desired cosines per angle.

    Entries are kept in the order given; :func:`error_vector` requires that
    order to match the framework's constraint order exactly.  Realizability
    is not required.
    """

    sq_distances: tuple[tuple[tuple[int, int], float], ...] = ()
    cosines: tuple[tuple[tuple[int, int, int], float], ...] = ()

    def __post_init__(self):
        sq = tuple((_normalize_edge(e), float(v)) for (e, v) in self.sq_distances)
        cs = tuple((_normalize_triple(t), float(v)) for (t, v) in self.cosines)
        for e, v in sq:
            if v < 0.0:
                raise ValueError(f"desired squared distance for {e} must be >= 0, got {v}")
        for t, v in cs:
            if not -1.0 <= v <= 1.0:
                raise ValueError(f"desired cosine for {t} must lie in [-1, 1], got {v}")
        object.__setattr__(self, "sq_distances", sq)
        object.__setattr__(self, "cosines", cs)

    def values(self) -> np.ndarray:
        return np.array([v for _, v in self.sq_distances] + [v for _, v in self.cosines])


def align_targets(graph: Graph, sq_map, cos_map) -> TargetSpec:
    """Build a TargetSpec in graph constraint order from key/value mappings.

    Raises TargetMismatch if the mappings do not cover the graph's
    constraints exactly.
    """
    sq = {_normalize_edge(e): float(v) for e, v in dict(sq_map).items()}
    cs = {_normalize_triple(t): float(v) for t, v in dict(cos_map).items()}
    missing = [e for e in graph.edges if e not in sq] + [a for a in graph.angles if a not in cs]
    extra = [e for e in sq if e not in set(graph.edges)] + [a for a in cs if a not in set(graph.angles)]
    if missing or extra:
        raise TargetMismatch(f"targets do not cover constraints (missing {missing}, extra {extra})")
    return TargetSpec(
        sq_distances=tuple((e, sq[e]) for e in graph.edges),
        cosines=tuple((a, cs[a]) for a in graph.angles),
    )


def canonical_targets(d01_sq: float, d02_sq: float, cos_angle: float) -> TargetSpec:
    """TargetSpec for the canonical three-agent topology."""
    return TargetSpec(
        sq_distances=(((0, 1), d01_sq), ((0, 2), d02_sq)),
        cosines=(((0, 1, 2), cos_angle),),
    )


def _check_cover(f: Framework, t: TargetSpec) -> None:
    got = tuple(e for e, _ in t.sq_distances)
    want = f.graph.edges
    if got != want:
        raise TargetMismatch(f"distance targets {got} do not match edges {want} in order")
    got_a = tuple(a for a, _ in t.cosines)
    if got_a != f.graph.angles:
        raise TargetMismatch(f"cosine targets {got_a} do not match angles {f.graph.angles} in order")


@dataclass(frozen=True)
class ErrorVector:
    """Constraint errors, distance entries first then cosine entries."""

    values: np.ndarray = field(repr=False)
    m: int

    def norm(self) -> float:
        return float(np.linalg.norm(self.values))


def error_vector(f: Framework, t: TargetSpec) -> ErrorVector:
    """Current constraint values minus targets, in rigidity-matrix row order."""
    _check_cover(f, t)
    e = weak_rigidity_function(f) - t.values()
    return ErrorVector(values=e, m=f.graph.m)


def control_law(f: Framework, t: TargetSpec) -> np.ndarray:
    """Gradient-descent velocity ``-R_W^T e`` as a stacked ``2n`` vector."""
    e = error_vector(f, t)
    R = weak_rigidity_matrix(f)
    return -(R.matrix.T @ e.values)


def _cosine_coefficients(p: np.ndarray):
    """Coefficients of p0, p1, p2 in the three cosine-gradient rows.

    The gradient of the apex-0 cosine with respect to each agent position
    expands uniquely in the position basis with coefficients summing to
    zero per row; these scalars populate the three-agent coefficient
    matrix.
    """
    u = p[1] - p[0]
    v = p[2] - p[0]
    nu2 = float(u @ u)
    nv2 = float(v @ v)
    inv = 1.0 / math.sqrt(nu2 * nv2)
    c = float(u @ v) * inv
    a_u = c / nu2
    a_v = c / nv2
    alpha = (2.0 * inv - a_u - a_v, a_u - inv, a_v - inv)
    beta = (a_u - inv, -a_u, inv)
    gamma = (a_v - inv, inv, -a_v)
    return alpha, beta, gamma


def e_matrix_three_agent(f: Framework, t: TargetSpec) -> np.ndarray:
    """Symmetric 3x3 coefficient matrix E with ``-R_W^T e = -(E (x) I_2) p``."""
    if not is_three_agent_topology(f.graph):
        raise WrongTopology("E(p) is defined for the canonical three-agent topology")
    ev = error_vector(f, t).values
    e01, e02, ec = float(ev[0]), float(ev[1]), float(ev[2])
    alpha, beta, gamma = _cosine_coefficients(f.positions)
    return np.array([
        [2 * e01 + 2 * e02 + alpha[0] * ec, -2 * e01 + alpha[1] * ec, -2 * e02 + alpha[2] * ec],
        [-2 * e01 + beta[0] * ec, 2 * e01 + beta[1] * ec, beta[2] * ec],
        [-2 * e02 + gamma[0] * ec, gamma[1] * ec, 2 * e02 + gamma[2] * ec],
    ])


def flow_jacobian(f: Framework, t: TargetSpec, fd_step: float = 1e-6) -> np.ndarray:
    """Negative Jacobian of the flow by central differences of the control law.

    Equals the Hessian of the potential, so it is symmetric up to the
    finite-difference error.
    """
    x = f.config()
    dim = 2 * f.graph.n
    J = np.empty((dim, dim))
    for c in range(dim):
        xp = x.copy()
        xm = x.copy()
        xp[c] += fd_step
        xm[c] -= fd_step
        up = control_law(f.with_positions(xp.reshape(-1, 2)), t)
        um = control_law(f.with_positions(xm.reshape(-1, 2)), t)
        J[:, c] = -(up - um) / (2.0 * fd_step)
    return J


def collinearity_tolerance(f: Framework) -> float:
    d01 = float(np.sum((f.positions[0] - f.positions[1]) ** 2))
    d02 = float(np.sum((f.positions[0] - f.positions[2]) ** 2))
    return COLLINEARITY_REL_TOL * (1.0 + max(d01, d02))


@dataclass(frozen=True)
class DetZ:
    det: float
    sigma: float


def det_z(f: Framework, t: TargetSpec) -> DetZ:
    """Determinant of the two constrained edge vectors and its decay rate.

    Along the flow, ``d/dt det = -sigma * det``, so collinearity
    (``det = 0``) is invariant.  ``sigma`` is evaluated from the current
    errors and geometry.
    """
    if not is_three_agent_topology(f.graph):
        raise WrongTopology("det Z is defined for the canonical three-agent topology")
    p = f.positions
    z1 = p[0] - p[1]
    z2 = p[0] - p[2]
    det = float(z1[0] * z2[1] - z1[1] * z2[0])
    ev = error_vector(f, t).values
    e01, e02, ec = float(ev[0]), float(ev[1]), float(ev[2])
    n1 = float(z1 @ z1)
    n2 = float(z2 @ z2)
    inv = 1.0 / math.sqrt(n1 * n2)
    c = float(z1 @ z2) * inv
    sigma = 4.0 * e01 + 4.0 * e02 - ec * (2.0 * c * (1.0 / n1 + 1.0 / n2) - 2.0 * inv)
    return DetZ(det=det, sigma=sigma)


@dataclass(frozen=True)
class EquilibriumReport:
    kind: str  # "desired" | "incorrect" | "not-equilibrium"
    min_jacobian_eig: float
    collinear: bool
    error_norm: float
    gradient_norm: float


def classify_equilibrium(f: Framework, t: TargetSpec, tol: float = 1e-6) -> EquilibriumReport:
    """Classify a three-agent state as desired / incorrect / not an equilibrium."""
    if not is_three_agent_topology(f.graph):
        raise WrongTopology("equilibrium classification needs the three-agent topology")
    e = error_vector(f, t)
    grad = weak_rigidity_matrix(f).matrix.T @ e.values
    gnorm = float(np.linalg.norm(grad))
    enorm = e.norm()
    if enorm < tol:
        kind = "desired"
    elif gnorm < tol:
        kind = "incorrect"
    else:
        kind = "not-equilibrium"
    J = flow_jacobian(f, t)
    min_eig = float(np.linalg.eigvalsh(0.5 * (J + J.T))[0])
    collinear = abs(det_z(f, t).det) < collinearity_tolerance(f)
    return EquilibriumReport(
        kind=kind,
        min_jacobian_eig=min_eig,
        collinear=collinear,
        error_norm=enorm,
        gradient_norm=gnorm,
    )


def realize_canonical_targets(t: TargetSpec) -> Framework:
    """One planar realization of canonical three-agent targets.

    Places agent 0 at the origin, agent 1 on the x-axis, agent 2 at the
    target angle.  Needs strictly positive squared distances.
    """
    if len(t.sq_distances) != 2 or len(t.cosines) != 1:
        raise WrongTopology("realization needs canonical three-agent targets")
    d01 = math.sqrt(t.sq_distances[0][1])
    d02 = math.sqrt(t.sq_distances[1][1])
    if d01 == 0.0 or d02 == 0.0:
        raise ValueError("cannot realize zero target distances")
    theta = math.acos(t.cosines[0][1])
    positions = np.array([
        [0.0, 0.0],
        [d01, 0.0],
        [d02 * math.cos(theta), d02 * math.sin(theta)],
    ])
    return Framework(graph=canonical_three_agent_graph(), dim=2, positions=positions)


@dataclass(frozen=True)
class SimulationConfig:
    dt: float = 1e-3
    t_max: float = 50.0
    convergence_eps: float = 1e-8
    divergence_bound: float = 1e6

    def __post_init__(self):
        if self.dt <= 0.0:
            raise ValueError("dt must be positive")
        if self.t_max < 0.0:
            raise ValueError("t_max must be >= 0")


@dataclass(frozen=True)
class SimulationTrace:
    """Dense record of a gradient-flow run, one sample per accepted step."""

    times: np.ndarray = field(repr=False)
    positions: np.ndarray = field(repr=False)  # (T, n, 2)
    errors: np.ndarray = field(repr=False)     # (T, m+q)
    error_norm: np.ndarray = field(repr=False)
    lyapunov: np.ndarray = field(repr=False)
    det_z: np.ndarray | None = field(repr=False)
    terminal_status: str  # "converged" | "max-time" | "diverged" | "degenerate"

    def __len__(self) -> int:
        return len(self.times)

    def final_positions(self) -> np.ndarray:
        return self.positions[-1]


def _rhs_canonical(x, d1s, d2s, cs):
    """Scalar flow for the canonical topology; returns (u, e1, e2, ec, det)."""
    x0, y0, x1, y1, x2, y2 = x
    ax = x0 - x1
    ay = y0 - y1
    bx = x0 - x2
    by = y0 - y2
    n1 = ax * ax + ay * ay
    n2 = bx * bx + by * by
    e1 = n1 - d1s
    e2 = n2 - d2s
    inv = 1.0 / math.sqrt(n1 * n2)
    c = (ax * bx + ay * by) * inv
    ec = (1.0 if c > 1.0 else -1.0 if c < -1.0 else c) - cs
    # cosine gradient rows for agents 1 and 2; apex row is minus their sum
    bgx = -bx * inv + c * ax / n1
    bgy = -by * inv + c * ay / n1
    ggx = -ax * inv + c * bx / n2
    ggy = -ay * inv + c * by / n2
    u = (
        -(2.0 * ax * e1 + 2.0 * bx * e2) + (bgx + ggx) * ec,
        -(2.0 * ay * e1 + 2.0 * by * e2) + (bgy + ggy) * ec,
        2.0 * ax * e1 - bgx * ec,
        2.0 * ay * e1 - bgy * ec,
        2.0 * bx * e2 - ggx * ec,
        2.0 * by * e2 - ggy * ec,
    )
    return u, e1, e2, ec, ax * by - ay * bx


def _simulate_canonical(x0, targets, cfg):
    d1s, d2s, cs = targets
    dt = cfg.dt
    eps = cfg.convergence_eps
    bound = cfg.divergence_bound
    x = tuple(float(v) for v in x0)
    times = [0.0]
    states = [x]
    errs = []
    dets = []

    def record(x):
        _, e1, e2, ec, det = _rhs_canonical(x, d1s, d2s, cs)
        errs.append((e1, e2, ec))
        dets.append(det)
        return math.sqrt(e1 * e1 + e2 * e2 + ec * ec)

    def degenerate(x):
        x0_, y0_, x1_, y1_, x2_, y2_ = x
        tol = collocation_tolerance(np.array(x))
        d01 = math.hypot(x0_ - x1_, y0_ - y1_)
        d02 = math.hypot(x0_ - x2_, y0_ - y2_)
        d12 = math.hypot(x1_ - x2_, y1_ - y2_)
        return min(d01, d02, d12) < tol

    status = "max-time"
    enorm = record(x)
    if degenerate(x):
        status = "degenerate"
    elif enorm < eps:
        status = "converged"
    else:
        k = 0
        sixth = dt / 6.0
        half = 0.5 * dt
        while k * dt < cfg.t_max - 1e-12:
            k1, *_ = _rhs_canonical(x, d1s, d2s, cs)
            xa = tuple(x[i] + half * k1[i] for i in range(6))
            k2, *_ = _rhs_canonical(xa, d1s, d2s, cs)
            xb = tuple(x[i] + half * k2[i] for i in range(6))
            k3, *_ = _rhs_canonical(xb, d1s, d2s, cs)
            xc = tuple(x[i] + dt * k3[i] for i in range(6))
            k4, *_ = _rhs_canonical(xc, d1s, d2s, cs)
            x = tuple(x[i] + sixth * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) for i in range(6))
            k += 1
            times.append(k * dt)
            states.append(x)
            if degenerate(x):
                record(x)
                status = "degenerate"
                break
            enorm = record(x)
            if max(abs(v) for v in x) > bound:
                status = "diverged"
                break
            if enorm < eps:
                status = "converged"
                break
    positions = np.array(states).reshape(len(states), 3, 2)
    errors = np.array(errs)
    error_norm = np.linalg.norm(errors, axis=1)
    return SimulationTrace(
        times=np.array(times),
        positions=positions,
        errors=errors,
        error_norm=error_norm,
        lyapunov=0.5 * error_norm**2,
        det_z=np.array(dets),
        terminal_status=status,
    )


def _rhs_generic(positions, graph, target_values):
    """Gradient flow for an arbitrary constraint graph (no validation)."""
    n = graph.n
    vel = np.zeros((n, 2))
    errs = np.empty(graph.constraint_count)
    for u, (i, j) in enumerate(graph.edges):
        z = positions[i] - positions[j]
        e = float(z @ z) - target_values[u]
        errs[u] = e
        vel[i] -= 2.0 * e * z
        vel[j] += 2.0 * e * z
    for h, (k, i, j) in enumerate(graph.angles):
        zu = positions[i] - positions[k]
        zv = positions[j] - positions[k]
        nu2 = float(zu @ zu)
        nv2 = float(zv @ zv)
        inv = 1.0 / math.sqrt(nu2 * nv2)
        c = float(zu @ zv) * inv
        e = max(-1.0, min(1.0, c)) - target_values[graph.m + h]
        errs[graph.m + h] = e
        gi = zv * inv - c * zu / nu2
        gj = zu * inv - c * zv / nv2
        vel[i] -= e * gi
        vel[j] -= e * gj
        vel[k] += e * (gi + gj)
    return vel, errs


def _simulate_generic(f0: Framework, t: TargetSpec, cfg: SimulationConfig):
    graph = f0.graph
    tv = t.values()
    dt = cfg.dt
    p = f0.positions.copy()
    times = [0.0]
    states = [p.copy()]
    errs = []

    def record(p):
        _, e = _rhs_generic(p, graph, tv)
        errs.append(e)
        return float(np.linalg.norm(e))

    status = "max-time"
    enorm = record(p)
    if min_separation(p) < collocation_tolerance(p):
        status = "degenerate"
    elif enorm < cfg.convergence_eps:
        status = "converged"
    else:
        k = 0
        while k * dt < cfg.t_max - 1e-12:
            k1, _ = _rhs_generic(p, graph, tv)
            k2, _ = _rhs_generic(p + 0.5 * dt * k1, graph, tv)
            k3, _ = _rhs_generic(p + 0.5 * dt * k2, graph, tv)
            k4, _ = _rhs_generic(p + dt * k3, graph, tv)
            p = p + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            k += 1
            times.append(k * dt)
            states.append(p.copy())
            if min_separation(p) < collocation_tolerance(p):
                record(p)
                status = "degenerate"
                break
            enorm = record(p)
            if float(np.max(np.abs(p))) > cfg.divergence_bound:
                status = "diverged"
                break
            if enorm < cfg.convergence_eps:
                status = "converged"
                break
    errors = np.array(errs)
    error_norm = np.linalg.norm(errors, axis=1)
    return SimulationTrace(
        times=np.array(times),
        positions=np.array(states),
        errors=errors,
        error_norm=error_norm,
        lyapunov=0.5 * error_norm**2,
        det_z=None,
        terminal_status=status,
    )


def simulate(f0: Framework, t: TargetSpec, cfg: SimulationConfig | None = None) -> SimulationTrace:
    """Integrate the gradient flow with a classical 4th-order fixed step.

    Terminates on convergence (``||e|| < convergence_eps``), on reaching
    ``t_max``, on collocation (degenerate) or on coordinate blow-up
    (diverged).  The trace records every step, starting with the initial
    condition.
    """
    cfg = cfg or SimulationConfig()
    _check_cover(f0, t)
    if is_three_agent_topology(f0.graph):
        targets = (t.sq_distances[0][1], t.sq_distances[1][1], t.cosines[0][1])
        return _simulate_canonical(f0.config(), targets, cfg)
    return _simulate_generic(f0, t, cfg)
