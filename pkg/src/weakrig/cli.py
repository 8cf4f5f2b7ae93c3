"""weakrig command line: analyze, simulate, grow, check-gradient.

Exit codes form a stable contract: 0 success/rigid, 1 error, 2 not rigid
(or failed gradient check), 3 timeout, 4 converged to an incorrect
equilibrium.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import fileio
from .core import Framework, build_graph
from .errors import WeakRigError
from .formation import (
    SimulationConfig,
    classify_equilibrium,
    control_law,
    is_three_agent_topology,
    simulate,
)
from .henneberg import grow_random
from .rigidity import (
    classify_infinitesimal_weak_rigidity,
    classify_weak_rigidity_3d,
    finite_difference_weak_rigidity_matrix,
    weak_rigidity_matrix,
)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_NOT_RIGID = 2
EXIT_TIMEOUT = 3
EXIT_INCORRECT_EQ = 4

GRADIENT_CHECK_THRESHOLD = 1e-6

# Default triangle seed for growth (near-equilateral, side ~2).
K3_SEED_POSITIONS = [[-1.732, 0.0], [0.0, 1.0], [0.0, -1.0]]


def _positive(name):
    def parse(text):
        value = float(text)
        if value <= 0.0:
            raise argparse.ArgumentTypeError(f"{name} must be positive, got {text}")
        return value
    return parse


def _non_negative(name):
    def parse(text):
        value = float(text)
        if value < 0.0:
            raise argparse.ArgumentTypeError(f"{name} must be >= 0, got {text}")
        return value
    return parse


def _fraction(name):
    def parse(text):
        value = float(text)
        if not 0.0 <= value <= 1.0:
            raise argparse.ArgumentTypeError(f"{name} must lie in [0, 1], got {text}")
        return value
    return parse


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="weakrig", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="rank-test a framework file for weak rigidity")
    p.add_argument("framework", help="framework JSON file")
    p.add_argument("--tol", type=_positive("--tol"), default=1e-9,
                   help="relative singular-value tolerance (default 1e-9)")
    p.add_argument("--mode", choices=["auto", "2d", "3d"], default="auto",
                   help="force the 2D or 3D test (default: by file dim)")
    p.add_argument("--json", action="store_true", help="emit the report as JSON")

    p = sub.add_parser("simulate", help="integrate the gradient formation flow")
    p.add_argument("framework", help="framework JSON file (initial condition)")
    p.add_argument("--targets", required=True, help="target JSON file")
    p.add_argument("--dt", type=_positive("--dt"), default=1e-3)
    p.add_argument("--t-max", type=_non_negative("--t-max"), default=50.0)
    p.add_argument("--eps", type=_positive("--eps"), default=1e-8,
                   help="convergence threshold on ||e||")
    p.add_argument("--out", help="write the trace as CSV to this path")
    p.add_argument("--json", action="store_true", help="emit the summary as JSON")

    p = sub.add_parser("grow", help="grow a minimally weakly rigid framework")
    p.add_argument("--n", type=int, required=True, help="target vertex count (>= 3)")
    p.add_argument("--seed", type=int, required=True, help="RNG seed")
    p.add_argument("--mix", type=_fraction("--mix"), default=0.5,
                   help="probability of a 0-extension per step (default 0.5)")
    p.add_argument("--out", help="write the final framework JSON here")
    p.add_argument("--log", help="write the replayable growth log here")

    p = sub.add_parser("check-gradient", help="compare the analytic matrix to finite differences")
    p.add_argument("framework", help="framework JSON file")
    p.add_argument("--fd-step", type=_positive("--fd-step"), default=1e-6)

    return parser


def cmd_analyze(args) -> int:
    f = fileio.load_framework(args.framework)
    if args.mode != "auto" and int(args.mode[0]) != f.dim:
        print(f"error: file has dim {f.dim} but --mode {args.mode} was requested", file=sys.stderr)
        return EXIT_ERROR
    if f.dim == 2:
        report = classify_infinitesimal_weak_rigidity(f, rel_tol=args.tol)
    else:
        report = classify_weak_rigidity_3d(f, rel_tol=args.tol)
    if args.json:
        print(fileio.report_to_json(report))
    else:
        print(f"rank {report.rank}/{report.required_rank} - {report.verdict}")
        print(f"null space dimension: {report.null_space_dim}")
        print(f"trivial motion residual: {report.trivial_motion_residual:.3e}")
        print(f"rank tolerance: {report.tolerance_used:g}")
        if report.note:
            print(f"note: {report.note}")
    return EXIT_OK if report.rigid else EXIT_NOT_RIGID


def cmd_simulate(args) -> int:
    f0 = fileio.load_framework(args.framework)
    if f0.dim != 2:
        print("error: simulation needs a 2D framework", file=sys.stderr)
        return EXIT_ERROR
    targets = fileio.load_targets(args.targets, f0.graph)
    canonical = is_three_agent_topology(f0.graph)
    if not canonical:
        print("warning: not the canonical three-agent topology; no stability claims apply",
              file=sys.stderr)
    cfg = SimulationConfig(dt=args.dt, t_max=args.t_max, convergence_eps=args.eps)
    trace = simulate(f0, targets, cfg)
    if args.out:
        fileio.write_trace_csv(trace, args.out)
    terminal = f0.with_positions(trace.final_positions())
    grad_norm = float(np.linalg.norm(control_law(terminal, targets)))
    summary = {
        "status": trace.terminal_status,
        "steps": len(trace) - 1,
        "t_final": float(trace.times[-1]),
        "final_error_norm": float(trace.error_norm[-1]),
        "final_gradient_norm": grad_norm,
    }
    code = {"converged": EXIT_OK, "max-time": EXIT_TIMEOUT}.get(trace.terminal_status, EXIT_ERROR)
    if canonical and trace.terminal_status != "converged":
        eq = classify_equilibrium(terminal, targets, tol=args.eps)
        summary["terminal_kind"] = eq.kind
        summary["collinear"] = eq.collinear
        summary["min_jacobian_eig"] = eq.min_jacobian_eig
        if eq.kind == "incorrect":
            code = EXIT_INCORRECT_EQ
    if args.json:
        print(json.dumps(summary, sort_keys=True))
    else:
        print(f"status: {summary['status']}")
        print(f"steps taken: {summary['steps']} (t = {summary['t_final']:g})")
        print(f"final ||e|| = {summary['final_error_norm']:.6e}")
        print(f"final ||grad|| = {summary['final_gradient_norm']:.6e}")
        if summary.get("terminal_kind") == "incorrect":
            print(f"terminal state is an incorrect equilibrium "
                  f"(collinear={summary['collinear']}, "
                  f"min Jacobian eigenvalue {summary['min_jacobian_eig']:.6g} < 0: unstable)")
    return code


def cmd_grow(args) -> int:
    if args.n < 3:
        print("error: --n must be at least 3", file=sys.stderr)
        return EXIT_ERROR
    seed_fw = Framework(
        graph=build_graph(3, edges=[(0, 1), (0, 2), (1, 2)]),
        dim=2,
        positions=np.array(K3_SEED_POSITIONS),
    )
    result = grow_random(seed_fw, steps=args.n - 3, rng_seed=args.seed, mix=args.mix)
    final = result.final
    if args.out:
        fileio.dump_framework(final, args.out)
    else:
        print(json.dumps(fileio.framework_to_dict(final), indent=2, sort_keys=True))
    if args.log:
        fileio.write_growth_log(result.steps, args.log)
    g = final.graph
    print(f"grew to n={g.n} with {g.m} edges + {g.q} angles "
          f"= {g.constraint_count} constraints (2n-3 = {2 * g.n - 3})", file=sys.stderr)
    return EXIT_OK


def cmd_check_gradient(args) -> int:
    f = fileio.load_framework(args.framework)
    if f.dim != 2:
        print("error: gradient check needs a 2D framework", file=sys.stderr)
        return EXIT_ERROR
    analytic = weak_rigidity_matrix(f).matrix
    fd = finite_difference_weak_rigidity_matrix(f, step=args.fd_step)
    deviation = float(np.max(np.abs(analytic - fd))) if analytic.size else 0.0
    print(f"max |analytic - finite difference| = {deviation:.6e}")
    return EXIT_OK if deviation < GRADIENT_CHECK_THRESHOLD else EXIT_NOT_RIGID


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {
        "analyze": cmd_analyze,
        "simulate": cmd_simulate,
        "grow": cmd_grow,
        "check-gradient": cmd_check_gradient,
    }
    try:
        return handlers[args.command](args)
    except (WeakRigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
