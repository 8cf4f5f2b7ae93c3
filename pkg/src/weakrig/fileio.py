"""File formats: framework/target JSON, report JSON, trace CSV, growth logs.

All writers are atomic (write to a temporary file, then rename) and use
locale-independent formatting with 17 significant digits for CSV floats.
"""

from __future__ import annotations

import json
import os
import tempfile

import numpy as np

from .core import Framework, build_graph
from .errors import ParseError, WeakRigError
from .formation import SimulationTrace, TargetSpec, align_targets
from .henneberg import ExtensionStep
from .rigidity import RigidityReport


def _atomic_write(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix="~")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _load_json(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    except OSError as exc:
        raise ParseError(f"{path}: {exc}") from exc


# ---------------------------------------------------------------------------
# framework files


FRAMEWORK_KEYS = {"dim", "positions", "edges", "angles"}


def framework_to_dict(f: Framework) -> dict:
    return {
        "dim": f.dim,
        "positions": [[float(c) for c in row] for row in f.positions],
        "edges": [list(e) for e in f.graph.edges],
        "angles": [list(a) for a in f.graph.angles],
    }


def framework_from_dict(data: dict, where: str = "<framework>") -> Framework:
    if not isinstance(data, dict):
        raise ParseError(f"{where}: expected a JSON object at top level")
    unknown = set(data) - FRAMEWORK_KEYS
    if unknown:
        raise ParseError(f"{where}: unknown keys {sorted(unknown)}")
    for key in ("dim", "positions"):
        if key not in data:
            raise ParseError(f"{where}: missing required key {key!r}")
    dim = data["dim"]
    if dim not in (2, 3):
        raise ParseError(f"{where}: dim must be 2 or 3, got {dim!r}")
    positions = data["positions"]
    if not isinstance(positions, list) or not positions:
        raise ParseError(f"{where}: positions must be a non-empty list of points")
    for idx, row in enumerate(positions):
        if not isinstance(row, list) or len(row) != dim:
            raise ParseError(f"{where}: positions[{idx}] must be a list of {dim} numbers")
    edges = data.get("edges", [])
    angles = data.get("angles", [])
    for idx, e in enumerate(edges):
        if not isinstance(e, list) or len(e) != 2:
            raise ParseError(f"{where}: edges[{idx}] must be a pair [i, j]")
    for idx, a in enumerate(angles):
        if not isinstance(a, list) or len(a) != 3:
            raise ParseError(f"{where}: angles[{idx}] must be a triple [k, i, j]")
    try:
        graph = build_graph(len(positions), edges=[tuple(e) for e in edges],
                            angles=[tuple(a) for a in angles])
        return Framework(graph=graph, dim=dim, positions=np.array(positions, float))
    except (WeakRigError, ValueError) as exc:
        raise ParseError(f"{where}: {exc}") from exc


def load_framework(path: str) -> Framework:
    return framework_from_dict(_load_json(path), where=path)


def dump_framework(f: Framework, path: str) -> None:
    _atomic_write(path, json.dumps(framework_to_dict(f), indent=2, sort_keys=True) + "\n")


# ---------------------------------------------------------------------------
# target files


TARGET_KEYS = {"sq_distances", "cosines", "cosines_deg"}


def targets_from_dict(data: dict, graph, where: str = "<targets>") -> TargetSpec:
    if not isinstance(data, dict):
        raise ParseError(f"{where}: expected a JSON object at top level")
    unknown = set(data) - TARGET_KEYS
    if unknown:
        raise ParseError(f"{where}: unknown keys {sorted(unknown)}")
    sq_map: dict = {}
    for idx, entry in enumerate(data.get("sq_distances", [])):
        if not isinstance(entry, list) or len(entry) != 3:
            raise ParseError(f"{where}: sq_distances[{idx}] must be [i, j, value]")
        i, j, v = entry
        key = (int(i), int(j)) if i < j else (int(j), int(i))
        if key in sq_map:
            raise ParseError(f"{where}: duplicate distance target for edge {key}")
        sq_map[key] = float(v)
    cos_map: dict = {}
    for field, convert in (("cosines", float), ("cosines_deg", lambda d: float(np.cos(np.deg2rad(d))))):
        for idx, entry in enumerate(data.get(field, [])):
            if not isinstance(entry, list) or len(entry) != 4:
                raise ParseError(f"{where}: {field}[{idx}] must be [k, i, j, value]")
            k, i, j, v = entry
            key = (int(k), int(i), int(j)) if i < j else (int(k), int(j), int(i))
            if key in cos_map:
                raise ParseError(f"{where}: duplicate cosine target for angle {key}")
            cos_map[key] = convert(v)
    return align_targets(graph, sq_map, cos_map)


def load_targets(path: str, graph) -> TargetSpec:
    return targets_from_dict(_load_json(path), graph, where=path)


# ---------------------------------------------------------------------------
# reports and traces


def report_to_json(report: RigidityReport) -> str:
    """Canonical JSON encoding; parsing and re-serializing is byte-stable."""
    return json.dumps(report.to_dict(), sort_keys=True, separators=(",", ":"))


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def format_row_label(label) -> str:
    kind, key = label
    if kind == "distance":
        return f"d_{key[0]}_{key[1]}"
    if kind == "cosine":
        return f"cos_{key[0]}_{key[1]}_{key[2]}"
    return "_".join([kind, *map(str, key)])


def matrix_to_csv(matrix, row_labels=None) -> str:
    """Numeric matrix as CSV, optionally with a leading row-label column."""
    matrix = np.asarray(matrix, float)
    cols = [f"c{c}" for c in range(matrix.shape[1])]
    header = (["row"] if row_labels is not None else []) + cols
    lines = [",".join(header)]
    for r in range(matrix.shape[0]):
        fields = [format_row_label(row_labels[r])] if row_labels is not None else []
        fields.extend(_fmt(v) for v in matrix[r])
        lines.append(",".join(fields))
    return "\n".join(lines) + "\n"


def write_matrix_csv(matrix, path: str, row_labels=None) -> None:
    _atomic_write(path, matrix_to_csv(matrix, row_labels=row_labels))


def trace_to_csv(trace: SimulationTrace) -> str:
    n = trace.positions.shape[1]
    canonical = trace.det_z is not None and n == 3 and trace.errors.shape[1] == 3
    lines = []
    if canonical:
        lines.append("time,x1,y1,x2,y2,x3,y3,e12,e13,ecos,V,detZ")
    else:
        coords = ",".join(f"x{i+1},y{i+1}" for i in range(n))
        errs = ",".join(f"e{k+1}" for k in range(trace.errors.shape[1]))
        lines.append(f"time,{coords},{errs},V")
    for s in range(len(trace)):
        fields = [_fmt(trace.times[s])]
        fields.extend(_fmt(c) for c in trace.positions[s].ravel())
        fields.extend(_fmt(e) for e in trace.errors[s])
        fields.append(_fmt(trace.lyapunov[s]))
        if canonical:
            fields.append(_fmt(trace.det_z[s]))
        lines.append(",".join(fields))
    return "\n".join(lines) + "\n"


def write_trace_csv(trace: SimulationTrace, path: str) -> None:
    _atomic_write(path, trace_to_csv(trace))


# ---------------------------------------------------------------------------
# growth logs (JSON lines, one step per line)


def growth_log_to_text(steps) -> str:
    return "".join(json.dumps(s.to_dict(), sort_keys=True) + "\n" for s in steps)


def write_growth_log(steps, path: str) -> None:
    _atomic_write(path, growth_log_to_text(steps))


def read_growth_log(path: str) -> list[ExtensionStep]:
    steps = []
    try:
        with open(path) as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    steps.append(ExtensionStep.from_dict(json.loads(line)))
                except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                    raise ParseError(f"{path}:{lineno}: bad growth-log entry ({exc})") from exc
    except OSError as exc:
        raise ParseError(f"{path}: {exc}") from exc
    return steps
