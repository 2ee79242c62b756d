"""CSV and JSON forms of loops and orbit results.

Numbers are written with 17 significant digits, which round-trips IEEE
doubles exactly.
"""

import csv
import json
from pathlib import Path

import numpy as np

from .errors import ModelSpecError
from .loop_space import PHASE, POPULATION, Loop

_FMT = "%.17g"


def _fmt(x):
    return _FMT % x


def loop_header(loop):
    if loop.role == PHASE:
        n = loop.half_dim
        return ["t"] + [f"q{i + 1}" for i in range(n)] + [f"p{i + 1}" for i in range(n)]
    return ["t"] + [f"x{i + 1}" for i in range(loop.dim)]


def write_loop_csv(loop, path):
    N = loop.grid_size
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(loop_header(loop))
        for k in range(N):
            w.writerow([_fmt(k / N)] + [_fmt(x) for x in loop.values[k]])


def read_loop_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or not rows[0] or rows[0][0] != "t":
        raise ModelSpecError(f"{path}: missing 't,...' header")
    header = rows[0][1:]
    if header and header[0].startswith("x"):
        role = POPULATION
    elif header and header[0].startswith("q"):
        role = PHASE
    else:
        raise ModelSpecError(f"{path}: unrecognised columns {header}")
    try:
        data = np.array([[float(c) for c in r[1:]] for r in rows[1:] if r], dtype=float)
    except ValueError as exc:
        raise ModelSpecError(f"{path}: {exc}") from None
    if data.ndim != 2 or data.shape[1] != len(header):
        raise ModelSpecError(f"{path}: ragged rows")
    return Loop(data, role=role)


def loop_to_dict(loop):
    n = loop.half_dim if loop.role == PHASE else loop.dim
    d = {"n": n, "N": loop.grid_size, "values": [[float(_fmt(x)) for x in row] for row in loop.values]}
    if loop.role != PHASE:
        d["role"] = loop.role
    return d


def loop_from_dict(d):
    try:
        values = np.array(d["values"], dtype=float)
        role = d.get("role", PHASE)
        n, N = int(d["n"]), int(d["N"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelSpecError(f"bad loop JSON: {exc}") from None
    loop = Loop(values, role=role)
    width = 2 * n if role == PHASE else n
    if loop.grid_size != N or loop.dim != width:
        raise ModelSpecError(f"loop JSON declares n={n}, N={N} but holds shape {values.shape}")
    return loop


def write_loop_json(loop, path):
    Path(path).write_text(json.dumps(loop_to_dict(loop)))


def read_loop_json(path):
    try:
        return loop_from_dict(json.loads(Path(path).read_text()))
    except json.JSONDecodeError as exc:
        raise ModelSpecError(f"{path}: {exc}") from None


def read_loop(path):
    """Load a loop from ``.csv`` or ``.json``."""
    path = Path(path)
    if not path.exists():
        raise ModelSpecError(f"loop file {path} does not exist")
    return read_loop_json(path) if path.suffix.lower() == ".json" else read_loop_csv(path)


def write_result(result, out_dir, stem="orbit"):
    out_dir = Path(out_dir)
    write_loop_csv(result.loop, out_dir / f"{stem}.csv")
    (out_dir / "result.json").write_text(result.to_json(indent=2))


def read_result(json_path, loop_path):
    from .solvers import OrbitResult

    d = json.loads(Path(json_path).read_text())
    loop = read_loop(loop_path)
    kw = {k: d[k] for k in ("residual_sup", "action_value", "iters", "converged")}
    for k in ("energy_std", "energy_mean", "smallest_singular", "is_constant"):
        if k in d:
            kw[k] = d[k]
    return OrbitResult(loop=loop, **kw)


def write_series_csv(path, header, columns):
    cols = [np.asarray(c) for c in columns]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in zip(*cols):
            w.writerow([_fmt(x) if isinstance(x, (float, np.floating)) else x for x in row])


def read_series_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    return rows
