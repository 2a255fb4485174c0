"""Deterministic JSON / CSV serialisation with atomic writes."""

from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile
from pathlib import Path

from .iterate import IterationTrace
from .space import Point, distance


def _clean(obj):
    # JSON has no infinities; spell them out so files stay standard JSON
    if isinstance(obj, float):
        if math.isnan(obj):
            return "nan"
        if math.isinf(obj):
            return "inf" if obj > 0 else "-inf"
        return obj
    if isinstance(obj, Point):
        return list(obj.coords)
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


def dumps(obj) -> str:
    return json.dumps(_clean(obj), indent=2, sort_keys=True, allow_nan=False) + "\n"


def atomic_write(path: str | os.PathLike, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise


def fmt(v: float) -> str:
    return format(v, ".17g")


def trace_csv(trace: IterationTrace, delta: float | None = None, p: Point | None = None) -> str:
    """CSV columns: n, x, step_norm, a_priori_bound, a_posteriori_bound, dist_to_p."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "x", "step_norm", "a_priori_bound", "a_posteriori_bound", "dist_to_p"])
    first = trace.step(1) if trace.step_norms else None
    for n, x in enumerate(trace.points):
        row = [str(n), ";".join(fmt(c) for c in x.coords)]
        if n == 0:
            row += ["", "", ""]
        else:
            step = trace.step(n)
            row.append(fmt(step))
            if delta is None:
                row += ["", ""]
            else:
                row.append(fmt(delta ** n / (1 - delta) * first))
                row.append(fmt(delta / (1 - delta) * step))
        row.append("" if p is None else fmt(distance(x, p, trace.norm)))
        w.writerow(row)
    return buf.getvalue()
