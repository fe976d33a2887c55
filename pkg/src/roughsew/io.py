"""CSV and JSON serialisation.

Times are written with ``repr(float)``, which is exact for dyadic grid times,
and the grid is recovered from the number of distinct times.
"""
import csv
import json
import math

import numpy as np

from .grid import DyadicGrid, Grid1Fn, Grid2Fn
from .roughpath import RoughPathGrid
from .shuffle import ShuffleAlgebra, parse_word, word_str


class FormatError(ValueError):
    pass


def _fmt(x: float) -> str:
    return repr(float(x))


def _grid_from_times(times) -> DyadicGrid:
    n = len(times)
    level = int(round(math.log2(n - 1))) if n > 1 else -1
    if n < 2 or (1 << level) + 1 != n:
        raise FormatError(f"{n} distinct times do not form a dyadic grid")
    grid = DyadicGrid(float(max(times)), level)
    if not np.allclose(sorted(times), grid.points, rtol=0, atol=1e-12 * grid.horizon):
        raise FormatError("times are not equally spaced dyadic points")
    return grid


def _read_rows(path, columns):
    try:
        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames is None or list(reader.fieldnames) != columns:
                raise FormatError(f"{path}: expected header {','.join(columns)}, got {reader.fieldnames}")
            return list(reader)
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc}") from exc


def _index(times, grid):
    return np.rint(np.asarray(times) / grid.mesh).astype(int)


def write_grid1(fn: Grid1Fn, path) -> None:
    lines = ["t,value"]
    lines += [f"{_fmt(t)},{_fmt(v)}" for t, v in zip(fn.grid.points, fn.values)]
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_grid1(path) -> Grid1Fn:
    rows = _read_rows(path, ["t", "value"])
    try:
        times = [float(r["t"]) for r in rows]
        vals = [float(r["value"]) for r in rows]
    except (TypeError, ValueError) as exc:
        raise FormatError(f"{path}: {exc}") from exc
    grid = _grid_from_times(sorted(set(times)))
    out = np.full(grid.size, np.nan)
    out[_index(times, grid)] = vals
    if np.isnan(out).any():
        raise FormatError(f"{path}: missing grid points")
    return Grid1Fn(grid, out)


def write_grid2(fn: Grid2Fn, path) -> None:
    t = [_fmt(x) for x in fn.grid.points]
    lines = ["s,t,value"]
    V = fn.values
    for j in range(fn.grid.size):
        lines += [f"{t[j]},{t[k]},{_fmt(V[j, k])}" for k in range(fn.grid.size)]
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_grid2(path) -> Grid2Fn:
    rows = _read_rows(path, ["s", "t", "value"])
    try:
        s = [float(r["s"]) for r in rows]
        t = [float(r["t"]) for r in rows]
        vals = [float(r["value"]) for r in rows]
    except (TypeError, ValueError) as exc:
        raise FormatError(f"{path}: {exc}") from exc
    grid = _grid_from_times(sorted(set(s) | set(t)))
    out = np.full((grid.size, grid.size), np.nan)
    out[_index(s, grid), _index(t, grid)] = vals
    if np.isnan(out).any():
        raise FormatError(f"{path}: missing grid pairs")
    return Grid2Fn(grid, out)


def write_roughpath(X: RoughPathGrid, path) -> None:
    """Columns ``s,t,word,value``, sorted by degree, word, s-index, t-index."""
    t = [_fmt(x) for x in X.grid.points]
    n = X.grid.size
    lines = ["s,t,word,value"]
    for w in sorted(X.words(), key=lambda w: (len(w), w)):
        name = word_str(w)
        V = X.values[w]
        for j in range(n):
            row = V[j]
            lines += [f"{t[j]},{t[k]},{name},{_fmt(row[k])}" for k in range(n)]
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_roughpath(path, alpha: float, d: int = None, max_level: int = None) -> RoughPathGrid:
    """Load a rough path; ``d`` and the stored level default to what the file holds."""
    rows = _read_rows(path, ["s", "t", "word", "value"])
    try:
        words = [parse_word(r["word"]) for r in rows]
        s = np.array([float(r["s"]) for r in rows])
        t = np.array([float(r["t"]) for r in rows])
        vals = np.array([float(r["value"]) for r in rows])
    except (TypeError, ValueError) as exc:
        raise FormatError(f"{path}: {exc}") from exc
    if not rows:
        raise FormatError(f"{path}: no rows")
    grid = _grid_from_times(sorted(set(s.tolist()) | set(t.tolist())))
    level = max(len(w) for w in words)
    letters = max(max(w) for w in words)
    algebra = ShuffleAlgebra(d or letters, max(level, max_level or level))
    j, k = _index(s, grid), _index(t, grid)
    by_word = {}
    for i, w in enumerate(words):
        by_word.setdefault(w, []).append(i)
    values = {}
    for w, idx in by_word.items():
        arr = np.full((grid.size, grid.size), np.nan)
        arr[j[idx], k[idx]] = vals[idx]
        if np.isnan(arr).any():
            raise FormatError(f"{path}: word {word_str(w)} is missing grid pairs")
        values[w] = arr
    try:
        return RoughPathGrid(grid, algebra, alpha, values, level)
    except ValueError as exc:
        raise FormatError(f"{path}: {exc}") from exc


def dump_json(obj, path=None) -> str:
    """Deterministic JSON: sorted keys, fixed separators, trailing newline."""
    text = json.dumps(obj, sort_keys=True, indent=2) + "\n"
    if path is not None:
        with open(path, "w") as fh:
            fh.write(text)
    return text
