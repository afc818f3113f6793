"""JSON form of finite Fock vectors.

    {"grid": {"cells": d, "width": h, "origin": t0},
     "tensors": [{"rank": n, "entries": [{"index": [i1 <= ... <= in], "value": v}, ...]}, ...]}

Missing entries and ranks are zero.  A file with an empty ``tensors`` list
holds the vacuum vector.
"""
from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path

import numpy as np

from . import _index
from .grid import GridModel
from .symtensor import FockVector, SymTensor


class SchemaError(ValueError):
    def __init__(self, location: str, message: str):
        super().__init__(f"{location}: {message}")
        self.location = location


def _require(obj, key, loc):
    if not isinstance(obj, dict) or key not in obj:
        raise SchemaError(loc, f"missing key {key!r}")
    return obj[key]


def fockvec_from_dict(doc: dict) -> FockVector:
    g = _require(doc, "grid", "$")
    try:
        grid = GridModel(
            _require(g, "cells", "$.grid"), _require(g, "width", "$.grid"), g.get("origin", 0.0)
        )
    except (TypeError, ValueError) as exc:
        if isinstance(exc, SchemaError):
            raise
        raise SchemaError("$.grid", str(exc)) from exc
    tensors = _require(doc, "tensors", "$")
    if not isinstance(tensors, list):
        raise SchemaError("$.tensors", "expected a list")
    if not tensors:
        return FockVector.vacuum(grid)
    d = grid.cells
    by_rank: dict[int, np.ndarray] = {}
    for ti, t in enumerate(tensors):
        loc = f"$.tensors[{ti}]"
        rank = _require(t, "rank", loc)
        if not isinstance(rank, int) or rank < 0:
            raise SchemaError(f"{loc}.rank", f"expected a nonnegative integer, got {rank!r}")
        if rank in by_rank:
            raise SchemaError(f"{loc}.rank", f"duplicate rank {rank}")
        values = np.zeros(_index.dimension(d, rank))
        seen = set()
        entries = _require(t, "entries", loc)
        if not isinstance(entries, list):
            raise SchemaError(f"{loc}.entries", "expected a list")
        for ei, e in enumerate(entries):
            eloc = f"{loc}.entries[{ei}]"
            idx = _require(e, "index", eloc)
            value = _require(e, "value", eloc)
            if not isinstance(idx, list) or len(idx) != rank or not all(isinstance(i, int) for i in idx):
                raise SchemaError(f"{eloc}.index", f"expected {rank} integers, got {idx!r}")
            if any(i < 0 or i >= d for i in idx):
                raise SchemaError(f"{eloc}.index", f"index {idx} out of range for {d} cells")
            if any(a > b for a, b in zip(idx, idx[1:])):
                raise SchemaError(f"{eloc}.index", f"index {idx} is not nondecreasing")
            key = tuple(idx)
            if key in seen:
                raise SchemaError(f"{eloc}.index", f"duplicate index {idx}")
            seen.add(key)
            if not isinstance(value, (int, float)) or isinstance(value, bool):
                raise SchemaError(f"{eloc}.value", f"expected a number, got {value!r}")
            values[_index.locate(np.array(idx, dtype=np.int64).reshape(rank), d)] = float(value)
        by_rank[rank] = values
    top = max(by_rank)
    comps = tuple(
        SymTensor(grid, n, by_rank.get(n, np.zeros(_index.dimension(d, n)))) for n in range(top + 1)
    )
    return FockVector(grid, comps)


def fockvec_to_dict(F: FockVector) -> dict:
    g = F.grid
    return {
        "grid": {"cells": g.cells, "width": g.width, "origin": g.origin},
        "tensors": [
            {
                "rank": t.rank,
                "entries": [{"index": list(idx), "value": v} for idx, v in t.entries() if v != 0.0],
            }
            for t in F
        ],
    }


def atomic_write_text(path, text: str) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def read_fockvec(path) -> FockVector:
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError("$", f"invalid JSON: {exc}") from exc
    return fockvec_from_dict(doc)


def write_fockvec(F: FockVector, path) -> None:
    atomic_write_text(path, json.dumps(fockvec_to_dict(F), indent=1) + "\n")
