"""Multi-type point pattern data model, ingestion, and rescaling.

A pattern lives on the unit square: coordinates are rescaled from their
original window by a common length ``L``, and categorical marks are
relabeled to internal indices ``1..Q`` with the most frequent category
always mapped to ``Q`` (the reference category that inference pins down).
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

import numpy as np

__all__ = [
    "PointPattern",
    "rescale",
    "read_points",
    "load_pattern",
    "save_pattern",
    "sidecar_path",
]


@dataclass(frozen=True)
class PointPattern:
    """Points in [0,1]^2 with integer marks in 1..Q.

    ``L`` and ``origin`` record how the original coordinates were mapped to
    the unit square (x' = (x - origin_x) / L), and ``label_map`` records the
    bijection from original mark labels to internal indices. Instances are
    immutable; the coordinate and mark arrays are locked after construction
    so a pattern can be shared freely across threads and chains.
    """

    xs: np.ndarray
    ys: np.ndarray
    marks: np.ndarray
    Q: int
    L: float = 1.0
    origin: tuple[float, float] = (0.0, 0.0)
    label_map: dict[str, int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        xs = np.ascontiguousarray(self.xs, dtype=np.float64)
        ys = np.ascontiguousarray(self.ys, dtype=np.float64)
        marks = np.ascontiguousarray(self.marks, dtype=np.int64)
        if not (xs.ndim == ys.ndim == marks.ndim == 1):
            raise ValueError("xs, ys, marks must be one-dimensional")
        if not (len(xs) == len(ys) == len(marks)):
            raise ValueError("xs, ys, marks must have identical length")
        if len(xs) < 1:
            raise ValueError("a pattern needs at least one point")
        if not (np.all(np.isfinite(xs)) and np.all(np.isfinite(ys))):
            raise ValueError("coordinates must be finite")
        if xs.min() < 0.0 or xs.max() > 1.0 or ys.min() < 0.0 or ys.max() > 1.0:
            raise ValueError("coordinates must lie in [0, 1]")
        if self.Q < 2:
            raise ValueError("at least two mark categories are required (Q >= 2)")
        if marks.min() < 1 or marks.max() > self.Q:
            raise ValueError(f"marks must lie in 1..{self.Q}")
        if not (np.isfinite(self.L) and self.L > 0):
            raise ValueError("L must be a positive, finite length")
        if self.label_map:
            internal = sorted(self.label_map.values())
            if internal != list(range(1, self.Q + 1)):
                raise ValueError("label_map must be a bijection onto 1..Q")
        for arr in (xs, ys, marks):
            arr.flags.writeable = False
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "ys", ys)
        object.__setattr__(self, "marks", marks)
        object.__setattr__(self, "origin", (float(self.origin[0]), float(self.origin[1])))
        # Note: the "most frequent category is Q" property is guaranteed by
        # rescale(); it is deliberately not re-validated here so that
        # simulated mark vectors (which may come out of a sampler with any
        # frequency ordering) can still be wrapped in a PointPattern.

    @property
    def n(self) -> int:
        return len(self.xs)

    def mark_counts(self) -> np.ndarray:
        """Count of points per internal mark, index q-1 holds mark q."""
        return np.bincount(self.marks, minlength=self.Q + 1)[1:]

    def labels(self) -> list[str]:
        """Original labels ordered by internal index (1..Q)."""
        if not self.label_map:
            return [str(q) for q in range(1, self.Q + 1)]
        inverse = {v: k for k, v in self.label_map.items()}
        return [inverse[q] for q in range(1, self.Q + 1)]


def rescale(
    raw_points: Iterable[tuple[float, float, object]],
    L: float | None = None,
) -> PointPattern:
    """Map raw (x, y, label) triples into the unit square.

    Coordinates are shifted by their minima and divided by ``L``; when ``L``
    is not given it is estimated as the larger side of the bounding box.
    Labels are relabeled so the most frequent one gets the internal index Q
    (ties broken toward the lexicographically smallest label); the remaining
    labels get 1..Q-1 in sorted order.
    """
    pts = list(raw_points)
    if len(pts) < 1:
        raise ValueError("need at least one point")
    xs = np.array([float(p[0]) for p in pts])
    ys = np.array([float(p[1]) for p in pts])
    labels = [str(p[2]) for p in pts]
    if not (np.all(np.isfinite(xs)) and np.all(np.isfinite(ys))):
        i = int(np.flatnonzero(~(np.isfinite(xs) & np.isfinite(ys)))[0])
        raise ValueError(f"non-finite coordinate at point {i}")

    distinct = sorted(set(labels))
    if len(distinct) < 2:
        raise ValueError("need at least 2 distinct mark labels (Q >= 2)")
    counts = {lab: 0 for lab in distinct}
    for lab in labels:
        counts[lab] += 1
    # Most frequent label becomes the reference category Q; ties go to the
    # smallest label so the assignment is deterministic.
    top = min(distinct, key=lambda lab: (-counts[lab], lab))
    rest = [lab for lab in distinct if lab != top]
    label_map = {lab: q for q, lab in enumerate(rest, start=1)}
    label_map[top] = len(distinct)
    marks = np.array([label_map[lab] for lab in labels], dtype=np.int64)

    x0, y0 = float(xs.min()), float(ys.min())
    range_x = float(xs.max()) - x0
    range_y = float(ys.max()) - y0
    if L is None:
        L = max(range_x, range_y)
        if L <= 0.0:
            raise ValueError("all points coincide; cannot infer a rescale length")
    else:
        L = float(L)
        if not (np.isfinite(L) and L > 0):
            raise ValueError("L must be positive")
        if max(range_x, range_y) > L * (1.0 + 1e-12):
            raise ValueError("L is smaller than the coordinate range; points would leave [0,1]")

    xr = np.clip((xs - x0) / L, 0.0, 1.0)
    yr = np.clip((ys - y0) / L, 0.0, 1.0)
    return PointPattern(
        xs=xr, ys=yr, marks=marks, Q=len(distinct), L=L, origin=(x0, y0), label_map=label_map
    )


def read_points(path: str | Path) -> list[tuple[float, float, str]]:
    """Read raw (x, y, mark) rows from a CSV file with header ``x,y,mark``.

    Malformed rows raise with the offending 1-based line number.
    """
    path = Path(path)
    out: list[tuple[float, float, str]] = []
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip().lower() for h in header[:3]] != ["x", "y", "mark"]:
            raise ValueError(f"{path}: expected header 'x,y,mark'")
        for lineno, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) < 3:
                raise ValueError(f"{path}: line {lineno}: expected 3 columns x,y,mark")
            try:
                x, y = float(row[0]), float(row[1])
            except ValueError as exc:
                raise ValueError(f"{path}: line {lineno}: non-numeric coordinate") from exc
            mark = row[2].strip()
            if not mark:
                raise ValueError(f"{path}: line {lineno}: empty mark")
            out.append((x, y, mark))
    if not out:
        raise ValueError(f"{path}: no data rows")
    return out


def sidecar_path(path: str | Path) -> Path:
    """Metadata sidecar sitting next to a pattern CSV (same stem, .json)."""
    return Path(path).with_suffix(".json")


def save_pattern(pattern: PointPattern, path: str | Path) -> None:
    """Write a pattern as CSV plus a JSON metadata sidecar.

    Coordinates are written with 17 significant digits so that a
    load/save round trip is lossless; marks are written as their original
    labels and restored exactly through the sidecar's label map.
    """
    path = Path(path)
    inverse = {v: k for k, v in pattern.label_map.items()} if pattern.label_map else {
        q: str(q) for q in range(1, pattern.Q + 1)
    }
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["x", "y", "mark"])
        for x, y, m in zip(pattern.xs, pattern.ys, pattern.marks):
            writer.writerow([f"{x:.17g}", f"{y:.17g}", inverse[int(m)]])
    meta = {
        "L": pattern.L,
        "origin": list(pattern.origin),
        "label_map": pattern.label_map or {str(q): q for q in range(1, pattern.Q + 1)},
    }
    with sidecar_path(path).open("w") as fh:
        json.dump(meta, fh, indent=2)
        fh.write("\n")


def load_pattern(path: str | Path) -> PointPattern:
    """Load a pattern saved by :func:`save_pattern`.

    Requires the JSON sidecar; coordinates in the CSV are taken as already
    rescaled and marks are mapped through the stored label map (no
    re-derivation of the frequency ordering, so round trips are exact).
    """
    path = Path(path)
    side = sidecar_path(path)
    if not side.exists():
        raise FileNotFoundError(
            f"{side} not found; for raw data use read_points() + rescale() instead"
        )
    with side.open() as fh:
        meta = json.load(fh)
    label_map = {str(k): int(v) for k, v in meta["label_map"].items()}
    rows = read_points(path)
    xs = np.array([r[0] for r in rows])
    ys = np.array([r[1] for r in rows])
    try:
        marks = np.array([label_map[r[2]] for r in rows], dtype=np.int64)
    except KeyError as exc:
        raise ValueError(f"{path}: mark label {exc} not present in sidecar label_map") from exc
    return PointPattern(
        xs=xs,
        ys=ys,
        marks=marks,
        Q=len(label_map),
        L=float(meta["L"]),
        origin=(float(meta["origin"][0]), float(meta["origin"][1])),
        label_map=label_map,
    )
