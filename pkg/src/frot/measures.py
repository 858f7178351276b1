"""Grouped discrete measures, per-group cost matrices, and transport plans.

A grouped measure is a discrete probability measure whose support points
live in R^d, with the d coordinates partitioned into L contiguous feature
groups.  All solvers in this package operate on these types.
"""

from __future__ import annotations

import csv
import json
import re
from dataclasses import dataclass

import numpy as np

COST_KINDS = ("squared_euclidean", "euclidean", "l1", "cosine_normalized")

#: construction-time tolerance for clipping tiny negative plan entries
PLAN_CLIP_TOL = 1e-12


def _frozen(arr: np.ndarray) -> np.ndarray:
    out = np.array(arr, dtype=float)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class GroupedMeasure:
    """Discrete measure with support coordinates partitioned into groups.

    Attributes
    ----------
    points : ndarray, shape (n, d)
        Support points, one per row.
    group_bounds : tuple of (start, stop)
        Contiguous, disjoint index ranges covering exactly [0, d).
    weights : ndarray, shape (n,)
        Nonnegative probabilities summing to 1.

    Instances are immutable; build them with :func:`build_grouped_measure`.
    """

    points: np.ndarray
    group_bounds: tuple
    weights: np.ndarray

    @property
    def n_points(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @property
    def n_groups(self) -> int:
        return len(self.group_bounds)

    @property
    def group_widths(self) -> tuple:
        return tuple(hi - lo for lo, hi in self.group_bounds)

    def group(self, k: int) -> np.ndarray:
        """Coordinates of group k, shape (n, d_k)."""
        lo, hi = self.group_bounds[k]
        return self.points[:, lo:hi]

    def same_group_structure(self, other: "GroupedMeasure") -> bool:
        return self.group_bounds == other.group_bounds


def build_grouped_measure(points, group_widths=None, weights=None) -> GroupedMeasure:
    """Construct a :class:`GroupedMeasure` from raw arrays.

    Parameters
    ----------
    points : array-like, shape (n, d)
        Support points, one row per point.
    group_widths : sequence of positive int, optional
        Widths of the L contiguous groups; must sum to d.  When omitted,
        every coordinate becomes its own singleton group (L = d).
    weights : array-like of shape (n,), optional
        Nonnegative point masses; normalized to sum to 1.  Omitted weights
        default to uniform 1/n.

    Notes
    -----
    Zero-weight points are removed and exact-duplicate support points are
    merged (weights summed, first-occurrence order kept).  Both behaviors
    keep downstream solvers free of degenerate rows.
    """
    pts = np.array(points, dtype=float)
    if pts.ndim == 1:
        pts = pts.reshape(-1, 1)
    if pts.ndim != 2 or pts.shape[0] == 0:
        raise ValueError("points must be a non-empty 2-D array, one row per point")
    if not np.all(np.isfinite(pts)):
        raise ValueError("points must be finite")
    n, d = pts.shape

    if group_widths is None:
        widths = [1] * d
    else:
        widths = [int(w) for w in group_widths]
        if len(widths) == 0 or any(w < 1 for w in widths):
            raise ValueError("group_widths must be a non-empty list of positive integers")
        if sum(widths) != d:
            raise ValueError(
                f"group_widths sum to {sum(widths)} but points have dimension {d}"
            )

    if weights is None:
        w = np.full(n, 1.0 / n)
    else:
        w = np.array(weights, dtype=float).reshape(-1)
        if w.shape[0] != n:
            raise ValueError(f"weights have length {w.shape[0]}, expected {n}")
        if not np.all(np.isfinite(w)):
            raise ValueError("weights must be finite")
        if np.any(w < 0):
            raise ValueError("weights must be nonnegative")
        if not np.any(w > 0):
            raise ValueError("weights must not all be zero")

    keep = w > 0
    pts, w = pts[keep], w[keep]

    # merge exact-duplicate support points, preserving first-occurrence order
    uniq, first, inverse = np.unique(pts, axis=0, return_index=True, return_inverse=True)
    if uniq.shape[0] < pts.shape[0]:
        merged = np.bincount(inverse.reshape(-1), weights=w)
        order = np.argsort(first)
        pts = uniq[order]
        w = merged[order]

    w = w / w.sum()

    bounds = []
    lo = 0
    for width in widths:
        bounds.append((lo, lo + width))
        lo += width
    return GroupedMeasure(_frozen(pts), tuple(bounds), _frozen(w))


@dataclass(frozen=True)
class GroupedCost:
    """Stack of L nonnegative n-by-m cost matrices, one per feature group."""

    matrices: np.ndarray
    cost_kind: str

    def __post_init__(self):
        mats = np.asarray(self.matrices, dtype=float)
        if mats.ndim != 3:
            raise ValueError("matrices must be a 3-D stack of shape (L, n, m)")
        if not np.all(np.isfinite(mats)):
            raise ValueError("cost matrices must be finite")
        if mats.min(initial=0.0) < 0:
            raise ValueError("cost matrices must be nonnegative")
        if self.cost_kind == "cosine_normalized" and mats.max(initial=0.0) > 4.0 + 1e-12:
            raise ValueError("cosine_normalized costs must lie in [0, 4]")
        object.__setattr__(self, "matrices", _frozen(mats))

    @property
    def n_groups(self) -> int:
        return self.matrices.shape[0]

    @property
    def shape(self) -> tuple:
        return self.matrices.shape[1], self.matrices.shape[2]

    def total(self) -> np.ndarray:
        """Sum of the per-group matrices."""
        return self.matrices.sum(axis=0)


def _pairwise_sq_euclidean(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    # explicit differences: the Gram expansion x.x + y.y - 2 x.y cancels
    # catastrophically for near-coincident points, and the sqrt taken for
    # plain Euclidean costs would amplify that crud to ~1e-8 self-distances
    n, m = x.shape[0], y.shape[0]
    d = x.shape[1]
    out = np.empty((n, m))
    chunk = max(1, int(2**22 / max(m * d, 1)))
    for lo in range(0, n, chunk):
        hi = min(lo + chunk, n)
        diff = x[lo:hi, None, :] - y[None, :, :]
        out[lo:hi] = np.einsum("ijk,ijk->ij", diff, diff)
    return out


def build_grouped_cost(src: GroupedMeasure, dst: GroupedMeasure, cost_kind: str) -> GroupedCost:
    """Build the per-group cost matrices between two grouped measures.

    For every group k the entry [C_k]_ij is the cost between the group-k
    coordinates of source point i and target point j:

    - ``squared_euclidean``: squared L2 distance
    - ``euclidean``: L2 distance
    - ``l1``: L1 distance
    - ``cosine_normalized``: vectors are rescaled to unit norm and the cost
      is 2 - 2 <f_i, f_j>, so entries lie in [0, 4]

    Raises on mismatched group structure, and on zero-norm vectors under
    ``cosine_normalized``.
    """
    if cost_kind not in COST_KINDS:
        raise ValueError(f"unknown cost_kind {cost_kind!r}, expected one of {COST_KINDS}")
    if not src.same_group_structure(dst):
        raise ValueError(
            f"group structures differ: {src.group_widths} vs {dst.group_widths}"
        )
    mats = np.empty((src.n_groups, src.n_points, dst.n_points))
    for k in range(src.n_groups):
        xs, ys = src.group(k), dst.group(k)
        if cost_kind == "squared_euclidean":
            mats[k] = _pairwise_sq_euclidean(xs, ys)
        elif cost_kind == "euclidean":
            mats[k] = np.sqrt(_pairwise_sq_euclidean(xs, ys))
        elif cost_kind == "l1":
            mats[k] = np.abs(xs[:, None, :] - ys[None, :, :]).sum(axis=2)
        else:  # cosine_normalized
            nx = np.linalg.norm(xs, axis=1)
            ny = np.linalg.norm(ys, axis=1)
            if np.any(nx == 0) or np.any(ny == 0):
                raise ValueError(
                    f"group {k} contains a zero-norm vector; cosine_normalized is undefined"
                )
            sim = (xs / nx[:, None]) @ (ys / ny[:, None]).T
            mats[k] = np.clip(2.0 - 2.0 * sim, 0.0, 4.0)
    return GroupedCost(mats, cost_kind)


@dataclass(frozen=True)
class TransportPlan:
    """Nonnegative coupling matrix with (near-)prescribed marginals.

    ``marginal_residual`` is the max over the row/column sides of the L1
    deviation of the plan's marginals from the weights it was built
    against.
    """

    matrix: np.ndarray
    marginal_residual: float

    @classmethod
    def from_matrix(cls, matrix, a, b) -> "TransportPlan":
        """Validate a candidate plan against marginals ``a`` and ``b``.

        Entries more negative than -1e-12 are rejected; tiny negative
        round-off is clipped to zero.  Total mass must equal 1 within
        1e-9.
        """
        mat = np.array(matrix, dtype=float)
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        if mat.shape != (a.shape[0], b.shape[0]):
            raise ValueError(f"plan shape {mat.shape} does not match weights "
                             f"({a.shape[0]}, {b.shape[0]})")
        if mat.min(initial=0.0) < -PLAN_CLIP_TOL:
            raise ValueError(f"plan has negative entries (min {mat.min()})")
        np.clip(mat, 0.0, None, out=mat)
        total = mat.sum()
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"plan mass {total} differs from 1 by more than 1e-9")
        residual = max(
            np.abs(mat.sum(axis=1) - a).sum(),
            np.abs(mat.sum(axis=0) - b).sum(),
        )
        return cls(_frozen(mat), float(residual))

    @property
    def shape(self) -> tuple:
        return self.matrix.shape

    def cost(self, C) -> float:
        """Transport cost <plan, C>."""
        return float(np.sum(self.matrix * np.asarray(C)))


# ---------------------------------------------------------------------------
# CSV / JSON ingestion and emission
# ---------------------------------------------------------------------------

_GROUP_COL = re.compile(r"^g(\d+)_")


def load_measure_csv(path) -> GroupedMeasure:
    """Read a measure from CSV: one row per point, columns ``g<k>_*`` declare
    group membership, an optional trailing ``weight`` column carries masses."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: empty CSV") from None
        rows = [row for row in reader if row]

    group_of_col = []
    weight_col = None
    for idx, name in enumerate(header):
        m = _GROUP_COL.match(name.strip())
        if m:
            if weight_col is not None:
                raise ValueError(f"{path}: feature column {name!r} after weight column")
            group_of_col.append(int(m.group(1)))
        elif name.strip() == "weight":
            weight_col = idx
        else:
            raise ValueError(f"{path}: column {name!r} is neither 'g<k>_*' nor 'weight'")
    if not group_of_col:
        raise ValueError(f"{path}: no feature columns with 'g<k>_' prefixes")

    groups_seen = sorted(set(group_of_col))
    if groups_seen != list(range(len(groups_seen))):
        raise ValueError(f"{path}: group indices must be 0..L-1, got {groups_seen}")
    widths = []
    prev = group_of_col[0]
    if prev != 0:
        raise ValueError(f"{path}: first feature column must belong to group 0")
    count = 0
    for g in group_of_col:
        if g == prev:
            count += 1
        elif g == prev + 1:
            widths.append(count)
            prev, count = g, 1
        else:
            raise ValueError(f"{path}: group columns must be contiguous and ascending")
    widths.append(count)

    if not rows:
        raise ValueError(f"{path}: no data rows")
    data = np.array([[float(v) for v in row] for row in rows])
    if weight_col is not None:
        weights = data[:, weight_col]
        points = np.delete(data, weight_col, axis=1)
    else:
        weights = None
        points = data
    return build_grouped_measure(points, widths, weights)


def save_measure_csv(measure: GroupedMeasure, path) -> None:
    """Write a measure as CSV in the format read by :func:`load_measure_csv`."""
    header = []
    for k, (lo, hi) in enumerate(measure.group_bounds):
        header.extend(f"g{k}_{j}" for j in range(hi - lo))
    header.append("weight")
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for i in range(measure.n_points):
            writer.writerow([repr(float(v)) for v in measure.points[i]]
                            + [repr(float(measure.weights[i]))])


def load_measure_json(source) -> GroupedMeasure:
    """Read a measure from a JSON file path or an already-parsed dict with
    keys ``points``, ``group_widths`` and optional ``weights``."""
    if isinstance(source, dict):
        doc = source
    else:
        with open(source) as fh:
            doc = json.load(fh)
    if "points" not in doc:
        raise ValueError("measure JSON must contain 'points'")
    return build_grouped_measure(
        doc["points"], doc.get("group_widths"), doc.get("weights")
    )


def save_measure_json(measure: GroupedMeasure, path) -> None:
    doc = {
        "points": measure.points.tolist(),
        "group_widths": list(measure.group_widths),
        "weights": measure.weights.tolist(),
    }
    with open(path, "w") as fh:
        json.dump(doc, fh)
