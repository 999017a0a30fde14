"""Point octree and Barnes-Hut many-body force evaluation.

The tree stores signed per-point strengths and aggregates each cell's
total strength and magnitude-weighted centroid. Traversal is
level-synchronous and vectorized: an array of (node, cell) pairs is
tested against the opening criterion in bulk, far cells contribute their
aggregate, near internal cells expand to their children, near leaves
contribute their points directly.

A cell is "far" (approximable) when (cell side / distance) < theta, so
theta = 0 degenerates to exact pairwise summation over the leaves. Force
terms use the inverse-distance law with geometric-mean softening below
``distance_min`` and a hard cutoff beyond ``distance_max``.

Per-node totals are reduced with ``math.fsum`` (exactly rounded), which
makes the result independent of term enumeration order and bit-stable
across platforms.
"""

from __future__ import annotations

import math

import numpy as np

_MAX_DEPTH = 48


class Octree:
    """Octree over (n, 3) points with signed strengths."""

    def __init__(self, points: np.ndarray, strengths: np.ndarray):
        self.points = np.asarray(points, dtype=np.float64)
        self.strengths = np.asarray(strengths, dtype=np.float64)
        n = len(self.points)
        if n == 0:
            self.n_cells = 0
            return

        lo = self.points.min(axis=0)
        hi = self.points.max(axis=0)
        center = (lo + hi) / 2.0
        half = float((hi - lo).max()) / 2.0
        half = half * (1.0 + 1e-9) + 1e-9  # strictly contain boundary points

        self._centers: list[tuple[float, float, float]] = [tuple(center)]
        self._halves: list[float] = [half]
        self._children: list[list[int] | None] = [None]
        self._buckets: list[list[int]] = [[]]

        for j in range(n):
            self._insert(j)
        self._finalize()

    # -- construction -------------------------------------------------------

    def _octant(self, cell: int, point: np.ndarray) -> int:
        cx, cy, cz = self._centers[cell]
        return (
            (1 if point[0] >= cx else 0)
            | (2 if point[1] >= cy else 0)
            | (4 if point[2] >= cz else 0)
        )

    def _new_child(self, cell: int, octant: int) -> int:
        cx, cy, cz = self._centers[cell]
        h = self._halves[cell] / 2.0
        self._centers.append((
            cx + (h if octant & 1 else -h),
            cy + (h if octant & 2 else -h),
            cz + (h if octant & 4 else -h),
        ))
        self._halves.append(h)
        self._children.append(None)
        self._buckets.append([])
        return len(self._centers) - 1

    def _insert(self, j: int) -> None:
        point = self.points[j]
        cell = 0
        depth = 0
        while True:
            kids = self._children[cell]
            if kids is not None:
                octant = self._octant(cell, point)
                child = kids[octant]
                if child < 0:
                    child = self._new_child(cell, octant)
                    kids[octant] = child
                    self._buckets[child].append(j)
                    return
                cell = child
                depth += 1
                continue
            bucket = self._buckets[cell]
            if not bucket or depth >= _MAX_DEPTH:
                bucket.append(j)
                return
            # Split an occupied leaf one level and push its points down;
            # the incoming point then continues descending.
            self._children[cell] = kids = [-1] * 8
            self._buckets[cell] = []
            for k in bucket:
                octant = self._octant(cell, self.points[k])
                child = kids[octant]
                if child < 0:
                    child = self._new_child(cell, octant)
                    kids[octant] = child
                self._buckets[child].append(k)

    def _finalize(self) -> None:
        """Freeze to arrays and compute aggregates bottom-up.

        Cells are created parents-first, so a reverse sweep sees every
        child before its parent.
        """
        n_cells = len(self._centers)
        self.n_cells = n_cells
        self.half = np.array(self._halves, dtype=np.float64)
        children = np.full((n_cells, 8), -1, dtype=np.int64)
        is_leaf = np.zeros(n_cells, dtype=bool)
        for c, kids in enumerate(self._children):
            if kids is None:
                is_leaf[c] = True
            else:
                children[c] = kids
        self.children = children
        self.is_leaf = is_leaf

        # CSR layout of leaf points.
        leaf_start = np.zeros(n_cells, dtype=np.int64)
        leaf_count = np.zeros(n_cells, dtype=np.int64)
        flat: list[int] = []
        for c, bucket in enumerate(self._buckets):
            leaf_start[c] = len(flat)
            leaf_count[c] = len(bucket)
            flat.extend(bucket)
        self.leaf_start = leaf_start
        self.leaf_count = leaf_count
        self.leaf_points = np.array(flat, dtype=np.int64)

        agg_value = np.zeros(n_cells, dtype=np.float64)
        agg_pos = np.zeros((n_cells, 3), dtype=np.float64)
        for c in range(n_cells - 1, -1, -1):
            if is_leaf[c]:
                idx = self._buckets[c]
                if not idx:
                    continue
                s = self.strengths[idx]
                w = np.abs(s)
                total_w = float(w.sum())
                agg_value[c] = float(s.sum())
                if total_w > 0.0:
                    agg_pos[c] = (self.points[idx] * w[:, None]).sum(axis=0) / total_w
                else:
                    agg_pos[c] = self.points[idx].mean(axis=0)
            else:
                weight = 0.0
                value = 0.0
                pos = np.zeros(3)
                for child in children[c]:
                    if child < 0:
                        continue
                    cw = abs(agg_value[child])
                    value += agg_value[child]
                    weight += cw
                    pos += cw * agg_pos[child]
                agg_value[c] = value
                agg_pos[c] = pos / weight if weight > 0.0 else pos
        self.agg_value = agg_value
        self.agg_pos = agg_pos

        del self._centers, self._halves, self._children, self._buckets


def _interaction(dx, dy, dz, strength, alpha, dmin2, dmax2):
    """Force terms for delta vectors and source strengths.

    Returns (keep_mask, tx, ty, tz). The exact oracle in the layout module
    computes the identical expression so that theta=0 traversal and direct
    summation agree term-for-term.
    """
    l = dx * dx + dy * dy + dz * dz
    keep = (l > 0.0) & (l < dmax2)
    l = np.where(l > 0.0, l, 1.0)
    l_soft = np.where(l < dmin2, np.sqrt(dmin2 * l), l)
    scale = strength * alpha / l_soft
    return keep, dx * scale, dy * scale, dz * scale


def manybody_terms(
    tree: Octree,
    targets: np.ndarray,
    alpha: float,
    theta: float,
    distance_min: float,
    distance_max: float,
) -> tuple[np.ndarray, np.ndarray]:
    """All interaction terms for every target node.

    Returns (node_index_array, term_array (m, 3)); callers reduce per node.
    ``targets`` must be the same points the tree was built from (self terms
    are skipped by index).
    """
    n = len(targets)
    if n == 0 or tree.n_cells == 0:
        return np.empty(0, dtype=np.int64), np.empty((0, 3))

    theta2 = theta * theta
    dmin2 = distance_min * distance_min
    dmax2 = distance_max * distance_max

    pair_i = np.arange(n, dtype=np.int64)
    pair_c = np.zeros(n, dtype=np.int64)

    out_idx: list[np.ndarray] = []
    out_terms: list[np.ndarray] = []

    while pair_i.size:
        cpos = tree.agg_pos[pair_c]
        tpos = targets[pair_i]
        dx = cpos[:, 0] - tpos[:, 0]
        dy = cpos[:, 1] - tpos[:, 1]
        dz = cpos[:, 2] - tpos[:, 2]
        l = dx * dx + dy * dy + dz * dz
        side = 2.0 * tree.half[pair_c]
        far = (side * side) < (theta2 * l)

        use = far & (l > 0.0)
        if use.any():
            keep, tx, ty, tz = _interaction(
                dx[use], dy[use], dz[use],
                tree.agg_value[pair_c[use]], alpha, dmin2, dmax2)
            if keep.any():
                out_idx.append(pair_i[use][keep])
                out_terms.append(
                    np.stack([tx[keep], ty[keep], tz[keep]], axis=1))

        near = ~far
        near_c = pair_c[near]
        near_i = pair_i[near]
        leaf = tree.is_leaf[near_c]

        if leaf.any():
            li = near_i[leaf]
            lc = near_c[leaf]
            counts = tree.leaf_count[lc]
            nonzero = counts > 0
            li, lc, counts = li[nonzero], lc[nonzero], counts[nonzero]
            if li.size:
                total = int(counts.sum())
                rep_i = np.repeat(li, counts)
                starts = np.repeat(tree.leaf_start[lc], counts)
                offsets = np.arange(total, dtype=np.int64) - np.repeat(
                    np.cumsum(counts) - counts, counts)
                pj = tree.leaf_points[starts + offsets]
                not_self = pj != rep_i
                rep_i, pj = rep_i[not_self], pj[not_self]
                if rep_i.size:
                    src = tree.points[pj]
                    dst = targets[rep_i]
                    dx = src[:, 0] - dst[:, 0]
                    dy = src[:, 1] - dst[:, 1]
                    dz = src[:, 2] - dst[:, 2]
                    keep, tx, ty, tz = _interaction(
                        dx, dy, dz, tree.strengths[pj], alpha, dmin2, dmax2)
                    if keep.any():
                        out_idx.append(rep_i[keep])
                        out_terms.append(
                            np.stack([tx[keep], ty[keep], tz[keep]], axis=1))

        internal = ~leaf
        ii = near_i[internal]
        ic = near_c[internal]
        if ii.size:
            kids = tree.children[ic]
            valid = kids >= 0
            pair_i = np.repeat(ii, valid.sum(axis=1))
            pair_c = kids[valid]
        else:
            pair_i = np.empty(0, dtype=np.int64)
            pair_c = np.empty(0, dtype=np.int64)

    if not out_idx:
        return np.empty(0, dtype=np.int64), np.empty((0, 3))
    return np.concatenate(out_idx), np.concatenate(out_terms)


def reduce_terms(n: int, idx: np.ndarray, terms: np.ndarray) -> np.ndarray:
    """Per-node exactly-rounded sums of force terms."""
    out = np.zeros((n, 3))
    if idx.size == 0:
        return out
    order = np.argsort(idx, kind="stable")
    idx = idx[order]
    terms = terms[order]
    bounds = np.searchsorted(idx, np.arange(n + 1))
    for node in range(n):
        lo, hi = bounds[node], bounds[node + 1]
        if lo == hi:
            continue
        chunk = terms[lo:hi]
        out[node, 0] = math.fsum(chunk[:, 0].tolist())
        out[node, 1] = math.fsum(chunk[:, 1].tolist())
        out[node, 2] = math.fsum(chunk[:, 2].tolist())
    return out


def manybody_exact_terms(
    points: np.ndarray,
    strengths: np.ndarray,
    alpha: float,
    distance_min: float,
    distance_max: float,
) -> tuple[np.ndarray, np.ndarray]:
    """Dense O(n^2) enumeration of the same interaction terms.

    Independent of the tree: every ordered pair (i, j), j != i, evaluated
    directly. Serves as the oracle for the octree.
    """
    n = len(points)
    if n == 0:
        return np.empty(0, dtype=np.int64), np.empty((0, 3))
    dmin2 = distance_min * distance_min
    dmax2 = distance_max * distance_max

    dx = points[None, :, 0] - points[:, None, 0]
    dy = points[None, :, 1] - points[:, None, 1]
    dz = points[None, :, 2] - points[:, None, 2]
    keep, tx, ty, tz = _interaction(
        dx, dy, dz, strengths[None, :], alpha, dmin2, dmax2)
    keep &= ~np.eye(n, dtype=bool)

    idx = np.repeat(np.arange(n, dtype=np.int64), n)[keep.ravel()]
    terms = np.stack(
        [tx.ravel()[keep.ravel()],
         ty.ravel()[keep.ravel()],
         tz.ravel()[keep.ravel()]], axis=1)
    return idx, terms
