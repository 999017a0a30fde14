"""Deterministic 3D force-directed layout.

One tick: cool alpha toward its target, accumulate link springs,
Barnes-Hut many-body repulsion, centroid centering and cluster-anchor
pulls into velocities (all scaled by alpha), damp velocities, integrate
positions, then restore pinned nodes exactly.

Determinism rules: no wall clock, no process randomness. Initial
placement is a golden-angle spiral seeded by the state's rng_seed;
coincident nodes are separated by a jitter hashed from (node id, seed);
per-node force totals are exactly-rounded sums, so identical inputs give
identical states, bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Callable

import numpy as np

from .canonical import unit_floats
from .errors import (
    CapacityError,
    NotFoundError,
    NumericError,
    ValidationError,
)
from .octree import (
    Octree,
    manybody_exact_terms,
    manybody_terms,
    reduce_terms,
)

if TYPE_CHECKING:  # pragma: no cover
    from .graph import GraphDocument, Violation

Vec3 = tuple[float, float, float]

ZERO3: Vec3 = (0.0, 0.0, 0.0)

GOLDEN_ANGLE = math.pi * (3.0 - math.sqrt(5.0))
# Second, incommensurate rotation so consecutive spiral points also spread
# in declination, not just azimuth.
DECLINATION_ANGLE = math.pi * 20.0 / (9.0 + math.sqrt(221.0))

SPIRAL_RADIUS = 10.0
COINCIDENCE_EPS = 1e-6
DEFAULT_REHEAT_ALPHA = 0.3

_DEFAULT_ALPHA_MIN = 0.001
_DEFAULT_ALPHA_DECAY = 1.0 - _DEFAULT_ALPHA_MIN ** (1.0 / 300.0)


@dataclass
class ForceConfig:
    link_distance: float = 30.0
    link_iterations: int = 1
    manybody_strength: float = -30.0
    theta: float = 0.9
    distance_min: float = 1.0
    distance_max: float = math.inf
    center_strength: float = 1.0
    cluster_anchor_strength: float = 0.1
    velocity_decay: float = 0.4
    alpha_min: float = _DEFAULT_ALPHA_MIN
    alpha_decay: float = _DEFAULT_ALPHA_DECAY
    alpha_target: float = 0.0

    def __post_init__(self) -> None:
        if self.theta < 0.0:
            raise ValidationError("theta must be >= 0")
        if not (0.0 < self.alpha_min < 1.0):
            raise ValidationError("alpha_min must be in (0, 1)")
        if not (0.0 < self.velocity_decay < 1.0):
            raise ValidationError("velocity_decay must be in (0, 1)")
        if self.link_iterations < 1:
            raise ValidationError("link_iterations must be >= 1")
        if self.link_distance <= 0.0 or self.distance_min <= 0.0:
            raise ValidationError("distances must be positive")
        if not (0.0 <= self.center_strength <= 1.0):
            raise ValidationError("center_strength must be in [0, 1]")
        if self.cluster_anchor_strength < 0.0:
            raise ValidationError("cluster_anchor_strength must be >= 0")


@dataclass
class LayoutState:
    """Per-node kinematics plus the global cooling parameter."""

    positions: dict[str, Vec3] = field(default_factory=dict)
    velocities: dict[str, Vec3] = field(default_factory=dict)
    pins: dict[str, Vec3] = field(default_factory=dict)
    alpha: float = 1.0
    rng_seed: int = 0

    def place(self, node_id: str, pos: Vec3) -> None:
        self.positions[node_id] = pos
        self.velocities[node_id] = ZERO3

    def forget(self, node_id: str) -> None:
        self.positions.pop(node_id, None)
        self.velocities.pop(node_id, None)
        self.pins.pop(node_id, None)

    def validate(self, node_ids: set[str]) -> list["Violation"]:
        from .graph import Violation

        out: list[Violation] = []
        pos_keys = set(self.positions)
        if pos_keys != node_ids:
            for missing in sorted(node_ids - pos_keys):
                out.append(Violation("missing_position", missing,
                                     "node has no layout position"))
            for orphan in sorted(pos_keys - node_ids):
                out.append(Violation("orphan_position", orphan,
                                     "layout position for absent node"))
        if set(self.velocities) != node_ids:
            out.append(Violation("velocity_coverage", "layout",
                                 "velocity map does not cover the node set"))
        for node_id, vec in self.positions.items():
            if not all(math.isfinite(x) for x in vec):
                out.append(Violation("nonfinite_position", node_id,
                                     "position has non-finite components"))
        for node_id, vec in self.velocities.items():
            if not all(math.isfinite(x) for x in vec):
                out.append(Violation("nonfinite_velocity", node_id,
                                     "velocity has non-finite components"))
        for node_id, vec in self.pins.items():
            if node_id not in node_ids:
                out.append(Violation("orphan_pin", node_id,
                                     "pin for absent node"))
            elif self.velocities.get(node_id) != ZERO3:
                out.append(Violation("pinned_moving", node_id,
                                     "pinned node has non-zero velocity"))
        if not (math.isfinite(self.alpha) and 0.0 <= self.alpha <= 1.0):
            out.append(Violation("bad_alpha", "layout",
                                 "alpha %r outside [0, 1]" % self.alpha))
        return out

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "rng_seed": self.rng_seed,
            "positions": {k: list(v) for k, v in self.positions.items()},
            "velocities": {k: list(v) for k, v in self.velocities.items()},
            "pins": {k: list(v) for k, v in self.pins.items()},
        }

    @classmethod
    def from_dict(cls, d: dict) -> "LayoutState":
        def vecs(m: dict) -> dict[str, Vec3]:
            return {k: tuple(float(x) for x in v) for k, v in m.items()}

        return cls(
            positions=vecs(d.get("positions", {})),
            velocities=vecs(d.get("velocities", {})),
            pins=vecs(d.get("pins", {})),
            alpha=float(d.get("alpha", 1.0)),
            rng_seed=int(d.get("rng_seed", 0)),
        )


def spiral_position(index: int, seed: int) -> Vec3:
    """Golden-angle spiral placement for the node at the given insertion index.

    Radius grows with the cube root of the index so density stays roughly
    uniform; the two rotation phases are seeded so different sessions start
    from different orientations. Index 0 sits exactly at the origin.
    """
    if index == 0:
        return ZERO3
    u = unit_floats("spiral", seed, count=2)
    roll = index * GOLDEN_ANGLE + 2.0 * math.pi * u[0]
    yaw = index * DECLINATION_ANGLE + 2.0 * math.pi * u[1]
    r = SPIRAL_RADIUS * index ** (1.0 / 3.0)
    return (
        r * math.sin(roll) * math.cos(yaw),
        r * math.cos(roll),
        r * math.sin(roll) * math.sin(yaw),
    )


def jitter_vector(node_id: str, seed: int) -> Vec3:
    """Deterministic sub-micro displacement for coincident nodes."""
    u = unit_floats("jitter", node_id, seed, count=3)
    return tuple((x - 0.5) * 2e-5 for x in u)  # type: ignore[return-value]


def init_positions(doc: "GraphDocument", seed: int) -> LayoutState:
    """Fresh layout state for a document: spiral positions, zero velocity,
    alpha restarted at 1."""
    state = LayoutState(alpha=1.0, rng_seed=seed)
    for index, node_id in enumerate(doc.nodes):
        state.place(node_id, spiral_position(index, seed))
    return state


def pin(state: LayoutState, node_id: str, pos: Vec3) -> LayoutState:
    if node_id not in state.positions:
        raise NotFoundError("no node %r in layout" % node_id, {"id": node_id})
    vec = tuple(float(x) for x in pos)
    if len(vec) != 3 or not all(math.isfinite(x) for x in vec):
        raise NumericError("pin position must be a finite 3-vector")
    state.pins[node_id] = vec  # type: ignore[assignment]
    state.positions[node_id] = vec  # type: ignore[assignment]
    state.velocities[node_id] = ZERO3
    return state


def unpin(state: LayoutState, node_id: str) -> LayoutState:
    if node_id not in state.positions:
        raise NotFoundError("no node %r in layout" % node_id, {"id": node_id})
    state.pins.pop(node_id, None)
    return state


def reheat(state: LayoutState, alpha_restart: float = DEFAULT_REHEAT_ALPHA) -> LayoutState:
    """Re-energize the simulation after graph changes; alpha never drops."""
    if not (0.0 < alpha_restart <= 1.0):
        raise ValidationError(
            "alpha_restart %r outside (0, 1]" % alpha_restart)
    state.alpha = max(state.alpha, alpha_restart)
    return state


# -- force evaluation --------------------------------------------------------


def _check_finite(state: LayoutState, ids: list[str]) -> None:
    for node_id in ids:
        if node_id not in state.positions:
            raise NumericError("node %r has no position" % node_id)
    for m in (state.positions, state.velocities):
        for vec in m.values():
            if not all(math.isfinite(x) for x in vec):
                raise NumericError("non-finite layout state")
    if not math.isfinite(state.alpha):
        raise NumericError("non-finite alpha")


def _separate_coincident(state: LayoutState, ids: list[str],
                         positions: np.ndarray) -> None:
    """Displace nodes closer than COINCIDENCE_EPS by their hashed jitter.

    Grid hash at the epsilon scale; candidate pairs come from the same or
    adjacent cells, so no true coincidence escapes.
    """
    n = len(ids)
    if n < 2:
        return
    inv = 1.0 / COINCIDENCE_EPS
    cells: dict[tuple[int, int, int], list[int]] = {}
    for k in range(n):
        key = (int(math.floor(positions[k, 0] * inv)),
               int(math.floor(positions[k, 1] * inv)),
               int(math.floor(positions[k, 2] * inv)))
        cells.setdefault(key, []).append(k)

    eps2 = COINCIDENCE_EPS * COINCIDENCE_EPS
    hit: set[int] = set()

    def scan(members: list[int], others: list[int], same_cell: bool) -> None:
        for a_pos, a in enumerate(members):
            start = a_pos + 1 if same_cell else 0
            row = members if same_cell else others
            for b in row[start:]:
                d = positions[a] - positions[b]
                if float(d @ d) < eps2:
                    hit.add(a)
                    hit.add(b)

    offsets = [
        (dx, dy, dz)
        for dx in (0, 1)
        for dy in ((0, 1) if dx else (-1, 0, 1))
        for dz in ((-1, 0, 1) if (dx or dy) else (1,))
    ]
    for key, members in cells.items():
        scan(members, members, True)
        for off in offsets:
            neighbor = (key[0] + off[0], key[1] + off[1], key[2] + off[2])
            other = cells.get(neighbor)
            if other:
                scan(members, other, False)

    for k in sorted(hit):
        node_id = ids[k]
        j = jitter_vector(node_id, state.rng_seed)
        moved = (positions[k, 0] + j[0], positions[k, 1] + j[1],
                 positions[k, 2] + j[2])
        positions[k] = moved
        state.positions[node_id] = moved


def _link_rows(doc: "GraphDocument",
               index: dict[str, int]) -> list[tuple[int, int, float, float]]:
    degree: dict[str, int] = {}
    for edge in doc.edges:
        degree[edge.source] = degree.get(edge.source, 0) + 1
        degree[edge.target] = degree.get(edge.target, 0) + 1
    rows = []
    for edge in doc.edges:
        ds = degree[edge.source]
        dt = degree[edge.target]
        strength = 1.0 / min(ds, dt)
        bias = ds / (ds + dt)
        rows.append((index[edge.source], index[edge.target], strength, bias))
    return rows


def _apply_link_force(P: np.ndarray, V: np.ndarray, F: np.ndarray,
                      rows: list[tuple[int, int, float, float]],
                      alpha: float, config: ForceConfig, seed: int) -> None:
    """Sequential spring pass over effective positions (pos + velocity).

    Later links see the velocity contributions of earlier ones, which is
    what keeps chains stable at one iteration per tick.
    """
    if not rows:
        return
    px, py, pz = P[:, 0].tolist(), P[:, 1].tolist(), P[:, 2].tolist()
    vx, vy, vz = V[:, 0].tolist(), V[:, 1].tolist(), V[:, 2].tolist()
    fx, fy, fz = F[:, 0].tolist(), F[:, 1].tolist(), F[:, 2].tolist()
    distance = config.link_distance
    for _ in range(config.link_iterations):
        for si, ti, strength, bias in rows:
            ex = px[ti] + vx[ti] + fx[ti] - px[si] - vx[si] - fx[si]
            ey = py[ti] + vy[ti] + fy[ti] - py[si] - vy[si] - fy[si]
            ez = pz[ti] + vz[ti] + fz[ti] - pz[si] - vz[si] - fz[si]
            if ex == 0.0 and ey == 0.0 and ez == 0.0:
                ex, ey, ez = jitter_vector("link-%d-%d" % (si, ti), seed)
            dist = math.sqrt(ex * ex + ey * ey + ez * ez)
            scale = (dist - distance) / dist * alpha * strength
            ex *= scale
            ey *= scale
            ez *= scale
            fx[ti] -= ex * bias
            fy[ti] -= ey * bias
            fz[ti] -= ez * bias
            inv_bias = 1.0 - bias
            fx[si] += ex * inv_bias
            fy[si] += ey * inv_bias
            fz[si] += ez * inv_bias
    F[:, 0] = fx
    F[:, 1] = fy
    F[:, 2] = fz


def _forces(P: np.ndarray, V: np.ndarray, doc: "GraphDocument",
            ids: list[str], index: dict[str, int], alpha: float,
            config: ForceConfig, seed: int, *, theta: float | None = None,
            exact: bool = False) -> np.ndarray:
    """Total per-node velocity increment for one tick at the given alpha."""
    n = len(ids)
    F = np.zeros((n, 3))
    _apply_link_force(P, V, F, _link_rows(doc, index), alpha, config, seed)

    strengths = np.full(n, config.manybody_strength)
    if n > 1:
        if exact:
            idx, terms = manybody_exact_terms(
                P, strengths, alpha, config.distance_min, config.distance_max)
        else:
            tree = Octree(P, strengths)
            idx, terms = manybody_terms(
                tree, P, alpha, config.theta if theta is None else theta,
                config.distance_min, config.distance_max)
        F += reduce_terms(n, idx, terms)

    if n > 0 and config.center_strength > 0.0:
        cx = math.fsum(P[:, 0].tolist()) / n
        cy = math.fsum(P[:, 1].tolist()) / n
        cz = math.fsum(P[:, 2].tolist()) / n
        k = config.center_strength * alpha
        F[:, 0] -= cx * k
        F[:, 1] -= cy * k
        F[:, 2] -= cz * k

    if config.cluster_anchor_strength > 0.0:
        k = config.cluster_anchor_strength * alpha
        for cluster in doc.clusters:
            ax, ay, az = cluster.anchor
            for member in cluster.member_ids:
                m = index.get(member)
                if m is None:
                    continue
                F[m, 0] += (ax - P[m, 0]) * k
                F[m, 1] += (ay - P[m, 1]) * k
                F[m, 2] += (az - P[m, 2]) * k
    return F


def _arrays(state: LayoutState, ids: list[str]) -> tuple[np.ndarray, np.ndarray]:
    P = np.array([state.positions[i] for i in ids], dtype=np.float64)
    V = np.array([state.velocities[i] for i in ids], dtype=np.float64)
    if len(ids) == 0:
        P = P.reshape(0, 3)
        V = V.reshape(0, 3)
    return P, V


def tick(state: LayoutState, doc: "GraphDocument",
         config: ForceConfig | None = None) -> LayoutState:
    """Advance the simulation by one step."""
    config = config or ForceConfig()
    ids = list(doc.nodes)
    _check_finite(state, ids)

    state.alpha = state.alpha + (config.alpha_target - state.alpha) * config.alpha_decay

    n = len(ids)
    if n == 0:
        return state
    index = {node_id: k for k, node_id in enumerate(ids)}
    P, V = _arrays(state, ids)
    _separate_coincident(state, ids, P)

    F = _forces(P, V, doc, ids, index, state.alpha, config, state.rng_seed)
    V += F
    V *= 1.0 - config.velocity_decay
    P += V

    for k, node_id in enumerate(ids):
        state.positions[node_id] = (float(P[k, 0]), float(P[k, 1]), float(P[k, 2]))
        state.velocities[node_id] = (float(V[k, 0]), float(V[k, 1]), float(V[k, 2]))
    for node_id, fixed in state.pins.items():
        if node_id in state.positions:
            state.positions[node_id] = fixed
            state.velocities[node_id] = ZERO3
    return state


def run(state: LayoutState, doc: "GraphDocument",
        config: ForceConfig | None = None, max_ticks: int = 300,
        on_tick: Callable[[LayoutState, int], None] | None = None) -> int:
    """Tick until alpha falls below alpha_min or the budget runs out.

    Returns the number of ticks executed; with default config and a fresh
    state this is exactly 300.
    """
    config = config or ForceConfig()
    if max_ticks < 0:
        raise ValidationError("max_ticks must be >= 0")
    count = 0
    while count < max_ticks and state.alpha >= config.alpha_min:
        tick(state, doc, config)
        count += 1
        if on_tick is not None:
            on_tick(state, count)
    return count


def net_forces(state: LayoutState, doc: "GraphDocument",
               config: ForceConfig | None = None,
               theta: float | None = None) -> dict[str, Vec3]:
    """Per-node force map as the next tick would apply it (Barnes-Hut path)."""
    config = config or ForceConfig()
    ids = list(doc.nodes)
    _check_finite(state, ids)
    index = {node_id: k for k, node_id in enumerate(ids)}
    P, V = _arrays(state, ids)
    F = _forces(P, V, doc, ids, index, state.alpha, config, state.rng_seed,
                theta=theta)
    return {node_id: (float(F[k, 0]), float(F[k, 1]), float(F[k, 2]))
            for k, node_id in enumerate(ids)}


def exact_forces(state: LayoutState, doc: "GraphDocument",
                 config: ForceConfig | None = None) -> dict[str, Vec3]:
    """O(n^2) oracle: direct pairwise repulsion plus link/center/anchor."""
    config = config or ForceConfig()
    ids = list(doc.nodes)
    if len(ids) > 2000:
        raise CapacityError(
            "exact_forces is limited to 2000 nodes, got %d" % len(ids))
    _check_finite(state, ids)
    index = {node_id: k for k, node_id in enumerate(ids)}
    P, V = _arrays(state, ids)
    F = _forces(P, V, doc, ids, index, state.alpha, config, state.rng_seed,
                exact=True)
    return {node_id: (float(F[k, 0]), float(F[k, 1]), float(F[k, 2]))
            for k, node_id in enumerate(ids)}
