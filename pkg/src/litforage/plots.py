"""Deterministic SVG renderings of sessions.

Bird's-eye view: orthographic projection of the 3D layout with the
vertical axis dropped, nodes colored by cluster from a fixed 8-color
palette, edges in their kind colors, one text label per cluster at its
anchor. Usage plot: one timeline strip per feature category with marks
colored by input modality and tallies in the row labels.

Output bytes are a pure function of the input document/log: fixed float
formatting, no timestamps, no randomness.
"""

from __future__ import annotations

from .graph import GraphDocument
from .session import Feature, InteractionEvent

CLUSTER_PALETTE = (
    "#e6194b", "#3cb44b", "#ffe119", "#4363d8",
    "#f58231", "#911eb4", "#46f0f0", "#f032e6",
)

MODALITY_COLORS = {
    "menu": "#4363d8",
    "pointer_gesture": "#3cb44b",
    "voice": "#f58231",
    "api": "#911eb4",
    "system": "#9a9a9a",
}

UNCLUSTERED_COLOR = "#8c8c8c"
BACKGROUND = "#14141c"


def _fmt(x: float) -> str:
    return "%.3f" % x


def _esc(text: str) -> str:
    return (text.replace("&", "&amp;").replace("<", "&lt;")
            .replace(">", "&gt;"))


def render_birdseye(doc: GraphDocument, size: int = 640) -> bytes:
    """Top-down projection: world (x, z) onto image (x, y)."""
    positions = doc.layout.positions
    points = {nid: (vec[0], vec[2]) for nid, vec in positions.items()}
    anchors = {c.cluster_id: (c.anchor[0], c.anchor[2]) for c in doc.clusters}

    xs = [p[0] for p in points.values()] + [a[0] for a in anchors.values()]
    ys = [p[1] for p in points.values()] + [a[1] for a in anchors.values()]
    if not xs:
        xs, ys = [0.0], [0.0]
    pad = 25.0
    lo_x, hi_x = min(xs) - pad, max(xs) + pad
    lo_y, hi_y = min(ys) - pad, max(ys) + pad
    span = max(hi_x - lo_x, hi_y - lo_y, 1e-9)
    scale = size / span

    def sx(x: float) -> str:
        return _fmt((x - lo_x) * scale)

    def sy(y: float) -> str:
        return _fmt((y - lo_y) * scale)

    cluster_color: dict[str, str] = {}
    for cluster in doc.clusters:
        color = CLUSTER_PALETTE[cluster.cluster_id % len(CLUSTER_PALETTE)]
        for member in cluster.member_ids:
            cluster_color[member] = color

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        '<svg xmlns="http://www.w3.org/2000/svg" width="%d" height="%d" '
        'viewBox="0 0 %d %d">' % (size, size, size, size),
        '<rect width="%d" height="%d" fill="%s"/>' % (size, size, BACKGROUND),
    ]
    for edge in doc.edges:
        if edge.source not in points or edge.target not in points:
            continue
        x1, y1 = points[edge.source]
        x2, y2 = points[edge.target]
        out.append(
            '<line x1="%s" y1="%s" x2="%s" y2="%s" stroke="%s" '
            'stroke-width="1.2" stroke-opacity="0.75"/>'
            % (sx(x1), sy(y1), sx(x2), sy(y2), edge.kind.color))
    for nid in doc.nodes:
        if nid not in points:
            continue
        x, y = points[nid]
        node = doc.nodes[nid]
        color = cluster_color.get(nid, UNCLUSTERED_COLOR)
        radius = "7" if node.is_seed else "5"
        stroke = ' stroke="#ffffff" stroke-width="1.5"' if node.is_seed else ""
        out.append('<circle cx="%s" cy="%s" r="%s" fill="%s"%s/>'
                   % (sx(x), sy(y), radius, color, stroke))
    for cluster in doc.clusters:
        ax, ay = anchors[cluster.cluster_id]
        out.append(
            '<text class="cluster-label" x="%s" y="%s" fill="#f2f2f2" '
            'font-size="14" font-family="sans-serif" '
            'text-anchor="middle">%s</text>'
            % (sx(ax), sy(ay), _esc(cluster.label)))
    out.append("</svg>")
    return ("\n".join(out) + "\n").encode("utf-8")


def render_usage(events: list[InteractionEvent], width: int = 800) -> bytes:
    """Per-feature timeline strips with modality-colored marks."""
    rows = list(Feature)
    row_height = 34
    left = 230
    height = row_height * len(rows) + 40

    counts = {feature: 0 for feature in rows}
    for event in events:
        counts[event.feature] += 1

    t0 = min((e.ts for e in events), default=0)
    t1 = max((e.ts for e in events), default=1)
    span = max(t1 - t0, 1)

    def tx(ts: int) -> str:
        return _fmt(left + (ts - t0) / span * (width - left - 20))

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        '<svg xmlns="http://www.w3.org/2000/svg" width="%d" height="%d" '
        'viewBox="0 0 %d %d">' % (width, height, width, height),
        '<rect width="%d" height="%d" fill="%s"/>' % (width, height, BACKGROUND),
    ]
    for row, feature in enumerate(rows):
        y = 30 + row * row_height
        out.append(
            '<text class="feature-label" x="10" y="%d" fill="#f2f2f2" '
            'font-size="13" font-family="sans-serif">%s (%d)</text>'
            % (y + 4, _esc(feature.value), counts[feature]))
        out.append(
            '<line x1="%d" y1="%d" x2="%d" y2="%d" stroke="#3a3a46" '
            'stroke-width="1"/>' % (left, y, width - 20, y))
    for event in events:
        row = rows.index(event.feature)
        y = 30 + row * row_height
        color = MODALITY_COLORS[event.modality.value]
        out.append(
            '<circle class="event-mark" cx="%s" cy="%d" r="5" fill="%s"/>'
            % (tx(event.ts), y, color))
    out.append("</svg>")
    return ("\n".join(out) + "\n").encode("utf-8")
