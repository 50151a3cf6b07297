"""Chambers of the reduced plane cut by a traced contour.

The box boundary and the clipped contour polylines are snapped to a grid,
noded and polygonized with shapely. Faces touching the box boundary are
outer (depth 0); depth of the others is the breadth-first distance in the
face adjacency graph.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import shapely
from shapely.geometry import LineString, MultiLineString, Point, box as make_box
from shapely.ops import polygonize_full, polylabel, unary_union

from .contour import Contour

SNAP = 1e-9
SLIVER = 16  # faces thinner than this many snap cells are merged into a neighbour
BOUNDARY = "boundary"


class ArrangementError(RuntimeError):
    def __init__(self, message, location=None):
        super().__init__(message)
        self.location = location


@dataclass
class Chamber:
    id: int
    depth: int
    bounded: bool
    representative: tuple[float, float]
    polygon: object  # shapely Polygon
    piece_interval: Optional[tuple[int, int]] = None
    certified_bound: Optional[int] = None

    @property
    def vertex_count(self) -> int:
        return len(self.polygon.exterior.coords) - 1 + sum(
            len(r.coords) - 1 for r in self.polygon.interiors
        )


@dataclass
class ChamberMap:
    faces: list[Chamber]
    adjacency: list[tuple[int, int, int]]  # (face, face, segment id), face ids ascending
    box: tuple[float, float, float, float]
    m: int = 0
    snap: float = 0.0  # absolute snap distance
    lines: list = field(default_factory=list)  # clipped (segment id, LineString)
    euler: tuple[int, int, int, int] = (0, 0, 0, 0)  # V, E, F (with unbounded face), components
    merges: int = 0
    flags: list[str] = field(default_factory=list)

    def neighbours(self, fid: int) -> list[tuple[int, int]]:
        out = []
        for a, b, s in self.adjacency:
            if a == fid:
                out.append((b, s))
            elif b == fid:
                out.append((a, s))
        return out

    @property
    def euler_ok(self) -> bool:
        v, e, f, c = self.euler
        return v - e + f == 1 + c


def _segment_lines(contour: Contour, box_poly):
    out = []
    for seg in contour.segments:
        pts = np.asarray(seg.points)
        if len(pts) < 2:
            continue
        clipped = LineString(pts).intersection(box_poly)
        for g in getattr(clipped, "geoms", [clipped]):
            if g.geom_type == "LineString" and not g.is_empty and g.length > 0:
                out.append((seg.id, g))
    return out


def _graph_counts(noded) -> tuple[int, int, int]:
    edges = [g for g in getattr(noded, "geoms", [noded]) if g.length > 0]
    index: dict = {}
    parent: list[int] = []

    def vid(p):
        if p not in index:
            index[p] = len(parent)
            parent.append(len(parent))
        return index[p]

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    n_edges = 0
    for e in edges:
        coords = list(e.coords)
        # interior vertices of a noded piece have degree 2 and cancel in V - E
        a, b = vid(coords[0]), vid(coords[-1])
        n_edges += 1
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb
    comps = len({find(i) for i in range(len(parent))})
    return len(parent), n_edges, comps


def _merge_slivers(faces: list, width: float) -> tuple[list, int]:
    """Absorb faces of mean width ``2 area / perimeter`` below ``width``.

    Two branches meeting tangentially at a cusp come closer than the snap grid
    and can enclose a spurious face there.
    """
    faces = list(faces)
    merged = 0
    while len(faces) > 1:
        thin = [i for i, f in enumerate(faces) if 2 * f.area / f.length < width]
        if not thin:
            break
        i = min(thin, key=lambda k: faces[k].area)
        shared = [
            (faces[i].boundary.intersection(f.boundary).length, j)
            for j, f in enumerate(faces)
            if j != i
        ]
        best, j = max(shared)
        if best <= 0:
            break
        faces[j] = unary_union([faces[j], faces[i]])
        if faces[j].geom_type != "Polygon":
            faces[j] = faces[j].buffer(0)
        del faces[i]
        merged += 1
    return faces, merged


def build_arrangement(contour: Contour, box=None, snap: float = SNAP) -> ChamberMap:
    box = tuple(contour.box if box is None else box)
    x0, y0, x1, y1 = box
    diag = math.hypot(x1 - x0, y1 - y0)
    grid = snap * diag
    box_poly = make_box(x0, y0, x1, y1)
    lines = _segment_lines(contour, box_poly)
    raw = MultiLineString([box_poly.exterior.coords] + [list(g.coords) for _, g in lines])
    snapped = shapely.set_precision(raw, grid) if grid > 0 else raw
    merges = shapely.get_num_coordinates(raw) - shapely.get_num_coordinates(snapped)
    noded = unary_union(snapped)
    polys, cuts, dangles, invalid = polygonize_full(noded)
    if not invalid.is_empty:
        loc = invalid.geoms[0].coords[0] if hasattr(invalid, "geoms") else None
        raise ArrangementError("snap rounding left an invalid ring", location=loc)
    faces = [p for p in getattr(polys, "geoms", [polys]) if not p.is_empty and p.area > 0]
    if not faces:
        raise ArrangementError("polygonization produced no faces", location=(x0, y0))
    faces, slivers = _merge_slivers(faces, SLIVER * grid)
    if slivers:
        merges += slivers
        rings = [box_poly.exterior] + [f.boundary for f in faces]
        noded = unary_union(shapely.set_precision(shapely.GeometryCollection(rings), grid))

    boundary = box_poly.exterior
    tol = max(grid, 1e-12 * diag)
    reps = []
    for f in faces:
        rep = polylabel(f, tolerance=max(1e-6 * diag, tol))
        if not f.contains(rep):
            rep = f.representative_point()
        reps.append((rep.x, rep.y))
    order = sorted(range(len(faces)), key=lambda i: (round(reps[i][0], 9), round(reps[i][1], 9)))
    faces = [faces[i] for i in order]
    reps = [reps[i] for i in order]
    outer = [f.exterior.buffer(tol).intersection(boundary).length > tol for f in faces]

    seg_tree = [(sid, g) for sid, g in lines]
    adjacency = set()
    for i in range(len(faces)):
        for j in range(i + 1, len(faces)):
            if not faces[i].envelope.buffer(tol).intersects(faces[j].envelope):
                continue
            shared = faces[i].boundary.intersection(faces[j].boundary)
            for piece in getattr(shared, "geoms", [shared]):
                if piece.is_empty or piece.length <= 0:
                    continue
                mid = piece.interpolate(0.5, normalized=True)
                if not seg_tree:
                    continue
                sid = min(seg_tree, key=lambda t: t[1].distance(mid))[0]
                adjacency.add((i, j, sid))
    adjacency = sorted(adjacency)

    depth = [None] * len(faces)
    queue = deque()
    for i, o in enumerate(outer):
        if o:
            depth[i] = 0
            queue.append(i)
    nbrs: dict[int, list[int]] = {i: [] for i in range(len(faces))}
    for a, b, _ in adjacency:
        nbrs[a].append(b)
        nbrs[b].append(a)
    while queue:
        i = queue.popleft()
        for j in nbrs[i]:
            if depth[j] is None:
                depth[j] = depth[i] + 1
                queue.append(j)
    flags = []
    chambers = []
    for i, f in enumerate(faces):
        if depth[i] is None:
            flags.append(f"face {i} unreachable from the outer faces")
        chambers.append(Chamber(i, depth[i] if depth[i] is not None else -1, not outer[i], reps[i], f))

    v, e, comps = _graph_counts(noded)
    cmap = ChamberMap(
        chambers,
        adjacency,
        box,
        m=contour.multiplicity,
        snap=grid,
        lines=lines,
        euler=(v, e, len(faces) + 1, comps),
        merges=int(merges),
        flags=flags,
    )
    if not cmap.euler_ok:
        cmap.flags.append(f"Euler check failed: V={v} E={e} F={len(faces) + 1} C={comps}")
    cmap.flags.extend(depth_flags(cmap))
    return cmap


def depths(cmap: ChamberMap) -> dict[int, int]:
    return {c.id: c.depth for c in cmap.faces}


def depth_flags(cmap: ChamberMap) -> list[str]:
    """Validation messages for depth bounds that a correct trace must satisfy."""
    flags = []
    limit = cmap.m // 2
    for c in cmap.faces:
        if c.depth > limit:
            flags.append(f"chamber {c.id} has depth {c.depth} > floor(m/2) = {limit}")
    if cmap.m == 4:
        for a, b, _ in cmap.adjacency:
            if cmap.faces[a].depth == 2 and cmap.faces[b].depth == 2:
                flags.append(f"depth-2 chambers {a} and {b} are adjacent")
    if cmap.m <= 1 and len(cmap.faces) > 2:
        flags.append(f"{len(cmap.faces)} chambers with m = {cmap.m}")
    return flags


def locate(cmap: ChamberMap, p) -> int | str:
    """Chamber id containing ``p``, or ``"boundary"`` within snap distance of the contour."""
    x, y = float(p[0]), float(p[1])
    x0, y0, x1, y1 = cmap.box
    if not (x0 <= x <= x1 and y0 <= y <= y1):
        raise ValueError(f"point {(x, y)} outside the box {cmap.box}")
    pt = Point(x, y)
    eps = max(cmap.snap, 1e-12)
    if any(g.distance(pt) <= eps for _, g in cmap.lines):
        return BOUNDARY
    for c in cmap.faces:
        if c.polygon.covers(pt):
            return c.id
    # within snapping slack of a face edge
    return min(cmap.faces, key=lambda c: c.polygon.distance(pt)).id


def chamber_table(cmap: ChamberMap) -> list[dict]:
    return [
        {
            "id": c.id,
            "depth": c.depth,
            "bounded": c.bounded,
            "representative": [c.representative[0], c.representative[1]],
            "vertices": c.vertex_count,
        }
        for c in cmap.faces
    ]
