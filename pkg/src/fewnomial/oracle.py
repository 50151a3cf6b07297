"""Grid oracle: count connected components of the real zero set of an exponential sum.

Heuristic and validation-grade. The sign of ``f`` is sampled on grid vertices
in log coordinates (log-sum-exp, a zero value counts as positive). A cell is
active when its vertex signs are mixed; two face-adjacent active cells are
joined when the facet they share itself carries mixed signs. Active cells are
refined a few times, sparsely, before components are counted.
"""

from __future__ import annotations

import itertools
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

DEFAULT_R = 12.0
MAX_SCALE = 4  # cap on the automatic resolution growth
CELL_BUDGET = 1 << 21  # refinement stops before a level would exceed this many cells


def default_resolution(n: int) -> int:
    return 2048 if n <= 2 else 256


@dataclass(frozen=True)
class GridSpec:
    R: float = DEFAULT_R
    resolution: Optional[int] = None  # cells per axis, None for the per-dimension default
    refinement: int = 2
    auto_box: bool = True  # grow R to cover every tropical vertex of the sum

    def __post_init__(self):
        if self.R <= 0:
            raise ValueError("R must be positive")
        if self.resolution is not None and self.resolution < 64:
            raise ValueError("resolution must be at least 64")
        if self.refinement < 0:
            raise ValueError("refinement must be non-negative")

    def cells(self, n: int) -> int:
        return self.resolution if self.resolution is not None else default_resolution(n)


@dataclass
class OracleResult:
    count: int
    bounded: int
    touching: int  # active finest-level cells on the box boundary
    min_band: float  # min relative |f| over inactive vertices next to the zero set
    R: float
    resolution: int
    refinement: int  # levels actually used (the cell budget may stop early)
    component_bounded: list[bool] = field(default_factory=list)
    capped: bool = False  # automatic growth hit MAX_SCALE

    @property
    def truncated(self) -> bool:
        return self.touching > 0


class ExpSum:
    """``f(x) = sum_k s_k exp(a_k . x + l_k)`` from exponent columns, signs and log|c|."""

    def __init__(self, columns, signs, log_abs):
        self.a = np.array([[float(v) for v in col] for col in columns], dtype=float)
        self.s = np.array([float(s) for s in signs])
        self.l = np.array([float(v) for v in log_abs])
        if self.a.shape[0] != len(self.s) or len(self.s) != len(self.l):
            raise ValueError("exponents, signs and coefficients disagree in length")
        if not np.all(np.isfinite(self.l)):
            raise ValueError("zero coefficient")

    @property
    def n(self) -> int:
        return self.a.shape[1]

    @classmethod
    def from_coefficients(cls, columns, coefficients):
        coeffs = [float(c) for c in coefficients]
        if any(c == 0 for c in coeffs):
            raise ValueError("zero coefficient")
        return cls(columns, [1 if c > 0 else -1 for c in coeffs], [math.log(abs(c)) for c in coeffs])

    @classmethod
    def canonical(cls, sys, c1: float, c2: float):
        """Reduced form with reduced point ``(c1, c2)``."""
        log_abs = [0.0] * (sys.n + 1) + [-float(c1), -float(c2)]
        return cls(sys.columns(), sys.signs, log_abs)

    def evaluate(self, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Sign (+1 for values >= 0) and relative magnitude ``|f| / sum |terms|`` at points ``x``."""
        e = x @ self.a.T + self.l
        m = e.max(axis=1, keepdims=True)
        w = np.exp(e - m)
        s = w @ self.s
        rel = np.abs(s) / w.sum(axis=1)
        return np.where(s >= 0, 1, -1).astype(np.int8), rel

    def tropical_band(self) -> float:
        """Width beyond which one term beats the sum of the others: ``2 log(#terms) / min |a_i - a_j|``."""
        a = self.a
        d = min(float(np.linalg.norm(a[i] - a[j])) for i, j in itertools.combinations(range(len(a)), 2))
        return 2.0 * math.log(len(a)) / d

    def tropical_radius(self) -> float:
        """Largest sup-norm of a point where ``n+1`` affinely independent terms tie."""
        n = self.n
        best = 0.0
        for subset in itertools.combinations(range(len(self.s)), n + 1):
            a = self.a[list(subset)]
            l = self.l[list(subset)]
            m = a[1:] - a[0]
            if abs(np.linalg.det(m)) < 1e-12:
                continue
            x = np.linalg.solve(m, l[0] - l[1:])
            best = max(best, float(np.max(np.abs(x))))
        return best


def _corner_offsets(n: int) -> np.ndarray:
    return np.array(list(itertools.product((0, 1), repeat=n)), dtype=np.int64)


def _keys(idx: np.ndarray, base: int) -> np.ndarray:
    k = np.zeros(len(idx), dtype=np.int64)
    for d in range(idx.shape[1] - 1, -1, -1):
        k = k * base + idx[:, d]
    return k


class _Level:
    """Sparse set of cells at one resolution with their corner signs."""

    def __init__(self, f: ExpSum, cells: np.ndarray, res: int, R: float, dense=None):
        n = f.n
        self.res = res
        self.cells = cells
        corners = _corner_offsets(n)
        if dense is not None:  # level 0: read corners off the full vertex grid
            signs, rel, _ = dense
            idx = cells[:, None, :] + corners[None, :, :]
            flat = tuple(idx[..., d] for d in range(n))
            self.corner_sign = signs[flat]
            self.corner_rel = rel[flat].astype(float)
            self.active = self.corner_sign.min(axis=1) != self.corner_sign.max(axis=1)
            return
        verts = (cells[:, None, :] + corners[None, :, :]).reshape(-1, n)
        vkeys = _keys(verts, res + 1)
        uniq, inv = np.unique(vkeys, return_inverse=True)
        first = np.zeros(len(uniq), dtype=np.int64)
        first[inv] = np.arange(len(inv))
        uverts = verts[first]
        h = 2.0 * R / res
        signs = np.empty(len(uniq), dtype=np.int8)
        rel = np.empty(len(uniq))
        chunk = 1 << 18
        for s in range(0, len(uniq), chunk):
            sg, rl = f.evaluate(-R + uverts[s : s + chunk] * h)
            signs[s : s + chunk] = sg
            rel[s : s + chunk] = rl
        self.corner_sign = signs[inv].reshape(len(cells), len(corners))
        self.corner_rel = rel[inv].reshape(len(cells), len(corners))
        self.active = self.corner_sign.min(axis=1) != self.corner_sign.max(axis=1)


def _separable_eval(f: ExpSum, axes: list[np.ndarray]):
    """Signs and relative magnitudes on a tensor grid.

    Every term factors over the axes, so it is a product of per-axis
    exponentials, each shifted by its per-axis maximum over the terms. Points
    where all shifted terms underflow are redone with :meth:`ExpSum.evaluate`.
    """
    n = len(axes)
    shape = tuple(len(a) for a in axes)
    lmax = f.l.max()
    parts = []
    for d, ax in enumerate(axes):
        e = np.outer(f.a[:, d], ax)  # (terms, len(ax))
        parts.append(np.exp(e - e.max(axis=0)))
    # sum over terms as one matrix product: (first axes) x terms x (last axis)
    w = np.exp(f.l - lmax)
    lead = np.ones((len(f.s), 1))
    for d in range(n - 1):
        lead = (lead[:, :, None] * parts[d][:, None, :]).reshape(len(f.s), -1)
    total = ((lead * (f.s * w)[:, None]).T @ parts[-1]).reshape(shape)
    absum = ((lead * w[:, None]).T @ parts[-1]).reshape(shape)
    bad = absum < 1e-250
    rel = np.abs(total) / np.where(bad, 1.0, absum)
    signs = np.where(total >= 0, 1, -1).astype(np.int8)
    if bad.any():
        idx = np.argwhere(bad)
        pts = np.stack([axes[d][idx[:, d]] for d in range(n)], axis=1)
        sg, rl = f.evaluate(pts)
        signs[bad] = sg
        rel[bad] = rl
    return signs, rel


def _dense_level(f: ExpSum, res: int, R: float):
    """Signs on the full vertex grid; returns active cell indices and the vertex signs."""
    n = f.n
    axis = -R + np.arange(res + 1) * (2.0 * R / res)
    shape = (res + 1,) * n
    signs = np.empty(shape, dtype=np.int8)
    rel = np.empty(shape, dtype=np.float32)
    rows = max(1, (1 << 20) // (res + 1) ** (n - 1))
    for start in range(0, res + 1, rows):
        sub = axis[start : start + rows]
        sg, rl = _separable_eval(f, [sub] + [axis] * (n - 1))
        signs[start : start + rows] = sg
        rel[start : start + rows] = rl
    lo = np.full((res,) * n, 2, dtype=np.int8)
    hi = np.full((res,) * n, -2, dtype=np.int8)
    for off in itertools.product((0, 1), repeat=n):
        sl = tuple(slice(o, o + res) for o in off)
        lo = np.minimum(lo, signs[sl])
        hi = np.maximum(hi, signs[sl])
    act_mask = lo != hi
    on_active = np.zeros(shape, dtype=bool)
    for off in itertools.product((0, 1), repeat=n):
        sl = tuple(slice(o, o + res) for o in off)
        on_active[sl] |= act_mask
    band = float(np.where(on_active, np.inf, rel).min())
    return np.argwhere(act_mask).astype(np.int64), (signs, rel, band)


def _dilate_children(cells: np.ndarray, res: int) -> np.ndarray:
    n = cells.shape[1]
    offs = np.array(list(itertools.product((-1, 0, 1), repeat=n)), dtype=np.int64)
    nb = (cells[:, None, :] + offs[None, :, :]).reshape(-1, n)
    nb = nb[np.all((nb >= 0) & (nb < res), axis=1)]
    keys = np.unique(_keys(nb, res))
    nb = np.empty((len(keys), n), dtype=np.int64)
    for d in range(n):  # decode, least significant axis first
        nb[:, d] = keys % res
        keys = keys // res
    kids = (2 * nb[:, None, :] + _corner_offsets(n)[None, :, :]).reshape(-1, n)
    return kids


def _components(level: _Level, n: int):
    act = np.nonzero(level.active)[0]
    cells = level.cells[act]
    signs = level.corner_sign[act]
    if len(act) == 0:
        return 0, np.zeros(0, dtype=np.int64), cells
    base = level.res + 1
    keys = _keys(cells, base)
    order = np.argsort(keys)
    skeys = keys[order]
    corners = _corner_offsets(n)
    rows, cols = [], []
    for d in range(n):
        step = np.zeros(n, dtype=np.int64)
        step[d] = 1
        # facet shared with the +d neighbour: corners with bit d set
        facet = corners[:, d] == 1
        fs = signs[:, facet]
        mixed = fs.min(axis=1) != fs.max(axis=1)
        nkeys = _keys(cells + step, base)
        pos = np.searchsorted(skeys, nkeys)
        pos = np.minimum(pos, len(skeys) - 1)
        hit = (skeys[pos] == nkeys) & mixed
        rows.append(np.nonzero(hit)[0])
        cols.append(order[pos[hit]])
    r = np.concatenate(rows)
    c = np.concatenate(cols)
    g = coo_matrix((np.ones(len(r), dtype=np.int8), (r, c)), shape=(len(act), len(act)))
    count, labels = connected_components(g, directed=False)
    return count, labels, cells


def count_components(f: ExpSum, spec: GridSpec = GridSpec(), pgm_path=None) -> OracleResult:
    n = f.n
    if n > 3:
        raise ValueError("the grid oracle handles n <= 3 only")
    R = float(spec.R)
    res = spec.cells(n)
    capped = False
    if spec.auto_box:
        want = max(R, 1.5 * f.tropical_radius() + 4.0 + f.tropical_band())
        if want > R:
            scale = want / R
            if scale > MAX_SCALE:
                scale, capped = MAX_SCALE, True
            R = R * scale
            res = int(math.ceil(res * scale))
    active, dense = _dense_level(f, res, R)
    if pgm_path is not None and n == 2:
        write_pgm(pgm_path, dense[0])
    cur_res = res
    levels_used = 0
    level = _Level(f, active, res, R, dense)
    dense_band = dense[2]
    del dense
    if spec.refinement and len(active):
        cells = active
        for _ in range(spec.refinement):
            kids = _dilate_children(cells, cur_res)
            if len(kids) > CELL_BUDGET:
                break
            cur_res *= 2
            levels_used += 1
            level = _Level(f, kids, cur_res, R)
            cells = level.cells[level.active]
            if len(cells) == 0:
                break
    count, labels, cells = _components(level, n)
    scale_fine = cur_res // res
    edge = np.any((cells == 0) | (cells == cur_res - 1), axis=1)
    near = np.any((cells < 2 * scale_fine) | (cells >= cur_res - 2 * scale_fine), axis=1)
    bounded = []
    for k in range(count):
        bounded.append(not bool(near[labels == k].any()))
    band = level.corner_rel[~level.active]
    return OracleResult(
        count=int(count),
        bounded=int(sum(bounded)),
        touching=int(edge.sum()),
        min_band=float(band.min()) if band.size else dense_band,
        R=R,
        resolution=res,
        refinement=levels_used,
        component_bounded=bounded,
        capped=capped,
    )


def write_pgm(path, signs: np.ndarray) -> None:
    """Portable graymap of a 2-D sign grid, first axis horizontal, ``+`` white."""
    img = np.where(signs.T[::-1] > 0, 255, 0).astype(np.uint8)
    h, w = img.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{w} {h}\n255\n".encode())
        fh.write(img.tobytes())


# ------------------------------------------------------------- chambers


def worker_count() -> int:
    cap = os.environ.get("FEWNOMIAL_THREADS")
    n = os.cpu_count() or 1
    if cap:
        try:
            n = max(1, min(n, int(cap)))
        except ValueError:
            pass
    return n


def chamber_samples(cmap, extra: int = 3, seed: int = 0) -> dict[int, list[tuple[float, float]]]:
    """Representative plus ``extra`` deterministic interior points per chamber."""
    from shapely.geometry import Point
    from shapely.ops import polylabel

    x0, y0, x1, y1 = cmap.box
    diag = math.hypot(x1 - x0, y1 - y0)
    out = {}
    for c in cmap.faces:
        rng = np.random.default_rng([seed, c.id])
        poly = c.polygon
        rep = Point(c.representative)
        region = poly.buffer(-1e-3 * diag).intersection(rep.buffer(0.2 * diag))
        if region.is_empty:
            region = poly.buffer(-1e-6 * diag)
        if region.is_empty:
            region = poly
        rx0, ry0, rx1, ry1 = region.bounds
        pts = [c.representative]
        tries = 0
        while len(pts) < 1 + extra and tries < 2000:
            tries += 1
            p = (float(rng.uniform(rx0, rx1)), float(rng.uniform(ry0, ry1)))
            if region.contains(Point(p)):
                pts.append(p)
        while len(pts) < 1 + extra:  # fall back to points of a shrinking core
            q = polylabel(region, tolerance=1e-6 * diag)
            pts.append((q.x, q.y))
        out[c.id] = pts
    return out


def sample_chamber_counts(cmap, sys, spec: GridSpec = GridSpec(), extra: int = 3, seed: int = 0):
    """Oracle counts at each chamber's sample points: ``{chamber id: [counts]}``."""
    samples = chamber_samples(cmap, extra, seed)
    jobs = [(cid, p) for cid, pts in samples.items() for p in pts]

    def run(job):
        cid, p = job
        return count_components(ExpSum.canonical(sys, p[0], p[1]), spec).count

    workers = worker_count()
    if workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            counts = list(ex.map(run, jobs))
    else:
        counts = [run(j) for j in jobs]
    out: dict[int, list[int]] = {cid: [] for cid in samples}
    for (cid, _), k in zip(jobs, counts):
        out[cid].append(k)
    return out, samples
