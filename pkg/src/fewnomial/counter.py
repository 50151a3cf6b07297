"""Piece-count bounds per chamber and the full analysis pipeline."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any, Optional

from . import arrangement as arr
from . import contour as ct
from . import morse
from .config import RunConfig
from .gale import gale_dual, reduced_point
from .oracle import ExpSum, count_components, sample_chamber_counts
from .support import SignedSupport, face_circuit, instance_to_dict, normalize


class PipelineError(RuntimeError):
    def __init__(self, stage: str, cause: BaseException):
        super().__init__(f"[{stage}] {type(cause).__name__}: {cause}")
        self.stage = stage
        self.cause = cause


class BoundsError(RuntimeError):
    """Interval propagation reached contradictory constraints."""


def theorem_case(m: int, empty: bool = False) -> str:
    if empty:
        return "empty-contour"
    if m >= 6:
        return "m>=6"
    if m == 5:
        return "m=5"
    if m == 4:
        return "m=4"
    if m >= 2:
        return "m in {2,3}"
    return "m<=1"


def theorem_bound(m: int, domain_side: int = 0) -> int:
    """Certified bound on the number of pieces given ``m`` cusps with multiplicity."""
    if m < 0:
        raise ValueError("m must be non-negative")
    if m >= 5:
        return 2
    if m >= 2:
        return 3
    return 2


def m5_contradiction(m: int, domain_side: int) -> bool:
    """Five cusps are only possible on the negative side of the parameter line."""
    return m == 5 and domain_side > 0


def chamber_bounds(cmap: arr.ChamberMap, sigs, bound: int, fixed: Optional[dict] = None):
    """Propagate piece-count intervals over the chamber adjacency graph.

    Outer chambers start at ``[0, 2]``, inner ones at ``[0, bound]``. Across an
    edge whose segment is not transition relevant the counts agree; across a
    relevant edge they differ by at most one. ``fixed`` pins chambers to known
    counts. For ``m = 4`` the equality across non-relevant edges is what ties a
    depth-2 chamber to a depth-1 neighbour.
    """
    relevant = {s.segment: s.transition_relevant for s in sigs}
    iv = {}
    for c in cmap.faces:
        hi = 2 if not c.bounded else bound
        iv[c.id] = [0, min(hi, bound)]
    for cid, k in (fixed or {}).items():
        lo, hi = iv[cid]
        iv[cid] = [max(lo, k), min(hi, k)]
    sweeps = 0
    limit = 4 * max(1, len(cmap.faces)) + 4
    changed = True
    while changed:
        changed = False
        sweeps += 1
        if sweeps > limit:
            raise BoundsError("no fixpoint within the sweep limit")
        for a, b, sid in cmap.adjacency:
            slack = 1 if relevant.get(sid, True) else 0
            for u, v in ((a, b), (b, a)):
                lo = max(iv[u][0], iv[v][0] - slack, 0)
                hi = min(iv[u][1], iv[v][1] + slack, bound)
                if [lo, hi] != iv[u]:
                    iv[u] = [lo, hi]
                    changed = True
                if lo > hi:
                    raise BoundsError(f"empty interval for chamber {u}")
    return {cid: (lo, hi) for cid, (lo, hi) in iv.items()}


@dataclass
class AnalysisReport:
    data: dict
    flags: list[str] = field(default_factory=list)  # validation failures
    notes: list[str] = field(default_factory=list)  # informational diagnostics
    contour: Any = None
    chambers: Any = None

    @property
    def m(self) -> int:
        return self.data["m"]

    @property
    def certified_bound(self) -> int:
        return self.data["certified_bound"]

    def to_dict(self) -> dict:
        d = dict(self.data)
        d["flags"] = list(self.flags)
        d["notes"] = list(self.notes)
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, allow_nan=True) + "\n"


def run_stage(name, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except PipelineError:
        raise
    except Exception as exc:  # surfaced with the stage tag
        raise PipelineError(name, exc) from exc


def _pt(p):
    return [float(p[0]), float(p[1])]


def analyze(instance: SignedSupport, config: RunConfig = RunConfig()) -> AnalysisReport:
    flags: list[str] = []
    notes: list[str] = []
    sys = run_stage("normalize", normalize, instance)
    g = run_stage("gale", gale_dual, sys)
    dom = run_stage("domain", ct.parameter_domain, g, sys.signs)
    cusps = run_stage("cusps", ct.find_cusps, g, dom, config.cusp_residual, config.root_width)
    point = None
    if instance.coefficients is not None:
        point = run_stage("gale", reduced_point, g, sys.permute(instance.coefficients))
    extra = [point] if point is not None else []
    contour = run_stage("trace", ct.trace_contour, g, dom, cusps, config.trace, extra)
    notes += contour.flags
    cmap = run_stage("arrangement", arr.build_arrangement, contour, None, config.snap)
    flags += cmap.flags
    if dom.empty:
        mreport = morse.MorseReport([], [])
    else:
        mreport = run_stage("morse", morse.segment_signatures, sys, g, contour, config.eigen_zero)
    flags += mreport.flags
    notes += mreport.notes

    facet = face_circuit(instance)
    if facet is not None:
        notes.append(f"columns {list(facet)} lie on one facet: counts may change inside a chamber")
    m = contour.multiplicity
    side = dom.side()
    case = theorem_case(m, dom.empty)
    bound = theorem_bound(m, side)
    if m5_contradiction(m, side):
        flags.append("five cusps on the positive side of the parameter line")
    intervals = run_stage("bounds", chamber_bounds, cmap, mreport.segments, bound)
    for c in cmap.faces:
        c.piece_interval = intervals[c.id]
        c.certified_bound = intervals[c.id][1]

    located = None
    if point is not None:
        try:
            located = arr.locate(cmap, point)
        except ValueError:
            located = "outside"
            notes.append("coefficient point outside the box")

    oracle_data = None
    oracle_counts = None
    if config.oracle and sys.n <= 3:
        oracle_counts, samples = run_stage(
            "oracle", sample_chamber_counts, cmap, sys, config.grid, config.oracle_extra, config.seed
        )
        pinned = {cid: ks[0] for cid, ks in oracle_counts.items()}
        oracle_data = {"trust": "numeric"}
        if point is not None:
            res = run_stage("oracle", count_components, ExpSum.canonical(sys, *point), config.grid)
            oracle_data.update(
                {
                    "point_count": res.count,
                    "point_bounded": res.bounded,
                    "truncated_cells": res.touching,
                    "min_band": res.min_band,
                    "R": res.R,
                    "resolution": res.resolution,
                    "refinement": res.refinement,
                }
            )
            if res.count > bound:
                flags.append(f"oracle count {res.count} exceeds the certified bound {bound}")
            if isinstance(located, int):
                lo, hi = intervals[located]
                if not lo <= res.count <= hi:
                    (notes if facet is not None else flags).append(f"oracle count {res.count} outside chamber {located} interval")
        # a facet circuit adds a wall the contour lacks; chamber-wise checks become notes
        chamber_log = notes if facet is not None else flags
        for cid, ks in oracle_counts.items():
            if len(set(ks)) > 1:
                chamber_log.append(f"chamber {cid}: oracle counts {ks} not constant")
            lo, hi = intervals[cid]
            if not all(lo <= k <= hi for k in ks):
                chamber_log.append(f"chamber {cid}: oracle counts {ks} outside [{lo}, {hi}]")
        for a, b, _ in cmap.adjacency:
            if abs(pinned[a] - pinned[b]) > 1:
                chamber_log.append(f"chambers {a}, {b}: oracle counts differ by more than 1")
        try:
            numeric = chamber_bounds(cmap, mreport.segments, bound, pinned)
        except BoundsError as exc:
            numeric = None
            chamber_log.append(f"oracle counts inconsistent with the propagation rules: {exc}")

    chambers = []
    for c in cmap.faces:
        row = {
            "id": c.id,
            "depth": c.depth,
            "bounded": c.bounded,
            "representative": _pt(c.representative),
            "vertices": c.vertex_count,
            "piece_interval": list(c.piece_interval),
        }
        if oracle_counts is not None:
            row["oracle_counts"] = oracle_counts[c.id]
            if numeric is not None:
                row["numeric_interval"] = list(numeric[c.id])
        chambers.append(row)

    data = {
        "instance": instance_to_dict(instance),
        "config": config.to_dict(),
        "canonical": {
            "beta": [str(x) for x in sys.beta],
            "gamma": [str(x) for x in sys.gamma],
            "signs": list(sys.signs),
            "permutation": list(sys.permutation),
        },
        "gale": [[str(a), str(b)] for a, b in g.b],
        "face_circuit": list(facet) if facet is not None else None,
        "domain": [_end(dom.lo, -1), _end(dom.hi, 1)] if not dom.empty else None,
        "cusps": [
            {"mu": c.mu, "multiplicity": c.multiplicity, "point": _pt(c.point), "residual": c.residual}
            for c in contour.cusps
        ],
        "m": m,
        "theorem_case": case,
        "certified_bound": bound,
        "box": list(contour.box),
        "segments": [
            {
                "id": s.segment,
                "witness": s.witness,
                "n_pos": s.signature.n_pos,
                "n_neg": s.signature.n_neg,
                "scalar_sign": s.signature.scalar_sign,
                "matrix_index": s.matrix_index,
                "morse_index": s.morse_index,
                "index_set": sorted(s.index_set),
                "transition_relevant": s.transition_relevant,
            }
            for s in mreport.segments
        ],
        "cusp_crossings": [
            {"cusp": c.cusp, "changed": c.changed, "side_signs_ok": c.side_signs_ok, "ok": c.ok}
            for c in mreport.crossings
        ],
        "cusp_layout": mreport.cusp_layout,
        "adjacency": [list(e) for e in cmap.adjacency],
        "chambers": chambers,
        "euler": list(cmap.euler),
        "coefficient_point": _pt(point) if point is not None else None,
        "coefficient_chamber": located,
    }
    if oracle_data is not None:
        data["oracle"] = oracle_data
    report = AnalysisReport(data, flags, notes, contour, cmap)
    report.morse = mreport
    report.system = sys
    report.gale = g
    return report


def _end(x, side):
    if x is None:
        return "-inf" if side < 0 else "inf"
    return str(x)
