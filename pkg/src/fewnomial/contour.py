"""Signed reduced discriminant contour of a near-circuit.

The contour is the image of the admissible parameter interval under the
Horn-Kapranov map ``mu -> B^T Log|B (mu, 1)^T|``. Cusps are the real roots of
the numerator of ``dc2/dlambda1`` inside the interval; they split the curve
into smooth segments, each traced as an adaptive polyline.

Internally each interval is charted by ``lambda(t) = t * d_lo + d_hi`` with
``u = log t``, where ``d_lo``/``d_hi`` are the directions at the interval ends.
Every row ``b_i . lambda(t) = P_i t + Q_i`` then has ``P_i``, ``Q_i`` of one
sign, so ``log|b_i . lambda|`` is a stable ``logaddexp`` even extremely close
to the poles where the contour escapes to infinity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple, Optional, Sequence

import numpy as np

from . import polynomial as P
from .exact import sign
from .gale import GaleDual

CUSP_RESIDUAL_TOL = 1e-7
ROOT_WIDTH = Fraction(1, 10**12)
_MIN_WIDTH = Fraction(1, 10**40)
_U_LIMIT = 700.0


class ConvergenceError(RuntimeError):
    def __init__(self, message, bracket=None):
        super().__init__(message)
        self.bracket = bracket


class BoxError(ValueError):
    """The requested bounding box does not contain every cusp image."""


@dataclass(frozen=True)
class ParameterInterval:
    """Open interval of admissible ``mu``; ``None`` endpoints are infinite."""

    lo: Optional[Fraction]
    hi: Optional[Fraction]
    empty: bool = False

    @classmethod
    def empty_interval(cls) -> "ParameterInterval":
        return cls(None, None, True)

    @property
    def lo_f(self) -> float:
        return -math.inf if self.lo is None else float(self.lo)

    @property
    def hi_f(self) -> float:
        return math.inf if self.hi is None else float(self.hi)

    def contains(self, mu) -> bool:
        if self.empty:
            return False
        return (self.lo is None or mu > self.lo) and (self.hi is None or mu < self.hi)

    def side(self) -> int:
        """+1 if the interval lies in mu > 0, -1 if in mu < 0, 0 otherwise."""
        if self.empty:
            return 0
        if self.lo is not None and self.lo >= 0:
            return 1
        if self.hi is not None and self.hi <= 0:
            return -1
        return 0

    def __str__(self):
        if self.empty:
            return "empty"
        return f"({self.lo_f!r}, {self.hi_f!r})"


class HKPoint(NamedTuple):
    point: tuple[float, float]
    dc1: float
    dc2: float


@dataclass(frozen=True)
class Cusp:
    mu: float
    multiplicity: int
    point: tuple[float, float]
    residual: float
    dc1: float
    dc2: float
    bracket: tuple[Fraction, Fraction]


@dataclass
class Segment:
    id: int
    mu_lo: float
    mu_hi: float
    mu: np.ndarray
    points: np.ndarray  # (k, 2)
    dc1: np.ndarray
    dc2: np.ndarray
    start_kind: str  # "cusp" | "box" | "limit"
    end_kind: str


@dataclass
class Contour:
    domain: ParameterInterval
    cusps: list[Cusp]
    segments: list[Segment]
    box: tuple[float, float, float, float]  # xmin, ymin, xmax, ymax
    flags: list[str] = field(default_factory=list)

    @property
    def multiplicity(self) -> int:
        return sum(c.multiplicity for c in self.cusps)

    @property
    def diagonal(self) -> float:
        x0, y0, x1, y1 = self.box
        return math.hypot(x1 - x0, y1 - y0)

    def is_empty(self) -> bool:
        return not self.segments


@dataclass(frozen=True)
class TraceOptions:
    max_turn: float = 6.0  # degrees between consecutive chords
    max_chord: float = 0.01  # fraction of the box diagonal
    box: Optional[tuple[float, float, float, float]] = None
    box_factor: float = 3.0
    box_margin: float = 5.0
    cusp_gap: float = 1e-6  # stop this close (fraction of diagonal) to a cusp, then join it


# ------------------------------------------------------------ domain


def breakpoints(g: GaleDual) -> list[Fraction]:
    return sorted({-b2 / b1 for b1, b2 in g.b if b1 != 0})


def parameter_domain(g: GaleDual, eps: Sequence[int]) -> ParameterInterval:
    """Interval of ``mu`` with ``sign(B (mu,1)^T) = +-eps``; possibly empty."""
    eps = tuple(eps)
    neg = tuple(-e for e in eps)
    bps = breakpoints(g)
    ends = [None] + bps + [None]
    for lo, hi in zip(ends, ends[1:]):
        if lo is None and hi is None:
            probe = Fraction(0)
        elif lo is None:
            probe = hi - 1
        elif hi is None:
            probe = lo + 1
        else:
            probe = (lo + hi) / 2
        pattern = tuple(sign(b1 * probe + b2) for b1, b2 in g.b)
        if pattern == eps or pattern == neg:
            return ParameterInterval(lo, hi)
    return ParameterInterval.empty_interval()


# ------------------------------------------------------ point evaluation


def hk_point(g: GaleDual, mu) -> HKPoint:
    """Point of the contour at ``lambda = (mu, 1)`` and the partials in ``lambda_1``."""
    vals = [b1 * mu + b2 for b1, b2 in g.b]
    if any(v == 0 for v in vals):
        raise ValueError(f"mu={mu} lies on a breakpoint of the Gale dual")
    if isinstance(mu, Fraction):
        logs = [math.log(abs(v.numerator)) - math.log(v.denominator) for v in vals]
        dc1 = float(sum((b1 * b1 / v for (b1, _), v in zip(g.b, vals)), Fraction(0)))
        dc2 = float(sum((b1 * b2 / v for (b1, b2), v in zip(g.b, vals)), Fraction(0)))
    else:
        bf = g.as_float()
        vf = bf[:, 0] * float(mu) + bf[:, 1]
        logs = list(np.log(np.abs(vf)))
        dc1 = math.fsum(bf[:, 0] ** 2 / vf)
        dc2 = math.fsum(bf[:, 0] * bf[:, 1] / vf)
    y1 = math.fsum(float(b1) * L for (b1, _), L in zip(g.b, logs))
    y2 = math.fsum(float(b2) * L for (_, b2), L in zip(g.b, logs))
    return HKPoint((y1, y2), dc1, dc2)


def exact_partials(g: GaleDual, mu: Fraction) -> tuple[Fraction, Fraction]:
    vals = [b1 * mu + b2 for b1, b2 in g.b]
    dc1 = sum((b1 * b1 / v for (b1, _), v in zip(g.b, vals)), Fraction(0))
    dc2 = sum((b1 * b2 / v for (b1, b2), v in zip(g.b, vals)), Fraction(0))
    return dc1, dc2


class Chart:
    """Stable evaluation of the contour on an interval, parametrised by ``u``.

    ``u -> +inf`` approaches the low end of the interval, ``u -> -inf`` the high end.
    """

    def __init__(self, g: GaleDual, dom: ParameterInterval):
        if dom.empty:
            raise ValueError("empty parameter interval")
        self.g = g
        self.dom = dom
        one, zero = Fraction(1), Fraction(0)
        self.d_lo = (-one, zero) if dom.lo is None else (dom.lo, one)
        self.d_hi = (one, zero) if dom.hi is None else (dom.hi, one)
        self.P = [b1 * self.d_lo[0] + b2 * self.d_lo[1] for b1, b2 in g.b]
        self.Q = [b1 * self.d_hi[0] + b2 * self.d_hi[1] for b1, b2 in g.b]
        for p, q in zip(self.P, self.Q):
            if p * q < 0 or (p == 0 and q == 0):
                raise ValueError("interval is not a single admissible arc")
        self.b = g.as_float()
        self.logP = np.array([math.log(abs(float(p))) if p else -np.inf for p in self.P])
        self.logQ = np.array([math.log(abs(float(q))) if q else -np.inf for q in self.Q])
        self.sP = np.array([float(sign(p)) for p in self.P])
        self.sQ = np.array([float(sign(q)) for q in self.Q])
        self.Pf = np.array([float(p) for p in self.P])
        self.Qf = np.array([float(q) for q in self.Q])

    def u_of_mu(self, mu: Fraction) -> float:
        """Inverse of the chart: ``t`` with ``lambda(t)`` parallel to ``(mu, 1)``."""
        mu = Fraction(mu)
        t = (mu * self.d_hi[1] - self.d_hi[0]) / (self.d_lo[0] - mu * self.d_lo[1])
        return math.log(t.numerator) - math.log(t.denominator)

    def evaluate(self, u) -> dict:
        u = np.atleast_1d(np.asarray(u, dtype=float))
        uu = u[:, None]
        # log|P t + Q| with P, Q of one sign
        logL = np.logaddexp(self.logP[None, :] + uu, self.logQ[None, :])
        pts = logL @ self.b  # (k, 2)
        # scaled quantities: divide lambda and L by s = max(t, 1)
        a = np.exp(np.minimum(u, 0.0))[:, None]  # t / s
        c = np.exp(-np.maximum(u, 0.0))[:, None]  # 1 / s
        L = self.Pf[None, :] * a + self.Qf[None, :] * c
        lam1 = (float(self.d_lo[0]) * a + float(self.d_hi[0]) * c)[:, 0]
        lam2 = (float(self.d_lo[1]) * a + float(self.d_hi[1]) * c)[:, 0]
        b1 = self.b[:, 0]
        b2 = self.b[:, 1]
        with np.errstate(divide="ignore", invalid="ignore"):
            dc1 = lam2 * np.sum(b1 * b1 / L, axis=1)
            dc2 = lam2 * np.sum(b1 * b2 / L, axis=1)
            mu = lam1 / lam2
        norm = np.hypot(lam1, lam2)
        tangent = np.stack([lam2 / norm, -lam1 / norm], axis=1)
        return {"u": u, "mu": mu, "points": pts, "dc1": dc1, "dc2": dc2, "tangent": tangent}


# ---------------------------------------------------------------- cusps


def cusp_numerator(g: GaleDual) -> P.Poly:
    """Numerator of ``dc2/dlambda1`` at ``lambda_2 = 1`` with all denominators cleared.

    Rows sharing a pole are merged first, so the result never vanishes at a pole.
    """
    weights: dict[Fraction, Fraction] = {}
    for b1, b2 in g.b:
        if b1 != 0 and b2 != 0:
            p = -b2 / b1
            weights[p] = weights.get(p, Fraction(0)) + b2
    poles = sorted(p for p, w in weights.items() if w != 0)
    num: P.Poly = []
    for p in poles:
        term = [weights[p]]
        for q in poles:
            if q != p:
                term = P.mul(term, [-q, Fraction(1)])
        num = P.add(num, term)
    return P.trim(num)


def find_cusps(
    g: GaleDual, dom: ParameterInterval, tol: float = CUSP_RESIDUAL_TOL, width=ROOT_WIDTH
) -> list[Cusp]:
    if dom.empty:
        return []
    num = cusp_numerator(g)
    if len(num) <= 1:
        return []
    out = []
    for factor, mult in P.squarefree_decomposition(num):
        for a, b in P.isolate_real_roots(factor, dom.lo, dom.hi):
            width = Fraction(width)
            while True:
                lo, hi = P.refine_root(factor, a, b, width)
                mu = (lo + hi) / 2
                d1, d2 = exact_partials(g, mu)
                r1, r2 = abs(float(d1)), abs(float(d2))
                if max(r1, r2) <= tol:
                    break
                if width <= _MIN_WIDTH or lo == hi:
                    raise ConvergenceError(
                        f"cusp residual {max(r1, r2):.3e} above {tol}", bracket=(lo, hi)
                    )
                a, b = lo, hi
                width /= 10**4
            hk = hk_point(g, float(mu))
            out.append(Cusp(float(mu), mult, hk.point, r1 + r2, float(d1), float(d2), (lo, hi)))
    out.sort(key=lambda c: c.mu)
    return out


# -------------------------------------------------------------- tracing


def _asymptote_seeds(chart: Chart) -> list[np.ndarray]:
    """Corner of the two tail asymptotes (or finite tail limits) in the reduced plane."""
    b = chart.b
    lp = np.where(np.isfinite(chart.logP), chart.logP, 0.0)
    lq = np.where(np.isfinite(chart.logQ), chart.logQ, 0.0)
    pz = np.array([p == 0 for p in chart.P])
    qz = np.array([q == 0 for q in chart.Q])
    # u -> +inf
    w_plus = b[~pz].sum(axis=0)
    o_plus = (b[~pz] * lp[~pz, None]).sum(axis=0) + (b[pz] * lq[pz, None]).sum(axis=0)
    # u -> -inf
    w_minus = b[qz].sum(axis=0)
    o_minus = (b[~qz] * lq[~qz, None]).sum(axis=0) + (b[qz] * lp[qz, None]).sum(axis=0)
    seeds = []
    if np.allclose(w_plus, 0):
        seeds.append(o_plus)
    if np.allclose(w_minus, 0):
        seeds.append(o_minus)
    if not seeds:
        m = np.column_stack([w_plus, -w_minus])
        if abs(np.linalg.det(m)) > 1e-12:
            s = np.linalg.solve(m, o_minus - o_plus)
            seeds.append(o_plus + s[0] * w_plus)
    return seeds


def _inflate(pts: np.ndarray, factor: float, margin: float):
    lo = pts.min(axis=0)
    hi = pts.max(axis=0)
    c = (lo + hi) / 2
    h = (hi - lo) / 2 * factor + margin
    return (float(c[0] - h[0]), float(c[1] - h[1]), float(c[0] + h[0]), float(c[1] + h[1]))


def _inside(pts: np.ndarray, box) -> np.ndarray:
    x0, y0, x1, y1 = box
    return (pts[:, 0] >= x0) & (pts[:, 0] <= x1) & (pts[:, 1] >= y0) & (pts[:, 1] <= y1)


def _clamp(p: np.ndarray, box) -> np.ndarray:
    x0, y0, x1, y1 = box
    return np.array([min(max(p[0], x0), x1), min(max(p[1], y0), y1)])


class _Tracer:
    def __init__(self, chart: Chart, box, opts: TraceOptions, tangent_sign):
        self.chart = chart
        self.box = box
        self.opts = opts
        x0, y0, x1, y1 = box
        self.diag = math.hypot(x1 - x0, y1 - y0)
        self.max_chord = opts.max_chord * self.diag
        self.half_turn = math.radians(opts.max_turn) / 2
        self.tsign = tangent_sign

    def _eval(self, us):
        return self.chart.evaluate(np.asarray(us, dtype=float))

    def _outward(self, u0: float, direction: float):
        """March from ``u0`` towards ``u = direction * inf`` until the curve leaves the box for good."""
        steps = [u0 + direction * 0.25 * 2.0**k for k in range(0, 14)]
        us = [u for u in steps if abs(u) <= _U_LIMIT] or [direction * _U_LIMIT]
        ev = self._eval(us)
        pts = ev["points"]
        inside = _inside(pts, self.box)
        x0, y0, x1, y1 = self.box
        far = (
            np.maximum.reduce([x0 - pts[:, 0], pts[:, 0] - x1, y0 - pts[:, 1], pts[:, 1] - y1])
            > 0.5 * self.diag
        )
        if not far[-1]:
            return us, "limit", None
        last_in = np.nonzero(inside)[0]
        if len(last_in) == 0:
            ua = u0
            pa_inside = bool(_inside(self._eval([u0])["points"], self.box)[0])
            if not pa_inside:
                return [], "box", None
        else:
            ua = us[last_in[-1]]
        ub = us[last_in[-1] + 1] if len(last_in) else us[0]
        for _ in range(200):
            um = 0.5 * (ua + ub)
            if um in (ua, ub):
                break
            if _inside(self._eval([um])["points"], self.box)[0]:
                ua = um
            else:
                ub = um
            if abs(ub - ua) < 1e-13 * (1 + abs(ua)):
                break
        kept = [u for u in us if (u - ub) * direction < 0]
        return kept, "box", ub

    def _approach(self, u_end: float, u_from: float, cusp_point) -> list[float]:
        us = []
        gap = self.opts.cusp_gap * self.diag
        h = u_from - u_end
        for j in range(1, 80):
            u = u_end + h * 2.0**-j
            if u == u_end:
                break
            p = self._eval([u])["points"][0]
            if math.hypot(p[0] - cusp_point[0], p[1] - cusp_point[1]) < gap:
                break
            us.append(u)
        return us

    def trace(self, u_start: float, u_end: float, cusp_start, cusp_end):
        """Trace between ``u_start`` (low mu side) and ``u_end``; ``u`` decreases along the way."""
        kinds = ["cusp", "cusp"]
        us: list[float] = []
        clip = [None, None]
        if math.isfinite(u_start) and math.isfinite(u_end):
            mid = 0.5 * (u_start + u_end)
            us = list(np.linspace(u_start, u_end, 11)[1:-1])
        elif math.isfinite(u_start):
            mid = u_start - 1.0
        elif math.isfinite(u_end):
            mid = u_end + 1.0
        else:
            mid = 0.0
        us.append(mid)
        if math.isfinite(u_start):
            us += self._approach(u_start, mid, cusp_start.point)
        else:
            extra, kinds[0], clip[0] = self._outward(mid, +1.0)
            us += extra
        if math.isfinite(u_end):
            us += self._approach(u_end, mid, cusp_end.point)
        else:
            extra, kinds[1], clip[1] = self._outward(mid, -1.0)
            us += extra
        us = sorted(set(us), reverse=True)
        ev = self._eval(us)
        samples = {k: list(v) for k, v in ev.items()}

        samples = self._refine(samples, u_start, u_end, clip)
        samples = self._dedupe(samples)
        n = len(samples["u"])
        mu = np.array(samples["mu"])
        pts = np.array(samples["points"]).reshape(n, 2)
        dc1 = np.array(samples["dc1"])
        dc2 = np.array(samples["dc2"])
        if kinds[0] == "box" and n:
            pts[0] = _clamp(pts[0], self.box)
        if kinds[1] == "box" and n:
            pts[-1] = _clamp(pts[-1], self.box)
        if cusp_start is not None:
            mu = np.concatenate([[cusp_start.mu], mu])
            pts = np.vstack([np.array(cusp_start.point)[None, :], pts])
            dc1 = np.concatenate([[cusp_start.dc1], dc1])
            dc2 = np.concatenate([[cusp_start.dc2], dc2])
        if cusp_end is not None:
            mu = np.concatenate([mu, [cusp_end.mu]])
            pts = np.vstack([pts, np.array(cusp_end.point)[None, :]])
            dc1 = np.concatenate([dc1, [cusp_end.dc1]])
            dc2 = np.concatenate([dc2, [cusp_end.dc2]])
        return mu, pts, dc1, dc2, kinds

    def _dedupe(self, s):
        """Drop samples within rounding of the previous one (converging finite tails)."""
        pts = np.asarray(s["points"]).reshape(len(s["u"]), 2)
        if len(pts) < 2:
            return s
        eps = 1e-12 * self.diag
        keep = [0]
        for i in range(1, len(pts)):
            if math.hypot(*(pts[i] - pts[keep[-1]])) > eps:
                keep.append(i)
        if keep[-1] != len(pts) - 1:  # the last sample is an endpoint: keep it instead
            keep[-1 if len(keep) > 1 else len(keep):] = [len(pts) - 1]
        return {k: [s[k][i] for i in keep] for k in s}

    def _refine(self, s, u_start, u_end, clip):
        """Bisect in ``u`` until chords are short and tangents turn little per chord."""
        # box-clip samples and cusp endpoints take part in refinement as fixed anchors
        anchors = []
        for u_c, u_lim in ((clip[0], u_start), (clip[1], u_end)):
            if u_c is not None:
                anchors.append(u_c)
            elif math.isfinite(u_lim):
                anchors.append(u_lim)
        if anchors:
            ev = self._eval(anchors)
            for k in s:
                s[k] = list(s[k]) + list(ev[k])
        order = np.argsort(-np.asarray(s["u"]), kind="stable")
        for k in s:
            s[k] = [s[k][i] for i in order]
        # cusp anchors: tangent direction from the chart is exact there; points are exact too
        for _ in range(60):
            u = np.asarray(s["u"])
            pts = np.asarray(s["points"]).reshape(len(u), 2)
            tan = np.asarray(s["tangent"]).reshape(len(u), 2)
            if len(u) < 2:
                break
            chord = np.hypot(*(pts[1:] - pts[:-1]).T)
            cosang = np.clip(np.sum(tan[1:] * tan[:-1], axis=1), -1.0, 1.0)
            turn = np.arccos(np.abs(cosang))
            du = np.abs(u[1:] - u[:-1])
            bad = ((chord > self.max_chord) | (turn > self.half_turn)) & (
                du > 1e-12 * (1.0 + np.abs(u[1:]))
            )
            if not bad.any():
                break
            idx = np.nonzero(bad)[0]
            new_u = 0.5 * (u[idx] + u[idx + 1])
            ev = self._eval(new_u)
            merged = {k: list(s[k]) for k in s}
            for k in s:
                merged[k] += list(ev[k])
            order = np.argsort(-np.asarray(merged["u"]), kind="stable")
            s = {k: [merged[k][i] for i in order] for k in merged}
        # drop anchors that duplicate cusp endpoints (they are re-added exactly by the caller)
        keep = [
            i
            for i, uu in enumerate(s["u"])
            if not (math.isfinite(u_start) and uu == u_start)
            and not (math.isfinite(u_end) and uu == u_end)
        ]
        return {k: [s[k][i] for i in keep] for k in s}


def _default_box(chart, cusps, extra_points, opts) -> tuple:
    seeds = [np.array(c.point) for c in cusps]
    seeds += [np.asarray(p, dtype=float) for p in extra_points]
    seeds += _asymptote_seeds(chart)
    if not seeds:
        seeds.append(chart.evaluate([0.0])["points"][0])
    pts = np.array(seeds)
    return pts, _inflate(pts, opts.box_factor, opts.box_margin)


def trace_contour(
    g: GaleDual,
    dom: ParameterInterval,
    cusps: Sequence[Cusp],
    opts: TraceOptions = TraceOptions(),
    extra_points: Sequence = (),
) -> Contour:
    """Adaptive polyline trace of every smooth segment of the contour.

    With ``opts.box`` unset the box is the bounding box of the cusp images, the
    ``extra_points`` (reduced coefficient points) and every crossing between
    segments, inflated by ``box_factor`` about its centre plus ``box_margin``.
    """
    if dom.empty:
        box = opts.box
        if box is None:
            pts = np.array([np.asarray(p, dtype=float) for p in extra_points] or [[0.0, 0.0]])
            box = _inflate(pts, opts.box_factor, opts.box_margin)
        return Contour(dom, [], [], tuple(box))
    chart = Chart(g, dom)
    if opts.box is not None:
        box = tuple(float(x) for x in opts.box)
        if cusps:
            inside = _inside(np.array([c.point for c in cusps]), box)
            if not inside.all():
                raise BoxError(f"box {box} does not contain all cusp images")
        return _trace_in_box(chart, dom, cusps, box, opts)
    seeds, box = _default_box(chart, cusps, extra_points, opts)
    # preliminary trace in a larger box to catch segment crossings far out
    pre_box = _inflate(np.array([box[:2], box[2:]]), 4.0, 0.0)
    pre = _trace_in_box(chart, dom, cusps, pre_box, opts)
    crossings = all_crossings(pre)
    if crossings:
        pts = np.vstack([seeds, np.array([c[2] for c in crossings])])
        box = _inflate(pts, opts.box_factor, opts.box_margin)
    return _trace_in_box(chart, dom, cusps, box, opts)


def _trace_in_box(chart: Chart, dom, cusps, box, opts) -> Contour:
    # distinct cusp locations (multiple roots are single points)
    ordered = sorted(cusps, key=lambda c: c.mu)
    cusp_u = [chart.u_of_mu((c.bracket[0] + c.bracket[1]) / 2) for c in ordered]
    # u decreases as mu increases; low-mu end of the interval is u = +inf
    bounds_u = [math.inf] + cusp_u + [-math.inf]
    bounds_c = [None] + list(ordered) + [None]
    bounds_mu = [dom.lo_f] + [c.mu for c in ordered] + [dom.hi_f]
    segments = []
    flags = []
    for k in range(len(bounds_u) - 1):
        # witness tangent sign: sign of dc1 / lam2 is constant on the segment
        tracer = _Tracer(chart, box, opts, None)
        mu, pts, dc1, dc2, kinds = tracer.trace(
            bounds_u[k], bounds_u[k + 1], bounds_c[k], bounds_c[k + 1]
        )
        seg = Segment(k, bounds_mu[k], bounds_mu[k + 1], mu, pts, dc1, dc2, kinds[0], kinds[1])
        if "limit" in kinds:
            flags.append(f"segment {k} ends inside the box (finite tail limit)")
        segments.append(seg)
    return Contour(dom, list(ordered), segments, tuple(box), flags)


# ------------------------------------------------------------ geometry


def polyline_crossings(a: np.ndarray, b: np.ndarray, ignore=(), tol: float = 1e-9) -> list:
    """Transversal intersection points of two polylines, skipping points near ``ignore``."""
    from shapely.geometry import LineString

    if len(a) < 2 or len(b) < 2:
        return []
    inter = LineString(a).intersection(LineString(b))
    pts = []
    for geom in getattr(inter, "geoms", [inter]):
        if geom.is_empty:
            continue
        if geom.geom_type == "Point":
            pts.append((geom.x, geom.y))
        else:  # overlapping pieces: report their first point
            x, y = geom.coords[0]
            pts.append((x, y))
    out = []
    for p in pts:
        if any(math.hypot(p[0] - q[0], p[1] - q[1]) <= tol for q in ignore):
            continue
        if any(math.hypot(p[0] - q[0], p[1] - q[1]) <= tol for q in out):
            continue
        out.append(p)
    return out


def all_crossings(contour: Contour) -> list[tuple[int, int, tuple[float, float]]]:
    segs = contour.segments
    tol = 1e-9 * max(contour.diagonal, 1.0)
    cusp_pts = [c.point for c in contour.cusps]
    out = []
    for i in range(len(segs)):
        for j in range(i + 1, len(segs)):
            for p in polyline_crossings(segs[i].points, segs[j].points, cusp_pts, tol):
                out.append((i, j, p))
    return out


def max_turn_degrees(points: np.ndarray) -> float:
    """Largest turning angle between consecutive non-degenerate chords of a polyline."""
    d = np.diff(points, axis=0)
    lengths = np.hypot(d[:, 0], d[:, 1])
    d = d[lengths > 0]
    if len(d) < 2:
        return 0.0
    d = d / np.hypot(d[:, 0], d[:, 1])[:, None]
    cosang = np.clip(np.sum(d[1:] * d[:-1], axis=1), -1.0, 1.0)
    return float(np.degrees(np.arccos(cosang)).max())


# -------------------------------------------------------------- export


def contour_csv(contour: Contour) -> str:
    lines = ["mu,y1,y2,dc1,dc2,segment_id"]
    for seg in contour.segments:
        for mu, p, d1, d2 in zip(seg.mu.tolist(), seg.points.tolist(), seg.dc1.tolist(), seg.dc2.tolist()):
            lines.append(f"{mu!r},{p[0]!r},{p[1]!r},{d1!r},{d2!r},{seg.id}")
    return "\n".join(lines) + "\n"


def contour_svg(contour: Contour, size: int = 600) -> str:
    x0, y0, x1, y1 = contour.box
    w, h = x1 - x0, y1 - y0
    scale = size / max(w, h)

    def tr(p):
        return f"{(p[0] - x0) * scale:.3f},{(y1 - p[1]) * scale:.3f}"

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{w * scale:.0f}" height="{h * scale:.0f}">',
        f'<rect x="0" y="0" width="{w * scale:.3f}" height="{h * scale:.3f}" fill="white" stroke="black"/>',
    ]
    for seg in contour.segments:
        pts = " ".join(tr(p) for p in seg.points)
        out.append(f'<polyline class="segment" data-id="{seg.id}" points="{pts}" fill="none" stroke="black"/>')
    for c in contour.cusps:
        cx, cy = tr(c.point).split(",")
        out.append(f'<circle class="cusp" cx="{cx}" cy="{cy}" r="3" fill="red"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
