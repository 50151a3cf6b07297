"""Invariant suites over seeded random instances, driven by ``fewnomial verify``."""

from __future__ import annotations

import itertools
import math
from collections import OrderedDict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

import numpy as np

from . import arrangement as arr
from . import contour as ct
from . import exact
from . import morse
from .config import RunConfig
from .counter import analyze, theorem_bound
from .gale import canonical_coefficients, gale_dual, lifted_product, reduced_point
from .oracle import ExpSum, GridSpec, count_components
from .randinst import random_instance
from .support import canonical_support, check_nondegenerate, normalize


class Skip(Exception):
    """The check does not apply to this instance."""


@dataclass
class Tally:
    passed: int = 0
    failed: int = 0
    skipped: int = 0
    failures: list[str] = field(default_factory=list)


@dataclass
class Case:
    index: int
    rng: np.random.Generator
    inst: object
    sys: object = None
    g: object = None
    report: object = None
    oracle_rank: int = 0  # number of earlier instances with n <= 2


# --------------------------------------------------------------- support


def _transform_reproduces(c: Case):
    expected = c.sys.columns()
    cols = c.inst.columns
    assert all(c.sys.apply(cols[p]) == expected[k] for k, p in enumerate(c.sys.permutation))


def _det_positive(c: Case):
    assert exact.det(c.sys.matrix) > 0


def _parallel_rows(g) -> bool:
    return any(a1 * b2 == a2 * b1 for (a1, a2), (b1, b2) in itertools.combinations(g.b, 2))


def _idempotent(c: Case):
    if _parallel_rows(c.g):
        raise Skip  # tied arc boundaries: the last two columns are a choice
    again = normalize(canonical_support(c.sys))
    assert {again.beta, again.gamma} == {c.sys.beta, c.sys.gamma}


def _nondegenerate_bruteforce(c: Case):
    lifted = c.inst.lifted()
    n = c.inst.n
    brute = any(
        exact.det([[row[j] for j in cols] for row in lifted]) != 0
        for cols in itertools.combinations(range(n + 3), n + 1)
    )
    assert brute == check_nondegenerate(c.inst).nondegenerate


# ------------------------------------------------------------------ gale


def _kernel(c: Case):
    assert all(x == 0 for row in lifted_product(c.sys.lifted(), c.g) for x in row)


def _column_sums(c: Case):
    assert c.g.column_sums() == (0, 0)


def _rescale(c: Case):
    coeffs = c.sys.permute(c.inst.coefficients)
    p = reduced_point(c.g, coeffs)
    k = Fraction(int(c.rng.integers(1, 1000)), int(c.rng.integers(1, 1000)))
    q = reduced_point(c.g, [k * x for x in coeffs])
    assert abs(p[0] - q[0]) <= 1e-12 and abs(p[1] - q[1]) <= 1e-12


def _roundtrip(c: Case):
    pt = c.rng.uniform(-10, 10, size=2)
    q = reduced_point(c.g, canonical_coefficients(c.sys, pt))
    assert abs(q[0] - pt[0]) <= 1e-10 and abs(q[1] - pt[1]) <= 1e-10


# --------------------------------------------------------------- contour


def _need_contour(c: Case):
    if c.report.contour.is_empty():
        raise Skip


def _normal_identity(c: Case):
    _need_contour(c)
    for s in c.report.contour.segments:
        lhs = np.abs(s.mu * s.dc1 + s.dc2)
        assert np.all(lhs <= 1e-8 * (np.abs(s.mu * s.dc1) + np.abs(s.dc2) + 1)), s.id


def _cusp_partials(c: Case):
    cusps = c.report.contour.cusps
    if not cusps:
        raise Skip
    tol = RunConfig().cusp_residual
    assert all(abs(k.dc1) <= tol and abs(k.dc2) <= tol for k in cusps)


def _multiplicity(c: Case):
    assert c.report.contour.multiplicity <= c.sys.n


def _pairwise(c: Case):
    _need_contour(c)
    pairs = [(i, j) for i, j, _ in ct.all_crossings(c.report.contour)]
    assert all(pairs.count(p) <= 1 for p in set(pairs)), pairs


def _dc2_sign(c: Case):
    _need_contour(c)
    for s in c.report.contour.segments:
        d = s.dc2[np.abs(s.dc2) > 1e-9 * max(float(np.max(np.abs(s.dc2))), 1e-300)]
        assert np.all(d > 0) or np.all(d < 0), s.id


# ----------------------------------------------------------- arrangement


def _euler(c: Case):
    assert c.report.chambers.euler_ok, c.report.chambers.euler


def _depth(c: Case):
    cmap = c.report.chambers
    assert all(0 <= f.depth <= cmap.m // 2 for f in cmap.faces)


def _one_cusp(c: Case):
    if c.report.m > 1:
        raise Skip
    assert len(c.report.chambers.faces) <= 2


def _locate_stable(c: Case):
    cmap = c.report.chambers
    x0, y0, x1, y1 = cmap.box
    diag = math.hypot(x1 - x0, y1 - y0)
    for _ in range(4):
        p = (c.rng.uniform(x0, x1), c.rng.uniform(y0, y1))
        k = arr.locate(cmap, p)
        if k == arr.BOUNDARY:
            continue
        d = c.rng.normal(size=2)
        d *= 1e-12 * diag / np.linalg.norm(d)
        assert arr.locate(cmap, (p[0] + d[0], p[1] + d[1])) == k


# ----------------------------------------------------------------- morse


def _charpoly(c: Case):
    mu = Fraction(int(c.rng.integers(-50, 51)), int(c.rng.integers(1, 8)))
    if mu == 0:
        mu = Fraction(1, 3)
    ref = morse.char_poly_direct(morse.hessian_exact(c.sys, mu))
    got = morse.char_poly(c.sys, mu)
    assert len(ref) == len(got)
    for a, b in zip(got, ref):
        assert abs(float(a) - float(b)) <= 1e-8 * max(abs(float(b)), 1.0)


def _witness_constant(c: Case):
    _need_contour(c)
    assert all(s.constant and s.signature.n_zero == 0 for s in c.report.morse.segments)


def _cusp_crossings(c: Case):
    if not c.report.morse.crossings:
        raise Skip
    for x in c.report.morse.crossings:
        assert x.ok, (x.cusp, x.left, x.right, x.dp_zero, x.dp_scale)
        if x.multiplicity == 1:
            assert x.left.n_zero == 0 and x.right.n_zero == 0


def _layout(c: Case):
    layout = c.report.morse.cusp_layout
    if layout == "skipped":
        raise Skip
    assert layout == "ok"


def _finite_differences(c: Case):
    dom = c.report.contour.domain
    if dom.empty:
        raise Skip
    mu = float(c.report.morse.segments[0].witness) if c.report.morse.segments else None
    if mu is None:
        raise Skip
    cd = morse.critical_point(c.sys, c.g, mu)
    c1, c2 = ct.hk_point(c.g, mu).point
    f = morse.reduced_sum(c.sys, c1, c2)
    terms, _ = morse._terms(c.sys, cd.x_star, c1, c2)
    scale = float(np.sum(np.abs(terms)))
    n = c.sys.n
    b = np.array([float(v) for v in c.sys.beta])
    g = np.array([float(v) for v in c.sys.gamma])
    hf = np.diag(terms[1 : n + 1]) + terms[n + 1] * np.outer(b, b) + terms[n + 2] * np.outer(g, g)
    big = max(1.0, float(np.max(np.abs(np.concatenate([b, g])))))
    h = 1e-5 / big
    eye = np.eye(n) * h
    x = cd.x_star

    def grad_at(y):
        return morse._terms(c.sys, y, c1, c2)[1]

    grad = np.array([(f(x + eye[i]) - f(x - eye[i])) / (2 * h) for i in range(n)])
    fd = np.array([(grad_at(x + eye[i]) - grad_at(x - eye[i])) / (2 * h) for i in range(n)])
    assert np.max(np.abs(grad)) <= 1e-5 * scale
    assert np.max(np.abs(fd - hf)) <= 1e-5 * scale
    # the matrix signature predicts the Morse index of f at x*
    seg = c.report.morse.segments[0]
    neg = int(np.sum(np.linalg.eigvalsh(hf) < 0))
    assert neg == seg.morse_index, (neg, seg.morse_index)


# --------------------------------------------------------------- counter


def _bound(c: Case):
    r = c.report
    assert r.certified_bound <= 3
    if r.m <= 1 or r.m >= 5 or r.contour.is_empty():
        assert r.certified_bound <= 2
    assert r.certified_bound == theorem_bound(r.m)


def _intervals(c: Case):
    for f in c.report.chambers.faces:
        lo, hi = f.piece_interval
        assert 0 <= lo <= hi <= c.report.certified_bound


def _no_flags(c: Case):
    assert not c.report.flags, c.report.flags


# ---------------------------------------------------------------- oracle


def _random_unimodular(rng, n: int) -> list[list[int]]:
    while True:
        m = rng.integers(-2, 3, size=(n, n))
        d = round(np.linalg.det(m))
        if d > 0:
            return m.tolist()


def _oracle_bound(c: Case):
    if c.sys.n > 2 or c.oracle_rank >= ORACLE_CASES:
        raise Skip
    f = ExpSum.from_coefficients(c.inst.columns, c.inst.coefficients)
    res = count_components(f, ORACLE_GRID)
    assert res.count <= c.report.certified_bound
    base = res.count
    for _ in range(5):
        m = _random_unimodular(c.rng, c.sys.n)
        cols = [[sum(Fraction(a) * x for a, x in zip(row, col)) for row in m] for col in c.inst.columns]
        r2 = count_components(ExpSum.from_coefficients(cols, c.inst.coefficients), ORACLE_GRID)
        assert r2.count == base, (m, base, r2.count)


ORACLE_CASES = 3
ORACLE_GRID = GridSpec()

SUITES: "OrderedDict[str, list[tuple[str, Callable]]]" = OrderedDict(
    [
        (
            "support",
            [
                ("transform reproduces canonical columns", _transform_reproduces),
                ("det(M) > 0", _det_positive),
                ("normalize idempotent", _idempotent),
                ("non-degeneracy brute force", _nondegenerate_bruteforce),
            ],
        ),
        (
            "gale",
            [
                ("A_hat B = 0", _kernel),
                ("column sums zero", _column_sums),
                ("reduced point rescaling", _rescale),
                ("reduced point round trip", _roundtrip),
            ],
        ),
        (
            "contour",
            [
                ("normal vector identity", _normal_identity),
                ("cusp partials vanish", _cusp_partials),
                ("multiplicity <= n", _multiplicity),
                ("segment pairs meet at most once", _pairwise),
                ("dc2 sign constant per segment", _dc2_sign),
            ],
        ),
        (
            "arrangement",
            [
                ("Euler characteristic", _euler),
                ("depth <= floor(m/2)", _depth),
                ("m <= 1 gives <= 2 chambers", _one_cusp),
                ("locate stable", _locate_stable),
            ],
        ),
        (
            "morse",
            [
                ("char poly product formula", _charpoly),
                ("signature constant on segments", _witness_constant),
                ("cusp eigenvalue crossing", _cusp_crossings),
                ("cusp layout counts", _layout),
                ("finite differences at x*", _finite_differences),
            ],
        ),
        (
            "counter",
            [
                ("certified bound", _bound),
                ("interval propagation", _intervals),
                ("no validation flags", _no_flags),
            ],
        ),
        ("oracle", [("count <= bound and isotopy invariant", _oracle_bound)]),
    ]
)


def instance_stream(seed: int, count: int, nmax: int):
    """Reproducible stream of random rational instances with ``1 <= n <= nmax``."""
    rng = np.random.default_rng(seed)
    for k in range(count):
        n = int(rng.integers(1, nmax + 1))
        # checks draw from their own generator so the stream does not depend on them
        yield k, np.random.default_rng([seed, k]), random_instance(rng, n, rational=True)


def run_suites(
    seed: int = 0, count: int = 50, nmax: int = 6, config: Optional[RunConfig] = None
) -> "OrderedDict[tuple[str, str], Tally]":
    config = config or RunConfig(oracle=False)
    table: "OrderedDict[tuple[str, str], Tally]" = OrderedDict(
        ((mod, name), Tally()) for mod, checks in SUITES.items() for name, _ in checks
    )
    small = 0
    for k, rng, inst in instance_stream(seed, count, nmax):
        case = Case(k, rng, inst, oracle_rank=small)
        small += inst.n <= 2
        case.sys = normalize(inst)
        case.g = gale_dual(case.sys)
        case.report = analyze(inst, config)
        for mod, checks in SUITES.items():
            for name, fn in checks:
                t = table[(mod, name)]
                try:
                    fn(case)
                    t.passed += 1
                except Skip:
                    t.skipped += 1
                except Exception as exc:  # every failure lands in the table
                    t.failed += 1
                    t.failures.append(f"instance {k}: {type(exc).__name__}: {exc}")
    return table


def format_table(table) -> str:
    width = max(len(n) for _, n in table) + 2
    lines = [f"{'module':<12}{'check':<{width}}{'pass':>6}{'fail':>6}{'skip':>6}  result"]
    for (mod, name), t in table.items():
        verdict = "PASS" if t.failed == 0 else "FAIL"
        lines.append(f"{mod:<12}{name:<{width}}{t.passed:>6}{t.failed:>6}{t.skipped:>6}  {verdict}")
        for msg in t.failures[:3]:
            lines.append(f"    {msg}")
    return "\n".join(lines) + "\n"


def all_passed(table) -> bool:
    return all(t.failed == 0 for t in table.values())
