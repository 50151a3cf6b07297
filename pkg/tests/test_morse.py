from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import pytest
import sympy
from hypothesis import given, settings, strategies as st

from fewnomial import contour as ct
from fewnomial import morse
from fewnomial.gale import gale_dual
from fewnomial.randinst import many_cusp_system, random_beta_gamma, random_instance, system_from_beta_gamma
from fewnomial.support import normalize


def sympy_charpoly(h):
    z = sympy.Symbol("z")
    m = sympy.Matrix([[sympy.Rational(x.numerator, x.denominator) for x in row] for row in h])
    coeffs = m.charpoly(z).all_coeffs()
    return [Fraction(int(sympy.numer(c)), int(sympy.denom(c))) for c in reversed(coeffs)]


def test_ex18_critical_point(ex18_sys, ex18_gale):
    cd = morse.critical_point(ex18_sys, ex18_gale, Fraction(1))
    assert cd.x_star == pytest.approx([math.log(5) - math.log(8)] * 2, abs=1e-15)
    assert cd.f_residual <= 1e-8 and cd.grad_residual <= 1e-8


def test_ex18_hessian_and_charpoly(ex18_sys):
    assert morse.hessian_exact(ex18_sys, Fraction(0)) == [[12, 4], [4, 0]]
    h, s = morse.hessian(ex18_sys, Fraction(1))
    assert h.tolist() == [[12.0, 8.0], [8.0, 12.0]]
    assert s == -1  # D(1) = (1 - 5) + (1 - 5)
    assert morse.char_poly(ex18_sys, Fraction(1)) == [80, -24, 1]


def test_genericity_error(ex18_sys, ex18_gale):
    # beta_1 mu + gamma_1 = mu + 4 vanishes at mu = -4
    with pytest.raises(morse.GenericityError):
        morse.critical_point(ex18_sys, ex18_gale, Fraction(-4))
    with pytest.raises(ValueError):
        morse.char_poly(ex18_sys, 0)


@given(st.fractions(max_denominator=20).filter(bool), st.fractions(max_denominator=20), st.fractions(max_denominator=20))
def test_charpoly_n1(b, g, mu):
    if mu == 0 or b * mu + g == 0:
        return
    sys = system_from_beta_gamma((b,), (g,))
    assert morse.char_poly(sys, mu) == [-(b * (b - 1) * mu + g * (g - 1)), 1]


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 6), st.fractions(-30, 30, max_denominator=9).filter(bool))
def test_charpoly_product_formula(seed, n, mu):
    rng = np.random.default_rng(seed)
    sys = system_from_beta_gamma(*random_beta_gamma(rng, n))
    h = morse.hessian_exact(sys, mu)
    ref = sympy_charpoly(h)
    assert morse.char_poly(sys, mu) == ref
    assert morse.char_poly_direct(h) == ref
    got = morse.char_poly(sys, float(mu))
    for a, b in zip(got, ref):
        assert abs(a - float(b)) <= 1e-8 * max(1.0, abs(float(b)))


def test_charpoly_vanishes_at_rational_cusps():
    rng = np.random.default_rng(5)
    for n, m in ((2, 2), (4, 2), (4, 4)):
        sys = None
        while sys is None:
            sys = many_cusp_system(rng, n, m)
        g = gale_dual(sys)
        dom = ct.parameter_domain(g, sys.signs)
        cusps = ct.find_cusps(g, dom)
        assert len(cusps) == m
        for c in cusps:
            # prescribed roots have denominator 20
            mu = ((c.bracket[0] + c.bracket[1]) / 2).limit_denominator(20)
            assert c.bracket[0] <= mu <= c.bracket[1]
            p = morse.char_poly(sys, mu)
            assert p[0] == 0 and p[1] != 0


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 8))
def test_jacobi_matches_eigvalsh(seed, n):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(n, n)) * 10 ** rng.uniform(-3, 3)
    a = a + a.T
    ref = np.linalg.eigvalsh(a)
    assert morse.jacobi_eigenvalues(a) == pytest.approx(ref, abs=1e-10 * np.abs(ref).max())


def test_limit_zero_examples():
    sig = morse.signature_limit_zero((4, 1))
    assert (sig.n_pos, sig.n_neg) == (1, 1)
    sig = morse.signature_limit_zero((Fraction(-1, 2), -2, -3))
    assert (sig.n_pos, sig.n_neg) == (3, 0)
    with pytest.raises(morse.GenericityError):
        morse.signature_limit_zero((Fraction(1, 2), Fraction(1, 2)))
    with pytest.raises(morse.GenericityError):
        morse.signature_limit_zero((0, 2))


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 8))
def test_limit_zero_rule_matches_eigencount(seed, n):
    rng = np.random.default_rng(seed)
    beta, gamma = random_beta_gamma(rng, n)
    if sum(gamma) == 1:
        return
    rule = morse.signature_limit_zero(gamma)
    m = np.array([[float(x) for x in row] for row in morse.m_matrix(gamma)])
    eig = np.linalg.eigvalsh(m)
    assert (rule.n_pos, rule.n_neg) == (int(np.sum(eig > 0)), int(np.sum(eig < 0)))
    exact = morse.inertia_from_charpoly(morse.char_poly_direct(morse.m_matrix(gamma)))
    assert exact == (rule.n_pos, rule.n_neg, 0)
    # continuity: the same counts just beside mu = 0
    sys = system_from_beta_gamma(beta, gamma)
    near = morse.signature_exact(sys, Fraction(1, 10**6))
    assert (near.n_pos, near.n_neg) == (rule.n_pos, rule.n_neg)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_hessian_of_f_is_scalar_multiple(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 5))
    sys = normalize(random_instance(rng, n, rational=True))
    g = gale_dual(sys)
    dom = ct.parameter_domain(g, sys.signs)
    lo, hi = dom.lo_f, dom.hi_f
    mu = (lo + hi) / 2 if math.isfinite(lo) and math.isfinite(hi) else (hi - 0.7 if math.isfinite(hi) else lo + 0.7)
    if not morse._generic(sys, mu):
        return
    cd = morse.critical_point(sys, g, mu)
    assert cd.f_residual <= 1e-8 and cd.grad_residual <= 1e-8
    c1, c2 = ct.hk_point(g, mu).point
    f = morse.reduced_sum(sys, c1, c2)
    terms, _ = morse._terms(sys, cd.x_star, c1, c2)
    scale = float(np.sum(np.abs(terms)))
    big = max(1.0, max(abs(float(v)) for v in sys.beta + sys.gamma))
    step = 1e-3 / big
    e = np.eye(n) * step
    x = cd.x_star
    fd = np.array(
        [
            [
                (f(x + e[i] + e[j]) - f(x + e[i] - e[j]) - f(x - e[i] + e[j]) + f(x - e[i] - e[j])) / (4 * step * step)
                for j in range(n)
            ]
            for i in range(n)
        ]
    )
    h, _ = morse.hessian(sys, mu)
    kappa = terms[-1]  # coefficient of gamma gamma^T in the Hessian of f
    assert np.max(np.abs(fd - kappa * h)) <= 1e-5 * scale * big**2
    sig = morse.signature_at(sys, mu)
    assert sig.scalar_sign == int(np.sign(kappa))
    neg = int(np.sum(np.linalg.eigvalsh(kappa * h) < 0))
    expected = sig.n - sig.n_neg if sig.scalar_sign < 0 else sig.n_neg
    assert neg == expected


def test_ex18_segments_all_relevant(ex18_sys, ex18_gale):
    dom = ct.parameter_domain(ex18_gale, ex18_sys.signs)
    contour = ct.trace_contour(ex18_gale, dom, ct.find_cusps(ex18_gale, dom))
    rep = morse.segment_signatures(ex18_sys, ex18_gale, contour)
    assert not rep.flags
    assert all(s.transition_relevant for s in rep.segments)
    assert all(c.ok and c.changed == 1 for c in rep.crossings)
    assert rep.cusp_layout == "ok"


@pytest.mark.parametrize("n, m", [(2, 2), (4, 4), (6, 6), (6, 4), (8, 6)])
def test_many_cusps_layout_and_crossings(n, m):
    rng = np.random.default_rng(n * 10 + m)
    sys = None
    while sys is None:
        sys = many_cusp_system(rng, n, m)
    g = gale_dual(sys)
    dom = ct.parameter_domain(g, sys.signs)
    assert (dom.lo, dom.hi) == (0, None)
    contour = ct.trace_contour(g, dom, ct.find_cusps(g, dom))
    assert contour.multiplicity == m
    rep = morse.segment_signatures(sys, g, contour)
    assert not rep.flags
    assert rep.cusp_layout == "ok"
    for c in rep.crossings:
        assert c.ok and abs(c.left.n_pos - c.right.n_pos) == 1
    if m >= 6:
        for s in rep.segments:
            assert s.signature.n_pos >= 2 and s.signature.n_neg >= 2
            assert not s.transition_relevant


def test_many_cusp_generator_rejects_odd_counts():
    rng = np.random.default_rng(0)
    with pytest.raises(ValueError):
        many_cusp_system(rng, 3, 1)


def test_transition_relevant():
    assert [morse.transition_relevant(s, 4) for s in range(5)] == [True, True, False, True, True]
    assert all(morse.transition_relevant(s, 2) for s in range(3))
