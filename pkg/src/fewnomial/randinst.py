"""Seeded random near-circuit instances."""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Optional

import numpy as np

from . import exact
from . import polynomial as P
from .support import (
    CanonicalSystem,
    DegenerateSupportError,
    SignedSupport,
    _gale_kernel,
    check_nondegenerate,
    face_circuit,
    normalize,
)


def _rational(rng, lo: int, hi: int, dens=(1, 1, 1, 2, 3)) -> Fraction:
    return Fraction(int(rng.integers(lo, hi + 1)), int(rng.choice(dens)))


def random_coefficient(rng, sign: int) -> Fraction:
    return sign * Fraction(int(rng.integers(1, 60)), int(rng.integers(1, 60)))


def random_instance(
    rng: np.random.Generator,
    n: int,
    max_exp: int = 4,
    rational: bool = False,
    feasible: bool = True,
    coefficients: bool = True,
    face_generic: bool = False,
) -> SignedSupport:
    """Random non-degenerate near-circuit support in dimension ``n``.

    With ``feasible`` the sign vector is the sign pattern of a random point of
    the Gale kernel, so the admissible parameter interval is not empty. With
    ``face_generic`` supports with a facet holding ``n + 1`` points are redrawn.
    """
    while True:
        dens = (1, 1, 1, 2, 3) if rational else (1,)
        cols = [tuple(_rational(rng, 0, max_exp, dens) for _ in range(n)) for _ in range(n + 3)]
        if len(set(cols)) < n + 3:
            continue
        probe = SignedSupport.from_columns(cols, [1] * (n + 3))
        if not check_nondegenerate(probe).nondegenerate:
            continue
        if face_generic and face_circuit(probe) is not None:
            continue
        if feasible:
            kern = _gale_kernel(probe)
            theta = rng.uniform(0, math.pi)
            lam = (Fraction(math.cos(theta)).limit_denominator(1000), Fraction(math.sin(theta)).limit_denominator(1000))
            vals = [b1 * lam[0] + b2 * lam[1] for b1, b2 in kern]
            if any(v == 0 for v in vals):
                continue
            signs = [exact.sign(v) for v in vals]
        else:
            signs = [int(s) for s in rng.choice([-1, 1], size=n + 3)]
        coeffs = [random_coefficient(rng, s) for s in signs] if coefficients else None
        inst = SignedSupport.from_columns(cols, signs, coeffs)
        try:
            normalize(inst)
        except DegenerateSupportError:
            continue
        return inst


def random_beta_gamma(rng, n: int, span: int = 5):
    """Random rational ``(beta, gamma)`` with non-zero entries."""

    def vec():
        out = []
        while len(out) < n:
            v = _rational(rng, -span, span, (1, 2, 3))
            if v != 0:
                out.append(v)
        return tuple(out)

    return vec(), vec()


def system_from_beta_gamma(beta, gamma, signs=None) -> CanonicalSystem:
    n = len(beta)
    one, zero = Fraction(1), Fraction(0)
    ident = tuple(tuple(one if i == j else zero for j in range(n)) for i in range(n))
    return CanonicalSystem(
        n=n,
        beta=tuple(Fraction(b) for b in beta),
        gamma=tuple(Fraction(g) for g in gamma),
        signs=tuple(signs) if signs is not None else (1,) * (n + 3),
        matrix=ident,
        translation=(zero,) * n,
        permutation=tuple(range(n + 3)),
    )


def many_cusp_system(rng, n: int, m: int) -> Optional[CanonicalSystem]:
    """Canonical system whose contour lives on ``mu > 0`` with ``m`` simple cusps there.

    The cusp numerator is prescribed as ``prod(mu - r_k)`` with ``m`` positive and
    ``n - m`` negative roots; the poles are negative and the weights follow by
    partial fractions. ``dc2`` equals 1 at ``mu = 0`` while every pole is
    negative, so ``N(0) > 0`` and ``m`` must be even. Returns ``None`` when a
    draw is not generic.
    """
    if m % 2 or (n - m) % 2:
        raise ValueError("m and n - m must be even for this construction")
    pos = sorted({Fraction(int(rng.integers(1, 400)), 20) for _ in range(m)})
    neg = sorted({-Fraction(int(rng.integers(1, 400)), 20) for _ in range(n - m)})
    poles = sorted({-Fraction(int(rng.integers(1, 400)), 20) for _ in range(n)})
    if len(pos) < m or len(neg) < n - m or len(poles) < n:
        return None
    roots = pos + neg
    num = [Fraction(1)]
    for r in roots:
        num = P.mul(num, [-r, Fraction(1)])
    # last pole fixed by dc2(0) = 1: N(0) = prod(-p_j)
    rest = math.prod(-p for p in poles)
    p0 = -P.evaluate(num, Fraction(0)) / rest
    if p0 >= 0 or p0 in poles or p0 in roots:
        return None
    poles = [p0] + poles
    weights = []
    for i, p in enumerate(poles):
        den = math.prod(p - q for j, q in enumerate(poles) if j != i)
        weights.append(P.evaluate(num, p) / den)
    if any(w == 0 for w in weights):
        return None
    gamma = tuple(weights[1:])
    beta = tuple(-w / p for w, p in zip(weights[1:], poles[1:]))
    if n >= 2 and exact.rank([list(beta), list(gamma)]) < 2:
        return None
    # sign vector from B(1, 1)
    rows = [(1 - sum(beta), 1 - sum(gamma))] + list(zip(beta, gamma)) + [(-1, 0), (0, -1)]
    signs = tuple(exact.sign(b1 + b2) for b1, b2 in rows)
    if 0 in signs:
        return None
    return system_from_beta_gamma(beta, gamma, signs)
