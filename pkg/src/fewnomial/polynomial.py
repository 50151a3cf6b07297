"""Exact univariate polynomials over the rationals.

Coefficients are stored low degree first, ``[a0, a1, ..., ad]``, as
:class:`~fractions.Fraction`. Only what root isolation needs is provided:
arithmetic, gcd, Yun's square-free decomposition, Sturm sequences and
bisection refinement.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Optional, Sequence

Poly = list[Fraction]


def trim(p: Sequence[Fraction]) -> Poly:
    p = [Fraction(c) for c in p]
    while p and p[-1] == 0:
        p.pop()
    return p


def degree(p: Sequence[Fraction]) -> int:
    return len(trim(p)) - 1


def add(p: Sequence[Fraction], q: Sequence[Fraction]) -> Poly:
    n = max(len(p), len(q))
    return trim([(p[i] if i < len(p) else 0) + (q[i] if i < len(q) else 0) for i in range(n)])


def sub(p: Sequence[Fraction], q: Sequence[Fraction]) -> Poly:
    return add(p, [-c for c in q])


def mul(p: Sequence[Fraction], q: Sequence[Fraction]) -> Poly:
    if not p or not q:
        return []
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a == 0:
            continue
        for j, b in enumerate(q):
            out[i + j] += a * b
    return trim(out)


def scale(p: Sequence[Fraction], s: Fraction) -> Poly:
    return trim([c * s for c in p])


def derivative(p: Sequence[Fraction]) -> Poly:
    return trim([i * c for i, c in enumerate(p)][1:])


def divmod_(p: Sequence[Fraction], q: Sequence[Fraction]) -> tuple[Poly, Poly]:
    p, q = trim(p), trim(q)
    if not q:
        raise ZeroDivisionError("polynomial division by zero")
    r = list(p)
    dq = len(q) - 1
    if len(r) - 1 < dq:
        return [], r
    quot = [Fraction(0)] * (len(r) - dq)
    lead = q[-1]
    for k in range(len(r) - 1 - dq, -1, -1):
        c = r[k + dq] / lead
        quot[k] = c
        if c:
            for j, b in enumerate(q):
                r[k + j] -= c * b
    return trim(quot), trim(r[:dq])


def monic(p: Sequence[Fraction]) -> Poly:
    p = trim(p)
    return [c / p[-1] for c in p] if p else []


def gcd(p: Sequence[Fraction], q: Sequence[Fraction]) -> Poly:
    a, b = trim(p), trim(q)
    while b:
        a, b = b, divmod_(a, b)[1]
    return monic(a)


def evaluate(p: Sequence[Fraction], x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(p):
        acc = acc * x + c
    return acc


def evaluate_float(p: Sequence[Fraction], x: float) -> float:
    acc = 0.0
    for c in reversed(p):
        acc = acc * x + float(c)
    return acc


def squarefree_decomposition(p: Sequence[Fraction]) -> list[tuple[Poly, int]]:
    """Yun's algorithm: ``p = lc * prod(a_k ** k)`` with pairwise coprime square-free ``a_k``.

    Returns the non-constant factors with their multiplicities.
    """
    p = monic(p)
    if len(p) <= 1:
        return []
    dp = derivative(p)
    a = gcd(p, dp)
    b = divmod_(p, a)[0]
    c = divmod_(dp, a)[0]
    d = sub(c, derivative(b))
    out = []
    k = 1
    while len(b) > 1:
        a = gcd(b, d)
        if len(a) > 1:
            out.append((a, k))
        b = divmod_(b, a)[0]
        c = divmod_(d, a)[0]
        d = sub(c, derivative(b))
        k += 1
    return out


def sturm_sequence(p: Sequence[Fraction]) -> list[Poly]:
    seq = [trim(p), derivative(p)]
    while seq[-1]:
        r = divmod_(seq[-2], seq[-1])[1]
        if not r:
            break
        seq.append([-c for c in r])
    return seq


def _variations(values) -> int:
    signs = [v for v in values if v != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if (a > 0) != (b > 0))


def _sign_at(seq, x: Optional[Fraction], side: int) -> list:
    if x is not None:
        return [evaluate(q, x) for q in seq]
    # x = side * infinity
    return [q[-1] * (side ** (len(q) - 1)) if q else 0 for q in seq]


def count_roots(seq: list[Poly], a: Optional[Fraction], b: Optional[Fraction]) -> int:
    """Number of distinct real roots in ``(a, b]``; ``None`` means -inf / +inf."""
    return _variations(_sign_at(seq, a, -1)) - _variations(_sign_at(seq, b, +1))


def cauchy_bound(p: Sequence[Fraction]) -> Fraction:
    p = trim(p)
    lead = abs(p[-1])
    return 1 + max((abs(c) / lead for c in p[:-1]), default=Fraction(0))


def isolate_real_roots(
    p: Sequence[Fraction], lo: Optional[Fraction] = None, hi: Optional[Fraction] = None
) -> list[tuple[Fraction, Fraction]]:
    """Disjoint brackets ``(a, b]``, one per distinct root of ``p`` in the open interval (lo, hi).

    ``None`` endpoints are infinite. Roots equal to ``lo`` or ``hi`` are excluded.
    """
    p = trim(p)
    if len(p) <= 1:
        return []
    seq = sturm_sequence(p)
    bound = cauchy_bound(p)
    a = -bound if lo is None else max(lo, -bound)
    b = bound if hi is None else min(hi, bound)
    if a >= b:
        return []
    out = []
    stack = [(a, b)]
    while stack:
        x, y = stack.pop()
        k = count_roots(seq, x, y)
        if k == 0:
            continue
        if k == 1:
            out.append((x, y))
            continue
        mid = (x + y) / 2
        stack.append((mid, y))
        stack.append((x, mid))
    if hi is not None:
        out = [(x, y) for x, y in out if not (y == hi and evaluate(p, hi) == 0)]
    return sorted(out)


def refine_root(
    p: Sequence[Fraction], a: Fraction, b: Fraction, width: Fraction
) -> tuple[Fraction, Fraction]:
    """Shrink an isolating bracket ``(a, b]`` of a simple root to width below ``width``.

    Returns a closed bracket ``[a, b]`` (degenerate if the root is rational and hit).
    """
    fb = evaluate(p, b)
    if fb == 0:
        return b, b
    fa = evaluate(p, a)
    if fa == 0:
        # a is a root outside the bracket; step in with Sturm counts until it is not an endpoint
        seq = sturm_sequence(p)
        while fa == 0:
            m = (a + b) / 2
            if count_roots(seq, m, b) == 1:
                a, fa = m, evaluate(p, m)
            else:
                b, fb = m, evaluate(p, m)
                if fb == 0:
                    return b, b
    while b - a >= width:
        m = (a + b) / 2
        fm = evaluate(p, m)
        if fm == 0:
            return m, m
        if (fm > 0) == (fb > 0):
            b, fb = m, fm
        else:
            a, fa = m, fm
    return a, b
