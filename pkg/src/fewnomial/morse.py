"""Singular zero, Hessian and eigenvalue signature along the contour.

At contour parameter ``mu`` the reduced exponential sum has a singular zero
``x*`` whose Hessian is a scalar multiple of ``H(mu) = M(beta) mu + M(gamma)``,
``M(v) = v v^T - diag(v)``. The signature of ``H`` can change only at cusps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple, Sequence

import numpy as np

from .contour import Contour, hk_point
from .exact import sign
from .gale import GaleDual
from .support import CanonicalSystem

EIGEN_ZERO = 1e-9
GOLDEN = (math.sqrt(5) - 1) / 2


class GenericityError(ValueError):
    """``beta_i mu + gamma_i = 0`` or the scalar prefactor vanishes."""


class CriticalData(NamedTuple):
    mu: float
    x_star: np.ndarray
    f_residual: float
    grad_residual: float


class Signature(NamedTuple):
    n_pos: int
    n_neg: int
    n_zero: int
    scalar_sign: int  # sign of -eps_0 / D, the factor relating H to the Hessian of f at x*

    @property
    def n(self) -> int:
        return self.n_pos + self.n_neg + self.n_zero


@dataclass
class SegmentSignature:
    segment: int
    witness: float
    signature: Signature
    matrix_index: int  # negative eigenvalues of H
    morse_index: int  # after the scalar prefactor: n - matrix_index when scalar_sign < 0
    index_set: frozenset
    transition_relevant: bool
    constant: bool = True


@dataclass
class CuspCrossing:
    cusp: int
    mu: float
    multiplicity: int
    left: Signature
    right: Signature
    changed: int  # eigenvalue sign changes across the cusp
    side_signs_ok: bool
    dp_zero: float  # |p'(0)| at the cusp
    dp_scale: float
    ok: bool


@dataclass
class MorseReport:
    segments: list[SegmentSignature]
    crossings: list[CuspCrossing]
    flags: list[str] = field(default_factory=list)  # validation failures
    cusp_layout: str = "skipped"  # "ok" | "violated" | "skipped"
    notes: list[str] = field(default_factory=list)  # informational


# ------------------------------------------------------------- matrices


def m_matrix(v: Sequence) -> list[list]:
    """``M(v)``: diagonal ``v_i (v_i - 1)``, off-diagonal ``v_i v_j``."""
    n = len(v)
    return [[v[i] * v[j] - (v[i] if i == j else 0) for j in range(n)] for i in range(n)]


def _d_values(sys: CanonicalSystem, mu):
    d = [b * mu + g for b, g in zip(sys.beta, sys.gamma)]
    big_d = (1 - sum(sys.beta)) * mu + (1 - sum(sys.gamma))
    return d, big_d


def hessian_exact(sys: CanonicalSystem, mu: Fraction) -> list[list[Fraction]]:
    mb, mg = m_matrix(sys.beta), m_matrix(sys.gamma)
    return [[a * mu + b for a, b in zip(ra, rb)] for ra, rb in zip(mb, mg)]


def hessian(sys: CanonicalSystem, mu) -> tuple[np.ndarray, int]:
    """``M(beta) mu + M(gamma)`` and the sign of ``(1-sum beta) mu + (1-sum gamma)``."""
    if isinstance(mu, (int, Fraction)):
        h = np.array([[float(x) for x in row] for row in hessian_exact(sys, Fraction(mu))])
    else:
        b = np.array([float(x) for x in sys.beta])
        g = np.array([float(x) for x in sys.gamma])
        h = (np.outer(b, b) - np.diag(b)) * float(mu) + np.outer(g, g) - np.diag(g)
    _, big_d = _d_values(sys, mu)
    return h, sign(big_d)


def critical_point(sys: CanonicalSystem, g: GaleDual, mu) -> CriticalData:
    """Singular zero of the reduced sum at ``(c1, c2) = xi(mu, 1)``.

    Residuals are scaled by the sum of absolute term values at ``x*``.
    """
    d, big_d = _d_values(sys, mu)
    if any(x == 0 for x in d) or big_d == 0:
        raise GenericityError(f"mu={mu} is not generic")
    x = np.array([math.log(abs(float(di))) - math.log(abs(float(big_d))) for di in d])
    c1, c2 = hk_point(g, mu).point
    terms, grad = _terms(sys, x, c1, c2)
    scale = float(np.sum(np.abs(terms)))
    return CriticalData(
        float(mu), x, abs(math.fsum(terms)) / scale, float(np.max(np.abs(grad))) / scale
    )


def _terms(sys: CanonicalSystem, x: np.ndarray, c1: float, c2: float):
    n = sys.n
    s = np.array(sys.signs, dtype=float)
    beta = np.array([float(v) for v in sys.beta])
    gamma = np.array([float(v) for v in sys.gamma])
    e = np.concatenate([[0.0], x, [beta @ x - c1, gamma @ x - c2]])
    terms = s * np.exp(e)
    grad = terms[1 : n + 1] + terms[n + 1] * beta + terms[n + 2] * gamma
    return terms, grad


def reduced_sum(sys: CanonicalSystem, c1: float, c2: float):
    """The canonical exponential sum as a callable on ``R^n``."""

    def f(x):
        return math.fsum(_terms(sys, np.asarray(x, dtype=float), c1, c2)[0])

    return f


# --------------------------------------------------- characteristic poly


def _pmul(p, q):
    out = [0] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        for j, b in enumerate(q):
            out[i + j] = out[i + j] + a * b
    return out


def _padd(p, q):
    n = max(len(p), len(q))
    return [(p[i] if i < len(p) else 0) + (q[i] if i < len(q) else 0) for i in range(n)]


def char_poly(sys: CanonicalSystem, mu) -> list:
    """Coefficients (low degree first, monic) of ``det(zeta I - H(mu))``.

    Expanded from ``mu * prod(zeta + d_i) * g(zeta, mu)`` with ``g`` the 2x2
    determinant obtained by Sylvester's identity; ``d_i = beta_i mu + gamma_i``.
    Exact when ``mu`` is rational.
    """
    if mu == 0:
        raise ValueError("mu = 0: use signature_limit_zero")
    if not isinstance(mu, float):
        mu = Fraction(mu)
    beta, gamma = sys.beta, sys.gamma
    if isinstance(mu, float):
        beta = [float(b) for b in beta]
        gamma = [float(c) for c in gamma]
    n = len(beta)
    d, _ = _d_values(sys, mu)
    if isinstance(mu, float):
        d = [float(x) for x in d]
    lin = [[di, 1] for di in d]

    def prod_except(skip):
        out = [1]
        for k in range(n):
            if k not in skip:
                out = _pmul(out, lin[k])
        return out

    # mu*prod*g = mu*sum_{i<j} w_ij^2 P_ij - mu*sum b_i^2 P_i - sum g_i^2 P_i + P
    p = prod_except(())
    for i in range(n):
        pi = prod_except((i,))
        p = _padd(p, [-(mu * beta[i] ** 2 + gamma[i] ** 2) * c for c in pi])
        for j in range(i + 1, n):
            w = beta[i] * gamma[j] - beta[j] * gamma[i]
            if w:
                p = _padd(p, [mu * w * w * c for c in prod_except((i, j))])
    return p


def char_poly_direct(h: Sequence[Sequence]) -> list:
    """Faddeev-LeVerrier expansion of ``det(zeta I - h)``, low degree first."""
    n = len(h)
    exact = not any(isinstance(x, float) for row in h for x in row)
    one = Fraction(1) if exact else 1.0
    a = [[Fraction(x) if exact else float(x) for x in row] for row in h]
    coeffs = [one]  # c_n = 1
    mk = [[0 * one] * n for _ in range(n)]  # M_0 = 0
    for k in range(1, n + 1):
        # M_k = A M_{k-1} + c_{n-k+1} I
        am = [[sum((a[i][t] * mk[t][j] for t in range(n)), 0 * one) for j in range(n)] for i in range(n)]
        for i in range(n):
            am[i][i] += coeffs[-1]
        mk = am
        amk = [[sum((a[i][t] * mk[t][j] for t in range(n)), 0 * one) for j in range(n)] for i in range(n)]
        coeffs.append(-sum((amk[i][i] for i in range(n)), 0 * one) / k)
    return list(reversed(coeffs))


def elementary_symmetric(values: Sequence[float], k: int) -> float:
    e = [1.0] + [0.0] * k
    for v in values:
        for j in range(k, 0, -1):
            e[j] += e[j - 1] * v
    return e[k]


# ---------------------------------------------------------- eigenvalues


def jacobi_eigenvalues(a, tol: float = 1e-15, max_sweeps: int = 64) -> np.ndarray:
    """Eigenvalues of a real symmetric matrix by cyclic Jacobi rotations (ascending)."""
    a = np.array(a, dtype=float, copy=True)
    n = a.shape[0]
    if n == 0:
        return np.zeros(0)
    norm = np.linalg.norm(a)
    if norm == 0:
        return np.zeros(n)
    for _ in range(max_sweeps):
        off = math.sqrt(max(np.sum(a * a) - np.sum(np.diag(a) ** 2), 0.0))
        if off <= tol * norm:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= 1e-18 * norm:
                    a[p, q] = a[q, p] = 0.0
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                if abs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    t = math.copysign(1.0, theta) / (abs(theta) + math.hypot(theta, 1.0))
                c = 1.0 / math.hypot(t, 1.0)
                s = t * c
                ap = a[:, p].copy()
                aq = a[:, q].copy()
                a[:, p] = c * ap - s * aq
                a[:, q] = s * ap + c * aq
                rp = a[p, :].copy()
                rq = a[q, :].copy()
                a[p, :] = c * rp - s * rq
                a[q, :] = s * rp + c * rq
    return np.sort(np.diag(a))


def _count(eigs: np.ndarray, h: np.ndarray, scalar_sign: int, zero: float = EIGEN_ZERO) -> Signature:
    thresh = zero * float(np.linalg.norm(h))
    pos = int(np.sum(eigs > thresh))
    neg = int(np.sum(eigs < -thresh))
    return Signature(pos, neg, len(eigs) - pos - neg, scalar_sign)


def signature_at(sys: CanonicalSystem, mu, zero: float = EIGEN_ZERO) -> Signature:
    h, s = hessian(sys, mu)
    return _count(jacobi_eigenvalues(h), h, -sys.signs[0] * s, zero)


def inertia_from_charpoly(coeffs: Sequence) -> tuple[int, int, int]:
    """(positive, negative, zero) root counts of a real-rooted polynomial, low degree first.

    For a real-rooted polynomial Descartes' rule of signs is exact.
    """
    z = next(i for i, c in enumerate(coeffs) if c != 0)
    c = list(coeffs[z:])

    def variations(vals):
        s = [v > 0 for v in vals if v != 0]
        return sum(1 for a, b in zip(s, s[1:]) if a != b)

    return variations(c), variations([v if i % 2 == 0 else -v for i, v in enumerate(c)]), z


def signature_exact(sys: CanonicalSystem, mu) -> Signature:
    """Inertia of ``H(mu)`` for rational ``mu`` in exact arithmetic."""
    mu = Fraction(mu)
    if mu == 0:
        coeffs = char_poly_direct(m_matrix(sys.gamma))
    else:
        coeffs = char_poly(sys, mu)
    pos, neg, zero = inertia_from_charpoly(coeffs)
    _, big_d = _d_values(sys, mu)
    return Signature(pos, neg, zero, -sys.signs[0] * sign(big_d))


def signature_robust(sys: CanonicalSystem, mu, zero: float = EIGEN_ZERO) -> tuple[Signature, bool]:
    """Jacobi signature, replaced by the exact count when the two disagree.

    The flag is true when the exact count was needed (ill-conditioned ``H``).
    """
    sj = signature_at(sys, mu, zero)
    se = signature_exact(sys, mu)
    if sj[:3] == se[:3]:
        return sj, False
    return se, True


def signature_limit_zero(gamma: Sequence, eps0: int = -1) -> Signature:
    """Signature of ``M(gamma)`` from the sign rule on ``(sum gamma - 1, -gamma_1, ..., -gamma_n)``."""
    gamma = [Fraction(g) for g in gamma]
    if any(g == 0 for g in gamma):
        raise GenericityError("gamma has a zero entry")
    total = sum(gamma) - 1
    if total == 0:
        raise GenericityError("sum(gamma) = 1: rule is not generic")
    signs = [sign(total)] + [-sign(g) for g in gamma]
    signs.remove(-1)
    pos = signs.count(1)
    return Signature(pos, len(signs) - pos, 0, eps0 * sign(total))


def transition_relevant(index: int, n: int) -> bool:
    return index in (0, 1, n - 1, n)


# ---------------------------------------------------------- segments


def _witnesses(lo: float, hi: float, count: int = 5) -> list[float]:
    """Witness parameters inside ``(lo, hi)``; the middle one is the main witness."""
    ks = [(k + 1) / (count + 1) for k in range(count)]
    if math.isinf(lo) and math.isinf(hi):
        return [float(k - count // 2) for k in range(count)]
    if math.isinf(lo) or math.isinf(hi):
        e, s = (hi, -1.0) if math.isinf(lo) else (lo, 1.0)
        return [e + s * 2.0 ** (k - count // 2) for k in range(count)]
    if lo != 0 and hi != 0 and (lo > 0) == (hi > 0):
        r = math.log(hi / lo)
        return [lo * math.exp(r * k) for k in ks]
    return [lo + (hi - lo) * k for k in ks]


def _generic(sys: CanonicalSystem, mu: float) -> bool:
    d, big_d = _d_values(sys, mu)
    return mu != 0 and all(float(x) != 0 for x in d) and float(big_d) != 0


def _redraw(sys, mu, lo, hi) -> float:
    for k in range(1, 11):
        if _generic(sys, mu):
            return mu
        if math.isinf(lo) or math.isinf(hi):
            mu = mu + GOLDEN * k * (1 if math.isinf(hi) else -1)
        else:
            mu = lo + ((mu - lo) / (hi - lo) + GOLDEN * k) % 1.0 * (hi - lo)
    if not _generic(sys, mu):
        raise GenericityError(f"no generic witness in ({lo}, {hi})")
    return mu


def _segment_signature(sys, seg_id, lo, hi, flags, notes, zero=EIGEN_ZERO) -> SegmentSignature:
    n = sys.n
    ws = [_redraw(sys, w, lo, hi) for w in _witnesses(lo, hi)]
    sigs = []
    for w in ws:
        sig, used = signature_robust(sys, w, zero)
        if used:
            notes.append(f"segment {seg_id}: exact inertia used at mu={w!r}")
        sigs.append(sig)
    main = sigs[len(sigs) // 2]
    constant = all(s[:3] == main[:3] for s in sigs)
    if not constant:
        flags.append(f"segment {seg_id}: signature not constant over witnesses")
    if main.n_zero:
        flags.append(f"segment {seg_id}: zero eigenvalue away from cusps")
    s = main.n_neg
    morse = n - s if main.scalar_sign < 0 else s
    return SegmentSignature(
        seg_id,
        ws[len(ws) // 2],
        main,
        s,
        morse,
        frozenset({s, n - s}),
        transition_relevant(s, n),
        constant,
    )


def _side(sys, g, mu0, lo, hi, side, zero):
    """Signature, ``sign(dc1)`` and the sign of the eigenvalue nearest zero just beside a cusp.

    The last entry is ``None`` when Jacobi could not resolve the small eigenvalue.
    """
    span = (hi - mu0) if side > 0 else (mu0 - lo)
    if math.isinf(span):
        span = abs(mu0) or 1.0
    for frac in (1e-3, 1e-4, 1e-5, 1e-2, 1e-1):
        mu = mu0 + side * frac * span
        if not _generic(sys, mu):
            continue
        dc1 = hk_point(g, mu).dc1
        sig, used = signature_robust(sys, mu, zero)
        if dc1 == 0 or sig.n_zero:
            continue
        small = None
        if not used:
            h, _ = hessian(sys, mu)
            eigs = jacobi_eigenvalues(h)
            small = int(np.sign(eigs[np.argmin(np.abs(eigs))]))
        return sig, int(np.sign(dc1)), small
    return None


def cusp_crossing(sys, g, contour: Contour, k: int, zero: float = EIGEN_ZERO) -> CuspCrossing:
    cusp = contour.cusps[k]
    seg_l, seg_r = contour.segments[k], contour.segments[k + 1]
    mu0 = cusp.mu
    left = _side(sys, g, mu0, seg_l.mu_lo, mu0, -1, zero)
    right = _side(sys, g, mu0, mu0, seg_r.mu_hi, +1, zero)
    exact_mu = (cusp.bracket[0] + cusp.bracket[1]) / 2
    coeffs = char_poly(sys, exact_mu)
    h, _ = hessian(sys, mu0)
    scale = elementary_symmetric(np.abs(jacobi_eigenvalues(h)), sys.n - 1)
    dp = abs(float(coeffs[1])) if len(coeffs) > 1 else 0.0
    if left is None or right is None:
        empty = Signature(0, 0, sys.n, 0)
        return CuspCrossing(k, mu0, cusp.multiplicity, empty, empty, -1, False, dp, float(scale), False)
    (sig_l, d_l, small_l), (sig_r, d_r, small_r) = left, right
    changed = abs(sig_l.n_neg - sig_r.n_neg)
    if cusp.multiplicity % 2:
        # the eigenvalue through zero has the sign of dc1 on each side
        plus, minus = (sig_l, sig_r) if d_l > 0 else (sig_r, sig_l)
        sides_ok = d_l == -d_r and plus.n_pos == minus.n_pos + 1 and plus.n_neg + 1 == minus.n_neg
        sides_ok = sides_ok and all(s is None or s == d for s, d in ((small_l, d_l), (small_r, d_r)))
        ok = changed == 1 and sides_ok and dp >= 1e-8 * scale
    else:
        sides_ok = d_l == d_r
        ok = changed == 0
    return CuspCrossing(
        k, mu0, cusp.multiplicity, sig_l, sig_r, changed, bool(sides_ok), dp, float(scale), bool(ok)
    )


def cusp_layout_check(sys: CanonicalSystem, contour: Contour) -> str:
    """Eigenvalue counts of ``M(gamma)`` implied by ``m`` cusps on ``(0, inf)``."""
    m = contour.multiplicity
    dom = contour.domain
    if dom.empty or dom.lo != 0 or dom.hi is not None or not (2 <= m <= sys.n):
        return "skipped"
    sig = signature_exact(sys, Fraction(0))
    ok = sig.n_pos >= (m + 1) // 2 and sig.n_neg >= m // 2
    return "ok" if ok else "violated"


def segment_signatures(
    sys: CanonicalSystem, g: GaleDual, contour: Contour, zero: float = EIGEN_ZERO
) -> MorseReport:
    flags: list[str] = []
    notes: list[str] = []
    segs = [
        _segment_signature(sys, seg.id, seg.mu_lo, seg.mu_hi, flags, notes, zero)
        for seg in contour.segments
    ]
    crossings = []
    for k in range(len(contour.cusps)):
        c = cusp_crossing(sys, g, contour, k, zero)
        crossings.append(c)
        if c.multiplicity % 2 == 0:
            notes.append(f"cusp {k} has even multiplicity {c.multiplicity}: treated as non-transition")
        if not c.ok:
            flags.append(f"cusp {k}: eigenvalue crossing check failed")
        if c.changed >= 2:
            flags.append(f"cusp {k}: signature jumps by {c.changed}")
    layout = cusp_layout_check(sys, contour)
    if layout == "skipped" and len(contour.cusps) >= 1 and contour.multiplicity >= 2:
        notes.append("cusp layout check skipped: domain is not (0, inf) or m > n")
    elif layout == "violated":
        flags.append("M(gamma) eigenvalue counts below the cusp layout bound")
    return MorseReport(segs, crossings, flags, layout, notes)
