"""Signed near-circuit supports and their reduction to canonical form.

A signed support is an ``n x (n+3)`` exponent matrix together with a sign
vector (and optionally the coefficients themselves). :func:`normalize` finds
an affine change of exponents ``a -> M a + v`` with ``det(M) > 0`` and a
column order so that the support becomes ``{0, e_1, ..., e_n, beta, gamma}``
and, when the sign pattern is realised on the discriminant, the two last
columns are exactly the ones bounding the admissible parameter arc.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, NamedTuple, Optional, Sequence

from . import exact
from .exact import sign, to_fraction


class ParseError(ValueError):
    """Malformed instance document."""


class DegenerateSupportError(ValueError):
    """The support is degenerate (rank of the lifted matrix below n+1)."""


@dataclass(frozen=True)
class SignedSupport:
    exponents: tuple[tuple[Fraction, ...], ...]  # n rows, n+3 columns
    signs: tuple[int, ...]
    coefficients: Optional[tuple[Fraction, ...]] = None

    def __post_init__(self):
        n = len(self.exponents)
        if n < 1:
            raise ParseError("dimension mismatch: need at least one exponent row")
        t = n + 3
        for row in self.exponents:
            if len(row) != t:
                raise ParseError(f"dimension mismatch: expected {t} columns, got {len(row)}")
        if len(self.signs) != t:
            raise ParseError(f"dimension mismatch: expected {t} signs, got {len(self.signs)}")
        if any(s not in (1, -1) for s in self.signs):
            raise ParseError(f"zero or invalid sign entry in {self.signs}")
        if self.coefficients is not None:
            if len(self.coefficients) != t:
                raise ParseError(
                    f"dimension mismatch: expected {t} coefficients, got {len(self.coefficients)}"
                )
            for i, (c, s) in enumerate(zip(self.coefficients, self.signs)):
                if sign(c) != s:
                    raise ParseError(f"coefficient/sign conflict at column {i}: {c} vs {s:+d}")

    @property
    def n(self) -> int:
        return len(self.exponents)

    @property
    def columns(self) -> list[tuple[Fraction, ...]]:
        return [tuple(row[j] for row in self.exponents) for j in range(self.n + 3)]

    def lifted(self) -> list[list[Fraction]]:
        """The ``(n+1) x (n+3)`` matrix with a row of ones on top."""
        return [[Fraction(1)] * (self.n + 3)] + [list(r) for r in self.exponents]

    @classmethod
    def from_columns(cls, columns, signs, coefficients=None) -> "SignedSupport":
        cols = [tuple(to_fraction(x) for x in c) for c in columns]
        n = len(cols[0])
        rows = tuple(tuple(c[i] for c in cols) for i in range(n))
        coeffs = None if coefficients is None else tuple(to_fraction(c) for c in coefficients)
        return cls(rows, tuple(int(s) for s in signs), coeffs)


class RankReport(NamedTuple):
    nondegenerate: bool
    rank: int
    required: int


@dataclass(frozen=True)
class CanonicalSystem:
    """Reduced form ``e0 + sum e_i exp(x_i) + e_{n+1} exp(beta.x - c1) + e_{n+2} exp(gamma.x - c2)``.

    ``permutation[k]`` is the original column placed at canonical position ``k``;
    ``matrix`` and ``translation`` map original columns onto the canonical ones.
    """

    n: int
    beta: tuple[Fraction, ...]
    gamma: tuple[Fraction, ...]
    signs: tuple[int, ...]
    matrix: tuple[tuple[Fraction, ...], ...]
    translation: tuple[Fraction, ...]
    permutation: tuple[int, ...]

    def columns(self) -> list[tuple[Fraction, ...]]:
        zero = tuple(Fraction(0) for _ in range(self.n))
        basis = [tuple(Fraction(int(i == j)) for i in range(self.n)) for j in range(self.n)]
        return [zero] + basis + [self.beta, self.gamma]

    def lifted(self) -> list[list[Fraction]]:
        cols = self.columns()
        return [[Fraction(1)] * (self.n + 3)] + [[c[i] for c in cols] for i in range(self.n)]

    def permute(self, values: Sequence) -> tuple:
        """Reorder a per-column vector given in original order into canonical order."""
        return tuple(values[p] for p in self.permutation)

    def apply(self, column: Sequence[Fraction]) -> tuple[Fraction, ...]:
        mv = exact.matvec(self.matrix, column)
        return tuple(a + b for a, b in zip(mv, self.translation))


# ---------------------------------------------------------------- parsing


def parse_instance(raw: str | dict) -> SignedSupport:
    """Parse an instance document (JSON text or an already-decoded dict).

    Fields: ``n``, ``exponents`` (``n`` rows of ``n+3`` rationals, strings such
    as ``"6/5"`` allowed), ``signs`` and optional ``coefficients``. If only
    coefficients are given the signs are taken from them.
    """
    if isinstance(raw, (str, bytes)):
        try:
            doc = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise ParseError(f"not a JSON document: {exc}") from exc
    else:
        doc = raw
    if not isinstance(doc, dict):
        raise ParseError("instance document must be an object")
    if "exponents" not in doc:
        raise ParseError("missing field 'exponents'")
    rows = doc["exponents"]
    if not isinstance(rows, list) or not rows or not all(isinstance(r, list) for r in rows):
        raise ParseError("'exponents' must be a non-empty list of rows")
    try:
        exps = tuple(tuple(to_fraction(x) for x in row) for row in rows)
        coeffs = doc.get("coefficients")
        if coeffs is not None:
            if not isinstance(coeffs, list):
                raise ParseError("'coefficients' must be a list")
            coeffs = tuple(to_fraction(c) for c in coeffs)
    except ValueError as exc:
        if isinstance(exc, ParseError):
            raise
        raise ParseError(str(exc)) from exc
    n = doc.get("n", len(exps))
    if not isinstance(n, int) or isinstance(n, bool) or n != len(exps):
        raise ParseError(f"dimension mismatch: n={n!r} but {len(exps)} exponent rows")
    if "signs" in doc:
        signs = doc["signs"]
        if not isinstance(signs, list):
            raise ParseError("'signs' must be a list")
        parsed = []
        for s in signs:
            if s in ("+", "+1"):
                s = 1
            elif s in ("-", "-1"):
                s = -1
            if isinstance(s, bool) or not isinstance(s, int):
                raise ParseError(f"invalid sign entry {s!r}")
            parsed.append(s)
        signs = tuple(parsed)
    elif coeffs is not None:
        signs = tuple(sign(c) for c in coeffs)
    else:
        raise ParseError("missing field 'signs'")
    return SignedSupport(exps, signs, coeffs)


def instance_to_dict(s: SignedSupport) -> dict[str, Any]:
    doc: dict[str, Any] = {
        "n": s.n,
        "exponents": [[str(x) for x in row] for row in s.exponents],
        "signs": list(s.signs),
    }
    if s.coefficients is not None:
        doc["coefficients"] = [str(c) for c in s.coefficients]
    return doc


# ------------------------------------------------------------ degeneracy


def check_nondegenerate(s: SignedSupport) -> RankReport:
    r = exact.rank(s.lifted())
    return RankReport(r == s.n + 1, r, s.n + 1)


def face_circuit(s: SignedSupport) -> Optional[tuple[int, ...]]:
    """Column indices on a facet of the Newton polytope holding ``n + 1`` or more points.

    Such a facet carries an affinely dependent subset whose own discriminant
    is a wall in the reduced plane that the contour does not trace, so piece
    counts may change inside a chamber. ``None`` when every facet is a simplex.
    """
    cols = s.columns
    n = s.n
    for subset in itertools.combinations(range(n + 3), n):
        basis = exact.kernel([[Fraction(1), *cols[i]] for i in subset])
        if len(basis) != 1:
            continue
        h = basis[0]
        vals = [h[0] + sum(a * b for a, b in zip(h[1:], c)) for c in cols]
        if all(v >= 0 for v in vals) or all(v <= 0 for v in vals):
            on = tuple(i for i, v in enumerate(vals) if v == 0)
            if len(on) > n:
                return on
    return None


# ---------------------------------------------------------- normalization


def _gale_kernel(s: SignedSupport) -> list[tuple[Fraction, Fraction]]:
    """Rows of some Gale dual (a 2-dimensional kernel basis of the lifted matrix)."""
    basis = exact.kernel(s.lifted())
    assert len(basis) == 2
    return list(zip(basis[0], basis[1]))


def _direction_key(d: tuple[Fraction, Fraction]):
    # d lies in the upper half plane (or on the positive x axis); sort by angle in [0, pi)
    x, y = d
    return (0, Fraction(0)) if y == 0 else (1, -x / y)


def _upper(d: tuple[Fraction, Fraction]) -> tuple[Fraction, Fraction]:
    x, y = d
    return (-x, -y) if (y < 0 or (y == 0 and x < 0)) else (x, y)


def admissible_arc(
    rows: Sequence[tuple[Fraction, Fraction]], eps: Sequence[int]
) -> Optional[tuple[int, int]]:
    """The two rows bounding the arc of directions ``lam`` with ``sign(B lam) = +-eps``.

    Works on the projective line, so it is independent of the chosen Gale basis.
    Returns ``None`` when no direction realises the pattern; ties between parallel
    rows go to the lowest index.
    """
    eps = tuple(eps)
    neg = tuple(-e for e in eps)
    if any(b1 == 0 and b2 == 0 for b1, b2 in rows):
        return None
    # the zero line of row b is spanned by (b2, -b1)
    dirs: dict = {}
    for i, (b1, b2) in enumerate(rows):
        d = _upper((b2, -b1))
        key = _direction_key(d)
        dirs.setdefault(key, (d, i))
    ordered = [dirs[k] for k in sorted(dirs)]
    k = len(ordered)
    for j in range(k):
        d0, i0 = ordered[j]
        if j + 1 < k:
            d1, i1 = ordered[j + 1]
            probe = (d0[0] + d1[0], d0[1] + d1[1])
        else:
            d1, i1 = ordered[0]
            probe = (d0[0] - d1[0], d0[1] - d1[1])
        pattern = tuple(sign(b1 * probe[0] + b2 * probe[1]) for b1, b2 in rows)
        if pattern == eps or pattern == neg:
            return (min(i0, i1), max(i0, i1))
    return None


def _affinely_independent(cols: Sequence[Sequence[Fraction]]) -> bool:
    base = cols[0]
    diffs = [[c[i] - base[i] for c in cols[1:]] for i in range(len(base))]
    return exact.det(diffs) != 0 if diffs else True


def _collinear(p, q, r) -> bool:
    d1 = [a - b for a, b in zip(q, p)]
    d2 = [a - b for a, b in zip(r, p)]
    return exact.rank([d1, d2]) < 2


def normalize(s: SignedSupport) -> CanonicalSystem:
    """Reduce a non-degenerate signed support to canonical form.

    Raises :class:`DegenerateSupportError` for degenerate supports, and also
    when ``n >= 2`` and no basis choice keeps ``beta`` and ``gamma`` non-proportional.
    """
    report = check_nondegenerate(s)
    if not report.nondegenerate:
        raise DegenerateSupportError(
            f"degenerate support: rank {report.rank} < {report.required}"
        )
    n = s.n
    cols = s.columns
    arc = admissible_arc(_gale_kernel(s), s.signs)
    if arc is not None:
        tail = list(arc)
        rest = [i for i in range(n + 3) if i not in tail]
        if not _affinely_independent([cols[i] for i in rest]):
            raise DegenerateSupportError("arc rows leave an affinely dependent basis")
    else:
        for subset in itertools.combinations(range(n + 3), n + 1):
            if _affinely_independent([cols[i] for i in subset]):
                rest = list(subset)
                tail = [i for i in range(n + 3) if i not in subset]
                break
        else:  # pragma: no cover - excluded by the rank check
            raise DegenerateSupportError("no affinely independent choice of n+1 columns")

    if n >= 2:
        # beta, gamma proportional <=> origin, beta-point, gamma-point collinear
        pb, pg = cols[tail[0]], cols[tail[1]]
        origin = next((i for i in rest if not _collinear(cols[i], pb, pg)), None)
        if origin is None:
            raise DegenerateSupportError("all support points on one line")
        rest.remove(origin)
        rest.insert(0, origin)

    def frame(order):
        base = cols[order[0]]
        return [[cols[j][i] - base[i] for j in order[1:]] for i in range(n)]

    if exact.det(frame(rest)) < 0:
        if n >= 2:
            rest[1], rest[2] = rest[2], rest[1]
        else:
            rest[0], rest[1] = rest[1], rest[0]
    m = exact.inverse(frame(rest))
    base = cols[rest[0]]
    v = [-x for x in exact.matvec(m, base)]
    perm = tuple(rest + tail)

    def image(c):
        return tuple(a + b for a, b in zip(exact.matvec(m, c), v))

    beta = image(cols[tail[0]])
    gamma = image(cols[tail[1]])
    sys = CanonicalSystem(
        n=n,
        beta=beta,
        gamma=gamma,
        signs=tuple(s.signs[p] for p in perm),
        matrix=tuple(tuple(r) for r in m),
        translation=tuple(v),
        permutation=perm,
    )
    expected = sys.columns()
    for k, p in enumerate(perm):
        if image(cols[p]) != expected[k]:  # pragma: no cover - internal consistency
            raise AssertionError("transform does not reproduce canonical columns")
    return sys


def canonical_support(sys: CanonicalSystem, coefficients=None) -> SignedSupport:
    """The canonical system viewed as a signed support in canonical column order."""
    return SignedSupport.from_columns(sys.columns(), sys.signs, coefficients)
