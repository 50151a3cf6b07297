"""Exact rational linear algebra on lists of :class:`fractions.Fraction`."""

from __future__ import annotations

import numbers
from fractions import Fraction
from typing import Sequence

Matrix = list[list[Fraction]]


def to_fraction(value) -> Fraction:
    """Parse an int, a rational string like ``"6/5"`` or a decimal, exactly.

    Floats are accepted through their shortest repr so that ``1.2`` means 6/5.
    Raises ``ValueError`` for anything that is not a finite rational.
    """
    if isinstance(value, bool):
        raise ValueError(f"not a rational: {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, numbers.Integral):
        return Fraction(int(value))
    if isinstance(value, float):
        value = repr(value)
    if isinstance(value, str):
        text = value.strip()
        if text.lower() in {"nan", "inf", "+inf", "-inf", "infinity", "-infinity"}:
            raise ValueError(f"not a rational: {value!r}")
        try:
            return Fraction(text)
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"not a rational: {value!r}") from exc
    raise ValueError(f"not a rational: {value!r}")


def copy(m: Sequence[Sequence[Fraction]]) -> Matrix:
    return [list(row) for row in m]


def rref(m: Sequence[Sequence[Fraction]]) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form and the pivot columns."""
    a = copy(m)
    rows = len(a)
    cols = len(a[0]) if rows else 0
    pivots = []
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        p = a[r][c]
        a[r] = [x / p for x in a[r]]
        for i in range(rows):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return a, pivots


def rank(m: Sequence[Sequence[Fraction]]) -> int:
    if not m:
        return 0
    return len(rref(m)[1])


def kernel(m: Sequence[Sequence[Fraction]]) -> list[list[Fraction]]:
    """Basis of the right null space, one vector per free column."""
    cols = len(m[0])
    a, pivots = rref(m)
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * cols
        v[f] = Fraction(1)
        for r, p in enumerate(pivots):
            v[p] = -a[r][f]
        basis.append(v)
    return basis


def det(m: Sequence[Sequence[Fraction]]) -> Fraction:
    a = copy(m)
    n = len(a)
    sign = 1
    result = Fraction(1)
    for c in range(n):
        piv = next((i for i in range(c, n) if a[i][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            sign = -sign
        p = a[c][c]
        result *= p
        for i in range(c + 1, n):
            if a[i][c] != 0:
                f = a[i][c] / p
                a[i] = [x - f * y for x, y in zip(a[i], a[c])]
    return sign * result


def inverse(m: Sequence[Sequence[Fraction]]) -> Matrix:
    n = len(m)
    aug = [list(row) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(m)]
    a, pivots = rref(aug)
    if pivots[:n] != list(range(n)):
        raise ZeroDivisionError("singular matrix")
    return [row[n:] for row in a]


def matvec(m: Sequence[Sequence[Fraction]], v: Sequence[Fraction]) -> list[Fraction]:
    return [sum((x * y for x, y in zip(row, v)), Fraction(0)) for row in m]


def matmul(a: Sequence[Sequence[Fraction]], b: Sequence[Sequence[Fraction]]) -> Matrix:
    bt = list(zip(*b))
    return [[sum((x * y for x, y in zip(row, col)), Fraction(0)) for col in bt] for row in a]


def sign(x) -> int:
    return (x > 0) - (x < 0)
