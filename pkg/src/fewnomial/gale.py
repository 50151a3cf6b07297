"""Canonical Gale dual of a reduced near-circuit and the reduced coefficient point."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Sequence

import numpy as np

from .support import CanonicalSystem


class GaleConsistencyError(AssertionError):
    """``A_hat @ B != 0``: signals a bug upstream in normalization."""


@dataclass(frozen=True)
class GaleDual:
    """``(n+3) x 2`` rational matrix in canonical row order ``0, e_1..e_n, beta, gamma``."""

    b: tuple[tuple[Fraction, Fraction], ...]

    @property
    def n(self) -> int:
        return len(self.b) - 3

    def as_float(self) -> np.ndarray:
        return np.array([[float(x), float(y)] for x, y in self.b])

    def column_sums(self) -> tuple[Fraction, Fraction]:
        return (sum(r[0] for r in self.b), sum(r[1] for r in self.b))


class ReducedPoint(NamedTuple):
    y1: float
    y2: float


def gale_dual(sys: CanonicalSystem) -> GaleDual:
    one = Fraction(1)
    rows = [(one - sum(sys.beta), one - sum(sys.gamma))]
    rows += list(zip(sys.beta, sys.gamma))
    rows += [(-one, Fraction(0)), (Fraction(0), -one)]
    g = GaleDual(tuple(rows))
    residual = lifted_product(sys.lifted(), g)
    if any(x != 0 for row in residual for x in row):
        raise GaleConsistencyError(f"A_hat B = {residual}")
    return g


def lifted_product(a_hat: Sequence[Sequence[Fraction]], g: GaleDual) -> list[list[Fraction]]:
    """``A_hat @ B`` in exact arithmetic."""
    return [
        [sum((a * r[j] for a, r in zip(row, g.b)), Fraction(0)) for j in range(2)]
        for row in a_hat
    ]


def reduced_point(g: GaleDual, c: Sequence) -> ReducedPoint:
    """``B^T Log|c|`` for a coefficient vector in canonical order."""
    if len(c) != len(g.b):
        raise ValueError(f"expected {len(g.b)} coefficients, got {len(c)}")
    if any(x == 0 for x in c):
        raise ValueError("zero coefficient")
    logs = [_log_abs(x) for x in c]
    y1 = math.fsum(float(r[0]) * L for r, L in zip(g.b, logs))
    y2 = math.fsum(float(r[1]) * L for r, L in zip(g.b, logs))
    return ReducedPoint(y1, y2)


def _log_abs(x) -> float:
    if isinstance(x, Fraction):
        # exact for huge numerators / denominators
        return math.log(abs(x.numerator)) - math.log(x.denominator)
    return math.log(abs(x))


def canonical_coefficients(sys: CanonicalSystem, point: Sequence[float]) -> list[float]:
    """Coefficients of the reduced form whose reduced point is ``point``."""
    c1, c2 = point
    s = sys.signs
    return [float(x) for x in s[:-2]] + [s[-2] * math.exp(-c1), s[-1] * math.exp(-c2)]
