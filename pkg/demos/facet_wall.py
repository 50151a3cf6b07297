"""A support with three points on one edge of its Newton polygon.

In ``x = e^u, y = e^v`` the sum is ``-1 + x + y - a x y + b / x^2``. Solving
for ``y`` shows two pieces when ``b < 4/27`` and one when ``b > 4/27``: the
edge trinomial ``-1 + x + b / x^2`` acquires a double root there. That wall
is not on the traced contour, so the count changes inside a single chamber
while staying within the certified bound.
"""

from __future__ import annotations

import math

from fewnomial.config import RunConfig
from fewnomial.counter import analyze
from fewnomial.oracle import ExpSum, count_components
from fewnomial.support import SignedSupport, face_circuit

COLUMNS = [(0, 0), (1, 0), (0, 1), (1, 1), (-2, 0)]
SIGNS = [-1, 1, 1, -1, 1]


def main():
    inst = SignedSupport.from_columns(COLUMNS, SIGNS)
    print("columns on one facet:", face_circuit(inst))
    r = analyze(inst, RunConfig(oracle=False))
    print(f"m={r.m}, chambers={len(r.data['chambers'])}, certified bound {r.certified_bound}")
    wall = math.log(27 / 4)  # b = exp(-c2) = 4/27
    for c2 in (wall - 1.0, wall - 0.1, wall + 0.1, wall + 1.0):
        f = ExpSum.canonical(r.system, 0.5, c2)
        print(f"  c2={c2:+.3f} (b={math.exp(-c2):.4f}): piece count {count_components(f).count}")


if __name__ == "__main__":
    main()
