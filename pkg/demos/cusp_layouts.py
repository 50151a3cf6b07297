"""Contours with many cusps: chambers, depths and the bound for each cusp count.

The systems come from :func:`fewnomial.randinst.many_cusp_system`, which
prescribes the cusp parameters on ``mu > 0``.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from fewnomial.config import RunConfig
from fewnomial.counter import analyze
from fewnomial.randinst import many_cusp_system
from fewnomial.support import SignedSupport


def build(n, m, seed=0):
    rng = np.random.default_rng([n, m, seed])
    while (sys_ := many_cusp_system(rng, n, m)) is None:
        pass
    cols = [tuple(Fraction(x) for x in c) for c in sys_.columns()]
    return SignedSupport.from_columns(cols, list(sys_.signs))


def main():
    for n, m in [(2, 2), (4, 2), (4, 4), (6, 4), (6, 6)]:
        r = analyze(build(n, m), RunConfig(oracle=False))
        depths = sorted(c["depth"] for c in r.data["chambers"])
        relevant = sum(s["transition_relevant"] for s in r.data["segments"])
        print(
            f"n={n} m={r.m}: {len(depths)} chambers, depths {depths}, "
            f"{relevant}/{len(r.data['segments'])} transition-relevant segments, "
            f"layout {r.data['cusp_layout']}, bound {r.certified_bound} ({r.data['theorem_case']})"
        )


if __name__ == "__main__":
    main()
