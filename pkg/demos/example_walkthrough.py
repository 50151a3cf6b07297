"""Walk the five-term example of ``data/ex18.json`` through every stage.

Run from the repository root: ``python demos/example_walkthrough.py [out.svg]``.
"""

from __future__ import annotations

import math
import sys
from pathlib import Path

from fewnomial import arrangement as arr
from fewnomial import contour as ct
from fewnomial import morse
from fewnomial.counter import analyze, theorem_bound
from fewnomial.gale import gale_dual, reduced_point
from fewnomial.oracle import ExpSum, count_components
from fewnomial.support import normalize, parse_instance

DATA = Path(__file__).resolve().parent.parent / "data"


def main(svg_path=None):
    inst = parse_instance((DATA / "ex18.json").read_text())
    print("columns", [tuple(str(x) for x in c) for c in inst.columns], "signs", inst.signs)

    sys_ = normalize(inst)
    print("canonical beta", [str(b) for b in sys_.beta], "gamma", [str(g) for g in sys_.gamma])

    g = gale_dual(sys_)
    print("Gale rows", [(str(a), str(b)) for a, b in g.b])
    point = reduced_point(g, sys_.permute(inst.coefficients))
    print(f"reduced coefficient point ({point[0]:.6f}, {point[1]:.6f})")

    dom = ct.parameter_domain(g, sys_.signs)
    print("parameter interval", dom)
    num = ct.cusp_numerator(g)
    print("cusp numerator, low degree first:", [str(c) for c in num])
    cusps = ct.find_cusps(g, dom)
    for c in cusps:
        print(f"  cusp mu={c.mu:.12f} at ({c.point[0]:.4f}, {c.point[1]:.4f})")
    print("  closed form (7 -+ 3 sqrt 5)/2 =", (7 - 3 * math.sqrt(5)) / 2, (7 + 3 * math.sqrt(5)) / 2)

    contour = ct.trace_contour(g, dom, cusps, extra_points=[point])
    cmap = arr.build_arrangement(contour)
    print(f"{len(contour.segments)} segments, {len(cmap.faces)} chambers")
    for f in cmap.faces:
        print(f"  chamber {f.id}: depth {f.depth}, {'inner' if f.bounded else 'outer'}")
    print("coefficient point lies in chamber", arr.locate(cmap, point))

    mrep = morse.segment_signatures(sys_, g, contour)
    for s in mrep.segments:
        print(f"  segment {s.segment}: Morse index {s.morse_index}, index set {sorted(s.index_set)}")

    m = contour.multiplicity
    print("certified bound from the cusp count:", theorem_bound(m, dom.side()))
    res = count_components(ExpSum.canonical(sys_, *point))
    print(f"grid oracle: {res.count} pieces, {res.bounded} bounded")

    report = analyze(inst)
    print("full report: bound", report.certified_bound, "flags", report.flags)
    if svg_path:
        Path(svg_path).write_text(ct.contour_svg(contour))
        print("wrote", svg_path)


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else None)
