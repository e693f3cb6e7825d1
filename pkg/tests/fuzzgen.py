"""Deterministic corpus of valid k-simple ordered diagrams.

Exactly 100 diagrams: 34 with k=1, 33 with k=2, 33 with k=3, each built
as an unordered diagram plus matching d-vectors and then ordered by the
synthesizer.  All are stationary, since only a repeating block lets the
extreme-path count be certified rather than left Unknown; half present
the block once, half twice, which routes the synthesizer through both
its level-2 layouts.  Multiplicities stay small so depth-6 cylinder
graphs hold a few thousand nodes at most.  Everything is driven by one
seeded RNG, so the corpus is identical on every run.

Shape per k (one vertex per minimal class, listed before the rest):
  k=1: remainder w1 with a zero d-vector; w1 needs two class-1 edges at
       every level so both fiber ends can anchor there.
  k=2: remainder w1, w2 carrying the two-cycle Y1->Y2, Y2->Y1.
  k=3: remainder w1..w4 carrying Y1->Y2, Y2->Y1, Y2->Y3, Y3->Y2; each
       w draws class edges only from the two classes its walk visits,
       and the remainder block splits into two 2x2 blocks so composite
       multiplicities still avoid 1.
"""

from __future__ import annotations

import json
import random

from bratteli.diagram import parse_diagram
from bratteli.realize import parse_dvectors, synthesize_order

SEED = 1257
COUNT = 100

# per remainder vertex: (d-vector over Y1..Yk, classes its walk visits)
_SHAPES = {
    1: [((0,), (1,))],
    2: [((1, -1), (1, 2)),
        ((-1, 1), (1, 2))],
    3: [((1, -1, 0), (1, 2)),
        ((-1, 1, 0), (1, 2)),
        ((0, 1, -1), (2, 3)),
        ((0, -1, 1), (2, 3))],
}

# remainder-to-remainder multiplicity rows, scaled by b >= 1; every row
# satisfies sum_u row[u] * d(u) = d(w) since paired columns cancel
_VO_ROWS = {
    1: lambda b: [(b + 1,)],
    2: lambda b: [(b + 1, b), (b, b + 1)],
    3: lambda b: [(b + 1, b, 0, 0), (b, b + 1, 0, 0),
                  (0, 0, b + 1, b), (0, 0, b, b + 1)],
}


def _level_doc(k, ids, labels):
    return [{"id": v, "class": "other" if labels[v] == 0
             else {"minimal": labels[v]}} for v in ids]


def _edges(ids, fiber_of):
    out = []
    for v in ids:
        out.extend({"source": s, "range": v} for s in fiber_of[v])
    return out


def build_one(k, repeats, rng):
    """One unordered stationary diagram document plus its d-vectors."""
    ys = ["y%d" % i for i in range(1, k + 1)]
    ws = ["w%d" % j for j in range(1, len(_SHAPES[k]) + 1)]
    ids = ys + ws
    labels = {v: i + 1 for i, v in enumerate(ys)}
    labels.update({w: 0 for w in ws})

    levels = [{"vertices": _level_doc(k, ids, labels),
               "edges": [{"source": "root", "range": v} for v in ids]}]
    fiber_of = {}
    b = rng.choice((1, 2))
    vo_rows = _VO_ROWS[k](b)
    for y in ys:
        fiber_of[y] = [y] * rng.choice((2, 3))
    for row, w in zip(vo_rows, ws):
        dvec, visits = _SHAPES[k][ws.index(w)]
        fiber = []
        for i in visits:
            # two anchors when both ends sit in the same class
            lo = 2 if len(visits) == 1 else 1
            fiber.extend([ys[i - 1]] * (lo + rng.choice((0, 1))))
        for mult, u in zip(row, ws):
            fiber.extend([u] * mult)
        fiber_of[w] = fiber
    block = {"vertices": _level_doc(k, ids, labels),
             "edges": _edges(ids, fiber_of)}
    for _ in range(repeats):
        levels.append(json.loads(json.dumps(block)))

    diagram = {"kind": "bratteli", "k": k, "stationary": True,
               "levels": levels}
    dvdoc = {"d": [{"level": 2,
                    "values": {w: list(_SHAPES[k][j][0])
                               for j, w in enumerate(ws)}}],
             "stationary": True}
    return diagram, dvdoc


def corpus():
    """The 100 ordered diagrams, as (name, diagram, dvectors) triples."""
    rng = random.Random(SEED)
    out = []
    plan = [(1, 34), (2, 33), (3, 33)]
    for k, count in plan:
        for j in range(count):
            repeats = 1 + j % 2
            raw, dvdoc = build_one(k, repeats, rng)
            d = parse_diagram(json.dumps(raw))
            dv = parse_dvectors(dvdoc)
            ordered = synthesize_order(d, dv)
            name = "k%d-%02d-x%d" % (k, j, repeats)
            out.append((name, ordered, dv))
    assert len(out) == COUNT
    return out


if __name__ == "__main__":
    for name, d, dv in corpus():
        print(name, d.k, d.depth, sum(d.path_counts(2)))
