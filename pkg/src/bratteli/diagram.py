"""Leveled multigraph model: levels of vertices, edge fibers, incidence matrices.

A diagram has explicit levels 1..depth plus an implicit root level 0 with a
single vertex.  Level-1 edges carry source "root".  When ``stationary`` is
set, the last explicit level's edge block and labels repeat forever, so the
last two explicit levels must share one vertex list.

Vertices are labeled: component label i in 1..k marks the i-th minimal
sub-diagram V_i, label 0 marks the complementary set V_o.  Edge listing order
inside a common-range fiber is meaningful (it encodes the fiber order used by
the ordered machinery) and is preserved by every construction here.
"""

from __future__ import annotations

import json

from ._report import (DiagramError, FAILS, HOLDS, UNKNOWN, ValidationReport,
                      worst)

OTHER = 0
ROOT = "root"

DEFAULT_BUDGET = 10

# guards the matrix-power cycle searches against pathological blow-up
_MAX_POWER_ITER = 10000


class Level:
    """One explicit level: vertex ids in listing order, labels, edge list."""

    __slots__ = ("ids", "index", "labels", "edges", "fibers")

    def __init__(self, ids, labels, edges):
        self.ids = tuple(ids)
        self.index = {v: i for i, v in enumerate(self.ids)}
        self.labels = dict(labels)
        self.edges = tuple((s, r) for (s, r) in edges)
        fibers = {v: [] for v in self.ids}
        for s, r in self.edges:
            fibers[r].append(s)
        self.fibers = {v: tuple(srcs) for v, srcs in fibers.items()}


class Diagram:
    def __init__(self, levels, k, stationary):
        self.levels = list(levels)
        self.k = k
        self.stationary = stationary
        if not self.levels:
            raise DiagramError("diagram needs at least one level")
        if stationary and len(self.levels) < 2:
            raise DiagramError("stationary presentation needs two explicit levels")
        if stationary:
            a, b = self.levels[-2], self.levels[-1]
            if a.ids != b.ids or a.labels != b.labels:
                raise DiagramError(
                    "stationary block is not square: last two levels differ")

    @property
    def depth(self):
        return len(self.levels)

    def has_level(self, n):
        return n >= 1 and (self.stationary or n <= self.depth)

    def level(self, n):
        if n < 1:
            raise DiagramError("level index %d out of range" % n)
        if n <= self.depth:
            return self.levels[n - 1]
        if self.stationary:
            return self.levels[-1]
        raise DiagramError("level %d beyond non-stationary presentation" % n)

    def vertices(self, n):
        return self.level(n).ids

    def label(self, n, v):
        return self.level(n).labels[v]

    def component(self, n, i):
        """Vertices of V_i at level n, listing order."""
        lev = self.level(n)
        return tuple(v for v in lev.ids if lev.labels[v] == i)

    def others(self, n):
        lev = self.level(n)
        return tuple(v for v in lev.ids if lev.labels[v] == OTHER)

    def fiber(self, n, v):
        """Ordered source ids of the edges into v at level n."""
        return self.level(n).fibers[v]

    def root_vector(self):
        lev = self.levels[0]
        return [len(lev.fibers[v]) for v in lev.ids]

    def incidence(self, n):
        """Integer matrix of the transition level n -> n+1.

        Rows follow the listing order of level n+1, columns of level n.
        """
        lo = self.level(n)
        hi = self.level(n + 1)
        mat = [[0] * len(lo.ids) for _ in hi.ids]
        for ri, v in enumerate(hi.ids):
            for s in hi.fibers[v]:
                if s == ROOT:
                    continue  # synthetic connection, carries no multiplicity
                mat[ri][lo.index[s]] += 1
        return mat

    def path_counts(self, n):
        """Root-to-vertex path counts at level n (exact integers)."""
        vec = self.root_vector()
        for j in range(1, n):
            mat = self.incidence(j)
            vec = [sum(row[i] * vec[i] for i in range(len(vec))) for row in mat]
        return vec

    def to_json(self):
        levels = []
        for lev in self.levels:
            vs = []
            for v in lev.ids:
                lab = lev.labels[v]
                cls = "other" if lab == OTHER else {"minimal": lab}
                vs.append({"id": v, "class": cls})
            es = [{"source": s, "range": r} for (s, r) in lev.edges]
            levels.append({"vertices": vs, "edges": es})
        return {"kind": "bratteli", "k": self.k, "stationary": self.stationary,
                "levels": levels}

    def to_text(self):
        head = "k=%d, %s, %d explicit levels" % (
            self.k, "stationary" if self.stationary else "non-stationary",
            self.depth)
        lines = [head]
        for n in range(1, self.depth + 1):
            lev = self.levels[n - 1]
            tags = ["%s(Y%d)" % (v, lev.labels[v]) if lev.labels[v] else v
                    for v in lev.ids]
            lines.append("level %d: %s" % (n, "  ".join(tags)))
            lines.extend("  %s <- %s" % (v, " ".join(lev.fibers[v]))
                         for v in lev.ids)
        return "\n".join(lines) + "\n"


def parse_diagram(text):
    """Parse and structurally check the diagram JSON format."""
    try:
        doc = json.loads(text)
    except ValueError as exc:
        raise DiagramError("invalid JSON: %s" % exc)
    if not isinstance(doc, dict) or doc.get("kind") != "bratteli":
        raise DiagramError('top-level object must have "kind": "bratteli"')
    k = doc.get("k")
    if not isinstance(k, int) or k < 1:
        raise DiagramError('"k" must be a positive integer', "k")
    stationary = doc.get("stationary")
    if not isinstance(stationary, bool):
        raise DiagramError('"stationary" must be a boolean', "stationary")
    raw_levels = doc.get("levels")
    if not isinstance(raw_levels, list) or not raw_levels:
        raise DiagramError('"levels" must be a non-empty array', "levels")

    levels = []
    prev_ids = None
    for li, raw in enumerate(raw_levels):
        loc = "levels[%d]" % li
        if not isinstance(raw, dict):
            raise DiagramError("level must be an object", loc)
        rverts = raw.get("vertices")
        if not isinstance(rverts, list) or not rverts:
            raise DiagramError("vertices must be a non-empty array", loc)
        ids, labels = [], {}
        for vi, rv in enumerate(rverts):
            vloc = "%s.vertices[%d]" % (loc, vi)
            if not isinstance(rv, dict) or not isinstance(rv.get("id"), str):
                raise DiagramError('vertex needs a string "id"', vloc)
            vid = rv["id"]
            if vid in labels:
                raise DiagramError("duplicate vertex id %r" % vid, vloc)
            if vid == ROOT:
                raise DiagramError('"root" is reserved', vloc)
            cls = rv.get("class")
            if cls == "other":
                lab = OTHER
            elif isinstance(cls, dict) and isinstance(cls.get("minimal"), int):
                lab = cls["minimal"]
                if not 1 <= lab <= k:
                    raise DiagramError(
                        "minimal component %d outside 1..%d" % (lab, k), vloc)
            else:
                raise DiagramError(
                    'vertex class must be "other" or {"minimal": i}', vloc)
            ids.append(vid)
            labels[vid] = lab
        redges = raw.get("edges")
        if not isinstance(redges, list):
            raise DiagramError("edges must be an array", loc)
        idset = set(ids)
        edges = []
        for ei, re in enumerate(redges):
            eloc = "%s.edges[%d]" % (loc, ei)
            if (not isinstance(re, dict) or not isinstance(re.get("source"), str)
                    or not isinstance(re.get("range"), str)):
                raise DiagramError('edge needs string "source" and "range"', eloc)
            s, r = re["source"], re["range"]
            if r not in idset:
                raise DiagramError("dangling range id %r" % r, eloc)
            if li == 0:
                if s != ROOT:
                    raise DiagramError('level-1 edges must use source "root"', eloc)
            else:
                if s not in prev_ids:
                    raise DiagramError("dangling source id %r" % s, eloc)
            edges.append((s, r))
        lev = Level(ids, labels, edges)
        for v in ids:
            if not lev.fibers[v]:
                raise DiagramError(
                    "r not surjective: vertex %r has no incoming edge" % v,
                    "%s.vertices" % loc)
        levels.append(lev)
        prev_ids = idset

    # every vertex must keep flowing forward while deeper levels exist
    for li in range(len(levels) - 1):
        sources = {s for (s, _) in levels[li + 1].edges}
        for v in levels[li].ids:
            if v not in sources:
                raise DiagramError(
                    "vertex %r at level %d has no outgoing edge" % (v, li + 1),
                    "levels[%d]" % li)
    if stationary:
        if len(levels) < 2:
            raise DiagramError("stationary presentation needs two explicit levels")
        a, b = levels[-2], levels[-1]
        if a.ids != b.ids or a.labels != b.labels:
            raise DiagramError(
                "non-square stationary block: last two vertex lists differ",
                "levels[%d]" % (len(levels) - 1))
        sources = {s for (s, _) in b.edges}
        for v in b.ids:
            if v not in sources:
                raise DiagramError(
                    "vertex %r starves in the repeated block" % v,
                    "levels[%d]" % (len(levels) - 1))
    return Diagram(levels, k, stationary)


def load_diagram(path):
    with open(path, "r", encoding="utf-8") as fh:
        return parse_diagram(fh.read())


# --- boolean / capped matrix helpers (exact semirings) ---

def _sub_block(mat, rows, cols):
    return [[mat[r][c] for c in cols] for r in rows]

def _bool(mat):
    return tuple(tuple(1 if e else 0 for e in row) for row in mat)

def _bool_mul(a, b):
    # rows of a, cols of b
    n, m, p = len(a), len(b), len(b[0]) if b else 0
    out = []
    for i in range(n):
        row = []
        arow = a[i]
        for j in range(p):
            v = 0
            for t in range(m):
                if arow[t] and b[t][j]:
                    v = 1
                    break
            row.append(v)
        out.append(tuple(row))
    return tuple(out)

def _cap2(mat):
    return tuple(tuple(min(2, e) for e in row) for row in mat)

def _cap2_mul(a, b):
    # saturating at 2 keeps the {0, 1, >=2} abstraction exact
    n, m, p = len(a), len(b), len(b[0]) if b else 0
    out = []
    for i in range(n):
        row = []
        arow = a[i]
        for j in range(p):
            v = 0
            for t in range(m):
                v += arow[t] * b[t][j]
                if v >= 2:
                    v = 2
                    break
            row.append(v)
        out.append(tuple(row))
    return tuple(out)


def _component_indices(d, n, i):
    lev = d.level(n)
    return [lev.index[v] for v in lev.ids if lev.labels[v] == i]

def _other_indices(d, n):
    lev = d.level(n)
    return [lev.index[v] for v in lev.ids if lev.labels[v] == OTHER]


def _search_products(d, start, pick_rows, pick_cols, mul, prep, done, budget):
    """Walk products M = B(m-1)...B(start) of label-restricted blocks.

    Returns ("Holds", m) at the first m with done(M), ("Fails", m) when a
    stationary state cycle rules it out, ("Unknown", m) past the budget or
    presentation.  pick_rows/pick_cols select the block of incidence(j).
    """
    state = None
    seen = {}
    m = start
    steps = 0
    while True:
        nxt = m + 1
        if not d.has_level(nxt):
            return (UNKNOWN, m)
        block = prep(_sub_block(d.incidence(m),
                                pick_rows(d, nxt), pick_cols(d, m)))
        state = block if state is None else mul(block, state)
        m = nxt
        steps += 1
        if done(state):
            return (HOLDS, m)
        in_tail = m >= d.depth
        if d.stationary and in_tail:
            if state in seen:
                return (FAILS, seen[state])
            seen[state] = m
        if not d.stationary and m >= d.depth:
            return (UNKNOWN, m)
        if steps >= max(budget, 64) and not (d.stationary and in_tail):
            return (UNKNOWN, m)
        if steps >= _MAX_POWER_ITER:
            return (UNKNOWN, m)


def _k_simple_check(d, depth_budget, rep):
    """Add the k_simple verdict to rep and return it."""
    k = d.k
    exact_bad = None

    # labels partition with non-empty components, V_o non-empty when k >= 2
    for n in range(1, d.depth + 1):
        for i in range(1, k + 1):
            if not d.component(n, i):
                exact_bad = {"level": n, "missing_component": i}
                rep.note("component %d empty at level %d" % (i, n))
                break
        if exact_bad:
            break
        if k >= 2 and not d.others(n):
            exact_bad = {"level": n, "empty": "V_o"}
            rep.note("V_o empty at level %d with k=%d: diagram decomposes"
                     % (n, k))
            break

    # closure: edges into a component vertex stay inside the component
    if exact_bad is None:
        for n in range(1, d.depth + 1):
            lev = d.level(n)
            if n == 1:
                continue
            below = d.level(n - 1)
            for v in lev.ids:
                i = lev.labels[v]
                if i == OTHER:
                    continue
                for s in lev.fibers[v]:
                    if below.labels[s] != i:
                        exact_bad = {"level": n, "edge": [s, v],
                                     "component": i}
                        rep.note("edge %r -> %r enters component %d from "
                                 "outside at level %d" % (s, v, i, n))
                        break
                if exact_bad:
                    break
            if exact_bad:
                break

    def all_positive(mat):
        return all(all(e for e in row) for row in mat)

    # eventual full connectivity inside each component; stationary tails
    # repeat the level-depth analysis, so starts beyond depth add nothing
    conn = HOLDS
    conn_witness = []
    if exact_bad is None and not d.stationary and d.depth < 2:
        conn = UNKNOWN
        rep.note("single presented level: connectivity unverifiable")
    if exact_bad is None and conn == HOLDS:
        starts = range(1, d.depth + 1) if d.stationary else range(1, d.depth)
        for i in range(1, k + 1):
            for n in starts:
                verdict, m = _search_products(
                    d, n,
                    lambda dd, j, i=i: _component_indices(dd, j, i),
                    lambda dd, j, i=i: _component_indices(dd, j, i),
                    _bool_mul, _bool, all_positive, depth_budget)
                if verdict != HOLDS:
                    conn = worst([conn, verdict])
                    conn_witness.append({"component": i, "level": n,
                                         "stalled_at": m})
                    if verdict == FAILS:
                        rep.note("component %d never fully connected from "
                                 "level %d" % (i, n))

    if exact_bad is not None:
        rep.add("k_simple", FAILS, exact_bad)
    elif conn == HOLDS:
        rep.add("k_simple", HOLDS, {"checked_to": d.depth})
    else:
        rep.add("k_simple", conn, conn_witness)
    return rep.verdict("k_simple")


def validate_unordered(d, depth_budget=DEFAULT_BUDGET):
    """Check the k-simple axioms, their strong variant, and non-elementarity.

    Per-level facts (component closure, non-empty classes) are exact.  The
    eventual-connectivity conditions are decided exactly for stationary
    diagrams via matrix-power cycle detection and reported Unknown past the
    budget otherwise.
    """
    rep = ValidationReport()
    _k_simple_check(d, depth_budget, rep)

    # strong variant: deep V_o vertices see all of V_o or none of it
    def rows_all_or_none(mat):
        return all(all(row) or not any(row) for row in mat)

    strong = rep.verdict("k_simple")
    strong_witness = None
    if strong == HOLDS:
        starts = range(1, d.depth + 1) if d.stationary else range(1, d.depth)
        for n in starts:
            if not d.others(n):
                continue  # nothing to connect to
            verdict, m = _search_products(
                d, n, lambda dd, j: _other_indices(dd, j),
                lambda dd, j: _other_indices(dd, j),
                _bool_mul, _bool, rows_all_or_none, depth_budget)
            if verdict != HOLDS:
                strong = worst([strong, verdict])
                strong_witness = {"level": n, "stalled_at": m}
                if verdict == FAILS:
                    rep.note("some deep V_o vertex stays partially connected "
                             "to V_o^%d forever" % n)
                break
    rep.add("strongly_k_simple", strong, strong_witness)

    # non-elementary: deep V_o multiplicities are eventually 0 or >= 2
    def no_single(mat):
        return all(all(e != 1 for e in row) for row in mat)

    nonel = HOLDS
    nonel_witness = None
    if not d.stationary and d.depth < 2 and any(
            d.others(n) for n in range(1, d.depth + 1)):
        nonel = UNKNOWN
    starts = range(1, d.depth + 1) if d.stationary else range(1, d.depth)
    for n in starts:
        if not d.others(n):
            continue
        verdict, m = _search_products(
            d, n, lambda dd, j: _other_indices(dd, j),
            lambda dd, j: _other_indices(dd, j),
            _cap2_mul, _cap2, no_single, depth_budget)
        if verdict != HOLDS:
            nonel = worst([nonel, verdict])
            nonel_witness = {"level": n, "stalled_at": m}
            if verdict == FAILS:
                rep.note("multiplicity exactly 1 persists between V_o levels "
                         "from level %d" % n)
            break
    rep.add("non_elementary", nonel, nonel_witness)
    return rep


def telescope(d, levels):
    """Contract to a subsequence of levels; composite fibers keep lex order.

    ``levels`` starts at 0 (the root).  Composite edges between retained
    levels are listed most-significant-last: two composite paths compare by
    their deepest differing edge, matching the induced fiber order.
    """
    if not levels or levels[0] != 0:
        raise DiagramError("telescoping level list must start at 0")
    for a, b in zip(levels, levels[1:]):
        if b <= a:
            raise DiagramError("telescoping levels must strictly increase")
    if len(levels) < 2:
        raise DiagramError("telescoping needs at least one retained level")
    last = levels[-1]
    if not d.has_level(last):
        raise DiagramError("level %d beyond presentation" % last)

    def comp_sources(a, b, v):
        # ordered sources at level a of all paths from level a into v at b
        if b == a + 1:
            return list(d.fiber(b, v))
        out = []
        for u in d.fiber(b, v):
            out.extend(comp_sources(a, b - 1, u))
        return out

    new_levels = []
    for j in range(1, len(levels)):
        a, b = levels[j - 1], levels[j]
        lev = d.level(b)
        edges = []
        for v in lev.ids:
            for s in comp_sources(a, b, v):
                edges.append((s, v))
        new_levels.append(Level(lev.ids, lev.labels, edges))

    gaps = {b - a for a, b in zip(levels, levels[1:])}
    stat = (d.stationary and len(gaps) == 1 and len(new_levels) >= 2
            and new_levels[-1].ids == new_levels[-2].ids
            and new_levels[-1].labels == new_levels[-2].labels)
    return Diagram(new_levels, d.k, stat)


class IdealPart:
    """Restriction of a diagram to its V_o vertices and the edges among them."""

    def __init__(self, diagram, trivial_from, synthetic_roots):
        self.diagram = diagram         # None when the ideal is trivial
        self.trivial_from = trivial_from
        self.synthetic_roots = tuple(synthetic_roots)

    @property
    def trivial(self):
        return self.diagram is None


def ideal_subdiagram(d):
    """Extract the sub-diagram spanned by V_o.

    Vertices whose whole fiber is dropped get a synthetic root edge so the
    direct limit over the restricted incidences stays well-posed; they are
    listed in ``synthetic_roots``.
    """
    for n in range(1, d.depth + 1):
        if not d.others(n):
            return IdealPart(None, n, [])
    synthetic = []
    new_levels = []
    for n in range(1, d.depth + 1):
        lev = d.level(n)
        keep = [v for v in lev.ids if lev.labels[v] == OTHER]
        keepset = set(keep)
        edges = []
        for v in keep:
            srcs = [s for s in lev.fibers[v]
                    if (n == 1 and s == ROOT) or (n > 1 and s in prev_keep)]
            if not srcs:
                synthetic.append((n, v))
                srcs = [ROOT]
            for s in srcs:
                edges.append((s, v))
        new_levels.append(Level(keep, {v: OTHER for v in keep}, edges))
        prev_keep = keepset
    ideal = Diagram(new_levels, 0, d.stationary)
    return IdealPart(ideal, None, synthetic)


def _strong_witness_chain(d, depth_budget):
    """Levels 1 = a_0 < a_1 < ... where V_o connectivity is all-or-none."""

    def rows_all_or_none(mat):
        return all(all(row) or not any(row) for row in mat)

    chain = [1]
    # stationary: the witness gap repeats; otherwise walk the presentation
    while True:
        n = chain[-1]
        if d.stationary and len(chain) >= 4:
            break
        if not d.stationary and n >= d.depth:
            break
        if len(chain) > d.depth + 2 * depth_budget + 4:
            break
        if not d.has_level(n + 1):
            break
        if not d.others(n):
            chain.append(n + 1)
            continue
        verdict, m = _search_products(
            d, n, lambda dd, j: _other_indices(dd, j),
            lambda dd, j: _other_indices(dd, j),
            _bool_mul, _bool, rows_all_or_none, depth_budget)
        if verdict != HOLDS:
            break
        chain.append(m)
    return chain


def _offset(ids, taken):
    """Deterministically rename colliding ids with prime marks."""
    out = []
    for v in ids:
        w = v
        while w in taken:
            w = w + "'"
        taken.add(w)
        out.append(w)
    return out


def interpolate_strong(d, depth_budget=DEFAULT_BUDGET):
    """Normalize so every V_o vertex sees the whole previous level.

    If every V_o^{n+1} vertex already connects to all of V^n the diagram is
    returned unchanged.  Otherwise the diagram is telescoped to levels where
    V_o connectivity is all-or-none, each consecutive pair is split by an
    intermediate level (component vertices ride identity edges, connected
    V_o vertices are pulled down as copies), and the result is telescoped to
    the intermediate levels.  Equivalence with the input is verified by
    path-count comparison through the doubled diagram.
    """
    base = validate_unordered(d, depth_budget)
    if base.verdict("k_simple") == FAILS:
        raise DiagramError("interpolation requires a k-simple diagram: %s"
                           % base.witness("k_simple"))

    def already_good(dd):
        for n in range(1, dd.depth):
            mat = dd.incidence(n)
            lev = dd.level(n + 1)
            for ri, v in enumerate(lev.ids):
                if lev.labels[v] == OTHER and not all(mat[ri]):
                    return False
        return True

    if already_good(d):
        return d

    chain = _strong_witness_chain(d, depth_budget)
    if len(chain) < 3:
        raise DiagramError("cannot locate interpolation levels within budget")
    dt = telescope(d, [0] + chain)

    # doubled diagram: V^1, W^1, V^2, W^2, ..., V^D with W^j between j, j+1
    dbl_levels = [dt.level(1)]
    for j in range(1, dt.depth):
        lo, hi = dt.level(j), dt.level(j + 1)
        comps = [v for v in lo.ids if lo.labels[v] != OTHER]
        connected = []
        routed = []
        for v in hi.ids:
            if hi.labels[v] != OTHER:
                continue
            if any(lo.labels[s] == OTHER for s in hi.fibers[v]):
                connected.append(v)
            else:
                routed.append(v)
        if dt.k >= 2 and not connected:
            raise DiagramError(
                "interpolation would empty V_o between levels %d and %d"
                % (j, j + 1))
        taken = set(comps)
        copy_ids = _offset(connected, taken)
        copy_of = dict(zip(connected, copy_ids))
        mid_ids = comps + copy_ids
        mid_labels = {v: lo.labels[v] for v in comps}
        mid_labels.update({c: OTHER for c in copy_ids})
        mid_edges = []
        for w in comps:
            mid_edges.append((w, w))
        for v in connected:
            for s in hi.fibers[v]:
                mid_edges.append((s, copy_of[v]))
        dbl_levels.append(Level(mid_ids, mid_labels, mid_edges))
        out_edges = []
        for v in hi.ids:
            if hi.labels[v] != OTHER or v in routed:
                for s in hi.fibers[v]:
                    out_edges.append((s, v))
            else:
                out_edges.append((copy_of[v], v))
        dbl_levels.append(Level(hi.ids, hi.labels, out_edges))
    doubled = Diagram(dbl_levels, dt.k, False)

    # telescoping the doubled diagram back onto the V levels must give dt
    back = telescope(doubled, [0] + list(range(1, 2 * dt.depth, 2)))
    for lev_a, lev_b in zip(back.levels, dt.levels):
        if lev_a.ids != lev_b.ids or lev_a.edges != lev_b.edges:
            raise DiagramError("interpolation broke path counts")

    out = telescope(doubled, [0] + list(range(2, 2 * dt.depth - 1, 2)))
    if dt.stationary:
        out = promote_stationary(out)
    return out


def promote_stationary(d):
    """Mark a diagram stationary when its last two explicit levels coincide.

    Only call this when the construction that produced d is known to repeat
    its final block; the flag extends the diagram past the presentation.
    """
    if d.stationary or d.depth < 2:
        return d
    a, b = d.levels[-2], d.levels[-1]
    if a.ids == b.ids and a.labels == b.labels and a.edges == b.edges:
        return Diagram(d.levels, d.k, True)
    return d
