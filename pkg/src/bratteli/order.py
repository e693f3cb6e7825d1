"""Order structure: path lex comparison, extreme chains, markers, validation.

Edges sharing a range vertex are ordered by their listing position (the
fiber order).  Finite paths with the same range compare lexicographically
with the deepest differing edge most significant, so a path's sort key is
its rank tuple read deepest first.  The fiber-minimal and fiber-maximal
edges induce backward pointer chains whose level-1 landings define the
markers m_minus and m_plus used by every routing condition below.
"""

from __future__ import annotations

from ._report import (FAILS, HOLDS, UNKNOWN, DiagramError,
                      ValidationReport, worst)
from .diagram import (DEFAULT_BUDGET, OTHER, _k_simple_check,
                      promote_stationary, telescope)

MIN = "min"
MAX = "max"

# level cap when hunting for marker-state repetition in stationary tails
_STATE_CAP = 256


class Path:
    """Finite path from the root; verts[j] is the range at level j+1."""

    __slots__ = ("verts", "ranks")

    def __init__(self, verts, ranks):
        self.verts = tuple(verts)
        self.ranks = tuple(ranks)

    @property
    def depth(self):
        return len(self.ranks)

    @property
    def end(self):
        return self.verts[-1]

    def key(self):
        # deepest rank is the most significant coordinate
        return tuple(reversed(self.ranks))

    def __eq__(self, other):
        return (isinstance(other, Path) and self.verts == other.verts
                and self.ranks == other.ranks)

    def __hash__(self):
        return hash((self.verts, self.ranks))

    def __repr__(self):
        return "Path(%r, %r)" % (self.verts, self.ranks)


def make_path(d, end, ranks):
    """Reconstruct the path into ``end`` selected by per-level fiber ranks."""
    n = len(ranks)
    if end not in d.vertices(n):
        raise DiagramError("no vertex %r at level %d" % (end, n))
    verts = [None] * n
    verts[n - 1] = end
    cur = end
    for lvl in range(n, 0, -1):
        fib = d.fiber(lvl, cur)
        r = ranks[lvl - 1]
        if not 0 <= r < len(fib):
            raise DiagramError("rank %d outside fiber of %r at level %d"
                               % (r, cur, lvl))
        cur = fib[r]
        if lvl >= 2:
            verts[lvl - 2] = cur
    return Path(verts, ranks)


def extreme_path(d, end, depth, kind):
    """The fiber-minimal or fiber-maximal path into ``end``."""
    verts = [None] * depth
    ranks = [None] * depth
    verts[depth - 1] = end
    cur = end
    for lvl in range(depth, 0, -1):
        fib = d.fiber(lvl, cur)
        idx = 0 if kind == MIN else len(fib) - 1
        ranks[lvl - 1] = idx
        cur = fib[idx]
        if lvl >= 2:
            verts[lvl - 2] = cur
    return Path(verts, ranks)


def enumerate_paths(d, end, depth):
    """Yield the paths into ``end`` in ascending lex order."""
    if depth == 1:
        for rank in range(len(d.fiber(1, end))):
            yield Path((end,), (rank,))
        return
    for rank, u in enumerate(d.fiber(depth, end)):
        for p in enumerate_paths(d, u, depth - 1):
            yield Path(p.verts + (end,), p.ranks + (rank,))


def lex_compare(p, q):
    """-1, 0 or 1; only paths with a common range vertex are comparable."""
    if p.depth != q.depth or p.end != q.end:
        raise DiagramError("paths with different ranges are incomparable")
    a, b = p.key(), q.key()
    return (a > b) - (a < b)


def pointer_map(d, n, kind):
    """Source of each vertex's extreme incoming edge at level n."""
    lev = d.level(n)
    idx = 0 if kind == MIN else -1
    return {v: lev.fibers[v][idx] for v in lev.ids}


class ExtremeChains:
    """Judgement on X_min or X_max plus the located z-chain vertices."""

    def __init__(self, kind, verdict, witness, trunks, fixed, stable_to, depth):
        self.kind = kind
        self.verdict = verdict
        self.witness = witness
        self.trunks = trunks          # i -> {level: vertex or None}
        self.fixed = fixed            # i -> tail vertex (stationary only)
        self.stable_to = stable_to    # None means certain at every level
        self._depth = depth

    def vertex(self, i, n):
        if self.fixed is not None and n > self._depth:
            return self.fixed.get(i)
        per = self.trunks.get(i)
        return per.get(n) if per else None

    def certain(self, n):
        return self.stable_to is None or n <= self.stable_to


def extreme_chains(d, kind):
    """Locate the candidate extreme chains and decide |X_kind| = k.

    Stationary diagrams are decided exactly through the pointer map of the
    repeating block: the set of infinite extreme paths corresponds to the
    cycles of that map, so the requirement is one fixed point per component
    and none elsewhere.  Non-stationary diagrams get chain candidates by
    chasing pointers down from the last presented level; a level is certain
    when the chase image inside a component is a single vertex.
    """
    k = d.k
    if d.stationary:
        dim = len(d.vertices(d.depth))
        pi = pointer_map(d, d.depth + 1, kind)
        img = set(pi)
        for _ in range(dim + 1):
            img = {pi[v] for v in img}
        moving = sorted(v for v in img if pi[v] != v)
        if moving:
            return ExtremeChains(kind, FAILS, {"cycle_through": moving},
                                 {}, None, None, d.depth)
        fixed = {}
        for v in img:
            lab = d.label(d.depth, v)
            if lab == OTHER:
                return ExtremeChains(kind, FAILS,
                                     {"extreme_path_through_V_o": v},
                                     {}, None, None, d.depth)
            if lab in fixed:
                return ExtremeChains(
                    kind, FAILS,
                    {"component": lab, "two_chains": sorted([fixed[lab], v])},
                    {}, None, None, d.depth)
            fixed[lab] = v
        if len(fixed) != k:
            missing = [i for i in range(1, k + 1) if i not in fixed]
            return ExtremeChains(kind, FAILS, {"missing_chain": missing},
                                 {}, None, None, d.depth)
        trunks = {i: {} for i in fixed}
        for i, e in fixed.items():
            w = e
            trunks[i][d.depth] = w
            for n in range(d.depth - 1, 0, -1):
                w = pointer_map(d, n + 1, kind)[w]
                if d.label(n, w) != i:
                    return ExtremeChains(
                        kind, FAILS,
                        {"chain_leaves_component": {"component": i,
                                                    "level": n, "vertex": w}},
                        {}, None, None, d.depth)
                trunks[i][n] = w
        witness = {"fixed": dict(fixed),
                   "trunk": {i: dict(per) for i, per in trunks.items()}}
        return ExtremeChains(kind, HOLDS, witness, trunks, fixed, None, d.depth)

    sets = {i: set(d.component(d.depth, i)) for i in range(1, k + 1)}
    trunks = {i: {} for i in range(1, k + 1)}
    for n in range(d.depth, 0, -1):
        for i in range(1, k + 1):
            cur = sets[i]
            trunks[i][n] = next(iter(cur)) if len(cur) == 1 else None
        if n >= 2:
            pm = pointer_map(d, n, kind)
            for i in range(1, k + 1):
                sets[i] = {pm[v] for v in sets[i]}
    stable_to = 0
    for n in range(1, d.depth + 1):
        if all(trunks[i][n] is not None for i in range(1, k + 1)):
            stable_to = n
        else:
            break
    witness = {"stable_to": stable_to, "checked_to": d.depth}
    return ExtremeChains(kind, UNKNOWN, witness, trunks, None, stable_to,
                         d.depth)


class MarkerTable:
    """Level-1 landings of both backward pointer chains, per level.

    For stationary diagrams the landing maps evolve deterministically under
    the repeating block, so the table is extended until the joint state
    repeats; every deeper level then reduces to a representative inside the
    detected cycle and all marker queries are exact.
    """

    def __init__(self, d, cap=_STATE_CAP):
        self.d = d
        ids1 = d.vertices(1)
        self.min_land = [None, {v: v for v in ids1}]
        self.max_land = [None, {v: v for v in ids1}]
        self.t0 = d.depth
        self.period = 0
        limit = d.depth + cap if d.stationary else d.depth
        seen = {}
        n = 2
        while n <= limit:
            for kind, tab in ((MIN, self.min_land), (MAX, self.max_land)):
                pm = pointer_map(d, n, kind)
                tab.append({v: tab[n - 1][pm[v]] for v in d.vertices(n)})
            if d.stationary and n >= d.depth:
                key = (tuple(sorted(self.min_land[n].items())),
                       tuple(sorted(self.max_land[n].items())))
                if key in seen:
                    self.t0 = seen[key]
                    self.period = n - seen[key]
                    break
                seen[key] = n
            n += 1

    @property
    def built(self):
        return len(self.min_land) - 1

    def rep(self, n):
        """Representative table level for n, or None when out of reach."""
        if n <= self.built:
            return n
        if self.period:
            return self.t0 + (n - self.t0) % self.period
        return None

    def landing(self, kind, n, v):
        r = self.rep(n)
        if r is None:
            return None
        tab = self.min_land if kind == MIN else self.max_land
        return tab[r][v]

    def marker(self, kind, n, v):
        """Component the kind-chain from (n, v) lands in, None if unresolved."""
        land = self.landing(kind, n, v)
        if land is None:
            return None
        lab = self.d.level(1).labels[land]
        return None if lab == OTHER else lab


def marker_level(d, mt=None):
    """Least level from which every V_o vertex has both markers.

    Returns (L, verdict, witness).  Exact for stationary diagrams via the
    table's state cycle; relative to the presentation otherwise.
    """
    if mt is None:
        mt = MarkerTable(d)

    def resolved(n):
        return all(mt.marker(MIN, n, v) is not None
                   and mt.marker(MAX, n, v) is not None
                   for v in d.others(n))

    scan_end = mt.built
    res = {n: resolved(n) for n in range(1, scan_end + 1)}
    if mt.period:
        periodic = range(mt.t0, mt.t0 + mt.period)
        stuck = [n for n in periodic if not res[n]]
        if stuck:
            return None, FAILS, {"unresolved_forever_at": stuck[0]}
        L = mt.t0
        for n in range(mt.t0 - 1, 0, -1):
            if res[n]:
                L = n
            else:
                break
        return L, HOLDS, {"L": L}
    L = None
    for n in range(scan_end, 0, -1):
        if res[n]:
            L = n
        else:
            break
    return L, UNKNOWN, {"relative_L": L, "checked_to": scan_end}


class Marker:
    """Backward landing components of a V_o vertex: (m_minus, m_plus)."""

    __slots__ = ("m_minus", "m_plus")

    def __init__(self, m_minus, m_plus):
        self.m_minus = m_minus
        self.m_plus = m_plus

    def __eq__(self, other):
        return (isinstance(other, Marker)
                and (self.m_minus, self.m_plus)
                == (other.m_minus, other.m_plus))

    def __hash__(self):
        return hash((self.m_minus, self.m_plus))

    def __repr__(self):
        return "Marker(%d, %d)" % (self.m_minus, self.m_plus)

    def __iter__(self):
        return iter((self.m_minus, self.m_plus))


def markers(d, n, mt=None):
    """Both markers for every V_o vertex at level n, keyed by vertex id.

    Raises when any backward chain still sits in V_o at level 1: that is
    the diagram's failure to resolve, not a value to guess.
    """
    if mt is None:
        mt = MarkerTable(d)
    out = {}
    for v in d.others(n):
        lo = mt.marker(MIN, n, v)
        hi = mt.marker(MAX, n, v)
        if lo is None or hi is None:
            raise DiagramError(
                "marker chain from %r at level %d lands outside the "
                "components; the marker level sits deeper" % (v, n))
        out[v] = Marker(lo, hi)
    return out


def _max_break_candidates(d, mt, start_level, start_vertex):
    """Routing markers forced on the successor of a maximal edge.

    The maximal edge ends at start_vertex on start_level.  Walk forward
    along fiber-maximal continuations; every non-maximal edge met on the
    way donates the min-marker of its fiber successor's source, which is
    where the eventual increment refills from.  Returns (candidates,
    unresolved, looped): unresolved means a route left the presentation,
    looped means a route chains maximal edges forever and never breaks.
    """
    cands = set()
    unresolved = False
    looped = False
    seen = set()
    stack = [(start_level, start_vertex)]
    while stack:
        m, w = stack.pop()
        r = mt.rep(m)
        key = (r if r is not None else m, w)
        if key in seen:
            looped = True
            continue
        seen.add(key)
        if not d.has_level(m + 1):
            unresolved = True
            continue
        if len(seen) > 10000:
            unresolved = True
            break
        lev = d.level(m + 1)
        for t in lev.ids:
            fib = lev.fibers[t]
            last = len(fib) - 1
            for j, s in enumerate(fib):
                if s != w:
                    continue
                if j == last:
                    stack.append((m + 1, t))
                else:
                    mk = mt.marker(MIN, m, fib[j + 1])
                    if mk is None:
                        unresolved = True
                    else:
                        cands.add(mk)
    return cands, unresolved, looped


def _aggregate(d, mt, base_L, violations, unknowns):
    """Fold per-level findings into a verdict, letting L absorb transients."""
    if mt.period:
        recurring = [v for v in violations if v["level"] >= mt.t0]
        if recurring:
            return FAILS, recurring[0]
        hard_unknown = [u for u in unknowns if u["level"] >= mt.t0]
        if hard_unknown:
            return UNKNOWN, hard_unknown[0]
        lift = max((v["level"] + 1 for v in violations + unknowns),
                   default=base_L)
        return HOLDS, {"from_level": max(base_L, lift)}
    if violations:
        return UNKNOWN, {"presented_violation": violations[0]}
    if unknowns:
        return UNKNOWN, unknowns[0]
    return UNKNOWN, {"relative_from": base_L, "checked_to": mt.built}


def _source_compat(d, mt, base_L):
    """Edges sourced in V_o: the successor must refill on the m_plus side."""
    violations, unknowns = [], []
    for n in range(max(base_L, 1), mt.built + 1):
        if not d.has_level(n + 1):
            break
        lev = d.level(n + 1)
        for v in d.others(n):
            want = mt.marker(MAX, n, v)
            if want is None:
                unknowns.append({"level": n, "vertex": v,
                                 "why": "m_plus unresolved"})
                continue
            for t in lev.ids:
                fib = lev.fibers[t]
                last = len(fib) - 1
                for j, s in enumerate(fib):
                    if s != v:
                        continue
                    if j < last:
                        got = mt.marker(MIN, n, fib[j + 1])
                        if got is None:
                            unknowns.append({"level": n, "vertex": v,
                                             "range": t, "rank": j,
                                             "why": "m_minus unresolved"})
                        elif got != want:
                            violations.append({"level": n, "vertex": v,
                                               "range": t, "rank": j,
                                               "expected": want, "got": got})
                    else:
                        cands, unres, _ = _max_break_candidates(d, mt, n + 1, t)
                        bad = sorted(c for c in cands if c != want)
                        if bad:
                            violations.append({"level": n, "vertex": v,
                                               "range": t, "rank": j,
                                               "expected": want,
                                               "got": bad[0],
                                               "via": "maximal edge"})
                        if unres:
                            unknowns.append({"level": n, "vertex": v,
                                             "range": t, "rank": j,
                                             "why": "break beyond presentation"})
    return _aggregate(d, mt, base_L, violations, unknowns)


def _target_compat(d, mt, base_L):
    """Non-maximal edges from V_i into V_o: the successor refills in V_i."""
    violations, unknowns = [], []
    for n in range(max(3, base_L), mt.built + 1):
        for w in d.others(n):
            fib = d.fiber(n, w)
            for j in range(len(fib) - 1):
                i = d.label(n - 1, fib[j])
                if i == OTHER:
                    continue
                got = mt.marker(MIN, n - 1, fib[j + 1])
                if got is None:
                    unknowns.append({"level": n, "range": w, "rank": j,
                                     "why": "m_minus unresolved"})
                elif got != i:
                    violations.append({"level": n, "range": w, "rank": j,
                                       "expected": i, "got": got})
    return _aggregate(d, mt, base_L, violations, unknowns)


def validate_ordered(d, depth_budget=DEFAULT_BUDGET):
    """Report on the ordered routing conditions over the k-simple axiom.

    Strong simplicity and non-elementarity are qualities of the underlying
    unordered diagram, not of the order: an elementary diagram can carry a
    perfectly valid order, so those two verdicts stay out of this report.
    """
    rep = ValidationReport()
    if _k_simple_check(d, depth_budget, rep) == FAILS:
        for name in ("extreme_paths", "marker_level",
                     "order_compat_source", "order_compat_target"):
            rep.add(name, UNKNOWN, {"blocked_by": "k_simple"})
        return rep

    cmin = extreme_chains(d, MIN)
    cmax = extreme_chains(d, MAX)
    rep.add("extreme_paths", worst([cmin.verdict, cmax.verdict]),
            {"min": cmin.witness, "max": cmax.witness})

    mt = MarkerTable(d)
    L, lverdict, lwit = marker_level(d, mt)
    if d.k == 1:
        # a single component leaves nothing to route between towers
        lwit = dict(lwit)
        lwit["single_component"] = True
        rep.add("marker_level", HOLDS, lwit)
        rep.add("order_compat_source", HOLDS, {"vacuous": True})
        rep.add("order_compat_target", HOLDS, {"vacuous": True})
        return rep
    rep.add("marker_level", lverdict, lwit)
    if lverdict == FAILS:
        rep.add("order_compat_source", FAILS, {"blocked_by": "marker_level"})
        rep.add("order_compat_target", FAILS, {"blocked_by": "marker_level"})
        return rep
    base_L = L if L is not None else mt.built + 1
    sv, sw = _source_compat(d, mt, base_L)
    rep.add("order_compat_source", sv, sw)
    tv, tw = _target_compat(d, mt, base_L)
    rep.add("order_compat_target", tv, tw)
    return rep


def shorten_telescope(d, depth_budget=DEFAULT_BUDGET, min_fiber=False):
    """Telescope so consecutive extreme edges chain only along the z-trunks.

    Picks retained levels greedily: a gap is admissible once the composite
    pointer image of the deeper level lands inside the trunk vertex set on
    the shallower one, for both the min and max pointers.  With min_fiber
    every retained fiber must also collect at least two edges.  Returns
    (diagram, retained_levels); the input comes back unchanged (with None)
    when single gaps already work everywhere.
    """
    cmin = extreme_chains(d, MIN)
    cmax = extreme_chains(d, MAX)
    if FAILS in (cmin.verdict, cmax.verdict):
        raise DiagramError("extreme chains break: %s"
                           % (cmin.witness if cmin.verdict == FAILS
                              else cmax.witness))

    def trunk_set(chains, n):
        out = set()
        for i in range(1, d.k + 1):
            v = chains.vertex(i, n)
            if v is None or not chains.certain(n):
                return None
            out.add(v)
        return out

    def image(kind, a, c):
        s = set(d.vertices(c))
        for m in range(c, a, -1):
            pm = pointer_map(d, m, kind)
            s = {pm[v] for v in s}
        return s

    def admissible(a, c):
        tmin, tmax = trunk_set(cmin, a), trunk_set(cmax, a)
        if tmin is None or tmax is None:
            return False
        return (image(MIN, a, c) <= tmin and image(MAX, a, c) <= tmax)

    def counts_ok(a, c):
        if not min_fiber:
            return True
        if a == 0:
            vec = d.path_counts(c)
            return all(x >= 2 for x in vec)
        mat = [[1 if u == w else 0 for u in d.vertices(a)]
               for w in d.vertices(a)]
        for m in range(a, c):
            f = d.incidence(m)
            mat = [[sum(f[r][t] * mat[t][col] for t in range(len(mat)))
                    for col in range(len(mat[0]))] for r in range(len(f))]
        return all(sum(row) >= 2 for row in mat)

    dim = len(d.vertices(d.depth))
    gap_cap = max(depth_budget, dim + 2)

    # single gaps fine everywhere: hand the diagram back untouched
    tail = d.depth if d.stationary else d.depth - 1
    if not min_fiber and all(admissible(n, n + 1) for n in range(1, tail + 1)):
        return d, None

    ms = [0]
    a = 0
    while True:
        found = None
        for c in range(a + 1, a + gap_cap + 1):
            if not d.has_level(c):
                break
            if a == 0:
                if counts_ok(0, c):
                    found = c
                    break
            elif admissible(a, c) and counts_ok(a, c):
                found = c
                break
        if found is None:
            if len(ms) >= 3 and not d.stationary:
                break
            raise DiagramError("no admissible telescoping gap from level %d "
                               "within budget" % a)
        ms.append(found)
        a = found
        if d.stationary and len(ms) >= 4 and ms[-3] >= d.depth \
                and ms[-1] - ms[-2] == ms[-2] - ms[-3]:
            break
        if not d.stationary and a >= d.depth:
            break
        if len(ms) > d.depth + 4 * gap_cap + 8:
            raise DiagramError("telescoping chain failed to stabilize")
    out = telescope(d, ms)
    if d.stationary:
        out = promote_stationary(out)
    return out, ms
