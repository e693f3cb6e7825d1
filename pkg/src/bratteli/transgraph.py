"""Transition graphs on component symbols and their index vectors.

At a level where every V_o vertex has both markers, each such vertex
becomes one directed edge from the component its minimal chain lands in to
the component its maximal chain lands in.  The resulting multigraph on
symbols Y_1..Y_k drives the order synthesis (Euler walks through a vertex's
fiber) and the index vectors d_i feeding the K-theoretic checks: an edge
contributes +1 to the coordinate of the component it leaves and -1 to the
one it enters.
"""

from __future__ import annotations

from collections import deque

from ._report import FAILS, HOLDS, DiagramError, ValidationReport
from .diagram import OTHER
from .order import MAX, MIN, MarkerTable, marker_level


class TransitionGraph:
    """Directed multigraph on Y_1..Y_k; one labeled edge per V_o vertex."""

    __slots__ = ("k", "level", "edges")

    def __init__(self, k, level, edges):
        self.k = k
        self.level = level
        self.edges = tuple(edges)   # (vertex label, src component, dst)

    def out_degree(self, i):
        return sum(1 for (_, s, _) in self.edges if s == i)

    def in_degree(self, i):
        return sum(1 for (_, _, t) in self.edges if t == i)

    def to_json(self):
        return {"k": self.k, "level": self.level,
                "edges": [{"label": v, "source": s, "target": t}
                          for (v, s, t) in self.edges]}

    def to_dot(self):
        lines = ["digraph L%d {" % self.level]
        for i in range(1, self.k + 1):
            lines.append('  Y%d;' % i)
        for v, s, t in self.edges:
            lines.append('  Y%d -> Y%d [label="%s"];' % (s, t, v))
        lines.append("}")
        return "\n".join(lines) + "\n"


def transition_graph(d, n, mt=None):
    """Build the level-n transition graph; markers must resolve there."""
    if mt is None:
        mt = MarkerTable(d)
    edges = []
    for v in d.others(n):
        lo = mt.marker(MIN, n, v)
        hi = mt.marker(MAX, n, v)
        if lo is None or hi is None:
            raise DiagramError(
                "marker chain from %r at level %d lands outside the "
                "components; pick a level at or above the marker level"
                % (v, n))
        edges.append((v, lo, hi))
    return TransitionGraph(d.k, n, edges)


def dvectors(d, n, mt=None):
    """Index vector of every V_o vertex at level n, keyed by vertex id."""
    tg = transition_graph(d, n, mt)
    out = {}
    for v, s, t in tg.edges:
        vec = [0] * d.k
        vec[s - 1] += 1
        vec[t - 1] -= 1
        out[v] = tuple(vec)
    return out

def dvector_matrix(d, n, mt=None):
    """Rows aligned with the V_o listing at level n, columns with Y_1..Y_k."""
    vecs = dvectors(d, n, mt)
    return [list(vecs[v]) for v in d.others(n)]


def check_structure(tg, non_elementary):
    """Sanity checks a transition graph from a well-formed diagram passes.

    Connectivity treats edges as undirected and must span all k symbols.
    Non-elementary diagrams additionally contribute at least k edges and
    put every edge-sourcing symbol on a closed directed walk; elementary
    ones are exempt from both (a path graph is fine there).
    """
    rep = ValidationReport()
    k = tg.k

    seen = {1} if k else set()
    frontier = deque(seen)
    nbr = {i: set() for i in range(1, k + 1)}
    for _, s, t in tg.edges:
        nbr[s].add(t)
        nbr[t].add(s)
    while frontier:
        cur = frontier.popleft()
        for other in nbr[cur]:
            if other not in seen:
                seen.add(other)
                frontier.append(other)
    if len(seen) == k:
        rep.add("connected", HOLDS, {"symbols": k})
    else:
        rep.add("connected", FAILS,
                {"unreached": sorted(set(range(1, k + 1)) - seen)})

    if not non_elementary:
        return rep
    if len(tg.edges) >= k:
        rep.add("edge_count", HOLDS, {"edges": len(tg.edges), "k": k})
    else:
        rep.add("edge_count", FAILS, {"edges": len(tg.edges), "k": k})

    # closed-walk membership via strongly connected components
    order = []
    visited = set()
    adj = {i: [] for i in range(1, k + 1)}
    radj = {i: [] for i in range(1, k + 1)}
    for _, s, t in tg.edges:
        adj[s].append(t)
        radj[t].append(s)
    for root in range(1, k + 1):
        if root in visited:
            continue
        stack = [(root, iter(adj[root]))]
        visited.add(root)
        while stack:
            node, it = stack[-1]
            for nxt in it:
                if nxt not in visited:
                    visited.add(nxt)
                    stack.append((nxt, iter(adj[nxt])))
                    break
            else:
                order.append(node)
                stack.pop()
    comp = {}
    for root in reversed(order):
        if root in comp:
            continue
        stack = [root]
        comp[root] = root
        while stack:
            node = stack.pop()
            for nxt in radj[node]:
                if nxt not in comp:
                    comp[nxt] = root
                    stack.append(nxt)
    stranded = []
    cyclic = {comp[s] for _, s, t in tg.edges if comp[s] == comp[t]}
    for i in range(1, k + 1):
        if tg.out_degree(i) > 0 and comp[i] not in cyclic:
            stranded.append(i)
    if stranded:
        rep.add("sourced_on_closed_walks", FAILS, {"stranded": stranded})
    else:
        rep.add("sourced_on_closed_walks", HOLDS, None)
    return rep


def lift_edge_to_path(d, n, w, mt=None):
    """Read the fiber of w in V_o^{n+1} off as a walk in the level-n graph.

    Dropping the component-sourced edges from the ordered fiber leaves a
    sequence of V_o^n labels; for a diagram that validates, that sequence
    is a walk whose arcs chain marker-compatibly.  Verified here:
    endpoints equal w's own markers, each label's multiplicity equals the
    incidence entry, the walk visits Y_i whenever w has an edge from
    component i, and every traversed label has fiber edges from both of
    its own marker components.  Any miss raises; it means the diagram
    slipped past the validator.
    """
    if mt is None:
        mt = MarkerTable(d)
    if d.label(n + 1, w) != OTHER:
        raise DiagramError("%r is a component vertex, not an edge label" % w)
    lo = mt.marker(MIN, n + 1, w)
    hi = mt.marker(MAX, n + 1, w)
    if lo is None or hi is None:
        raise DiagramError("markers of %r unresolved at level %d" % (w, n + 1))
    fiber = d.fiber(n + 1, w)
    labels = [u for u in fiber if d.label(n, u) == OTHER]
    marks = {}
    for u in set(labels):
        mm = mt.marker(MIN, n, u)
        mp = mt.marker(MAX, n, u)
        if mm is None or mp is None:
            raise DiagramError(
                "markers of %r unresolved at level %d" % (u, n))
        marks[u] = (mm, mp)

    symbols = [lo]
    for j, u in enumerate(labels):
        mm, mp = marks[u]
        if mm != symbols[-1]:
            raise DiagramError(
                "fiber of %r breaks at position %d: %r starts at Y%d, "
                "walk sits at Y%d" % (w, j, u, mm, symbols[-1]))
        symbols.append(mp)
    if symbols[-1] != hi:
        raise DiagramError(
            "walk for %r ends at Y%d, its own marker is Y%d"
            % (w, symbols[-1], hi))

    row = d.incidence(n)[d.level(n + 1).index[w]]
    lvl = d.level(n)
    for u in d.others(n):
        if labels.count(u) != row[lvl.index[u]]:
            raise DiagramError(
                "label %r appears %d times in the fiber of %r, incidence "
                "says %d" % (u, labels.count(u), w, row[lvl.index[u]]))

    visited = set(symbols)
    for i in range(1, d.k + 1):
        has_edge = any(d.label(n, u) == i for u in fiber)
        if has_edge and i not in visited:
            raise DiagramError(
                "fiber of %r has component-%d edges but its walk never "
                "visits Y%d" % (w, i, i))

    for u in marks:
        mm, mp = marks[u]
        srcs = {d.label(n - 1, x) for x in d.fiber(n, u)}
        if mm not in srcs or mp not in srcs:
            raise DiagramError(
                "label %r lacks a fiber edge from component %d"
                % (u, mm if mm not in srcs else mp))

    return {"edge": w, "level": n, "source": lo, "target": hi,
            "labels": labels, "symbols": symbols}


def other_block(d, n):
    """Incidence between the V_o parts of levels n and n+1."""
    lo = d.level(n)
    hi = d.level(n + 1)
    cols = [lo.index[v] for v in d.others(n)]
    mat = d.incidence(n)
    return [[mat[hi.index[v]][c] for c in cols] for v in d.others(n + 1)]


def index_pushforward(d):
    """Exact one-step transport of the index vectors down the diagram.

    Verifies that the V_o incidence block carries the level-n index matrix
    to the level-(n+1) one, for every level at or above the marker level
    that the presentation (or the stationary period) exhibits.
    """
    mt = MarkerTable(d)
    L, verdict, wit = marker_level(d, mt)
    rep = ValidationReport()
    if L is None:
        rep.add("index_pushforward", verdict, {"marker_level": wit})
        return rep
    checked = []
    top = mt.built if d.stationary else d.depth - 1
    for n in range(L, top + 1):
        if not d.has_level(n + 1):
            break
        g = other_block(d, n)
        dn = dvector_matrix(d, n, mt)
        dn1 = dvector_matrix(d, n + 1, mt)
        pushed = [[sum(g[r][c] * dn[c][j] for c in range(len(dn)))
                   for j in range(d.k)] for r in range(len(g))]
        if pushed != dn1:
            rep.add("index_pushforward", FAILS,
                    {"level": n, "pushed": pushed, "expected": dn1})
            return rep
        checked.append(n)
    if not checked:
        rep.add("index_pushforward", verdict, {"marker_level": wit})
        return rep
    rep.add("index_pushforward", HOLDS if d.stationary else verdict,
            {"levels": checked})
    return rep
