"""Graphs, vertex/edge partitions induced by a support, and spanning trees.

Vertices are labeled 1..n externally (all reports use these labels); matrix
indexing subtracts 1.  Edges are unordered pairs stored as (r, s) with r < s,
in lexicographic order; that order fixes the coordinates used for 1-forms and
torus angles throughout the package.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass

import numpy as np

from .errors import GraphError, SupportError


class Graph:
    """Simple connected graph on ordered vertices 1..n."""

    def __init__(self, n, edges):
        if n < 1:
            raise GraphError(f"vertex count must be positive, got {n}")
        canon = []
        seen = set()
        for e in edges:
            r, s = int(e[0]), int(e[1])
            if r == s:
                raise GraphError(f"loop edge [{r}, {s}] is not allowed")
            if not (1 <= r <= n and 1 <= s <= n):
                raise GraphError(f"edge [{r}, {s}] has a label outside 1..{n}")
            key = (min(r, s), max(r, s))
            if key in seen:
                raise GraphError(f"duplicate edge [{key[0]}, {key[1]}]")
            seen.add(key)
            canon.append(key)
        canon.sort()
        self.n = n
        self.edges = tuple(canon)
        adj = {v: [] for v in range(1, n + 1)}
        for r, s in self.edges:
            adj[r].append(s)
            adj[s].append(r)
        self.adjacency = {v: tuple(sorted(ws)) for v, ws in adj.items()}
        self.edge_index = {e: i for i, e in enumerate(self.edges)}
        comp = _component_of(self.adjacency, 1, range(1, n + 1))
        if len(comp) != n:
            missing = min(v for v in range(1, n + 1) if v not in comp)
            raise GraphError(
                f"graph is disconnected: vertex {missing} is not reachable "
                f"from vertex 1"
            )

    @property
    def betti(self):
        return len(self.edges) - self.n + 1

    def degree(self, v):
        return len(self.adjacency[v])

    def has_edge(self, r, s):
        return (min(r, s), max(r, s)) in self.edge_index

    def __repr__(self):
        return f"Graph(n={self.n}, m={len(self.edges)}, betti={self.betti})"

    def __eq__(self, other):
        return (
            isinstance(other, Graph)
            and self.n == other.n
            and self.edges == other.edges
        )

    def __hash__(self):
        return hash((self.n, self.edges))

    def to_json(self):
        return {"n": self.n, "edges": [list(e) for e in self.edges]}


def graph_from_json(obj):
    """Build a Graph from {"n": int, "edges": [[r, s], ...]} (dict or JSON text)."""
    if isinstance(obj, (str, bytes)):
        obj = json.loads(obj)
    try:
        n = int(obj["n"])
        edges = obj["edges"]
    except (KeyError, TypeError) as exc:
        raise GraphError(f"graph JSON must have 'n' and 'edges': {exc}") from exc
    return Graph(n, edges)


def betti(g):
    """First Betti number |E| - n + 1."""
    return g.betti


def _component_of(adjacency, start, allowed):
    """Vertices reachable from start inside `allowed`, ascending BFS."""
    allowed = set(allowed)
    if start not in allowed:
        return set()
    seen = {start}
    queue = [start]
    while queue:
        v = queue.pop(0)
        for w in adjacency[v]:
            if w in allowed and w not in seen:
                seen.add(w)
                queue.append(w)
    return seen


@dataclass(frozen=True)
class InducedSubgraph:
    """Induced subgraph keeping the original vertex labels.

    May be disconnected (components lists the vertex sets).  `to_graph`
    relabels to 1..m and returns the label mapping new -> original.
    """

    vertices: tuple
    edges: tuple
    components: tuple

    @property
    def betti_per_component(self):
        by_comp = []
        for comp in self.components:
            cs = set(comp)
            m = sum(1 for r, s in self.edges if r in cs and s in cs)
            by_comp.append(m - len(comp) + 1)
        return tuple(by_comp)

    def to_graph(self):
        if len(self.components) != 1:
            raise GraphError("induced subgraph is disconnected")
        labels = list(self.vertices)
        pos = {v: i + 1 for i, v in enumerate(labels)}
        g = Graph(len(labels), [(pos[r], pos[s]) for r, s in self.edges])
        return g, labels


def induced_subgraph(g, vs):
    """Subgraph induced by vertex set vs, original labels preserved."""
    vset = set(vs)
    for v in vset:
        if not (1 <= v <= g.n):
            raise GraphError(f"vertex {v} outside 1..{g.n}")
    verts = tuple(sorted(vset))
    edges = tuple(e for e in g.edges if e[0] in vset and e[1] in vset)
    components = []
    remaining = set(verts)
    while remaining:
        v = min(remaining)
        comp = _component_of(g.adjacency, v, remaining)
        components.append(tuple(sorted(comp)))
        remaining -= comp
    return InducedSubgraph(verts, edges, tuple(components))


def is_admissible_support(g, v_n):
    """True iff the induced subgraph is connected and every outside vertex
    has 0 or at least 3 neighbors inside."""
    vset = set(v_n)
    if not vset:
        raise SupportError("support must be nonempty")
    if not vset <= set(range(1, g.n + 1)):
        raise SupportError(f"support contains labels outside 1..{g.n}")
    comp = _component_of(g.adjacency, min(vset), vset)
    if comp != vset:
        return False
    for v in range(1, g.n + 1):
        if v in vset:
            continue
        inside = sum(1 for w in g.adjacency[v] if w in vset)
        if inside in (1, 2):
            return False
    return True


def enumerate_admissible_supports(g):
    """All admissible supports, sorted by size descending then lexicographic.

    Uses connected-subgraph growth: every connected vertex set is generated
    exactly once (rooted at its smallest vertex), with an exact prune on
    vertices below the root whose inside-degree can no longer reach 3.
    """
    found = []
    adj = g.adjacency
    for root in range(1, g.n + 1):
        stack = [(frozenset([root]), frozenset())]
        while stack:
            s, banned = stack.pop()
            if _prunable(g, s, root):
                continue
            if _admissible_given_connected(g, s):
                found.append(tuple(sorted(s)))
            frontier = sorted(
                w
                for v in s
                for w in adj[v]
                if w > root and w not in s and w not in banned
            )
            frontier = sorted(set(frontier))
            for i, w in enumerate(frontier):
                stack.append((s | {w}, banned | set(frontier[:i])))
    found = sorted(set(found), key=lambda t: (-len(t), t))
    return [tuple(t) for t in found]


def _admissible_given_connected(g, s):
    for v in range(1, g.n + 1):
        if v in s:
            continue
        inside = sum(1 for w in g.adjacency[v] if w in s)
        if inside in (1, 2):
            return False
    return True


def _prunable(g, s, root):
    # vertices below the root can never join s; once they see s they must
    # eventually see it three times, which only neighbors above the root
    # still outside s can provide.
    for v in range(1, root):
        inside = 0
        possible = 0
        for w in g.adjacency[v]:
            if w in s:
                inside += 1
            elif w > root:
                possible += 1
        if 1 <= inside and inside + possible < 3:
            return True
    return False


def supports_3regular(g):
    """Admissible supports of a 3-regular graph: complement independent and
    induced subgraph connected.  Used as a cross-check of the general
    enumerator."""
    if any(g.degree(v) != 3 for v in range(1, g.n + 1)):
        raise GraphError("graph is not 3-regular")
    out = []
    for size in range(g.n, 0, -1):
        for comp in itertools.combinations(range(1, g.n + 1), g.n - size):
            cset = set(comp)
            if any(g.has_edge(r, s) for r, s in itertools.combinations(comp, 2)):
                continue
            vs = tuple(v for v in range(1, g.n + 1) if v not in cset)
            sub = set(vs)
            if _component_of(g.adjacency, min(sub), sub) == sub:
                out.append(vs)
    return sorted(set(out), key=lambda t: (-len(t), t))


@dataclass(frozen=True)
class SupportPartition:
    """Vertex and edge partition induced by an admissible support, together
    with the adapted spanning tree and the free (non-tree) edges per class.

    support / boundary / residual: the support vertices, the zero vertices
    adjacent to the support, and the remaining zero vertices.  Edge classes
    follow the same split; `cross_edges` join boundary to support.
    """

    graph: Graph
    support: tuple
    boundary: tuple
    residual: tuple
    support_edges: tuple
    cross_edges: tuple
    residual_edges: tuple
    tree_edges: tuple
    free_support: tuple
    free_cross: tuple
    free_residual: tuple

    @property
    def free_edges(self):
        """Canonical torus coordinates: support block, then cross, then residual."""
        return self.free_support + self.free_cross + self.free_residual

    @property
    def tree_cross_edge(self):
        """The unique tree edge attached to each boundary vertex."""
        out = {}
        cross_tree = [e for e in self.tree_edges if e in set(self.cross_edges)]
        bset = set(self.boundary)
        for r, s in cross_tree:
            b = r if r in bset else s
            out[b] = (r, s)
        return out

    @property
    def support_betti(self):
        return len(self.support_edges) - len(self.support) + 1


def partition_for_support(g, v_n):
    """Build the SupportPartition for an admissible support.

    The spanning tree is assembled in three steps: a BFS tree of the induced
    support subgraph (rooted at the smallest vertex, neighbors ascending),
    then one cross edge per boundary vertex (smallest support neighbor), then
    BFS completion through residual edges.
    """
    if not is_admissible_support(g, v_n):
        raise SupportError(f"vertex set {sorted(set(v_n))} is not an admissible support")
    sup = tuple(sorted(set(v_n)))
    sset = set(sup)
    boundary = tuple(
        v
        for v in range(1, g.n + 1)
        if v not in sset and any(w in sset for w in g.adjacency[v])
    )
    bset = set(boundary)
    residual = tuple(v for v in range(1, g.n + 1) if v not in sset and v not in bset)

    support_edges = tuple(e for e in g.edges if e[0] in sset and e[1] in sset)
    cross_edges = tuple(
        e for e in g.edges if (e[0] in sset) != (e[1] in sset)
    )
    residual_edges = tuple(
        e for e in g.edges if e[0] not in sset and e[1] not in sset
    )

    tree = list(_bfs_tree_edges(g, sset, support_edges))
    for b in boundary:
        w = min(w for w in g.adjacency[b] if w in sset)
        tree.append((min(b, w), max(b, w)))
    # complete through residual edges: BFS from everything already attached
    attached = set(sup) | bset
    queue = sorted(attached)
    allowed = set(residual_edges)
    while queue:
        v = queue.pop(0)
        for w in g.adjacency[v]:
            e = (min(v, w), max(v, w))
            if w not in attached and e in allowed:
                attached.add(w)
                tree.append(e)
                queue.append(w)
    if len(attached) != g.n:
        raise SupportError("internal error: tree completion failed")  # pragma: no cover

    tset = set(tree)
    free_support = tuple(e for e in support_edges if e not in tset)
    free_cross = tuple(e for e in cross_edges if e not in tset)
    free_residual = tuple(e for e in residual_edges if e not in tset)

    part = SupportPartition(
        graph=g,
        support=sup,
        boundary=boundary,
        residual=residual,
        support_edges=support_edges,
        cross_edges=cross_edges,
        residual_edges=residual_edges,
        tree_edges=tuple(sorted(tree)),
        free_support=free_support,
        free_cross=free_cross,
        free_residual=free_residual,
    )
    assert len(free_support) == len(support_edges) - len(sup) + 1
    assert len(free_cross) == len(cross_edges) - len(boundary)
    assert len(free_residual) == len(residual_edges) - len(residual)
    return part


def whole_graph_partition(g):
    """Partition with the support equal to all vertices (free edges are a
    fundamental system for the graph's own torus)."""
    return partition_for_support(g, tuple(range(1, g.n + 1)))


def _bfs_tree_edges(g, vset, allowed_edges):
    """Deterministic BFS spanning tree of the induced (connected) subgraph."""
    allowed = set(allowed_edges)
    root = min(vset)
    seen = {root}
    queue = [root]
    while queue:
        v = queue.pop(0)
        for w in g.adjacency[v]:
            e = (min(v, w), max(v, w))
            if w in vset and w not in seen and e in allowed:
                seen.add(w)
                queue.append(w)
                yield e


def tree_paths_from_root(g, tree_edges):
    """Parent map of the spanning tree rooted at vertex 1 (or smallest)."""
    adj = {v: [] for v in range(1, g.n + 1)}
    for r, s in tree_edges:
        adj[r].append(s)
        adj[s].append(r)
    root = 1
    parent = {root: None}
    queue = [root]
    while queue:
        v = queue.pop(0)
        for w in sorted(adj[v]):
            if w not in parent:
                parent[w] = v
                queue.append(w)
    return parent


def fundamental_cycles(g, partition):
    """Integer cycle basis: one vector per free edge, over canonical edges.

    The cycle of free edge (r, s) is oriented r -> s along the edge and back
    through the tree; entry convention matches 1-forms (value on (u, v) with
    u < v is +1 when traversed u -> v).
    """
    parent = tree_paths_from_root(g, partition.tree_edges)

    def path_to_root(v):
        out = []
        while parent[v] is not None:
            out.append((v, parent[v]))
            v = parent[v]
        return out

    cycles = []
    for (r, s) in partition.free_edges:
        vec = np.zeros(len(g.edges))
        vec[g.edge_index[(r, s)]] = 1.0
        up_r = path_to_root(r)
        up_s = path_to_root(s)
        # s -> root minus r -> root: edges shared by both paths cancel,
        # leaving the tree path s -> r.
        for (a, b) in up_s:
            i = g.edge_index[(min(a, b), max(a, b))]
            vec[i] += 1.0 if a < b else -1.0
        for (a, b) in up_r:
            i = g.edge_index[(min(a, b), max(a, b))]
            vec[i] -= 1.0 if a < b else -1.0
        cycles.append(vec)
    return np.array(cycles)


def spanning_tree_count(g):
    """Number of spanning trees via a principal minor of the standard
    Laplacian (matrix-tree)."""
    lap = np.zeros((g.n, g.n))
    for r, s in g.edges:
        lap[r - 1, s - 1] -= 1.0
        lap[s - 1, r - 1] -= 1.0
        lap[r - 1, r - 1] += 1.0
        lap[s - 1, s - 1] += 1.0
    if g.n == 1:
        return 1
    minor = lap[:-1, :-1]
    sign, logdet = np.linalg.slogdet(minor)
    return int(round(sign * np.exp(logdet)))
