"""Built-in example graphs and matrices.

These fixtures back the demo scripts, the CLI `example` subcommand and a
large part of the test suite: a 7-vertex bridge of two triangle blocks whose
critical circle changes Morse index partway along, a 5-vertex wheel-like
graph whose critical circle meets an eigenvalue crossing, standard
Laplacians, flowers of cycles, and seeded random graphs/matrices.
"""

from __future__ import annotations

import math

import numpy as np

from .graphs import Graph, partition_for_support
from .magnetic import BaseMatrix, MagneticPoint, OneForm, gauge_reduce

SQRT2 = math.sqrt(2.0)


def index_jump_fixture():
    """7-vertex graph: a 4-clique-minus-an-edge block {1,2,3,4} bridged at 4-5
    to a triangle {5,6,7}.  With the matrix below, the eigenvector (1,1,1) on
    support {1,2,3} at value 0 generates a pair of critical circles on which
    the normal Morse index of the second eigenvalue jumps from 2 to 0."""
    edges = [(1, 2), (1, 4), (2, 3), (2, 4), (3, 4), (4, 5), (5, 6), (5, 7), (6, 7)]
    g = Graph(7, edges)
    mat = np.zeros((7, 7))
    for (r, s) in edges:
        mat[r - 1, s - 1] = mat[s - 1, r - 1] = -1.0
    for i, d in enumerate([1, 2, 1, 4, 1, 2, 2]):
        mat[i, i] = float(d)
    return BaseMatrix(g, mat)


def index_jump_support():
    return (1, 2, 3)


def index_jump_point(base, alpha3, component=+1):
    """A point on the critical circle pair of the bridge fixture: the two
    cross angles sit at +-(2pi/3, -2pi/3), the residual angle is free."""
    part = partition_for_support(base.graph, index_jump_support())
    a = 2.0 * math.pi / 3.0
    if component >= 0:
        return MagneticPoint(part, (a, -a, alpha3))
    return MagneticPoint(part, (-a, a, alpha3))


def index_jump_switch_angle(base, lam=0.0, angle_tol=1e-10):
    """The residual angle at which the critical value enters the spectrum of
    the residual block (where the normal Morse index switches), located by
    bisection on the determinant of the residual block."""
    from .magnetic import assemble  # local import to avoid a cycle

    part = partition_for_support(base.graph, index_jump_support())
    idx = [v - 1 for v in part.residual]

    def det_at(a3):
        p = MagneticPoint(part, (2.0 * math.pi / 3.0, -2.0 * math.pi / 3.0, a3))
        block = assemble(base, p)[np.ix_(idx, idx)]
        return float(np.linalg.det(block - lam * np.eye(len(idx))).real)

    lo, hi = 1e-6, math.pi - 1e-6
    flo = det_at(lo)
    if flo * det_at(hi) > 0:
        raise ValueError("no sign change of the residual determinant on (0, pi)")
    while hi - lo > angle_tol:
        mid = 0.5 * (lo + hi)
        if flo * det_at(mid) <= 0:
            hi = mid
        else:
            lo = mid
            flo = det_at(lo)
    return 0.5 * (lo + hi)


def label_switch_fixture(gamma=3.0):
    """5-vertex graph: path 1-2-3-4 plus vertex 5 joined to all of them.
    The eigenvector (1,1,1,2) on support {1,2,3,4} at value 0 generates a
    critical circle; at gamma = 3 the circle meets points where the critical
    value has multiplicity two and its label alternates between 1 and 2."""
    edges = [(1, 2), (1, 5), (2, 3), (2, 5), (3, 4), (3, 5), (4, 5)]
    g = Graph(5, edges)
    mat = np.zeros((5, 5))
    off = {(1, 2): -1.0, (2, 3): -2.0, (3, 4): -4.0,
           (1, 5): -1.0, (2, 5): -1.0, (3, 5): -1.0, (4, 5): -1.0}
    for (r, s), v in off.items():
        mat[r - 1, s - 1] = mat[s - 1, r - 1] = v
    for i, d in enumerate([1.0, 3.0, 10.0, 2.0, float(gamma)]):
        mat[i, i] = d
    return BaseMatrix(g, mat)


def label_switch_support():
    return (1, 2, 3, 4)


def label_switch_point(base, a1, a2, a3):
    """Torus point of the 5-vertex fixture given as angles on the edges
    (1,5), (2,5), (3,5) (with (4,5) held real), reduced to tree gauge."""
    g = base.graph
    part = partition_for_support(g, label_switch_support())
    values = [0.0] * len(g.edges)
    values[g.edge_index[(1, 5)]] = a1
    values[g.edge_index[(2, 5)]] = a2
    values[g.edge_index[(3, 5)]] = a3
    return gauge_reduce(OneForm(g, tuple(values)), part)


def standard_laplacian(g):
    """h = D - A: degree on the diagonal, -1 on edges."""
    mat = np.zeros((g.n, g.n))
    for (r, s) in g.edges:
        mat[r - 1, s - 1] = mat[s - 1, r - 1] = -1.0
        mat[r - 1, r - 1] += 1.0
        mat[s - 1, s - 1] += 1.0
    return BaseMatrix(g, mat)


def flower(petals):
    """`petals` triangles sharing one central vertex: every cycle meets the
    others only at the hub, so the only admissible support is everything."""
    if petals < 1:
        raise ValueError("need at least one petal")
    edges = []
    n = 1 + 2 * petals
    for p in range(petals):
        a = 2 + 2 * p
        b = 3 + 2 * p
        edges += [(1, a), (1, b), (a, b)]
    return Graph(n, edges)


def figure_eight():
    return flower(2)


def chain_of_cycles(k):
    """k triangles glued along a path by bridge edges (disjoint cycles)."""
    edges = []
    n = 0
    prev_tail = None
    for _ in range(k):
        a, b, c = n + 1, n + 2, n + 3
        edges += [(a, b), (a, c), (b, c)]
        if prev_tail is not None:
            edges.append((prev_tail, a))
        prev_tail = c
        n += 3
    return Graph(n, edges)


def partition_figure_fixture():
    """13-vertex graph realizing the support/boundary/residual picture used
    in the documentation: |support| = 7, |boundary| = 3, |residual| = 3,
    10 cross edges, 4 residual edges.  (One extra support edge keeps the
    induced support subgraph connected.)"""
    edges = [
        (1, 2), (1, 3), (1, 5), (1, 7), (3, 7), (4, 7), (5, 7), (6, 7),
        (1, 8), (2, 8), (3, 8),
        (2, 9), (3, 9), (4, 9), (5, 9),
        (4, 10), (5, 10), (6, 10),
        (8, 9), (9, 12), (11, 12), (10, 13),
    ]
    g = Graph(13, edges)
    return g, tuple(range(1, 8))


def experiment_matrix(g):
    """Adjacency plus the quasirandom diagonal sqrt(2)*s mod 1 (s the vertex
    label), a convenient generically-behaved matrix for sweeps."""
    mat = np.zeros((g.n, g.n))
    for (r, s) in g.edges:
        mat[r - 1, s - 1] = mat[s - 1, r - 1] = 1.0
    for v in range(1, g.n + 1):
        mat[v - 1, v - 1] = (SQRT2 * v) % 1.0
    return BaseMatrix(g, mat)


def random_base_matrix(g, seed, diag_scale=1.0):
    """Random symmetric matrix strictly supported on g: edge entries with
    random sign and magnitude in [0.5, 1.5], uniform diagonal."""
    rng = np.random.default_rng(seed)
    mat = np.zeros((g.n, g.n))
    for (r, s) in g.edges:
        v = rng.uniform(0.5, 1.5) * rng.choice([-1.0, 1.0])
        mat[r - 1, s - 1] = mat[s - 1, r - 1] = v
    for v in range(1, g.n + 1):
        mat[v - 1, v - 1] = rng.uniform(-diag_scale, diag_scale)
    return BaseMatrix(g, mat)


def random_connected_graph(n, beta, seed):
    """Random connected graph with prescribed first Betti number: a random
    spanning tree plus `beta` random chords."""
    rng = np.random.default_rng(seed)
    edges = set()
    verts = list(rng.permutation(np.arange(1, n + 1)))
    attached = [verts.pop()]
    while verts:
        v = verts.pop()
        u = int(rng.choice(attached))
        edges.add((min(u, int(v)), max(u, int(v))))
        attached.append(int(v))
    possible = [
        (r, s)
        for r in range(1, n + 1)
        for s in range(r + 1, n + 1)
        if (r, s) not in edges
    ]
    if beta > len(possible):
        raise ValueError(f"cannot place {beta} chords on {n} vertices")
    for i in rng.choice(len(possible), size=beta, replace=False):
        edges.add(possible[int(i)])
    return Graph(n, sorted(edges))
