"""Magnetic perturbations of a graph-supported symmetric matrix.

A base matrix h (real symmetric, strictly supported on a graph) generates a
torus of Hermitian matrices by multiplying each off-diagonal edge entry by a
unit phase.  Gauge transformations (conjugation by diagonal unitaries) act on
the phases; fixing a spanning tree leaves one angle per free edge, which are
the coordinates used everywhere below.  The ordered k-th eigenvalue is then a
function on this torus; this module provides its criticality test, analytic
gradient and Hessian (with the block decomposition over a support partition),
signings, and nodal counts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import thresholds as tol
from .errors import (
    GraphError,
    MultipleEigenvalueError,
    NonCriticalPointError,
    ResidualResonanceError,
    StrictSupportError,
)
from .graphs import (
    SupportPartition,
    fundamental_cycles,
    tree_paths_from_root,
    whole_graph_partition,
)
from .linalg import (
    Inertia,
    check_hermitian,
    count_below,
    eig_herm,
    inertia,
    pseudoinverse,
    spectral_radius,
)

TWO_PI = 2.0 * math.pi


class BaseMatrix:
    """Real symmetric matrix strictly supported on a graph."""

    def __init__(self, graph, matrix):
        matrix = np.asarray(matrix, dtype=float)
        if matrix.shape != (graph.n, graph.n):
            raise StrictSupportError(
                f"matrix shape {matrix.shape} does not match n={graph.n}"
            )
        if np.abs(matrix - matrix.T).max(initial=0.0) > 1e-12 * max(1.0, np.abs(matrix).max()):
            raise StrictSupportError("matrix is not symmetric")
        for r in range(1, graph.n + 1):
            for s in range(r + 1, graph.n + 1):
                val = matrix[r - 1, s - 1]
                if graph.has_edge(r, s):
                    if abs(val) <= tol.STRICT_SUPPORT_ABS:
                        raise StrictSupportError(
                            f"entry ({r},{s}) vanishes on an edge of the graph"
                        )
                elif abs(val) > tol.STRICT_SUPPORT_ABS:
                    raise StrictSupportError(
                        f"entry ({r},{s}) is nonzero off the graph"
                    )
        self.graph = graph
        self.matrix = matrix.copy()
        self.matrix.flags.writeable = False
        self._norm = None

    @property
    def norm(self):
        """Spectral norm, used to scale residual tolerances."""
        if self._norm is None:
            self._norm = max(1.0, spectral_radius(np.linalg.eigvalsh(self.matrix)))
        return self._norm

    def submatrix(self, vertices):
        idx = np.array([v - 1 for v in vertices], dtype=int)
        return self.matrix[np.ix_(idx, idx)]

    def __repr__(self):
        return f"BaseMatrix({self.graph!r})"


@dataclass(frozen=True)
class MagneticPoint:
    """A point of the magnetic torus in tree gauge: one angle per free edge
    of the partition's adapted spanning tree (tree angles are zero)."""

    partition: SupportPartition
    angles: tuple

    def __post_init__(self):
        free = self.partition.free_edges
        if len(self.angles) != len(free):
            raise GraphError(
                f"{len(free)} free edges but {len(self.angles)} angles"
            )
        object.__setattr__(
            self, "angles", tuple(float(np.mod(a, TWO_PI)) for a in self.angles)
        )

    def angle_of(self, edge):
        e = (min(edge), max(edge))
        return self.angles[self.partition.free_edges.index(e)]

    def to_json(self):
        return {
            f"{r}-{s}": a
            for (r, s), a in zip(self.partition.free_edges, self.angles)
        }


def zero_point(partition):
    return MagneticPoint(partition, (0.0,) * len(partition.free_edges))


def point_from_json(partition, obj):
    angles = []
    for r, s in partition.free_edges:
        angles.append(float(obj[f"{r}-{s}"]))
    return MagneticPoint(partition, tuple(angles))


@dataclass(frozen=True)
class Signing:
    """Signs on the free edges (tree edges are +1 by gauge); one of the
    2^beta conjugation-fixed points of the torus."""

    partition: SupportPartition
    signs: tuple

    def __post_init__(self):
        if any(s not in (-1, 1) for s in self.signs):
            raise GraphError("signs must be +-1")
        if len(self.signs) != len(self.partition.free_edges):
            raise GraphError("one sign per free edge required")

    def to_point(self):
        return MagneticPoint(
            self.partition,
            tuple(0.0 if s == 1 else math.pi for s in self.signs),
        )

    def bitstring(self):
        return "".join("0" if s == 1 else "1" for s in self.signs)


def signing_from_bitstring(partition, bits):
    return Signing(partition, tuple(1 if c == "0" else -1 for c in bits))


def enumerate_signings(partition, cap=26):
    """All 2^beta signings in lexicographic order (+1 before -1)."""
    beta = len(partition.free_edges)
    if beta > cap:
        raise GraphError(
            f"2^{beta} signings exceed the cap of 2^{cap}; raise `cap` explicitly"
        )
    out = []
    for k in range(2 ** beta):
        signs = tuple(
            1 if (k >> (beta - 1 - j)) & 1 == 0 else -1 for j in range(beta)
        )
        out.append(Signing(partition, signs))
    return out


@dataclass(frozen=True)
class OneForm:
    """Real 1-form on the graph: value per edge, antisymmetric under
    orientation reversal; stored on edges (r, s) with r < s."""

    graph: object
    values: tuple

    def __post_init__(self):
        if len(self.values) != len(self.graph.edges):
            raise GraphError("one value per edge required")
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))

    def value(self, r, s):
        v = self.values[self.graph.edge_index[(min(r, s), max(r, s))]]
        return v if r < s else -v

    def flux(self, chain):
        """Pairing with a 1-chain given as a coefficient vector over edges."""
        return float(np.dot(self.values, np.asarray(chain)))


def coboundary(graph, theta):
    """The 1-form d(theta) with value theta_r - theta_s on edge (r, s)."""
    vals = [theta[r - 1] - theta[s - 1] for (r, s) in graph.edges]
    return OneForm(graph, tuple(vals))


def _tree_potential(partition, values, graph):
    """Vertex potential that zeroes a 1-form on the tree edges."""
    parent = tree_paths_from_root(graph, partition.tree_edges)
    theta = np.zeros(graph.n)
    order = [1]
    children = {v: [] for v in range(1, graph.n + 1)}
    for v, p in parent.items():
        if p is not None:
            children[p].append(v)
    stack = [1]
    while stack:
        u = stack.pop()
        for v in children[u]:
            idx = graph.edge_index[(min(u, v), max(u, v))]
            a = values[idx] if u < v else -values[idx]
            # alpha'_{uv} = alpha_{uv} + theta_u - theta_v = 0
            theta[v - 1] = theta[u - 1] + a
            stack.append(v)
            order.append(v)
    return theta


def gauge_reduce(form, partition, wrap=True):
    """Unique representative of the gauge class of `form` with zero angles on
    the tree edges, as free-edge coordinates.  Fluxes through every cycle are
    preserved (exactly; modulo 2*pi after wrapping)."""
    g = form.graph
    theta = _tree_potential(partition, form.values, g)
    coords = []
    for (r, s) in partition.free_edges:
        a = form.values[g.edge_index[(r, s)]] + theta[r - 1] - theta[s - 1]
        coords.append(a)
    if not wrap:
        return np.array(coords)
    return MagneticPoint(partition, tuple(coords))


def assemble(base, point):
    """The Hermitian matrix with phase e^{i a} on each free edge (r, s),
    r < s, and unchanged entries on tree edges."""
    if point.partition.graph != base.graph:
        raise GraphError("point and base matrix live on different graphs")
    out = base.matrix.astype(complex)
    for (r, s), a in zip(point.partition.free_edges, point.angles):
        phase = complex(math.cos(a), math.sin(a))
        out[r - 1, s - 1] = base.matrix[r - 1, s - 1] * phase
        out[s - 1, r - 1] = base.matrix[s - 1, r - 1] * np.conj(phase)
    return out


def edge_products(graph, hmat, psi):
    """h_rs * conj(psi_r) * psi_s per canonical edge."""
    out = np.empty(len(graph.edges), dtype=complex)
    for i, (r, s) in enumerate(graph.edges):
        out[i] = hmat[r - 1, s - 1] * np.conj(psi[r - 1]) * psi[s - 1]
    return out


def criticality_residual(graph, hmat, psi):
    prods = edge_products(graph, hmat, psi)
    return float(np.abs(prods.imag).max(initial=0.0))


def nodal_count(graph, hmat, k, psi=None):
    """Number of edges with Re(h_rs conj(psi_r) psi_s) > 0 for the k-th
    eigenvector.  Well-defined only at points where every edge product is
    real (criticality); rejected otherwise."""
    hmat = check_hermitian(hmat)
    scale = max(1.0, spectral_radius(np.linalg.eigvalsh(hmat)))
    if psi is None:
        es = eig_herm(hmat)
        if not es.is_simple(k):
            raise MultipleEigenvalueError(f"eigenvalue {k} is not simple")
        psi = es.vector(k)
    prods = edge_products(graph, hmat, psi)
    if np.abs(prods.imag).max(initial=0.0) > tol.CRITICAL_REL * scale:
        raise NonCriticalPointError(
            "edge products are not real: nodal count undefined away from "
            "critical points"
        )
    return int(np.sum(prods.real > 0))


def nodal_surplus(graph, hmat, k, psi=None):
    return nodal_count(graph, hmat, k, psi) - (k - 1)


@dataclass(frozen=True)
class CriticalityCheck:
    critical: bool
    residual: float
    value: float
    simple: bool


def is_critical(base, point, k):
    """Criticality test for the k-th eigenvalue at a torus point: every edge
    product h_rs conj(psi_r) psi_s must be real, equivalently the gradient
    over all free-edge directions vanishes."""
    hmat = assemble(base, point)
    es = eig_herm(hmat)
    if not es.is_simple(k):
        raise MultipleEigenvalueError(
            f"eigenvalue {k} has gap {es.simple_margin(k):.3e}: nonsmooth point"
        )
    psi = es.vector(k)
    res = criticality_residual(base.graph, hmat, psi)
    return CriticalityCheck(
        critical=bool(res <= tol.CRITICAL_REL * base.norm),
        residual=res,
        value=es.value(k),
        simple=True,
    )


def gradient(base, point, k):
    """Analytic gradient of the k-th eigenvalue in free-edge coordinates:
    the derivative along edge (r, s), r < s, is -2 Im(h_rs conj(psi_r) psi_s)."""
    hmat = assemble(base, point)
    es = eig_herm(hmat)
    if not es.is_simple(k):
        raise MultipleEigenvalueError(f"eigenvalue {k} is not simple")
    psi = es.vector(k)
    g = base.graph
    out = np.empty(len(point.partition.free_edges))
    for i, (r, s) in enumerate(point.partition.free_edges):
        out[i] = -2.0 * float(
            np.imag(hmat[r - 1, s - 1] * np.conj(psi[r - 1]) * psi[s - 1])
        )
    return out


def _b_columns(graph, hmat, psi, edges):
    """Derivative of (h_alpha psi) along each edge direction, as columns."""
    cols = np.zeros((graph.n, len(edges)), dtype=complex)
    for j, (r, s) in enumerate(edges):
        cols[r - 1, j] = 1j * hmat[r - 1, s - 1] * psi[s - 1]
        cols[s - 1, j] = -1j * hmat[s - 1, r - 1] * psi[r - 1]
    return cols


def _b_of_form(graph, hmat, psi, values):
    """Same derivative for an arbitrary 1-form (vector over canonical edges)."""
    out = np.zeros(graph.n, dtype=complex)
    for i, (r, s) in enumerate(graph.edges):
        a = values[i]
        if a == 0.0:
            continue
        out[r - 1] += 1j * a * hmat[r - 1, s - 1] * psi[s - 1]
        out[s - 1] += -1j * a * hmat[s - 1, r - 1] * psi[r - 1]
    return out


@dataclass(frozen=True)
class HessianBlocks:
    """Block data of the Hessian over the support-adapted decomposition."""

    qin_support_flow: np.ndarray     # Q_in restricted to the flow space W
    qout_cross: np.ndarray           # Q_out restricted to free cross edges
    qout_potential: np.ndarray       # Q_out on coboundary directions
    flow_inertia: Inertia
    cross_inertia: Inertia
    potential_inertia: Inertia       # inertia of -Q_out | coboundaries
    cross_rank: int                  # real rank of B on free cross edges


@dataclass(frozen=True)
class HessianReport:
    matrix: np.ndarray
    value: float
    blocks: HessianBlocks | None = None


def hessian(base, point, k, blocks=False, require_critical=True):
    """Analytic Hessian of the k-th eigenvalue in free-edge coordinates.

    The second-derivative form splits into a coupling term through the
    pseudoinverse of (h_alpha - lambda) and a diagonal phase-curvature term
    -2 Re(h_rs conj(psi_r) psi_s) per edge.  With `blocks=True` (meaningful
    at a critical point whose eigenvector is supported on the partition's
    support set) the support-adapted block decomposition is also returned;
    this requires lambda to avoid the spectrum of the residual block.
    """
    g = base.graph
    part = point.partition
    hmat = assemble(base, point)
    es = eig_herm(hmat)
    if not es.is_simple(k):
        raise MultipleEigenvalueError(f"eigenvalue {k} is not simple")
    lam = es.value(k)
    psi = es.vector(k)
    if require_critical:
        res = criticality_residual(g, hmat, psi)
        if res > tol.CRITICAL_REL * base.norm:
            raise NonCriticalPointError(
                f"criticality residual {res:.3e} above tolerance"
            )

    plus = pseudoinverse(hmat - lam * np.eye(g.n))
    free = part.free_edges
    bcols = _b_columns(g, hmat, psi, free)
    gram = bcols.conj().T @ plus @ bcols
    qout = -2.0 * np.real(gram)
    qin_diag = np.array(
        [
            -2.0 * float(np.real(hmat[r - 1, s - 1] * np.conj(psi[r - 1]) * psi[s - 1]))
            for (r, s) in free
        ]
    )
    full = qout + np.diag(qin_diag)
    full = 0.5 * (full + full.T)

    block_data = None
    if blocks:
        block_data = _hessian_blocks(base, part, hmat, es, k)
    return HessianReport(matrix=full, value=lam, blocks=block_data)


def _hessian_blocks(base, part, hmat, es, k):
    g = base.graph
    lam = es.value(k)
    psi = es.vector(k)

    if part.residual:
        ridx = [v - 1 for v in part.residual]
        res_block = hmat[np.ix_(ridx, ridx)]
        res_inertia = inertia(res_block, shift=lam)
        if res_inertia.n_zero > 0:
            raise ResidualResonanceError(
                "eigenvalue lies in the spectrum of the residual block: "
                "degenerate normal data"
            )

    plus = pseudoinverse(hmat - lam * np.eye(g.n))

    # flow space: kernel of the eigenvector-pairing derivative on support edges
    sup_edges = part.support_edges
    bn = _b_columns(g, hmat, psi, sup_edges)
    stacked = np.vstack([bn.real, bn.imag])
    if stacked.size:
        u_svd, s_svd, vt = np.linalg.svd(stacked)
        smax = s_svd.max(initial=0.0)
        null_mask = np.concatenate(
            [s_svd <= tol.PINV_CUT_REL * max(1.0, smax), np.ones(vt.shape[0] - len(s_svd), bool)]
        )
        flow_basis = vt[null_mask].T  # |E_NN| x w
    else:
        flow_basis = np.zeros((0, 0))
    qin_sup = np.array(
        [
            -2.0 * float(np.real(hmat[r - 1, s - 1] * np.conj(psi[r - 1]) * psi[s - 1]))
            for (r, s) in sup_edges
        ]
    )
    qin_flow = flow_basis.T @ np.diag(qin_sup) @ flow_basis
    qin_flow = 0.5 * (qin_flow + qin_flow.T)
    flow_inertia = inertia(qin_flow) if qin_flow.size else Inertia(0, 0, 0)

    # coupling form on the free cross edges
    cross = part.free_cross
    bz = _b_columns(g, hmat, psi, cross)
    qout_cross = -2.0 * np.real(bz.conj().T @ plus @ bz)
    qout_cross = 0.5 * (qout_cross + qout_cross.T)
    cross_inertia = inertia(qout_cross) if qout_cross.size else Inertia(0, 0, 0)
    stacked_z = np.vstack([bz.real, bz.imag])
    cross_rank = (
        int(np.linalg.matrix_rank(stacked_z, tol=1e-10 * max(1.0, np.abs(stacked_z).max(initial=1.0))))
        if stacked_z.size
        else 0
    )

    # coupling form on coboundary directions d(e_v)
    n = g.n
    bd = np.zeros((n, n), dtype=complex)
    for v in range(1, n + 1):
        theta = np.zeros(n)
        theta[v - 1] = 1.0
        form = coboundary(g, theta)
        bd[:, v - 1] = _b_of_form(g, hmat, psi, np.array(form.values))
    qout_pot = -2.0 * np.real(bd.conj().T @ plus @ bd)
    qout_pot = 0.5 * (qout_pot + qout_pot.T)
    potential_inertia = inertia(-qout_pot)

    return HessianBlocks(
        qin_support_flow=qin_flow,
        qout_cross=qout_cross,
        qout_potential=qout_pot,
        flow_inertia=flow_inertia,
        cross_inertia=cross_inertia,
        potential_inertia=potential_inertia,
        cross_rank=cross_rank,
    )


def cycle_basis_hessian(base, point, k):
    """Hessian expressed on the integer fundamental-cycle basis (the cycles
    of the free edges through the tree)."""
    part = point.partition
    g = base.graph
    rep = hessian(base, point, k)
    cycles = fundamental_cycles(g, part)
    rows = []
    for vec in cycles:
        rows.append(gauge_reduce(OneForm(g, tuple(vec)), part, wrap=False))
    coeff = np.array(rows)  # beta x beta: cycle -> free-edge coordinates
    return coeff @ rep.matrix @ coeff.T


def normalized_cycle_hessian(base, point, k):
    """Cycle-basis Hessian rescaled by n/2.

    For the ground state of the standard Laplacian at the zero point this
    normalization turns the curvature form into the Gram (intersection)
    matrix of the integer cycle basis, whose determinant is the number of
    spanning trees; the n/2 accounts for the unit normalization of the
    constant eigenvector and the per-edge double count in the quadratic
    form."""
    return 0.5 * base.graph.n * cycle_basis_hessian(base, point, k)


def residual_count_below(base, point, lam):
    """Number of eigenvalues of the residual block of the assembled matrix
    lying below lam, and whether lam resonates with that block."""
    part = point.partition
    if not part.residual:
        return 0, False
    hmat = assemble(base, point)
    idx = [v - 1 for v in part.residual]
    block = hmat[np.ix_(idx, idx)]
    i = inertia(block, shift=lam)
    return i.n_minus, i.n_zero > 0


def torus_distance(angles_a, angles_b):
    """Sup metric on the torus: largest circular distance per coordinate."""
    a = np.asarray(angles_a, dtype=float)
    b = np.asarray(angles_b, dtype=float)
    d = np.abs(np.mod(a - b + math.pi, TWO_PI) - math.pi)
    return float(d.max(initial=0.0))


def spectrum_on_torus(base, point):
    return eig_herm(assemble(base, point))


def count_spectrum_below(base, point, lam):
    return count_below(assemble(base, point), lam)


def whole_point(base, angles):
    """Point of the graph's own torus (support = all vertices)."""
    return MagneticPoint(whole_graph_partition(base.graph), tuple(angles))


def convert_point(point, partition):
    """The same gauge class expressed in another partition's tree gauge."""
    g = partition.graph
    if point.partition.graph != g:
        raise GraphError("partitions live on different graphs")
    values = [0.0] * len(g.edges)
    for e, a in zip(point.partition.free_edges, point.angles):
        values[g.edge_index[e]] = a
    return gauge_reduce(OneForm(g, tuple(values)), partition)
