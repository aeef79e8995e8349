"""Experiment suite: random 3-regular graphs, signing sweeps of the nodal
surplus, Kolmogorov-Smirnov statistics of the normalized surplus, critical
point census by support size, and band-edge summaries."""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import thresholds as tol
from .errors import GraphError
from .graphs import Graph, enumerate_admissible_supports, whole_graph_partition
from .linalg import eig_herm
from .linkage import classify as classify_linkage
from .magnetic import MagneticPoint, assemble, enumerate_signings, nodal_count
from .atlas import build_atlas, count_3regular_points, enumerate_critical_data

TWO_PI = 2.0 * math.pi


def random_3regular(n, seed, max_tries=2000):
    """Random simple connected 3-regular graph via the pairing model with
    rejection; deterministic per seed."""
    if n % 2 != 0 or n < 4:
        raise GraphError("3-regular graphs need an even vertex count >= 4")
    rng = np.random.default_rng(seed)
    stubs = np.repeat(np.arange(1, n + 1), 3)
    for _ in range(max_tries):
        perm = rng.permutation(stubs)
        pairs = perm.reshape(-1, 2)
        edges = set()
        ok = True
        for a, b in pairs:
            a, b = int(a), int(b)
            if a == b or (min(a, b), max(a, b)) in edges:
                ok = False
                break
            edges.add((min(a, b), max(a, b)))
        if not ok:
            continue
        try:
            return Graph(n, sorted(edges))
        except GraphError:
            continue
    raise GraphError(f"failed to draw a 3-regular graph on {n} vertices")  # pragma: no cover


def normal_cdf(x):
    return 0.5 * (1.0 + math.erf(x / math.sqrt(2.0)))


def ks_normal_distance(values, weights):
    """Kolmogorov-Smirnov distance between a discrete distribution and the
    standard normal, using the mid-CDF continuity correction at each atom:
    D = max_i |F(x_i) - w_i/2 - Phi(x_i)|."""
    values = np.asarray(values, dtype=float)
    weights = np.asarray(weights, dtype=float)
    total = weights.sum()
    if total <= 0:
        raise ValueError("empty distribution")
    order = np.argsort(values)
    values = values[order]
    weights = weights[order] / total
    cum = np.cumsum(weights)
    d = 0.0
    for x, w, c in zip(values, weights, cum):
        d = max(d, abs((c - 0.5 * w) - normal_cdf(x)))
    return float(d)


@dataclass
class SurplusDistribution:
    k: int
    counts: list                 # histogram over surplus 0..beta
    n_tallied: int
    n_skipped: int
    mean: float | None
    std: float | None
    ks_distance: float | None

    def to_json(self):
        return {
            "k": self.k,
            "counts": list(self.counts),
            "tallied": self.n_tallied,
            "skipped": self.n_skipped,
            "mean": self.mean,
            "std": self.std,
            "ks_distance": self.ks_distance,
        }


def _signing_records(base, signing):
    hmat = assemble(base, signing.to_point())
    es = eig_herm(hmat)
    out = []
    for k in range(1, base.graph.n + 1):
        if not es.is_simple(k):
            out.append((k, None))
            continue
        vec = es.vector(k)
        if np.abs(vec).min() <= tol.SUPPORT_ZERO_ABS:
            out.append((k, None))
            continue
        nu = nodal_count(base.graph, hmat, k, psi=vec)
        out.append((k, nu - (k - 1)))
    return out


def surplus_sweep(base, signing_cap=26, threads=1):
    """Nodal surplus of every eigenvalue of every signing; one distribution
    per eigenvalue label.  Skipped (non-simple or vanishing) eigenpairs are
    counted, never silently dropped."""
    g = base.graph
    beta = g.betti
    part = whole_graph_partition(g)
    signings = enumerate_signings(part, cap=signing_cap)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            all_records = list(pool.map(lambda s: _signing_records(base, s), signings))
    else:
        all_records = [_signing_records(base, s) for s in signings]

    dists = []
    for k in range(1, g.n + 1):
        counts = [0] * (beta + 1)
        skipped = 0
        for rec in all_records:
            sigma = rec[k - 1][1]
            if sigma is None:
                skipped += 1
                continue
            if not (0 <= sigma <= beta):
                raise AssertionError(f"surplus {sigma} outside [0, {beta}]")
            counts[sigma] += 1
        tallied = sum(counts)
        mean = std = ks = None
        if tallied:
            vals = np.arange(beta + 1, dtype=float)
            w = np.array(counts, dtype=float)
            mean = float(np.sum(vals * w) / tallied)
            var = float(np.sum((vals - mean) ** 2 * w) / tallied)
            std = math.sqrt(var)
            if std > 0:
                normalized = (vals - mean) / std
                ks = ks_normal_distance(normalized, w)
        dists.append(
            SurplusDistribution(
                k=k, counts=counts, n_tallied=tallied, n_skipped=skipped,
                mean=mean, std=std, ks_distance=ks,
            )
        )
    return dists


@dataclass
class KsReport:
    per_k: dict
    max_ks: float | None

    def to_json(self):
        return {"per_k": self.per_k, "max_ks": self.max_ks}


def ks_report(distributions):
    """Largest KS distance to the standard normal over eigenvalue labels,
    excluding degenerate labels (zero standard deviation)."""
    per_k = {}
    best = None
    for d in distributions:
        if d.ks_distance is None:
            continue
        per_k[d.k] = d.ks_distance
        best = d.ks_distance if best is None else max(best, d.ks_distance)
    return KsReport(per_k=per_k, max_ks=best)


@dataclass
class CensusReport:
    buckets: dict                 # zero-set size -> number of critical points
    skipped: int
    supports: int

    def to_json(self):
        return {
            "buckets": {str(k): v for k, v in sorted(self.buckets.items())},
            "skipped": self.skipped,
            "supports": self.supports,
        }


def cp_census(base, signing_cap=26):
    """Histogram of critical points of a 3-regular instance by the size of
    the eigenvector's zero set.  Bucket 0 collects the n * 2^beta symmetry
    points; each feasible datum with a proper support contributes
    2^(n - support size) points."""
    g = base.graph
    if any(g.degree(v) != 3 for v in range(1, g.n + 1)):
        raise GraphError("census requires a 3-regular graph")
    buckets = {0: g.n * 2 ** g.betti}
    skipped = 0
    supports = enumerate_admissible_supports(g)
    proper = [s for s in supports if len(s) < g.n]
    enum = enumerate_critical_data(base, supports=proper, signing_cap=signing_cap)
    skipped += len(enum.skipped)
    for data in enum.valid_entries():
        pts = count_3regular_points(base, data)
        if pts:
            size = g.n - len(data.support)
            buckets[size] = buckets.get(size, 0) + pts
    return CensusReport(buckets=buckets, skipped=skipped, supports=len(supports))


@dataclass
class BandReport:
    intervals: list    # per k: (min, max)
    witnesses: list    # per k: (min_witness, max_witness)
    gaps: list         # gap between band k and k+1 (0 when overlapping)

    def to_json(self):
        return {
            "intervals": [[a, b] for a, b in self.intervals],
            "gaps": self.gaps,
            "witnesses": self.witnesses,
        }


def band_edges(base, mode="auto", resolution=16, samples=12, seed=0):
    """Per-label eigenvalue range over the torus with extremum witnesses.

    Grid mode sweeps the whole torus (needs at most 4 free edges); atlas
    mode takes extrema over the signing points and the sampled critical
    manifolds, recording the witness classification."""
    g = base.graph
    beta = g.betti
    if mode == "auto":
        mode = "grid" if beta <= 4 else "atlas"
    n = g.n
    lo = [np.inf] * n
    hi = [-np.inf] * n
    lo_wit = [None] * n
    hi_wit = [None] * n

    def absorb(values, witness):
        for i in range(n):
            v = float(values[i])
            if v < lo[i]:
                lo[i] = v
                lo_wit[i] = witness
            if v > hi[i]:
                hi[i] = v
                hi_wit[i] = witness

    if mode == "grid":
        part = whole_graph_partition(g)
        if beta == 0:
            absorb(np.linalg.eigvalsh(base.matrix), {"type": "point"})
        else:
            axes = np.arange(resolution) * (TWO_PI / resolution)
            for idx in itertools.product(range(resolution), repeat=beta):
                p = MagneticPoint(part, tuple(axes[i] for i in idx))
                vals = np.linalg.eigvalsh(assemble(base, p))
                absorb(vals, {"type": "grid", "angles": p.to_json()})
    elif mode == "atlas":
        part = whole_graph_partition(g)
        for signing in enumerate_signings(part):
            vals = np.linalg.eigvalsh(assemble(base, signing.to_point()))
            absorb(vals, {"type": "signing", "bits": signing.bitstring()})
        reports, _ = build_atlas(base, samples=samples, seed=seed)
        for rep in reports:
            for s in rep.samples:
                vals = np.linalg.eigvalsh(assemble(base, s.point))
                absorb(vals, {
                    "type": "critical-sample",
                    "support": list(rep.data.support),
                    "extremum": s.extremum,
                })
    else:
        raise ValueError(f"unknown mode {mode!r}")

    intervals = [(lo[i], hi[i]) for i in range(n)]
    gaps = []
    for i in range(n - 1):
        gaps.append(max(0.0, lo[i + 1] - hi[i]))
    return BandReport(
        intervals=intervals,
        witnesses=[(lo_wit[i], hi_wit[i]) for i in range(n)],
        gaps=gaps,
    )
