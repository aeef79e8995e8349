"""Independent brute-force verifiers: finite-difference derivatives of
eigenvalue functions, torus grid search for critical points with Newton
refinement, and exhaustive checks on small instances.

Nothing here shares code with the analytic gradient/Hessian paths; these are
the ground truth the rest of the package is tested against.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from . import thresholds as tol
from .errors import MultipleEigenvalueError
from .graphs import whole_graph_partition
from .linalg import eig_herm, spectral_radius
from .magnetic import (
    MagneticPoint,
    assemble,
    enumerate_signings,
    gradient,
    hessian,
    nodal_count,
    torus_distance,
)

TWO_PI = 2.0 * math.pi


def _value_at(base, partition, angles, k, check_gap=True):
    es = eig_herm(assemble(base, MagneticPoint(partition, tuple(angles))))
    if check_gap and not es.is_simple(k):
        raise MultipleEigenvalueError(
            f"eigenvalue {k} loses simplicity inside the stencil"
        )
    return es.value(k)


def fd_gradient(base, point, k, step=tol.FD_STEP, richardson=False):
    """Central-difference gradient of the k-th eigenvalue in free-edge
    coordinates; optional one-level Richardson extrapolation."""
    part = point.partition
    x = np.array(point.angles)
    m = len(x)

    def grad_with(h):
        out = np.empty(m)
        for i in range(m):
            xp, xm = x.copy(), x.copy()
            xp[i] += h
            xm[i] -= h
            out[i] = (_value_at(base, part, xp, k) - _value_at(base, part, xm, k)) / (2 * h)
        return out

    g1 = grad_with(step)
    if not richardson:
        return g1
    g2 = grad_with(step / 2.0)
    return (4.0 * g2 - g1) / 3.0


def fd_hessian(base, point, k, step=1e-3):
    """Central second differences of the k-th eigenvalue."""
    part = point.partition
    x = np.array(point.angles)
    m = len(x)
    f0 = _value_at(base, part, x, k)
    out = np.empty((m, m))
    for i in range(m):
        xp, xm = x.copy(), x.copy()
        xp[i] += step
        xm[i] -= step
        out[i, i] = (
            _value_at(base, part, xp, k) - 2.0 * f0 + _value_at(base, part, xm, k)
        ) / step**2
    for i in range(m):
        for j in range(i + 1, m):
            vals = {}
            for si, sj in itertools.product((+1, -1), repeat=2):
                y = x.copy()
                y[i] += si * step
                y[j] += sj * step
                vals[(si, sj)] = _value_at(base, part, y, k)
            out[i, j] = out[j, i] = (
                vals[(1, 1)] - vals[(1, -1)] - vals[(-1, 1)] + vals[(-1, -1)]
            ) / (4.0 * step**2)
    return out


def fd_index(base, point, k, step=1e-3, zero_tol=1e-4):
    """Morse index and nullity of the finite-difference Hessian."""
    hess = fd_hessian(base, point, k, step=step)
    evals = np.linalg.eigvalsh(hess)
    scale = max(1.0, np.abs(evals).max(initial=0.0))
    cut = zero_tol * scale
    return int(np.sum(evals < -cut)), int(np.sum(np.abs(evals) <= cut))


@dataclass
class Candidate:
    point: MagneticPoint
    grad_norm: float
    value: float
    gap: float
    kind: str  # "signing" | "interior" | "nonsmooth"

    def to_json(self):
        return {
            "angles": self.point.to_json(),
            "grad_norm": self.grad_norm,
            "value": self.value,
            "gap": self.gap,
            "kind": self.kind,
        }


@dataclass
class GridSearchResult:
    k: int
    resolution: int
    candidates: list
    nonsmooth_cells: int
    scanned: int

    def of_kind(self, kind):
        return [c for c in self.candidates if c.kind == kind]

    def to_json(self):
        return {
            "k": self.k,
            "resolution": self.resolution,
            "scanned": self.scanned,
            "nonsmooth_cells": self.nonsmooth_cells,
            "candidates": [c.to_json() for c in self.candidates],
        }


def _is_signing_point(angles, atol=1e-6):
    a = np.mod(np.asarray(angles), TWO_PI)
    near0 = np.minimum(a, TWO_PI - a) <= atol
    nearpi = np.abs(a - math.pi) <= atol
    return bool(np.all(near0 | nearpi))


def grid_search_critical(base, k, resolution=12, refine_tol=tol.REFINE_GRAD_TOL,
                         max_newton=50):
    """Scan the torus on a regular grid, Newton-refine every local minimum of
    the squared gradient norm, and classify the refined points.

    Conservative by construction: candidates below the resolution may be
    missed, but every reported candidate has refined gradient norm below
    `refine_tol` (or carries the "nonsmooth" tag when the eigenvalue gap
    collapsed during refinement)."""
    part = whole_graph_partition(base.graph)
    beta = len(part.free_edges)
    if beta > 4:
        raise ValueError(f"grid search limited to 4 free edges, got {beta}")
    if beta == 0:
        return GridSearchResult(k=k, resolution=resolution, candidates=[],
                                nonsmooth_cells=0, scanned=0)

    axes = np.arange(resolution) * (TWO_PI / resolution)
    shape = (resolution,) * beta
    gnorm = np.full(shape, np.inf)
    nonsmooth = 0
    for idx in itertools.product(range(resolution), repeat=beta):
        angles = tuple(axes[i] for i in idx)
        p = MagneticPoint(part, angles)
        es = eig_herm(assemble(base, p))
        scale = max(1.0, spectral_radius(es.values))
        if es.simple_margin(k) <= tol.SIMPLE_GAP_REL * scale * 10:
            nonsmooth += 1
            continue
        gnorm[idx] = np.linalg.norm(gradient(base, p, k))

    candidates = []
    for idx in itertools.product(range(resolution), repeat=beta):
        val = gnorm[idx]
        if not np.isfinite(val):
            continue
        is_min = True
        for axis in range(beta):
            for d in (-1, +1):
                jdx = list(idx)
                jdx[axis] = (jdx[axis] + d) % resolution
                if gnorm[tuple(jdx)] < val:
                    is_min = False
                    break
            if not is_min:
                break
        if is_min:
            candidates.append(tuple(axes[i] for i in idx))

    refined = []
    for start in candidates:
        res = _newton_refine(base, part, start, k, refine_tol, max_newton)
        if res is None:
            continue
        angles, gn, value, gap, smooth = res
        kind = "nonsmooth" if not smooth else (
            "signing" if _is_signing_point(angles) else "interior"
        )
        p = MagneticPoint(part, angles)
        if any(
            torus_distance(p.angles, c.point.angles) < 1e-5 and c.kind == kind
            for c in refined
        ):
            continue
        refined.append(Candidate(point=p, grad_norm=gn, value=value, gap=gap, kind=kind))
    return GridSearchResult(
        k=k, resolution=resolution, candidates=refined,
        nonsmooth_cells=nonsmooth, scanned=resolution**beta,
    )


def _newton_refine(base, part, start, k, refine_tol, max_newton):
    """Damped Newton on the gradient; once below `refine_tol` it keeps
    polishing (pseudoinverse-regularized steps) toward the numerical floor,
    which matters near critical manifolds with nearly flat normal data."""
    x = np.array(start)
    best = None  # (grad_norm, x, value, gap)
    for _ in range(max_newton):
        p = MagneticPoint(part, tuple(x))
        es = eig_herm(assemble(base, p))
        scale = max(1.0, spectral_radius(es.values))
        gap = es.simple_margin(k)
        if gap <= tol.SIMPLE_GAP_REL * scale:
            if best is not None and best[0] <= refine_tol:
                break
            return tuple(np.mod(x, TWO_PI)), np.nan, es.value(k), gap, False
        g = gradient(base, p, k)
        gn = float(np.linalg.norm(g))
        if best is None or gn < best[0]:
            best = (gn, x.copy(), es.value(k), gap)
        if gn <= max(refine_tol * 1e-4, 1e-13):
            break
        hess = hessian(base, p, k, require_critical=False).matrix
        step = -np.linalg.pinv(hess, rcond=1e-8) @ g
        if not np.all(np.isfinite(step)):
            step = -g
        t = 1.0
        while t > 1e-8:
            try:
                p2 = MagneticPoint(part, tuple(x + t * step))
                g2 = float(np.linalg.norm(gradient(base, p2, k)))
                if g2 < gn * (1.0 - 1e-4 * t) or g2 < refine_tol * 1e-4:
                    break
            except MultipleEigenvalueError:
                pass
            t *= 0.5
        else:
            break
        x = x + t * step
    if best is None or best[0] > refine_tol:
        return None
    gn, x, value, gap = best
    return tuple(np.mod(x, TWO_PI)), gn, value, gap, True


@dataclass
class SigningRecord:
    bits: str
    k: int
    surplus: int
    fd_morse_index: int
    fd_nullity: int
    match: bool


@dataclass
class SmallVerifyReport:
    records: list
    skipped: list
    all_match: bool

    def distribution(self, k):
        """Histogram of the surplus over signings for one eigenvalue label."""
        counts = {}
        for r in self.records:
            if r.k == k:
                counts[r.surplus] = counts.get(r.surplus, 0) + 1
        return counts


def exhaustive_small_verify(base, fd_step=1e-3):
    """For every signing and every admissible eigenvalue label of a small
    instance: the finite-difference Morse index must equal the nodal surplus
    with zero nullity.  Non-simple or somewhere-vanishing eigenpairs are
    skipped and reported."""
    g = base.graph
    if g.n > 8 or g.betti > 3:
        raise ValueError("exhaustive verification is limited to n <= 8, betti <= 3")
    part = whole_graph_partition(g)
    records = []
    skipped = []
    for signing in enumerate_signings(part):
        point = signing.to_point()
        hmat = assemble(base, point)
        es = eig_herm(hmat)
        for k in range(1, g.n + 1):
            if not es.is_simple(k):
                skipped.append((signing.bitstring(), k, "multiple eigenvalue"))
                continue
            vec = es.vector(k)
            if np.abs(vec).min() <= tol.SUPPORT_ZERO_ABS:
                skipped.append((signing.bitstring(), k, "vanishing entry"))
                continue
            sigma = nodal_count(g, hmat, k, psi=vec) - (k - 1)
            idx, nullity = fd_index(base, point, k, step=fd_step)
            records.append(
                SigningRecord(
                    bits=signing.bitstring(), k=k, surplus=sigma,
                    fd_morse_index=idx, fd_nullity=nullity,
                    match=(idx == sigma and nullity == 0),
                )
            )
    return SmallVerifyReport(
        records=records, skipped=skipped,
        all_match=all(r.match for r in records),
    )
