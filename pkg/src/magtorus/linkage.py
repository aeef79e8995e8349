"""Planar linkage spaces: configurations of d rigid links of prescribed
lengths closing into a loop, modulo rotation.

The gauge fixes the last link along the negative real axis (theta_d = pi),
so a point is a zero of f(theta) = sum_{j<d} b_j exp(i theta_j) - b_d on the
(d-1)-torus.  Genericity (no vanishing signed sum of the lengths) makes the
solution set a manifold of dimension d - 3 with one or two components.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import thresholds as tol
from .errors import (
    DegenerateLinkageError,
    EmptyLinkageError,
    SamplingExhaustedError,
)


@dataclass(frozen=True)
class LinkageSpec:
    b: tuple

    def __post_init__(self):
        if len(self.b) < 1 or any(x <= 0 for x in self.b):
            raise DegenerateLinkageError(f"link lengths must be positive, got {self.b}")
        object.__setattr__(self, "b", tuple(float(x) for x in self.b))

    @property
    def d(self):
        return len(self.b)

    @property
    def total(self):
        return float(sum(self.b))

    def sorted_desc(self):
        return tuple(sorted(self.b, reverse=True))


@dataclass(frozen=True)
class LinkagePoint:
    thetas: tuple          # angles in [0, 2pi), last one is pi
    residual: float
    component: int = 0     # +1/-1 when the space has two components, else 0


@dataclass(frozen=True)
class LinkageClass:
    empty: bool
    dim: int | None
    components: int | None


def is_generic(spec):
    """No signed sum of the lengths vanishes (within 1e-12 * total)."""
    b = np.asarray(spec.b)
    d = len(b)
    signs = np.array(
        [[1.0] + [1.0 if (k >> j) & 1 == 0 else -1.0 for j in range(d - 1)]
         for k in range(2 ** (d - 1))]
    )
    sums = signs @ b
    return bool(np.abs(sums).min() > tol.LINKAGE_GENERIC_REL * spec.total)


def classify(spec):
    """Nonemptiness, dimension d-3 and component count of the linkage space."""
    if not is_generic(spec):
        raise DegenerateLinkageError(
            f"degenerate linkage: some signed sum of {spec.b} vanishes"
        )
    srt = spec.sorted_desc()
    half = 0.5 * spec.total
    margin = tol.STRICT_MARGIN_REL * spec.total
    if abs(srt[0] - half) <= margin:
        raise DegenerateLinkageError("near-degenerate linkage: longest link at half total")
    if spec.d < 3 or srt[0] > half:
        return LinkageClass(empty=True, dim=None, components=None)
    two = srt[1] + srt[2]
    if abs(two - half) <= margin:
        raise DegenerateLinkageError("near-degenerate linkage: component rule at boundary")
    components = 1 if two < half else 2
    return LinkageClass(empty=False, dim=spec.d - 3, components=components)


def _closure(spec, thetas):
    b = np.asarray(spec.b)
    th = np.asarray(thetas)
    return complex(np.sum(b * np.exp(1j * th)))


def _component_label(spec, thetas):
    """Sign of the oriented angle between the two longest links.

    When the space has two components the two longest links are never
    parallel or antiparallel on it, so this sign is constant on each
    component and conjugation flips it.
    """
    order = sorted(range(spec.d), key=lambda j: (-spec.b[j], j))
    i1, i2 = order[0], order[1]
    s = math.sin(thetas[i2] - thetas[i1])
    return 1 if s > 0 else -1


def _wrap(theta):
    return float(np.mod(theta, 2.0 * math.pi))


def _make_point(spec, thetas, components):
    res = abs(_closure(spec, thetas))
    if res > tol.LINKAGE_RESIDUAL_REL * spec.total:
        raise SamplingExhaustedError(f"closure residual {res:.3e} too large")
    label = _component_label(spec, thetas) if components == 2 else 0
    return LinkagePoint(thetas=tuple(_wrap(t) for t in thetas), residual=res, component=label)


def solve_triangle(b):
    """The two closed configurations of a 3-link loop (conjugate pair)."""
    spec = b if isinstance(b, LinkageSpec) else LinkageSpec(tuple(b))
    if spec.d != 3:
        raise DegenerateLinkageError(f"need exactly 3 links, got {spec.d}")
    cls = classify(spec)
    if cls.empty:
        raise EmptyLinkageError(f"links {spec.b} violate the strict triangle inequality")
    b1, b2, b3 = spec.b
    cos1 = (b1 * b1 + b3 * b3 - b2 * b2) / (2.0 * b1 * b3)
    cos1 = min(1.0, max(-1.0, cos1))
    points = []
    for sign in (+1, -1):
        t1 = sign * math.acos(cos1)
        rest = b3 - b1 * complex(math.cos(t1), math.sin(t1))
        t2 = math.atan2(rest.imag, rest.real)
        points.append(_make_point(spec, (t1, t2, math.pi), components=2))
    return points


def two_link_solutions(b1, b2, target):
    """Angles (t1, t2) with b1 e^{i t1} + b2 e^{i t2} = target; empty when the
    target is out of reach."""
    w = complex(target)
    r = abs(w)
    lo, hi = abs(b1 - b2), b1 + b2
    eps = tol.STRICT_MARGIN_REL * (b1 + b2 + r + 1.0)
    if r < lo + eps or r > hi - eps:
        return []
    cos1 = (b1 * b1 + r * r - b2 * b2) / (2.0 * b1 * r)
    cos1 = min(1.0, max(-1.0, cos1))
    base = math.atan2(w.imag, w.real)
    out = []
    for sign in (+1, -1):
        t1 = base + sign * math.acos(cos1)
        rest = w - b1 * complex(math.cos(t1), math.sin(t1))
        t2 = math.atan2(rest.imag, rest.real)
        out.append((t1, t2))
    return out


def sample_points(spec, count, seed):
    """Sample at least `count` points per connected component.

    For d = 3 the space is the two triangle solutions.  For d >= 4 each draw
    freezes d-3 of the free angles uniformly at random, folds the frozen
    links into the closing target and solves the remaining two links in
    closed form; draws failing the reach condition are retried.
    """
    spec = spec if isinstance(spec, LinkageSpec) else LinkageSpec(tuple(spec))
    cls = classify(spec)
    if cls.empty:
        raise EmptyLinkageError(f"linkage {spec.b} is empty")
    if spec.d == 3:
        return solve_triangle(spec)

    rng = np.random.default_rng(seed)
    b = spec.b
    d = spec.d
    labels = [1, -1] if cls.components == 2 else [0]
    need = {lab: count for lab in labels}
    points = []
    budget = 400 * count * len(labels) + 2000
    attempts = 0
    while any(v > 0 for v in need.values()):
        attempts += 1
        if attempts > budget:
            raise SamplingExhaustedError(
                f"could not reach {count} points per component of {spec.b} "
                f"within {budget} draws"
            )
        free = rng.choice(d - 1, size=2, replace=False)
        j1, j2 = int(min(free)), int(max(free))
        thetas = np.zeros(d)
        thetas[d - 1] = math.pi
        frozen = [j for j in range(d - 1) if j not in (j1, j2)]
        thetas[frozen] = rng.uniform(0.0, 2.0 * math.pi, size=len(frozen))
        v = sum(b[j] * complex(math.cos(thetas[j]), math.sin(thetas[j])) for j in frozen)
        target = b[d - 1] - v
        for t1, t2 in two_link_solutions(b[j1], b[j2], target):
            thetas[j1], thetas[j2] = t1, t2
            pt = _make_point(spec, thetas.copy(), cls.components)
            if need.get(pt.component, 0) > 0:
                need[pt.component] -= 1
                points.append(pt)
    return points


def conjugate_point(spec, point):
    """Reflection theta -> -theta; preserves the gauge since -pi = pi."""
    spec = spec if isinstance(spec, LinkageSpec) else LinkageSpec(tuple(spec))
    thetas = tuple(_wrap(-t) for t in point.thetas[:-1]) + (math.pi,)
    comps = 2 if point.component != 0 else 1
    return _make_point(spec, thetas, comps)


def closure_jacobian(spec, thetas):
    """Real 2 x (d-1) Jacobian of the closure map at a configuration."""
    b = np.asarray(spec.b[: spec.d - 1])
    th = np.asarray(thetas[: spec.d - 1])
    dz = 1j * b * np.exp(1j * th)
    return np.vstack([dz.real, dz.imag])


def jacobian_min_singular(spec, thetas):
    return float(np.linalg.svd(closure_jacobian(spec, thetas), compute_uv=False).min())


def refine(spec, thetas, iterations=4):
    """A few Gauss-Newton steps on the closure equation (gauge angle fixed)."""
    th = np.array(thetas, dtype=float)
    for _ in range(iterations):
        f = _closure(spec, th)
        jac = closure_jacobian(spec, th)
        step = np.linalg.lstsq(jac.T @ jac + 1e-12 * np.eye(jac.shape[1]),
                               -(jac.T @ np.array([f.real, f.imag])), rcond=None)[0]
        th[: spec.d - 1] += step
    return th


def mc_nonempty(spec, trials, seed, rel_threshold=1e-3, refine_best=1000):
    """Monte Carlo nonemptiness: uniform random configurations, closure
    residual below rel_threshold * total detects a solution.  The best
    candidates get a few Gauss-Newton polish steps, which cannot invent
    solutions of an empty linkage (its closure gap is bounded below) but
    makes detection of thin solution sets reliable.
    """
    spec = spec if isinstance(spec, LinkageSpec) else LinkageSpec(tuple(spec))
    rng = np.random.default_rng(seed)
    b = np.asarray(spec.b)
    d = spec.d
    cutoff = rel_threshold * spec.total
    best = np.inf
    best_rows = []
    chunk = 200_000
    done = 0
    while done < trials:
        size = min(chunk, trials - done)
        done += size
        th = rng.uniform(0.0, 2.0 * math.pi, size=(size, d - 1))
        z = (np.exp(1j * th) * b[: d - 1]).sum(axis=1) - b[d - 1]
        res = np.abs(z)
        if res.min() < best:
            best = float(res.min())
        if res.min() <= cutoff:
            return True, float(res.min())
        take = min(max(1, refine_best // max(1, trials // size)), size)
        idx = np.argpartition(res, take - 1)[:take]
        best_rows.extend(th[idx])
    for row in best_rows[:refine_best]:
        th = np.concatenate([row, [math.pi]])
        polished = refine(spec, th, iterations=6)
        r = abs(_closure(spec, polished))
        best = min(best, r)
        if r <= cutoff:
            return True, best
    return False, best
