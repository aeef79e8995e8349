"""Dense Hermitian linear algebra: ordered eigendecomposition, pseudoinverse,
inertia, spectral-shift compression and the real-part-of-a-Hermitian-form
inertia identity.

All operations take plain numpy arrays and use 0-based matrix indices; the
graph-facing modules translate 1-based vertex labels before calling in.  The
zero/simplicity threshold policy lives in `thresholds` and is shared by every
count below.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from . import thresholds as tol
from .errors import HypothesisError, NotHermitianError, VerificationError


def check_hermitian(h):
    h = np.asarray(h)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise NotHermitianError(f"expected a square matrix, got shape {h.shape}")
    scale = max(1.0, float(np.abs(h).max(initial=0.0)))
    if np.abs(h - h.conj().T).max(initial=0.0) > 1e-10 * scale:
        raise NotHermitianError("matrix is not conjugate-symmetric")
    return h


def spectral_radius(values):
    values = np.asarray(values, dtype=float)
    return float(np.abs(values).max(initial=0.0))


def zero_threshold(values):
    """Absolute size below which an eigenvalue counts as zero."""
    return tol.ZERO_EIG_REL * max(1.0, spectral_radius(values))


@dataclass(frozen=True)
class EigenSystem:
    values: np.ndarray          # ascending
    vectors: np.ndarray         # orthonormal columns, phase-fixed
    gap_below: np.ndarray
    gap_above: np.ndarray

    @property
    def dim(self):
        return len(self.values)

    def simple_margin(self, k):
        """min(gap below, gap above) of eigenvalue number k (1-based)."""
        return float(min(self.gap_below[k - 1], self.gap_above[k - 1]))

    def is_simple(self, k):
        scale = max(1.0, spectral_radius(self.values))
        return self.simple_margin(k) > tol.SIMPLE_GAP_REL * scale

    def value(self, k):
        return float(self.values[k - 1])

    def vector(self, k):
        return self.vectors[:, k - 1]


def _fix_phases(vectors):
    """Rotate each column so its first non-negligible entry is real positive."""
    out = vectors.copy()
    for j in range(out.shape[1]):
        col = out[:, j]
        idx = np.nonzero(np.abs(col) > tol.SUPPORT_ZERO_ABS)[0]
        i = idx[0] if len(idx) else int(np.argmax(np.abs(col)))
        pivot = col[i]
        if np.iscomplexobj(out):
            out[:, j] = col * (np.conj(pivot) / abs(pivot))
        elif pivot < 0:
            out[:, j] = -col
    return out


def eig_herm(h):
    """Ordered eigendecomposition of a Hermitian matrix.

    Real symmetric input yields real eigenvectors.  Eigenvector phase is
    fixed so the first entry above the zero threshold is real positive,
    making signings and nodal counts reproducible.
    """
    h = check_hermitian(h)
    if np.iscomplexobj(h) and np.abs(h.imag).max(initial=0.0) <= 1e-14 * max(
        1.0, np.abs(h).max(initial=0.0)
    ):
        h = h.real
    values, vectors = np.linalg.eigh(h)
    vectors = _fix_phases(vectors)
    n = len(values)
    scale = max(1.0, spectral_radius(values))
    resid = np.abs(h @ vectors - vectors * values[None, :]).max(initial=0.0)
    if resid > 1e3 * tol.EIG_RESIDUAL_REL * scale * max(1, n):
        raise VerificationError(f"eigendecomposition residual {resid:.3e}")
    diffs = np.diff(values)
    gap_below = np.concatenate(([np.inf], diffs))
    gap_above = np.concatenate((diffs, [np.inf]))
    return EigenSystem(values=values, vectors=vectors, gap_below=gap_below, gap_above=gap_above)


def pseudoinverse(h):
    """Moore-Penrose pseudoinverse of a Hermitian matrix.

    Eigenvalues of magnitude at most PINV_CUT_REL * spectral radius are
    treated as zero, so the output satisfies the four Penrose conditions and
    preserves inertia.
    """
    h = check_hermitian(h)
    if h.shape[0] == 0:
        return h.copy()
    values, vectors = np.linalg.eigh(h)
    cut = tol.PINV_CUT_REL * spectral_radius(values)
    inv = np.where(np.abs(values) > cut, 1.0 / np.where(values == 0, 1.0, values), 0.0)
    inv[np.abs(values) <= cut] = 0.0
    out = (vectors * inv[None, :]) @ vectors.conj().T
    out = 0.5 * (out + out.conj().T)
    if not np.iscomplexobj(h):
        out = out.real
    return out


@dataclass(frozen=True)
class Inertia:
    n_plus: int
    n_minus: int
    n_zero: int

    @property
    def dim(self):
        return self.n_plus + self.n_minus + self.n_zero

    def as_tuple(self):
        return (self.n_plus, self.n_minus, self.n_zero)


def inertia_of_values(values):
    values = np.asarray(values, dtype=float)
    thr = zero_threshold(values)
    n_zero = int(np.sum(np.abs(values) <= thr))
    n_plus = int(np.sum(values > thr))
    n_minus = int(np.sum(values < -thr))
    return Inertia(n_plus=n_plus, n_minus=n_minus, n_zero=n_zero)


def inertia(h, shift=0.0):
    """Counts of eigenvalues of (h - shift*I) above/below/at zero."""
    h = check_hermitian(h)
    if h.shape[0] == 0:
        return Inertia(0, 0, 0)
    values = np.linalg.eigvalsh(h - shift * np.eye(h.shape[0]))
    return inertia_of_values(values)


def count_below(h, level):
    """Number of eigenvalues strictly below `level` (threshold policy)."""
    return inertia(h, shift=level).n_minus


@dataclass(frozen=True)
class SpectralShiftResult:
    compression_inertia: Inertia   # inertia of the compression of (h-l)^+
    full_inertia: Inertia          # inertia of h - lambda
    complement_inertia: Inertia    # inertia of D - lambda
    holds: bool


def spectral_shift_compression(h, v0, lam):
    """Inertia of the compression of (h - lam)^+ to the coordinates v0, with
    the identity n_*(R0) = n_*(h - lam) - n_*(D - lam) checked.

    Requires lam to be an eigenvalue of h with an eigenvector vanishing on
    v0, and ker(D - lam) inside ker(B), where D is the complementary diagonal
    block and B the coupling block.
    """
    h = check_hermitian(h)
    n = h.shape[0]
    v0 = np.asarray(sorted(set(int(i) for i in v0)), dtype=int)
    if len(v0) == 0 or v0.min() < 0 or v0.max() >= n:
        raise HypothesisError("index set inside matrix dimensions")
    v1 = np.array([i for i in range(n) if i not in set(v0.tolist())], dtype=int)

    es = eig_herm(h)
    shifted_scale = max(1.0, spectral_radius(es.values - lam))
    eig_tol = tol.ZERO_EIG_REL * shifted_scale
    at_lam = np.nonzero(np.abs(es.values - lam) <= eig_tol)[0]
    if len(at_lam) == 0:
        raise HypothesisError("lambda is an eigenvalue of h",
                              f"closest eigenvalue is {es.values[np.argmin(np.abs(es.values - lam))]:.6g}")
    vanishing = [k for k in at_lam if np.abs(es.vectors[v0, k]).max(initial=0.0) <= tol.SUPPORT_ZERO_ABS]
    if not vanishing:
        raise HypothesisError("eigenvector of lambda vanishes on the index set")

    d_block = h[np.ix_(v1, v1)]
    b_block = h[np.ix_(v0, v1)]
    if len(v1):
        dvals, dvecs = np.linalg.eigh(d_block)
        kernel = np.nonzero(np.abs(dvals - lam) <= tol.ZERO_EIG_REL * max(1.0, spectral_radius(dvals - lam)))[0]
        b_scale = max(1.0, float(np.abs(b_block).max(initial=0.0)))
        for k in kernel:
            if np.linalg.norm(b_block @ dvecs[:, k]) > 1e-8 * b_scale:
                raise HypothesisError("ker(D - lambda) inside ker(B)")

    plus = pseudoinverse(h - lam * np.eye(n))
    r0 = plus[np.ix_(v0, v0)]
    i_r0 = inertia(r0)
    i_h = inertia(h, shift=lam)
    i_d = inertia(d_block, shift=lam) if len(v1) else Inertia(0, 0, 0)
    holds = (
        i_r0.n_plus == i_h.n_plus - i_d.n_plus
        and i_r0.n_minus == i_h.n_minus - i_d.n_minus
        and i_r0.n_zero == i_h.n_zero - i_d.n_zero
    )
    return SpectralShiftResult(i_r0, i_h, i_d, holds)


@dataclass(frozen=True)
class HaynsworthResult:
    full_inertia: Inertia
    d_inertia: Inertia
    complement_inertia: Inertia    # inertia of A - B D^+ B^*
    holds: bool


def haynsworth_inertia(a_block, b_block, d_block):
    """Inertia additivity over a generalized Schur complement:
    n_*([[A, B], [B^*, D]]) = n_*(D) + n_*(A - B D^+ B^*), valid whenever
    ker(D) is contained in ker(B)."""
    a_block = np.asarray(a_block)
    b_block = np.asarray(b_block)
    d_block = np.asarray(d_block)
    p, q = a_block.shape[0], d_block.shape[0]
    if b_block.shape != (p, q):
        raise HypothesisError("block shapes compatible",
                              f"A is {a_block.shape}, B is {b_block.shape}, D is {d_block.shape}")
    check_hermitian(a_block)
    check_hermitian(d_block)
    if q:
        dvals, dvecs = np.linalg.eigh(d_block)
        kernel = np.nonzero(np.abs(dvals) <= zero_threshold(dvals))[0]
        b_scale = max(1.0, float(np.abs(b_block).max(initial=0.0)))
        for k in kernel:
            if np.linalg.norm(b_block @ dvecs[:, k]) > 1e-8 * b_scale:
                raise HypothesisError("ker(D) inside ker(B)")
    complex_any = any(np.iscomplexobj(m) for m in (a_block, b_block, d_block))
    dtype = complex if complex_any else float
    full = np.zeros((p + q, p + q), dtype=dtype)
    full[:p, :p] = a_block
    full[:p, p:] = b_block
    full[p:, :p] = b_block.conj().T
    full[p:, p:] = d_block
    schur = a_block - b_block @ pseudoinverse(d_block) @ b_block.conj().T
    i_full = inertia(full)
    i_d = inertia(d_block)
    i_schur = inertia(schur)
    holds = (
        i_full.n_plus == i_d.n_plus + i_schur.n_plus
        and i_full.n_minus == i_d.n_minus + i_schur.n_minus
        and i_full.n_zero == i_d.n_zero + i_schur.n_zero
    )
    return HaynsworthResult(i_full, i_d, i_schur, holds)


@dataclass(frozen=True)
class RealFormResult:
    inertia: Inertia
    expected: Inertia
    holds: bool


def real_part_form_inertia(hmat, b_map):
    """Inertia of the real bilinear form Q(x, y) = Re <Bx, H By> on R^m.

    `b_map` is a complex n x m matrix acting on real vectors (every real
    linear map R^m -> C^n has this shape).  It must be surjective over the
    reals, i.e. [Re B; Im B] has rank 2n.  The inertia is computed directly
    from the real symmetric matrix Re(B^* H B) and checked against
    (2 n_+(H), 2 n_-(H), 2 n_0(H) + m - 2n).
    """
    hmat = check_hermitian(hmat)
    b_map = np.asarray(b_map, dtype=complex)
    n = hmat.shape[0]
    if b_map.shape[0] != n:
        raise HypothesisError("map target dimension matches H",
                              f"H is {n}x{n}, map is {b_map.shape}")
    m = b_map.shape[1]
    stacked = np.vstack([b_map.real, b_map.imag])
    rank = int(np.linalg.matrix_rank(stacked, tol=1e-10 * max(1.0, np.abs(stacked).max(initial=0.0))))
    if rank < 2 * n:
        raise HypothesisError("b_map surjective over the reals",
                              f"real rank is {rank}, need {2 * n}")
    q_form = np.real(b_map.conj().T @ hmat @ b_map)
    q_form = 0.5 * (q_form + q_form.T)
    got = inertia(q_form)
    ih = inertia(hmat)
    expected = Inertia(2 * ih.n_plus, 2 * ih.n_minus, 2 * ih.n_zero + m - 2 * n)
    return RealFormResult(got, expected, got == expected)


def herm_to_json(h):
    h = check_hermitian(h)
    out = {"dim": int(h.shape[0]), "re": np.real(h).tolist()}
    if np.iscomplexobj(h) and np.abs(h.imag).max(initial=0.0) > 0:
        out["im"] = np.imag(h).tolist()
    return out


def herm_from_json(obj):
    if isinstance(obj, (str, bytes)):
        obj = json.loads(obj)
    dim = int(obj["dim"])
    re = np.array(obj["re"], dtype=float)
    if re.shape != (dim, dim):
        raise NotHermitianError(f"'re' must be {dim}x{dim}")
    if "im" in obj and obj["im"] is not None:
        im = np.array(obj["im"], dtype=float)
        if im.shape != (dim, dim):
            raise NotHermitianError(f"'im' must be {dim}x{dim}")
        mat = re + 1j * im
    else:
        mat = re
    return check_hermitian(mat)
