import numpy as np
import pytest

from magtorus.errors import HypothesisError, NotHermitianError
from magtorus.fixtures import index_jump_fixture
from magtorus.linalg import (
    Inertia,
    eig_herm,
    haynsworth_inertia,
    herm_from_json,
    herm_to_json,
    inertia,
    pseudoinverse,
    real_part_form_inertia,
    spectral_shift_compression,
)
from magtorus.magnetic import MagneticPoint, assemble
from magtorus.graphs import partition_for_support


def random_hermitian(rng, n, rank=None):
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    h = 0.5 * (a + a.conj().T)
    if rank is not None and rank < n:
        vals, vecs = np.linalg.eigh(h)
        vals[: n - rank] = 0.0
        h = (vecs * vals[None, :]) @ vecs.conj().T
        h = 0.5 * (h + h.conj().T)
    return h


def test_eig_identity_and_diag():
    es = eig_herm(np.eye(3))
    assert np.allclose(es.values, [1, 1, 1])
    es = eig_herm(np.diag([2.0, -1.0]))
    assert np.allclose(es.values, [-1.0, 2.0])
    assert es.is_simple(1) and es.is_simple(2)


def test_eig_rejects_non_hermitian():
    with pytest.raises(NotHermitianError):
        eig_herm(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_eig_residual_orthonormality_random():
    rng = np.random.default_rng(0)
    for n in (3, 6, 9):
        h = random_hermitian(rng, n)
        es = eig_herm(h)
        scale = max(1.0, np.abs(es.values).max())
        assert np.abs(h @ es.vectors - es.vectors * es.values[None, :]).max() <= 1e-10 * scale
        assert np.abs(es.vectors.conj().T @ es.vectors - np.eye(n)).max() <= 1e-10


def test_eig_phase_convention():
    rng = np.random.default_rng(1)
    h = random_hermitian(rng, 5)
    es = eig_herm(h)
    for j in range(5):
        col = es.vectors[:, j]
        lead = col[np.nonzero(np.abs(col) > 1e-8)[0][0]]
        assert abs(lead.imag) <= 1e-12 and lead.real > 0


def test_eig_support_block_of_bridge_fixture():
    base = index_jump_fixture()
    block = base.submatrix((1, 2, 3))
    es = eig_herm(block)
    assert abs(es.value(1)) <= 1e-12
    vec = es.vector(1)
    assert np.allclose(vec / vec[0], [1.0, 1.0, 1.0], atol=1e-10)


def test_pseudoinverse_simple_cases():
    rng = np.random.default_rng(2)
    h = random_hermitian(rng, 4)
    assert np.allclose(pseudoinverse(h), np.linalg.inv(h), atol=1e-9)
    z = np.zeros((3, 3))
    assert np.array_equal(pseudoinverse(z), z)
    v = rng.normal(size=4)
    v /= np.linalg.norm(v)
    p = np.outer(v, v)
    assert np.allclose(pseudoinverse(p), p, atol=1e-10)


def test_pseudoinverse_penrose_axioms_all_ranks():
    rng = np.random.default_rng(3)
    for n in (2, 4, 6):
        for rank in range(0, n + 1):
            m = random_hermitian(rng, n, rank=rank)
            plus = pseudoinverse(m)
            scale = max(1.0, np.abs(m).max())
            assert np.abs(plus @ m @ plus - plus).max() <= 1e-9 * max(1.0, np.abs(plus).max())
            assert np.abs(m @ plus @ m - m).max() <= 1e-9 * scale
            assert np.abs((m @ plus) - (m @ plus).conj().T).max() <= 1e-9
            assert np.abs((plus @ m) - (plus @ m).conj().T).max() <= 1e-9
            got = inertia(plus)
            assert got == inertia(m)


def test_pseudoinverse_congruence_identity():
    rng = np.random.default_rng(4)
    for _ in range(20):
        n = 5
        m = random_hermitian(rng, n, rank=3)
        t = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        while abs(np.linalg.det(t)) < 1e-3:
            t = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        left = pseudoinverse(t @ m @ t.conj().T)
        tinv = np.linalg.inv(t)
        right = tinv.conj().T @ pseudoinverse(m) @ tinv
        assert np.abs(left - right).max() <= 1e-8 * max(1.0, np.abs(right).max())


def test_inertia_basics():
    assert inertia(np.diag([1.0, -1.0, 0.0])) == Inertia(1, 1, 1)
    rng = np.random.default_rng(5)
    h = random_hermitian(rng, 5)
    vals = np.linalg.eigvalsh(h)
    assert inertia(h, shift=vals.min() - 1.0) == Inertia(5, 0, 0)


def test_inertia_matches_sign_counts():
    rng = np.random.default_rng(6)
    for _ in range(25):
        h = random_hermitian(rng, 6)
        shift = rng.normal()
        vals = np.linalg.eigvalsh(h - shift * np.eye(6))
        thr = 1e-9 * max(1.0, np.abs(vals).max())
        expect = Inertia(
            int(np.sum(vals > thr)), int(np.sum(vals < -thr)), int(np.sum(np.abs(vals) <= thr))
        )
        assert inertia(h, shift=shift) == expect


def test_spectral_shift_block_diagonal_additivity():
    rng = np.random.default_rng(7)
    a = random_hermitian(rng, 3).real
    vals, vecs = np.linalg.eigh(a)
    lam = vals[0]
    b = random_hermitian(rng, 3).real + (lam + 2.0) * np.eye(3)
    h = np.block([[b, np.zeros((3, 3))], [np.zeros((3, 3)), a]])
    res = spectral_shift_compression(h, v0=[0, 1, 2], lam=lam)
    assert res.holds


def test_spectral_shift_bridge_point():
    base = index_jump_fixture()
    part = partition_for_support(base.graph, (1, 2, 3))
    p = MagneticPoint(part, (2 * np.pi / 3, -2 * np.pi / 3, 0.0))
    hmat = assemble(base, p)
    res = spectral_shift_compression(hmat, v0=[3], lam=0.0)
    assert res.holds
    assert res.compression_inertia.n_minus == 0
    assert res.compression_inertia.n_plus == 1


def test_spectral_shift_random_instances():
    rng = np.random.default_rng(8)
    done = 0
    for _ in range(200):
        if done >= 100:
            break
        n = 7
        v0 = [0, 2]
        v1 = [i for i in range(n) if i not in v0]
        psi1 = rng.normal(size=len(v1)) + 1j * rng.normal(size=len(v1))
        psi = np.zeros(n, dtype=complex)
        psi[v1] = psi1 / np.linalg.norm(psi1)
        lam = rng.normal()
        m = random_hermitian(rng, n)
        proj = np.eye(n) - np.outer(psi, psi.conj())
        h = lam * np.outer(psi, psi.conj()) + proj @ m @ proj
        h = 0.5 * (h + h.conj().T)
        try:
            res = spectral_shift_compression(h, v0=v0, lam=lam)
        except HypothesisError:
            continue
        assert res.holds
        done += 1
    assert done >= 100


def test_haynsworth_classical_and_zero_coupling():
    rng = np.random.default_rng(9)
    a = random_hermitian(rng, 3)
    d = random_hermitian(rng, 4) + 5.0 * np.eye(4)
    b = rng.normal(size=(3, 4)) + 1j * rng.normal(size=(3, 4))
    assert haynsworth_inertia(a, b, d).holds
    assert haynsworth_inertia(a, np.zeros((3, 4)), random_hermitian(rng, 4)).holds


def test_haynsworth_engineered_kernel():
    rng = np.random.default_rng(10)
    for _ in range(100):
        q = 5
        d = random_hermitian(rng, q, rank=3)
        dvals, dvecs = np.linalg.eigh(d)
        keep = dvecs[:, np.abs(dvals) > 1e-9]
        b0 = rng.normal(size=(3, q)) + 1j * rng.normal(size=(3, q))
        b = b0 @ (keep @ keep.conj().T)  # kills ker D
        a = random_hermitian(rng, 3)
        assert haynsworth_inertia(a, b, d).holds


def test_haynsworth_rejects_bad_kernel():
    d = np.zeros((2, 2))
    b = np.array([[1.0, 0.0]])
    a = np.array([[1.0]])
    with pytest.raises(HypothesisError, match="ker"):
        haynsworth_inertia(a, b, d)


def test_real_form_identity_and_edge_cases():
    n = 3
    b_embed = np.hstack([np.eye(n), 1j * np.eye(n)])  # R^{2n} onto C^n
    res = real_part_form_inertia(np.eye(n), b_embed)
    assert res.holds and res.inertia == Inertia(2 * n, 0, 0)
    m = 2 * n + 2
    rng = np.random.default_rng(11)
    b = rng.normal(size=(n, m)) + 1j * rng.normal(size=(n, m))
    res = real_part_form_inertia(np.zeros((n, n)), b)
    assert res.holds and res.inertia == Inertia(0, 0, m)


def test_real_form_random_instances():
    rng = np.random.default_rng(12)
    for trial in range(100):
        n = int(rng.integers(1, 5))
        m = 2 * n + 3
        h = random_hermitian(rng, n, rank=int(rng.integers(0, n + 1)))
        b = rng.normal(size=(n, m)) + 1j * rng.normal(size=(n, m))
        res = real_part_form_inertia(h, b)
        assert res.holds, f"trial {trial}"


def test_real_form_rejects_non_surjective():
    h = np.eye(2)
    b = np.zeros((2, 5), dtype=complex)
    b[0, 0] = 1.0
    with pytest.raises(HypothesisError, match="rank"):
        real_part_form_inertia(h, b)


def test_matrix_json_round_trip():
    rng = np.random.default_rng(13)
    h = random_hermitian(rng, 4)
    back = herm_from_json(herm_to_json(h))
    assert np.allclose(back, h)
    real = random_hermitian(rng, 3).real
    obj = herm_to_json(real)
    assert "im" not in obj
    assert np.allclose(herm_from_json(obj), real)
