import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from luequiv.decider import is_maximally_entangled
from luequiv.errors import NotUnitary, ParameterOutOfRange, ShapeMismatch
from luequiv.generators import (
    apply_local_unitaries,
    basis_state,
    ghz_state,
    haar_local_unitaries,
    haar_unitary,
    isotropic_like_state,
    isotropic_state,
    make_rng,
    maximally_entangled,
    random_isotropic_like,
    random_pure,
    ghz_w_mixtures,
    spawn,
    w_state,
    werner_state,
)
from luequiv.invariants import pair_signature
from luequiv.linalg import DensityMatrix, is_unitary

from oracles import werner_pt_formula

seeds = st.integers(0, 2**32 - 1)


def swap(d):
    s = np.zeros((d * d, d * d))
    for i in range(d):
        for j in range(d):
            s[i * d + j, j * d + i] = 1
    return s


@given(seeds, st.integers(1, 6))
def test_haar_unitary_is_unitary(seed, d):
    assert np.linalg.norm(haar_unitary(d, seed) @ haar_unitary(d, seed).conj().T - np.eye(d)) <= 1e-10


def test_haar_d1_is_a_phase():
    u = haar_unitary(1, 3)
    assert u.shape == (1, 1) and abs(abs(u[0, 0]) - 1) < 1e-15


def test_haar_first_moment():
    rng = make_rng(7)
    samples = np.array([np.abs(haar_unitary(2, rng)[:, 0]) ** 2 for _ in range(1000)])
    # |u_00|^2 is uniform on [0, 1] for d = 2: mean 1/2, variance 1/12
    assert abs(samples[:, 0].mean() - 0.5) < 4 * np.sqrt(1 / 12 / 1000)
    assert abs(np.mean(samples[:, 0] ** 2) - 1 / 3) < 0.03


def test_seed_determinism_and_streams():
    assert np.array_equal(random_pure((2, 2, 2), 42), random_pure((2, 2, 2), 42))
    assert not np.array_equal(random_pure((2, 2, 2), 42), random_pure((2, 2, 2), 43))
    a, b = spawn(5, 2)
    assert not np.array_equal(a.standard_normal(3), b.standard_normal(3))
    c, _ = spawn(5, 2)
    assert np.array_equal(c.standard_normal(3), spawn(5, 2)[0].standard_normal(3))


def test_maximally_entangled_examples():
    assert np.allclose(maximally_entangled(2).reshape(-1), [2**-0.5, 0, 0, 2**-0.5])
    psi = maximally_entangled(3)
    assert np.allclose(np.diag(psi), 3**-0.5) and np.count_nonzero(psi) == 3
    assert is_maximally_entangled(maximally_entangled(3, haar_unitary(3, 1)))
    with pytest.raises(NotUnitary):
        maximally_entangled(2, np.diag([1, 2]))


@pytest.mark.parametrize("d", [2, 3, 4])
def test_isotropic_formula(d):
    assert np.allclose(isotropic_state(d, 1).mat, np.eye(d * d) / d**2)
    psi = maximally_entangled(d).reshape(-1)
    assert np.allclose(isotropic_state(d, 0).mat, np.outer(psi, psi))
    for p in (0.2, 0.6):
        expected = p / d**2 * np.eye(d * d) + (1 - p) * np.outer(psi, psi)
        assert np.max(np.abs(isotropic_state(d, p).mat - expected)) <= 1e-15


def test_isotropic_spectrum():
    assert np.allclose(isotropic_state(2, 0.6).spectrum(), [0.55, 0.15, 0.15, 0.15])
    with pytest.raises(ParameterOutOfRange):
        isotropic_state(2, 1.5)


@pytest.mark.parametrize("d", [2, 3, 4])
@pytest.mark.parametrize("f", [-1.0, -0.5, 0.0, 0.5, 0.7, 1.0])
def test_werner_formula(d, f):
    expected = ((d - f) * np.eye(d * d) + (d * f - 1) * swap(d)) / (d**3 - d)
    rho = werner_state(d, f)
    assert np.max(np.abs(rho.mat - expected)) <= 1e-15
    assert np.trace(rho.mat @ swap(d)).real == pytest.approx(f)


def test_werner_special_points():
    assert np.allclose(werner_state(2, 1).mat, (np.eye(4) + swap(2)) / 6)
    for d in (2, 3, 4):
        assert np.max(np.abs(werner_state(d, 1 / d).mat - np.eye(d * d) / d**2)) <= 1e-15
        assert np.max(np.abs(werner_pt_formula(d, 1 / d) - np.eye(d * d) / d**2)) <= 1e-15
    with pytest.raises(ParameterOutOfRange):
        werner_state(2, 1.1)


def test_ghz_and_w_amplitudes():
    g, w = ghz_state().reshape(-1), w_state().reshape(-1)
    assert np.flatnonzero(g).tolist() == [0, 7] and np.allclose(g[[0, 7]], 2**-0.5)
    assert np.flatnonzero(w).tolist() == [1, 2, 4] and np.allclose(w[[1, 2, 4]], 3**-0.5)
    assert abs(np.linalg.norm(g) - 1) < 1e-15 and abs(np.linalg.norm(w) - 1) < 1e-15


def test_ghz_w_mixtures():
    r1, r2 = ghz_w_mixtures(0, 0.5)
    g, w, top = ghz_state().reshape(-1), w_state().reshape(-1), basis_state((2, 2, 2), (1, 1, 1)).reshape(-1)
    assert np.allclose(r1.mat, 0.5 * np.outer(g, g) + 0.5 * np.outer(top, top))
    assert np.allclose(r2.mat, 0.5 * np.outer(w, w) + 0.5 * np.outer(top, top))
    a, b = ghz_w_mixtures(1, 0.3)
    assert np.allclose(a.mat, np.eye(8) / 8) and np.allclose(b.mat, np.eye(8) / 8)
    r1, r2 = ghz_w_mixtures(0.5, 0.5)
    # frozen from the eigenvalue oracle: J^2 = Tr(rho^2)
    assert np.trace(r1.mat @ r1.mat).real == pytest.approx(0.28125, abs=1e-15)
    assert np.trace(r2.mat @ r2.mat).real == pytest.approx(0.21875, abs=1e-15)


def test_isotropic_like_constructions():
    phi = maximally_entangled(2)
    rho = isotropic_like_state((2, 2), 0.5, [(0.5, phi)])
    assert np.allclose(rho.mat, isotropic_state(2, 0.5).mat)
    signed = isotropic_like_state((2, 2), 1.5, [(-0.5, phi)])
    assert signed.psd is False
    r = random_isotropic_like(3, 2, seed=4)
    assert isinstance(r, DensityMatrix) and r.psd
    with pytest.raises(ParameterOutOfRange):
        random_isotropic_like(2, 4)


def test_apply_local_unitaries_examples():
    psi = random_pure((2, 3), 1)
    assert np.allclose(apply_local_unitaries(psi, [np.eye(2), np.eye(3)]), psi)
    U = haar_unitary(3, 9)
    out = apply_local_unitaries(maximally_entangled(3), [U, U.conj()])
    overlap = np.vdot(maximally_entangled(3), out)
    assert abs(abs(overlap) - 1) < 1e-12
    with pytest.raises(ShapeMismatch):
        apply_local_unitaries(psi, [np.eye(2), np.eye(2)])
    with pytest.raises(NotUnitary):
        apply_local_unitaries(psi, [np.eye(2), 2 * np.eye(3)])


@given(seeds)
def test_local_unitaries_preserve_norm_trace_and_signatures(seed):
    rho = random_isotropic_like(3, 1, seed=seed)
    us = haar_local_unitaries((3, 3), seed)
    moved = apply_local_unitaries(rho, us)
    assert abs(np.trace(moved.mat) - 1) <= 1e-12
    psi = random_pure((3, 3), seed)
    out = apply_local_unitaries(psi, us)
    assert abs(np.linalg.norm(out) - 1) <= 1e-12
    a, b = pair_signature([psi], 4), pair_signature([out], 4)
    assert np.max(np.abs(a.values - b.values)) <= 1e-12


def test_generated_unitaries_are_unitary():
    assert all(is_unitary(u) for u in haar_local_unitaries((2, 3, 4), 1))
