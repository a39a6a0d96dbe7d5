import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from varosc.errors import ContractViolation, InvalidArgument, NotPositiveSemidefinite
from varosc.linalg import (
    Operator,
    as_vector,
    identity,
    is_unitary,
    make_diagonal_unitary,
    operator_norm,
    psd_sqrt,
    random_contraction,
    random_unitary,
)
from varosc.rng import complex_gaussian, generator, splitmix64

seeds = st.integers(min_value=0, max_value=2**64 - 1)


def test_diagonal_unitary_cases():
    assert np.array_equal(make_diagonal_unitary([0]).entries, [[1]])
    assert make_diagonal_unitary([math.pi]).entries[0, 0] == pytest.approx(-1)
    u = make_diagonal_unitary([math.pi / 2, math.pi])
    assert np.allclose(u.entries, np.diag([1j, -1]), atol=1e-15)
    assert is_unitary(u, 1e-12)
    assert u.role == "unitary"


def test_diagonal_unitary_rejects_empty():
    with pytest.raises(InvalidArgument):
        make_diagonal_unitary([])


def test_random_unitary_dim1_and_residual():
    u = random_unitary(1, 99)
    assert abs(abs(u.entries[0, 0]) - 1) < 1e-12
    u = random_unitary(4, 42)
    resid = u.H @ u.entries - np.eye(4)
    assert np.max(np.abs(resid)) < 1e-12


def test_random_unitary_is_deterministic():
    a, b = random_unitary(4, 42), random_unitary(4, 42)
    assert a.entries.tobytes() == b.entries.tobytes()
    assert not np.array_equal(a.entries, random_unitary(4, 43).entries)


def test_random_unitary_rejects_dim0():
    with pytest.raises(InvalidArgument):
        random_unitary(0, 1)


def test_random_contraction_norms():
    t = random_contraction(1, 3, 0.5)
    assert abs(abs(t.entries[0, 0]) - 0.5) < 1e-15
    for cap in (1.0, 0.9):
        t = random_contraction(3, 7, cap)
        assert abs(operator_norm(t) - cap) < 1e-10
        # independent check through LAPACK singular values
        assert abs(np.linalg.svd(t.entries, compute_uv=False)[0] - cap) < 1e-10
    for bad in (0.0, 1.5, -1):
        with pytest.raises(InvalidArgument):
            random_contraction(3, 7, bad)


def test_operator_norm_trivial():
    assert operator_norm(identity(5)) == pytest.approx(1.0, abs=1e-15)
    assert operator_norm(np.diag([0.3, -0.7j])) == pytest.approx(0.7, abs=1e-14)
    assert operator_norm(np.zeros((3, 3))) == 0.0


def test_operator_norm_restart_when_start_is_orthogonal():
    # top singular vector (1, -1)/sqrt2 is orthogonal to the all-ones start
    a = np.array([[2.0, -2.0], [0.0, 0.0]]) / 2 + np.array([[0.1, 0.1], [0.0, 0.0]])
    assert operator_norm(a) == pytest.approx(np.linalg.svd(a, compute_uv=False)[0], rel=1e-12)
    b = np.array([[1.0, -1.0], [1.0, -1.0]])
    assert operator_norm(b) == pytest.approx(2.0, rel=1e-12)


@given(seed=seeds, dim=st.integers(1, 4))
@settings(max_examples=60, deadline=None)
def test_operator_norm_matches_svd(seed, dim):
    a = complex_gaussian(generator(seed), (dim, dim))
    assert abs(operator_norm(a) - np.linalg.svd(a, compute_uv=False)[0]) <= 1e-9


@given(seed=seeds, dim=st.integers(1, 8))
@settings(max_examples=40, deadline=None)
def test_unitary_preserves_norm(seed, dim):
    u = random_unitary(dim, seed)
    v = complex_gaussian(generator(splitmix64(seed)), (dim,))
    assert abs(np.linalg.norm(u @ v) - np.linalg.norm(v)) <= 1e-10 * np.linalg.norm(v)


@given(seed=seeds, dim=st.integers(1, 8), cap=st.floats(0.05, 1.0))
@settings(max_examples=40, deadline=None)
def test_contraction_bounds_vectors(seed, dim, cap):
    t = random_contraction(dim, seed, cap)
    v = complex_gaussian(generator(splitmix64(seed)), (dim,))
    assert np.linalg.norm(t @ v) <= cap * np.linalg.norm(v) * (1 + 1e-9)


def test_psd_sqrt_examples():
    assert np.allclose(psd_sqrt(np.diag([4.0, 9.0])).entries, np.diag([2, 3]), atol=1e-14)
    assert np.allclose(psd_sqrt(np.eye(3)).entries, np.eye(3), atol=1e-14)
    t = random_contraction(3, 7, 0.9).entries
    h = np.eye(3) - t.conj().T @ t
    s = psd_sqrt(h).entries
    assert np.max(np.abs(s @ s - h)) < 1e-8


def test_psd_sqrt_errors():
    with pytest.raises(NotPositiveSemidefinite):
        psd_sqrt(np.diag([1.0, -1e-6]))
    # rounding-sized negatives are clipped
    assert psd_sqrt(np.diag([1.0, -1e-12])).entries[1, 1] == 0
    with pytest.raises(InvalidArgument):
        psd_sqrt(np.array([[1.0, 1.0], [0.0, 1.0]]))


@given(seed=seeds, dim=st.integers(1, 5))
@settings(max_examples=40, deadline=None)
def test_psd_sqrt_roundtrip(seed, dim):
    z = complex_gaussian(generator(seed), (dim, dim))
    s = psd_sqrt(z @ z.conj().T).entries  # a PSD matrix from a clipped eigendecomposition
    assert np.max(np.abs(psd_sqrt(s @ s).entries - s)) <= 1e-7


def test_is_unitary():
    assert is_unitary(identity(4), 1e-12)
    assert not is_unitary(np.diag([0.5]), 1e-12)
    assert is_unitary(random_unitary(6, 1), 1e-10)


def test_operator_role_checks():
    with pytest.raises(ContractViolation):
        Operator(np.diag([0.5]), "unitary")
    with pytest.raises(ContractViolation):
        Operator(np.diag([1.2]), "contraction")
    assert Operator(np.diag([1.2])).role == "general"
    with pytest.raises(InvalidArgument):
        Operator(np.ones((2, 3)))


def test_as_vector():
    assert as_vector(1.0).shape == (1,)
    with pytest.raises(InvalidArgument):
        as_vector([])
    with pytest.raises(InvalidArgument):
        as_vector([np.nan])


def test_splitmix_reference_values():
    # first outputs of the reference splitmix64 stream seeded with 0
    state = 0
    outs = []
    for _ in range(3):
        outs.append(splitmix64(state))
        state = (state + 0x9E3779B97F4A7C15) & (2**64 - 1)
    assert outs == [0xE220A8397B1DCDAF, 0x6E789E6AA1B965F4, 0x06C45D188009454F]


def test_box_muller_moments():
    z = complex_gaussian(generator(3), (200_000,))
    assert abs(np.mean(np.abs(z) ** 2) - 1) < 0.01
    assert abs(np.mean(z)) < 0.01
