import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from varosc.dilation import (
    build_dilation,
    corrupt,
    defects,
    dilated_variation,
    intertwining_residual,
    power_errors,
    unitarity_residual,
    verify_dilation,
)
from varosc.errors import ContractViolation, InvalidArgument, ResourceError
from varosc.linalg import is_unitary, random_contraction, unitary_tol
from varosc.rng import generator, random_unit_vector


def test_zero_operator_gives_cyclic_shift():
    pack = build_dilation(np.zeros((1, 1)), 3)
    u = pack.U.entries
    expected = np.zeros((4, 4))
    expected[0, 3] = 1  # D_{T*} = 1
    expected[1, 0] = 1  # D_T = 1
    expected[2, 1] = expected[3, 2] = 1
    np.testing.assert_array_equal(u, expected)
    np.testing.assert_array_equal(np.linalg.matrix_power(u, 4), np.eye(4))


def test_scalar_half():
    pack = build_dilation(np.array([[0.5]]), 4)
    assert is_unitary(pack.U.entries, unitary_tol(5))
    np.testing.assert_allclose(power_errors(pack, [[0.5]], [1.0]), 0, atol=1e-15)
    d_t, d_ts = defects([[0.5]])
    assert d_t.entries[0, 0] == pytest.approx(np.sqrt(0.75), abs=1e-16)


def test_random_contraction_n32():
    T = random_contraction(6, 3, 0.95)
    pack = build_dilation(T, 32)
    rep = verify_dilation(pack, T, trials=10, seed=1)
    assert rep.passed
    assert rep.unitarity_residual <= 1e-10 * 33 * 6
    assert rep.max_power_error <= 1e-8
    assert rep.functional_gap <= 1e-8
    assert rep.intertwining_residual <= 1e-8
    assert rep.projection_dominated


@given(seed=st.integers(0, 2**32), d=st.integers(1, 5), N=st.integers(1, 12),
       cap=st.sampled_from([1e-3, 0.3, 0.9, 1.0]))
@settings(max_examples=30, deadline=None)
def test_dilation_property(seed, d, N, cap):
    rng = generator(seed)
    T = random_contraction(d, seed, cap)
    pack = build_dilation(T, N)
    assert unitarity_residual(pack) <= 1e-10 * (N + 1) * d
    f = random_unit_vector(rng, d)
    assert power_errors(pack, T, f).max() <= 1e-8


def test_negative_control_is_flagged():
    T = random_contraction(3, 4, 0.8)
    bad = corrupt(build_dilation(T, 8))
    rep = verify_dilation(bad, T, trials=3, seed=0)
    assert not rep.passed
    assert rep.unitarity_residual > rep.unitarity_tol
    # the defect block reaches block 0 only after N + 1 steps
    assert rep.max_power_error <= 1e-12


def test_corrupted_compression_is_flagged_by_powers():
    from varosc.dilation import DilationPack
    from varosc.linalg import Operator

    T = random_contraction(3, 4, 0.8)
    pack = build_dilation(T, 8)
    u = pack.U.entries.copy()
    u[:3, :3] *= 1.001
    bad = DilationPack(Operator(u, "general", check=False), 8, 3)
    rep = verify_dilation(bad, T, trials=3)
    assert not rep.passed and rep.max_power_error > 1e-8


def test_projection_cannot_increase_variation():
    rng = generator(11)
    T = random_contraction(4, 11, 1.0)
    pack = build_dilation(T, 64)
    nk = [1, 2, 4, 8, 16, 32, 64]
    for _ in range(5):
        f = random_unit_vector(rng, 4)
        assert dilated_variation(pack, f, nk) <= dilated_variation(pack, f, nk, projected=False) * (1 + 1e-12)


def test_intertwining():
    T = random_contraction(5, 2, 0.99)
    d_t, d_ts = defects(T)
    assert intertwining_residual(T, d_t, d_ts) <= 1e-12


def test_errors():
    with pytest.raises(ResourceError):
        build_dilation(np.eye(64) * 0.5, 64)
    with pytest.raises(InvalidArgument):
        build_dilation([[0.5]], 0)
    with pytest.raises(ContractViolation):
        build_dilation([[1.1]], 3)
    pack = build_dilation([[0.5]], 2)
    with pytest.raises(InvalidArgument):
        pack.embed([1.0, 2.0])


def test_report_json_roundtrip():
    import json

    T = random_contraction(2, 0, 0.5)
    rep = verify_dilation(build_dilation(T, 4), T, trials=2)
    assert json.loads(rep.to_json())["passed"] is True


def test_defects_match_psd_sqrt():
    from varosc.linalg import psd_sqrt

    T = random_contraction(4, 11, 0.9)
    d_t, d_ts = defects(T)
    t = T.entries
    np.testing.assert_allclose(d_t.entries, psd_sqrt(np.eye(4) - t.conj().T @ t).entries, atol=1e-12)
    np.testing.assert_allclose(d_ts.entries, psd_sqrt(np.eye(4) - t @ t.conj().T).entries, atol=1e-12)
    assert intertwining_residual(T, d_t, d_ts) < 1e-8


def test_zero_contraction_defects_are_identity():
    d_t, d_ts = defects(np.zeros((3, 3)))
    np.testing.assert_array_equal(d_t.entries, np.eye(3))
    np.testing.assert_array_equal(d_ts.entries, np.eye(3))
    pack = build_dilation(np.zeros((1, 1)), 2)
    np.testing.assert_array_equal(pack.U.entries, [[0, 0, 1], [1, 0, 0], [0, 1, 0]])


def test_unit_norm_contraction_regression():
    # top singular value 1: separate square roots broke unitarity at 3.5e-9
    T = random_contraction(2, 103, 1.0)
    pack = build_dilation(T, 1)
    assert unitarity_residual(pack) <= 1e-10 * 2 * 2
