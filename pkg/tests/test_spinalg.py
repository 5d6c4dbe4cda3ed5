from math import comb, pi

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qsearchnet import spinalg as sa

from conftest import random_hermitian


def test_unity_round_trip_all_indices():
    for n in range(1, 7):
        for s in range(2**n):
            a = sa.unity_from_index(s, n)
            assert sa.index_from_unity(a) == s


def test_unity_convention_msb_first():
    # qubit 1 is the most significant bit and a = +1 means bit 0
    assert sa.unity_from_index(0b100, 3).tolist() == [-1, 1, 1]
    assert sa.unity_from_index(0, 2).tolist() == [1, 1]


def test_unity_table_rows_match_index():
    tab = sa.unity_table(4)
    for r in range(16):
        assert np.array_equal(tab[r], sa.unity_from_index(r, 4))


@pytest.mark.parametrize("bad", [[], [0, 1], [2], [[1, -1]]])
def test_as_unity_rejects(bad):
    with pytest.raises(ValueError):
        sa.as_unity(bad)


def test_check_qubits_limits():
    with pytest.raises(ValueError):
        sa.check_qubits(0)
    with pytest.raises(ValueError):
        sa.check_qubits(sa.MAX_QUBITS + 1)
    with pytest.raises(TypeError):
        sa.check_qubits(2.0)


def test_single_spin_is_half_pauli():
    x = sa.single_spin(1, "x", 1)
    assert np.allclose(x, sa.SIGMA["x"] / 2)
    z2 = sa.single_spin(2, "z", 2)
    assert np.allclose(np.diag(z2), [0.5, -0.5, 0.5, -0.5])


def test_spin_commutators():
    for n in (1, 2, 3):
        for k in range(1, n + 1):
            x, y, z = (sa.single_spin(k, p, n) for p in "xyz")
            assert np.allclose(x @ y - y @ x, 1j * z)
            assert np.allclose(y @ z - z @ y, 1j * x)


def test_collective_exclude():
    f = sa.collective("z", 3, exclude=2)
    assert np.allclose(f, sa.single_spin(1, "z", 3) + sa.single_spin(3, "z", 3))


def test_raising_lowering():
    n = 2
    for k in (1, 2):
        x, y = sa.single_spin(k, "x", n), sa.single_spin(k, "y", n)
        assert np.allclose(sa.raising(k, n), x + 1j * y)
        assert np.allclose(sa.lowering(k, n), x - 1j * y)


def test_projector_from_unity_matches_matrix_unit():
    for n in (1, 2, 3, 4):
        for s in range(2**n):
            assert sa.frobenius(sa.projector_from_unity(sa.unity_from_index(s, n))
                                - sa.matrix_unit(s, s, n)) < 1e-14


def test_ones_operator():
    for n in (1, 2, 3):
        assert np.allclose(sa.ones_operator(n), np.ones((2**n, 2**n)))


def test_transition_ops_form_su2():
    ix, iy, iz = sa.transition_ops(0, 5, 3)
    assert np.allclose(ix @ iy - iy @ ix, 1j * iz)
    with pytest.raises(ValueError):
        sa.transition_ops(2, 2, 3)


def test_pauli_string_and_zstring():
    p = sa.pauli_string(["z", "e", "z"])
    assert np.allclose(np.diag(p), sa.zstring_diagonal(3, (1, 3)))
    with pytest.raises(ValueError):
        sa.pauli_string(["q"])


@pytest.mark.parametrize("p", "xyz")
@pytest.mark.parametrize("n", [1, 2, 3, 4])
@pytest.mark.parametrize("sign", [1, -1])
def test_pi_rotation_is_pauli_product(p, n, sign):
    # exp(+-i pi F_p) = (+-i)^n 2^n I_1p ... I_np
    lhs = sa.expm(sa.collective(p, n), pi, sign=-sign)
    rhs = (sign * 1j) ** n * sa.pauli_string([p] * n)
    assert sa.frobenius(lhs - rhs) <= sa.tolerance(2**n)


def test_n1_pi_x_rotation():
    assert np.allclose(sa.expm(sa.collective("x", 1), pi), -1j * sa.SIGMA["x"])


def test_expm_against_scipy(rng):
    from scipy.linalg import expm as sexpm
    h = random_hermitian(rng, 8)
    assert np.allclose(sa.expm(h, 0.3), sexpm(-0.3j * h))
    assert np.allclose(sa.expm(h, 0.3, sign=-1), sexpm(0.3j * h))


def test_expm_rejects_nonhermitian():
    with pytest.raises(ValueError):
        sa.expm(np.array([[0, 1], [0, 0]], dtype=complex))


def test_predicates():
    u = sa.expm(sa.collective("y", 2), 0.4)
    assert sa.is_unitary(u)
    assert not sa.is_diagonal(u)
    assert sa.equal_up_to_phase(np.exp(0.7j) * u, u)
    assert not sa.equal_up_to_phase(u, np.eye(4))


def test_coherence_orders_phase_response(rng):
    n = 3
    rho = random_hermitian(rng, 8)
    parts = sa.coherence_decompose(rho, n)
    assert sa.frobenius(sum(parts.values()) - rho) == 0
    phi = 0.77
    rz = sa.expm(sa.collective("z", n), phi)
    for p, comp in parts.items():
        assert np.allclose(rz @ comp @ rz.conj().T, np.exp(-1j * p * phi) * comp)


def test_coherence_decompose_omits_empty_orders():
    parts = sa.coherence_decompose(np.eye(4, dtype=complex), 2)
    assert list(parts) == [0]


def test_zero_quantum_count():
    for n in range(1, 7):
        orders = sa.coherence_orders(n)
        off = np.sum(orders == 0) - 2**n
        assert comb(2 * n, n) - 2**n == sa.zero_quantum_count(n) == off


@settings(max_examples=40, deadline=None)
@given(n=st.integers(1, 8), data=st.data())
def test_unity_round_trip_property(n, data):
    s = data.draw(st.integers(0, 2**n - 1))
    assert sa.index_from_unity(sa.unity_from_index(s, n)) == s
