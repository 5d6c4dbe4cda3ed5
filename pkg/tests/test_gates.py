from math import pi

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qsearchnet import gates as g
from qsearchnet import spinalg as sa


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_walsh_hadamard_is_hadamard_power(n):
    h = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
    assert sa.frobenius(g.walsh_hadamard(n) - sa.kron(*([h] * n))) <= sa.tolerance(2**n)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
@pytest.mark.parametrize("theta", [pi, pi / 3, -0.4])
def test_diffusion_closed_form(n, theta):
    assert sa.frobenius(g.diffusion(theta, n) - g.diffusion_closed_form(theta, n)) <= sa.tolerance(2**n)


def test_diffusion_pi_is_inversion_about_average():
    n = 3
    d = g.diffusion(pi, n)
    assert np.allclose(d, -np.eye(8) + 2 * g.uniform_projector(n))


def test_nonselective_rotation_power():
    f = sa.collective("x", 2)
    assert np.allclose(g.nonselective_rotation("x", 0.3, 2, 2), sa.expm(f @ f, 0.3))
    with pytest.raises(ValueError):
        g.nonselective_rotation("x", 0.3, 0, 2)


def test_selective_phase_diagonal():
    c = g.selective_phase([1, -1, 1], 0.9)
    d = np.ones(8, dtype=complex)
    d[2] = np.exp(-0.9j)
    assert np.allclose(c, np.diag(d))


def test_nonselective_phase_cases():
    assert g.is_nonselective_phase([1, 1, 1])
    assert g.is_nonselective_phase([-1, -1])
    assert not g.is_nonselective_phase([1, -1])


def test_oracle_pulse_is_exponential_of_hamiltonian():
    a = [1, -1, -1]
    for p in "xyz":
        assert np.allclose(g.oracle_pulse(a, 0.6, p), sa.expm(g.oracle_hamiltonian(a, p), 0.6))


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_selective_phase_from_oracle_pulses_exhaustive(n):
    for s in range(2**n):
        a = sa.unity_from_index(s, n)
        for theta in (pi, 0.37):
            plan = g.cs_from_oracle_pulse(a, theta)
            err = sa.frobenius(plan.realize() - g.selective_phase(a, theta))
            assert err <= sa.tolerance(2**n)


def test_selective_phase_from_oracle_pulses_large_n(rng):
    for n in range(6, 11):
        a = sa.unity_from_index(int(rng.integers(0, 2**n)), n)
        plan = g.cs_from_oracle_pulse(a, 1.1)
        psi = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
        assert np.linalg.norm(plan.apply(psi) - g.selective_phase(a, 1.1) @ psi) <= sa.tolerance(2**n)


def test_plan_order_last_step_acts_first():
    plan = g.GatePlan(1, (g.rot("x", 0.3), g.rot("z", 0.5)))
    expect = g.nonselective_rotation("x", 0.3, 1, 1) @ g.nonselective_rotation("z", 0.5, 1, 1)
    assert np.allclose(plan.realize(), expect)
    psi = np.array([0.6, 0.8j])
    assert np.allclose(plan.apply(psi), expect @ psi)


def test_oracle_steps_need_marked_state():
    plan = g.GatePlan(2, (g.cs(0.4),))
    with pytest.raises(ValueError):
        plan.realize()
    assert np.allclose(plan.realize([1, -1]), g.selective_phase([1, -1], 0.4))


def test_oracle_rebinding():
    plan = g.cs_from_oracle_pulse([1, -1], 0.8)
    assert np.allclose(plan.realize([-1, 1]), g.selective_phase([-1, 1], 0.8))
    assert np.allclose(plan.with_oracle([-1, -1]).realize(), g.selective_phase([-1, -1], 0.8))


def test_dagger_inverts():
    plan = g.cs_from_oracle_pulse([1, -1, 1], 0.8) @ g.GatePlan(3, (g.w_step(), g.zphase([0.2, 0.3], (1, 3))))
    assert sa.is_unitary(plan.realize())
    assert np.allclose(plan.dagger().realize() @ plan.realize(), np.eye(8))


def test_step_kinds():
    assert g.cs(0.1).kind == g.ORACLE
    assert g.rot("y", 0.1).kind == g.NONSELECTIVE
    assert g.rot("y", 0.1, (2,)).kind == g.ONE_QUBIT
    with pytest.raises(ValueError):
        g.GateStep("bogus", "Cs", (0.1,))
    with pytest.raises(ValueError):
        g.GateStep(g.ORACLE, "bogus")


def test_counts():
    plan = g.cs_from_oracle_pulse([1, -1], 0.5)
    assert plan.count("Uoy") == 2
    assert plan.count_kind(g.ORACLE) == 2
    assert plan.count_kind(g.NONSELECTIVE) == 3


def test_text_round_trip():
    plan = g.cs_from_oracle_pulse([1, -1, -1], 0.123456789) @ g.GatePlan(
        3, (g.w_step(), g.zphase([0.1, -2.5], (2, 3)), g.rot("x", 1e-17, (1,), 2)))
    text = plan.to_text()
    assert text.startswith("# plan n=3 steps=8")
    back = g.GatePlan.from_text(text)
    assert back.steps == plan.steps
    assert np.allclose(back.realize([1, -1, -1]), plan.realize())


def test_from_line_errors():
    with pytest.raises(ValueError):
        g.GateStep.from_line("oracle-selective Cs")
    with pytest.raises(ValueError):
        g.GateStep.from_line("one-qubit Rx 0.1,1 (1)")
    with pytest.raises(ValueError):
        g.GatePlan.from_text("oracle-selective Cs 0.1\n")


def test_composition_size_mismatch():
    with pytest.raises(ValueError):
        g.GatePlan(2) @ g.GatePlan(3)


def test_lomso_step():
    a = [1, -1, 1]
    st_ = g.GateStep(g.ORACLE, "lomso", (0.3,), (2, 3))
    d = np.exp(-0.3j * a[1] * a[2] * sa.zstring_diagonal(3, (2, 3)))
    assert np.allclose(g.step_operator(st_, 3, a), np.diag(d))


@settings(max_examples=30, deadline=None)
@given(n=st.integers(1, 4), s=st.integers(0, 15), theta=st.floats(-6.3, 6.3))
def test_selective_phase_from_pulses_property(n, s, theta):
    a = sa.unity_from_index(s % 2**n, n)
    assert sa.frobenius(g.cs_from_oracle_pulse(a, theta).realize() - g.selective_phase(a, theta)) <= sa.tolerance(2**n)
