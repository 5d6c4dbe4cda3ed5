"""Search propagators taking the uniform superposition to a marked state.

Three constructions are provided:

``direct-eq24``
    ``C_s(pi) exp(i pi I_y^{0s}) W`` using the two-level rotation directly.
``composed-eq34``
    the same map with the two-level rotation replaced by a conjugation
    ``U^dag C_0(-pi/2) C_s(pi/2) U`` built only from oracle pulses,
    selective phase shifts and nonselective steps.
``parallel-eq37``
    a coherent half-sum of four branches, each calling the y-axis oracle
    pulse at most once. It is not unitary branch by branch.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import pi

import numpy as np

from . import gates as g
from . import spinalg as sa

VARIANTS = ("direct-eq24", "composed-eq34", "parallel-eq37")


def uniform_state(n: int) -> np.ndarray:
    n = sa.check_qubits(n)
    return np.full(2**n, 2 ** (-n / 2), dtype=complex)


def basis_state(s: int, n: int) -> np.ndarray:
    psi = np.zeros(2 ** sa.check_qubits(n), dtype=complex)
    psi[s] = 1
    return psi


def _marked(s) -> np.ndarray:
    a = sa.as_unity(s)
    if np.all(a == 1):
        raise ValueError("marked state |0> is degenerate: I_y^{0s} is undefined")
    return a


def u_rs(r: int, s: int, n: int) -> np.ndarray:
    """Hermitian swap of basis states r and s, ``E - E_rr - E_ss + 2 I_x^{rs}``."""
    ix, _, _ = sa.transition_ops(r, s, n)
    return np.eye(2**n) - sa.matrix_unit(r, r, n) - sa.matrix_unit(s, s, n) + 2 * ix


def u_rs_exponential(r: int, s: int, n: int) -> np.ndarray:
    """The same swap as ``C_s(pi) exp(i pi I_y^{rs})``."""
    _, iy, _ = sa.transition_ops(r, s, n)
    d = np.ones(2**n, dtype=complex)
    d[s] = -1
    return d[:, None] * sa.expm(iy, pi, sign=-1)


def conjugator_matrix(s) -> np.ndarray:
    """``exp(-i pi/4 P)`` with P the Pauli string having x where a_k = -1 and z elsewhere."""
    a = _marked(s)
    p = sa.pauli_string(["x" if ak == -1 else "z" for ak in a])
    return (np.eye(2**a.size) - 1j * p) / np.sqrt(2)


def conjugator_plan(s) -> g.GatePlan:
    """Oracle-pulse form of the conjugator, five steps."""
    a = _marked(s)
    steps = (g.rot("y", pi / 4), g.uo("y", -pi / 4), g.s_phase(pi / 4),
             g.uo("y", pi / 4), g.rot("y", -pi / 4))
    return g.GatePlan(a.size, steps, tuple(a))


def conjugator(s):
    """Return ``(U, plan)``; U maps ``I_y^{0s}`` to ``(E_00 - E_ss)/2``."""
    return conjugator_matrix(s), conjugator_plan(s)


def conjugator_expansion(s, parity_factor: bool = False):
    """Two-branch expansion ``U = (E + R_y(pi/2) U_oy(-pi/2) S(pi/2)) / sqrt 2``.

    Returns a list of ``(coefficient, GatePlan)``. The second branch equals
    ``-i exp(-i pi/2 F_y) U_oy(-pi/2) 2^n I_1z...I_nz``. With
    ``parity_factor=True`` that branch carries an extra ``(-1)^n``; this
    variant reproduces U only for even n and is kept for comparison.
    """
    a = _marked(s)
    n = a.size
    sign = (-1) ** n if parity_factor else 1
    second = g.GatePlan(n, (g.rot("y", pi / 2), g.uo("y", -pi / 2), g.s_phase(pi / 2)), tuple(a))
    return [(1 / np.sqrt(2), g.GatePlan(n, (), tuple(a))), (sign / np.sqrt(2), second)]


def expansion_matrix(branches) -> np.ndarray:
    return sum(c * plan.realize() for c, plan in branches)


def rotation_via_oracle(s) -> g.GatePlan:
    """``U^dag C_0(-pi/2) C_s(pi/2) U``, equal to ``exp(i pi I_y^{0s})``."""
    u = conjugator_plan(s)
    middle = g.GatePlan(u.n, (g.c0(-pi / 2), g.cs(pi / 2)), u.oracle)
    return u.dagger() @ middle @ u


def two_level_rotation(s) -> np.ndarray:
    a = _marked(s)
    _, iy, _ = sa.transition_ops(0, sa.index_from_unity(a), a.size)
    return sa.expm(iy, pi, sign=-1)


def _branch_a(n):
    return (g.c0(-pi / 2), g.cs(-pi / 2))


def _branch_b(n):
    return (g.rot("z", pi), g.rot("y", -pi / 2), g.uo("y", pi / 2), g.cs(pi / 2))


def parallel_branches(s, parity_factor: bool = False):
    """The four ``(coefficient, GatePlan)`` terms whose sum is the network.

    The third and fourth branches carry ``(-1)^n`` relative to the naive
    expansion; ``parity_factor=True`` drops it, which is exact for even n only.
    """
    a = _marked(s)
    n = a.size
    sign = 1 if parity_factor else (-1) ** n
    w = (g.w_step(),)
    ua = _branch_a(n)
    ub = g.GatePlan(n, _branch_b(n))
    ua_dag = g.GatePlan(n, ua).dagger().steps
    plans = [
        ua + w,
        ua_dag + w,
        (g.cs(pi),) + ub.steps + (g.c0(-pi / 2),) + w,
        (g.c0(-pi / 2),) + ub.dagger().steps + w,
    ]
    coeffs = [0.5, 0.5, -0.5 * sign * (-1j) ** (n + 1), -0.5 * sign * (1j) ** (n + 1)]
    return [(c, g.GatePlan(n, p, tuple(a))) for c, p in zip(coeffs, plans)]


@dataclass(frozen=True)
class SearchNetwork:
    n: int
    s: tuple
    variant: str
    plan: g.GatePlan | None = None
    branches: tuple = ()

    def matrix(self) -> np.ndarray:
        if self.plan is not None:
            return self.plan.realize()
        return sum(c * p.realize() for c, p in self.branches)

    def apply(self, psi: np.ndarray) -> np.ndarray:
        if self.plan is not None:
            return self.plan.apply(psi)
        return sum(c * p.apply(psi) for c, p in self.branches)

    def output(self) -> np.ndarray:
        return self.apply(uniform_state(self.n))

    def amplitude(self) -> complex:
        """``<s| U_S |uniform>``; its modulus is the success amplitude."""
        return complex(self.output()[sa.index_from_unity(self.s)])

    def fidelity(self) -> float:
        return abs(self.amplitude())

    def count(self, name: str) -> int:
        if self.plan is not None:
            return self.plan.count(name)
        return sum(p.count(name) for _, p in self.branches)


def build_network(s, variant: str = "composed-eq34") -> SearchNetwork:
    a = _marked(s)
    n = a.size
    oracle = tuple(int(x) for x in a)
    if variant == "direct-eq24":
        steps = (g.cs(pi), g.GateStep(g.ORACLE, "Ty", (-pi,)), g.w_step())
        return SearchNetwork(n, oracle, variant, g.GatePlan(n, steps, oracle))
    if variant == "composed-eq34":
        plan = g.GatePlan(n, (g.cs(pi),), oracle) @ rotation_via_oracle(a) @ g.GatePlan(n, (g.w_step(),))
        return SearchNetwork(n, oracle, variant, plan)
    if variant == "parallel-eq37":
        return SearchNetwork(n, oracle, variant, None, tuple(parallel_branches(a)))
    raise ValueError(f"unknown variant {variant!r}; choose from {VARIANTS}")


def random_marked(rng: np.random.Generator, n: int) -> np.ndarray:
    """Uniformly random marked state other than |0>."""
    s = int(rng.integers(1, 2**n))
    return sa.unity_from_index(s, n)
