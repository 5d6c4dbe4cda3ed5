"""Rebuilding single-qubit oracle z-pulses from selective phase shifts.

The route is: spin echoes turn ``2^n E_ss`` into an effective Hamiltonian
``H_jQ`` that is ``4 (2 a_j I_jz)`` times a sum of even spectator x-strings;
collective z phase cycling keeps its zero-quantum part; per-spin offset
averaging removes the remaining zero-quantum coherences, leaving
``8 a_j I_jz``. Averaging is done either exactly (:func:`diagonal_limit`)
or with a lattice rule (:func:`assemble_oracle_generator`).
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, product
from math import pi

import numpy as np

from . import gates as g
from . import spinalg as sa

TWO_PI = 2 * pi


@dataclass(frozen=True)
class EchoProduct:
    n: int
    s: tuple
    j: int | None
    realized: np.ndarray
    generator: np.ndarray
    wrapped_generator: np.ndarray | None = None

    def residual(self) -> float:
        """``|| realized - exp(-i generator) ||_F``."""
        return sa.frobenius(self.realized - sa.expm(self.generator))


def wrap_phase(x: float) -> float:
    """Reduce an angle to ``[0, 2 pi)``."""
    return float(np.mod(x, TWO_PI))


def _scaled_projector(a, theta):
    """``2^n theta E_ss`` as a diagonal vector."""
    d = np.zeros(2**a.size)
    d[sa.index_from_unity(a)] = 2**a.size * theta
    return d


def echo_hss(s, theta: float) -> EchoProduct:
    """Echo pair cancelling the even-body part of ``2^n E_ss``."""
    a = sa.as_unity(s)
    n = a.size
    flip = sa.expm(sa.collective("y", n), pi)
    cplus = np.diag(np.exp(-1j * _scaled_projector(a, theta)))
    realized = cplus @ flip @ cplus.conj() @ flip.conj().T
    gen = np.zeros(2**n)
    for order in range(1, n + 1, 2):
        for subset in combinations(range(1, n + 1), order):
            sign = np.prod([a[k - 1] for k in subset])
            gen = gen + sign * sa.zstring_diagonal(n, subset)
    return EchoProduct(n, tuple(a), None, realized, np.diag(2 * theta * gen).astype(complex))


def hjq_closed_form(s, j: int, theta: float = 1.0) -> np.ndarray:
    """``4 theta (2 a_j I_jz) sum_{even T} prod_{k in T} (2 a_k I_kx)`` over spectator subsets T."""
    a = sa.as_unity(s)
    n = a.size
    sa._check_index(j, n)
    spect = [k for k in range(1, n + 1) if k != j]
    total = np.zeros((2**n, 2**n), dtype=complex)
    for order in range(0, len(spect) + 1, 2):
        for subset in combinations(spect, order):
            axes = ["e"] * n
            for k in subset:
                axes[k - 1] = "x"
            axes[j - 1] = "z"
            sign = a[j - 1] * np.prod([a[k - 1] for k in subset])
            total += sign * sa.pauli_string(axes)
    return 4 * theta * total


def hjq_conjugation(s, j: int, theta: float = 1.0, wrap: bool = False) -> np.ndarray:
    """Effective Hamiltonian from the echo construction by explicit conjugation.

    With ``wrap=True`` the phase ``2^n theta`` is reduced modulo 2 pi first,
    giving the bounded generator whose exponential is the same unitary.
    """
    a = sa.as_unity(s)
    n = a.size
    sa._check_index(j, n)
    big = 2**n * theta
    phase = wrap_phase(big) if wrap else big
    e = np.zeros((2**n, 2**n), dtype=complex)
    e[sa.index_from_unity(a), sa.index_from_unity(a)] = phase
    flip = sa.expm(sa.collective("y", n), pi)
    k_ss = e - flip @ e @ flip.conj().T
    jflip = sa.expm(sa.single_spin(j, "y", n), pi)
    half = sa.expm(sa.collective("y", n, exclude=j), pi / 2)
    inner = k_ss - jflip @ k_ss @ jflip.conj().T
    return half @ inner @ half.conj().T


def hjq_plan(s, j: int, theta: float) -> g.GatePlan:
    """Ten-step plan for ``exp(-i theta H_jQ)`` with four wrapped C_s steps."""
    a = sa.as_unity(s)
    n = a.size
    sa._check_index(j, n)
    big = 2**n * theta
    plus, minus = wrap_phase(big), wrap_phase(-big)
    spect = tuple(k for k in range(1, n + 1) if k != j)
    half = g.rot("y", pi / 2, spect) if spect else None
    steps = [
        g.cs(plus), g.rot("y", pi), g.cs(minus), g.rot("y", pi, (j,)),
        g.cs(plus), g.rot("y", -pi), g.cs(minus), g.rot("y", -pi, (j,)),
    ]
    if half is not None:
        steps = [half] + steps + [half.inverse()]
    return g.GatePlan(n, tuple(steps), tuple(a))


def extract_qubit(s, j: int, theta: float) -> EchoProduct:
    """Echo product isolating qubit j, conjugated into multiple-quantum form."""
    a = sa.as_unity(s)
    n = a.size
    sa._check_index(j, n)
    uss = echo_hss(a, theta).realized
    jflip = sa.expm(sa.single_spin(j, "y", n), pi)
    usj = uss @ jflip @ uss.conj().T @ jflip.conj().T
    half = sa.expm(sa.collective("y", n, exclude=j), pi / 2)
    realized = half @ usj @ half.conj().T
    return EchoProduct(n, tuple(a), j, realized, hjq_closed_form(a, j, theta),
                       hjq_conjugation(a, j, theta, wrap=True))


# --- phase cycling ----------------------------------------------------------

def phase_cycle(rho: np.ndarray, n: int, exclude: int | None = None, steps: int | None = None) -> np.ndarray:
    """Average of ``exp(-i phi_k F_z) rho exp(i phi_k F_z)`` over ``phi_k = 2 pi k / N``.

    With ``exclude=j`` the rotation uses ``F_jz`` (qubit j omitted). The step
    count N must exceed the largest coherence order present; it defaults
    to ``n + 1``.
    """
    n = sa.check_qubits(n)
    if exclude is not None:
        sa._check_index(exclude, n)
    limit = n if exclude is None else n - 1
    steps = n + 1 if steps is None else int(steps)
    if steps <= limit:
        raise ValueError(f"phase cycling needs more than {limit} steps, got {steps}")
    rho = np.asarray(rho, dtype=complex)
    mag = sa.magnetization_vector(n, exclude=exclude)
    out = np.zeros_like(rho)
    for k in range(steps):
        d = np.exp(-1j * TWO_PI * k / steps * mag)
        out += d[:, None] * rho * d.conj()[None, :]
    return out / steps


def zero_quantum_part(rho: np.ndarray, n: int, exclude: int | None = None) -> np.ndarray:
    """Direct p = 0 projection by matrix-element classification."""
    return np.where(sa.coherence_orders(n, exclude=exclude) == 0, rho, 0)


def zero_quantum_structure(s, j: int, steps: int | None = None) -> np.ndarray:
    """Zero-quantum part of ``H_jQ`` (unit theta) after spectator phase cycling."""
    a = sa.as_unity(s)
    n = a.size
    steps = n if steps is None else steps
    return phase_cycle(hjq_closed_form(a, j), n, exclude=j, steps=steps)


def zero_quantum_coupling(h0: np.ndarray, j: int, k: int, l: int, n: int, s) -> complex:
    """Coefficient of ``4 (2 a_j I_jz) I_k^+ I_l^-`` in a zero-quantum operator.

    Read from one matrix element: the basis pair with qubit j up, l down in
    the row and k down in the column, every other spectator up.
    """
    a = sa.as_unity(s)
    if len({j, k, l}) != 3:
        raise ValueError("j, k, l must be distinct")
    bits_r = np.zeros(n, dtype=int)
    bits_t = np.zeros(n, dtype=int)
    bits_t[k - 1] = 1
    bits_r[l - 1] = 1
    r = int(bits_r @ (1 << np.arange(n - 1, -1, -1)))
    t = int(bits_t @ (1 << np.arange(n - 1, -1, -1)))
    return complex(h0[r, t] / (4 * a[j - 1]))


# --- offset averaging -------------------------------------------------------

def default_offsets(n: int) -> np.ndarray:
    return 2.0 ** np.arange(sa.check_qubits(n))


def check_offsets(f, j: int | None = None, tol: float = 1e-9) -> None:
    """Reject offsets for which some multiple-quantum combination frequency vanishes."""
    f = np.asarray(f, dtype=float)
    idx = [k for k in range(f.size) if j is None or k != j - 1]
    fs = f[idx]
    for m in product((-1, 0, 1), repeat=fs.size):
        m = np.asarray(m)
        if np.any(m) and abs(m @ fs) <= tol:
            raise ValueError(f"offset combination {m.tolist()} has zero frequency")


def combination_frequencies(n: int, j: int, f) -> np.ndarray:
    """``sum_{k != j} (a_k^r - a_k^t) f_k`` for every basis pair (r, t)."""
    f = np.asarray(f, dtype=float).copy()
    f[j - 1] = 0
    proj = sa.unity_table(n) @ f
    return proj[:, None] - proj[None, :]


def diagonal_limit(s, j: int, f=None, sign: int = 1) -> np.ndarray:
    """Exact long-time offset average of ``H_jQ`` (unit theta).

    Every element with a nonzero combination frequency averages to zero.
    ``sign`` selects the forward or reversed offset sweep; the result does
    not depend on it, which is checked in the tests.
    """
    a = sa.as_unity(s)
    n = a.size
    f = default_offsets(n) if f is None else np.asarray(f, dtype=float)
    check_offsets(f, j)
    h = hjq_closed_form(a, j)
    freq = sign * combination_frequencies(n, j, f)
    return np.where(np.abs(freq) <= 1e-9, h, 0)


def offset_average_product(s, j: int, theta: float, f=None) -> np.ndarray:
    """``exp(-i theta/16 H(T)) exp(-i theta/16 H(-T))`` from the exact averages."""
    fwd = diagonal_limit(s, j, f, sign=1)
    rev = diagonal_limit(s, j, f, sign=-1)
    return sa.expm(fwd, theta / 16) @ sa.expm(rev, theta / 16)


def target_pulse(s, j: int, theta: float) -> np.ndarray:
    """``exp(-i theta a_j I_jz)``."""
    a = sa.as_unity(s)
    return sa.expm(a[j - 1] * sa.single_spin(j, "z", a.size), theta)


def integrand(s, j: int, y) -> np.ndarray:
    """``G_jQ(y)``: ``H_jQ`` conjugated by ``exp(-2 pi i sum_{k != j} y_k I_kz)``."""
    a = sa.as_unity(s)
    n = a.size
    y = np.asarray(y, dtype=float).copy()
    if y.size != n:
        raise ValueError("lattice point dimension does not match qubit count")
    y[j - 1] = 0
    d = np.exp(-1j * TWO_PI * (sa.unity_table(n) / 2) @ y)
    h = hjq_closed_form(a, j)
    return d[:, None] * h * d.conj()[None, :]


def _raw_cycle(op, n, j, steps):
    mag = sa.magnetization_vector(n, exclude=j)
    out = np.zeros_like(op)
    for k in range(steps):
        d = np.exp(-1j * TWO_PI * k / steps * mag)
        out += d[:, None] * op * d.conj()[None, :]
    return out


def lattice_average(s, j: int, rule) -> np.ndarray:
    """Lattice-rule approximation of the offset average of ``H_jQ``."""
    from .ntquad import integrate
    a = sa.as_unity(s)
    if np.asarray(rule.omega).size != a.size:
        raise ValueError("lattice rule dimension does not match qubit count")
    return integrate(lambda y: integrand(a, j, y), rule)


def assemble_oracle_generator(s, j: int, theta: float, rule, cycle: bool = True) -> np.ndarray:
    """Hermitian X with ``exp(-i X)`` approximating ``exp(-i theta a_j I_jz)``.

    ``cycle=True`` uses ``n`` spectator phase-cycling steps around the
    lattice averages at ``+omega`` and ``-omega`` with prefactor
    ``theta / (16 n)``. ``cycle=False`` is the two-factor form without
    cycling; since both averages commute its generator is
    ``theta/16 (G(+omega) + G(-omega))``.
    """
    a = sa.as_unity(s)
    n = a.size
    if theta == 0:
        return np.zeros((2**n, 2**n), dtype=complex)
    fwd = lattice_average(a, j, rule)
    rev = lattice_average(a, j, rule.reflected())
    pair = fwd + rev
    if not cycle:
        return theta / 16 * pair
    return theta / (16 * n) * _raw_cycle(pair, n, j, n)
