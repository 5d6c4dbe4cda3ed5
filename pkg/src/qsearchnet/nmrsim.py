"""Two NMR device models for reading out the marked state.

Spectral labeling: an ancilla spin S coupled to every work spin has one
resonance per work-spin configuration r at ``Omega_S + sum_k a_k^r J_Sk / 2``.
With superincreasing couplings the configuration is recovered from the
frequency by a greedy subset-sum pass.

Ensemble readout: a transverse mixed state is hit by ``C_s(theta_s)``, a
hard 90 degree x pulse and a purge (projection onto diagonal operators).
The surviving longitudinal terms carry ``a_k^s`` with weight
``sin(theta_s) / 2^(n-1)``.

The ancillas always occupy the last qubit slots.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations, product
from math import pi

import numpy as np

from . import gates as g
from . import spinalg as sa


@dataclass(frozen=True)
class SpinSystem:
    """Weakly coupled work spins plus one ancilla; frequencies in rad/s."""
    omega_s: float
    omega: np.ndarray
    j_s: np.ndarray
    j: np.ndarray | None = None
    n: int = field(init=False)

    def __post_init__(self):
        omega = np.asarray(self.omega, dtype=float)
        j_s = np.asarray(self.j_s, dtype=float)
        if omega.shape != j_s.shape or omega.ndim != 1:
            raise ValueError("omega and j_s must be vectors of equal length")
        n = omega.size
        j = np.zeros((n, n)) if self.j is None else np.asarray(self.j, dtype=float)
        if j.shape != (n, n) or not np.allclose(j, j.T):
            raise ValueError("work couplings must form a symmetric n x n matrix")
        object.__setattr__(self, "omega", omega)
        object.__setattr__(self, "j_s", j_s)
        object.__setattr__(self, "j", j)
        object.__setattr__(self, "n", n)

    def superincreasing(self) -> bool:
        if np.any(self.j_s <= 0):
            return False
        partial = np.cumsum(self.j_s)
        return bool(np.all(self.j_s[1:] > partial[:-1]))


def superincreasing_system(n: int, omega_s: float = 0.0, rng: np.random.Generator | None = None) -> SpinSystem:
    """``J_S = 1, 2, 4, ...`` times a common scale; random work shifts when rng is given."""
    j_s = 2.0 ** np.arange(n)
    omega = np.zeros(n) if rng is None else rng.normal(scale=10.0, size=n)
    return SpinSystem(omega_s, omega, j_s)


def hamiltonian(sys: SpinSystem) -> np.ndarray:
    """Diagonal Hamiltonian on n work spins and the ancilla (last slot)."""
    n = sys.n
    tot = n + 1
    a = sa.unity_table(tot) / 2
    iz, sz = a[:, :n], a[:, n]
    diag = sys.omega_s * sz + iz @ sys.omega + sz * (iz @ sys.j_s)
    for k, l in combinations(range(n), 2):
        diag = diag + sys.j[k, l] * iz[:, k] * iz[:, l]
    return np.diag(diag).astype(complex)


def energy(sys: SpinSystem, r: int, b_s: int) -> float:
    """Closed-form eigenvalue for work configuration r and ancilla unity number ``b_s``."""
    a = sa.unity_from_index(r, sys.n)
    e = 0.5 * b_s * (sys.omega_s + 0.5 * a @ sys.j_s) + 0.5 * a @ sys.omega
    for k, l in combinations(range(sys.n), 2):
        e += 0.25 * a[k] * a[l] * sys.j[k, l]
    return float(e)


def ancilla_frequency(sys: SpinSystem, r: int) -> float:
    a = sa.unity_from_index(r, sys.n)
    return float(sys.omega_s + 0.5 * a @ sys.j_s)


@dataclass(frozen=True)
class Spectrum:
    frequencies: np.ndarray
    amplitudes: np.ndarray
    configs: np.ndarray

    def lines(self):
        order = np.argsort(self.frequencies, kind="stable")
        return [(float(self.frequencies[i]), complex(self.amplitudes[i]), int(self.configs[i])) for i in order]

    def to_table(self) -> str:
        rows = ["frequency,amplitude_re,amplitude_im"]
        for f, amp, _ in self.lines():
            rows.append(f"{f!r},{amp.real!r},{amp.imag!r}")
        return "\n".join(rows) + "\n"

    def inverted(self) -> list[int]:
        return [int(c) for c, amp in zip(self.configs, self.amplitudes) if amp.real < 0]


def ancilla_spectrum(sys: SpinSystem, marked=None) -> Spectrum:
    """One ancilla line per work configuration; the marked line is phase inverted."""
    n = sys.n
    if n > 20:
        raise ValueError("too many work spins for an explicit spectrum")
    table = 1 - 2 * ((np.arange(2**n)[:, None] >> np.arange(n - 1, -1, -1)) & 1)
    freqs = sys.omega_s + 0.5 * table @ sys.j_s
    amps = np.ones(2**n, dtype=complex)
    if marked is not None:
        amps[sa.index_from_unity(marked)] = -1
    return Spectrum(freqs, amps, np.arange(2**n))


def knapsack_decode(sys: SpinSystem, frequency: float, tol: float | None = None) -> np.ndarray:
    """Recover the work unity vector from an ancilla line frequency."""
    if not sys.superincreasing():
        raise ValueError("decoding needs superincreasing ancilla couplings")
    tol = 1e-9 * max(1.0, float(np.sum(sys.j_s))) if tol is None else tol
    rest = frequency - sys.omega_s + 0.5 * np.sum(sys.j_s)
    bits = np.zeros(sys.n, dtype=int)
    for k in range(sys.n - 1, -1, -1):
        if rest >= sys.j_s[k] - tol:
            bits[k] = 1
            rest -= sys.j_s[k]
    if abs(rest) > tol:
        raise ValueError(f"frequency {frequency} is inconsistent with the couplings (residual {rest})")
    return 2 * bits - 1


def knapsack_weights(sys: SpinSystem, frequency: float) -> np.ndarray:
    """The 0/1 vector b with ``sum_k b_k J_Sk = f_S``."""
    return (knapsack_decode(sys, frequency) + 1) // 2


# --- ancilla realizations of C_s -------------------------------------------

def oracle_permutation(s, ancillas: int = 1) -> np.ndarray:
    """``|x>|y>... -> |x>|y xor f(x)>...`` with f the indicator of s; flips the first ancilla."""
    a = sa.as_unity(s)
    n = a.size
    tot = n + ancillas
    sa.check_qubits(tot)
    dim = 2**tot
    idx = np.arange(dim)
    x = idx >> ancillas
    flip = 1 << (ancillas - 1)
    target = np.where(x == sa.index_from_unity(a), idx ^ flip, idx)
    u = np.zeros((dim, dim))
    u[target, idx] = 1
    return u.astype(complex)


def ancilla_phase(theta: float, n: int) -> np.ndarray:
    """Phase ``exp(-i theta)`` when both trailing ancillas are |1>."""
    dim = 2 ** (n + 2)
    d = np.ones(dim, dtype=complex)
    d[(np.arange(dim) & 3) == 3] = np.exp(-1j * theta)
    return np.diag(d)


def ancilla_state(form: str) -> np.ndarray:
    if form == "Uf-eq-C5":
        return 0.5 * np.eye(2) - sa.SIGMA["x"] / 2
    if form == "UfVUf-eq-C6":
        return np.diag([0, 1, 0, 0]).astype(complex)
    raise ValueError("form must be 'Uf-eq-C5' or 'UfVUf-eq-C6'")


def partial_trace_tail(rho: np.ndarray, keep: int, drop: int) -> np.ndarray:
    r = rho.reshape(2**keep, 2**drop, 2**keep, 2**drop)
    return np.einsum("ajbj->ab", r)


def extended_evolution(s, theta: float, form: str, rho_i: np.ndarray, ancilla: np.ndarray | None = None) -> np.ndarray:
    """Work density operator tensored with the ancilla, evolved by the ancilla circuit."""
    a = sa.as_unity(s)
    n = a.size
    prep = ancilla_state(form)
    anc = prep if ancilla is None else np.asarray(ancilla, dtype=complex)
    if anc.shape != prep.shape or sa.frobenius(anc - prep) > sa.tolerance(prep.shape[0]):
        raise ValueError(f"ancilla is not prepared as required by form {form!r}")
    if form == "Uf-eq-C5":
        if not np.isclose(np.mod(theta, 2 * pi), pi):
            raise ValueError("the single-ancilla form realizes only theta = pi")
        u = oracle_permutation(a, 1)
    else:
        uf = oracle_permutation(a, 2)
        u = uf @ ancilla_phase(theta, n) @ uf
    full = np.kron(rho_i, anc)
    return u @ full @ u.conj().T


def ancilla_cs_equivalence(s, theta: float, form: str, rho_i: np.ndarray, ancilla: np.ndarray | None = None):
    """Return (reduced ancilla-circuit result, ``C_s rho C_s^dag``); they should agree."""
    a = sa.as_unity(s)
    n = a.size
    out = extended_evolution(a, theta, form, rho_i, ancilla)
    drop = 1 if form == "Uf-eq-C5" else 2
    reduced = partial_trace_tail(out, n, drop)
    c = g.selective_phase(a, theta)
    return reduced, c @ rho_i @ c.conj().T


def cs_lomso_decomposition(s, theta: float) -> g.GatePlan:
    """``C_s(theta)`` as ``2^n`` commuting LOMSO exponentials with angle ``theta / 2^n``."""
    a = sa.as_unity(s)
    n = a.size
    star = theta / 2**n
    steps = [g.GateStep(g.NONSELECTIVE, "gphase", (star,))]
    for order in range(1, n + 1):
        for subset in combinations(range(1, n + 1), order):
            steps.append(g.GateStep(g.ORACLE, "lomso", (star,), subset))
    return g.GatePlan(n, tuple(steps), tuple(a))


# --- ensemble readout -------------------------------------------------------

def transverse_state(eps, alpha0: float) -> np.ndarray:
    """``alpha_0 E + sum_k eps_k I_kx``."""
    eps = np.asarray(eps, dtype=float)
    n = eps.size
    return alpha0 * np.eye(2**n) + sum(e * sa.single_spin(k, "x", n) for k, e in enumerate(eps, start=1))


def purge(rho: np.ndarray) -> np.ndarray:
    """Keep only longitudinal magnetization and spin order (the diagonal)."""
    return np.diag(np.diag(rho))


def alpha_pp(a, theta_s: float, k: int) -> float:
    """Longitudinal weight of spin k from an explicit sum over spectator sign patterns.

    For each pattern ``m_i = +-1/2`` the LOMSO bracket
    ``1 + sum a_i 2m_i + sum a_i a_p 4 m_i m_p + ...`` is the product
    ``prod_i (1 + 2 a_i m_i)``.
    """
    a = sa.as_unity(a)
    n = a.size
    big = 2**n
    others = [a[i] for i in range(n) if i != k - 1]
    total = 0.0
    for m in product((0.5, -0.5), repeat=len(others)):
        bracket = np.prod([1 + 2 * ai * mi for ai, mi in zip(others, m)]) if others else 1.0
        total += np.sin(2 / big * theta_s * bracket)
    return 2 / big * total


def closed_form_final(a, theta_s: float, eps, alpha0: float) -> np.ndarray:
    """``alpha_0 E + sum_k alpha''_k eps_k a_k I_kz``."""
    a = sa.as_unity(a)
    n = a.size
    eps = np.asarray(eps, dtype=float)
    out = alpha0 * np.eye(2**n, dtype=complex)
    for k in range(1, n + 1):
        out += alpha_pp(a, theta_s, k) * eps[k - 1] * a[k - 1] * sa.single_spin(k, "z", n)
    return out


def longitudinal_coefficients(rho: np.ndarray, n: int) -> np.ndarray:
    """Coefficient of ``I_kz`` for each k, ``4 tr(rho I_kz) / 2^n``."""
    return np.array([4 * np.trace(rho @ sa.single_spin(k, "z", n)).real / 2**n for k in range(1, n + 1)])


def ensemble_pipeline(s, theta_s: float, eps, alpha0: float = 1.0, via_ancilla: bool = True):
    """Transverse state, selective phase shift, 90 degree x pulse, purge.

    With ``via_ancilla=True`` the phase shift runs as the two-ancilla circuit
    and the ancillas are traced out afterwards. Returns the purged work
    density operator and the measured longitudinal weights ``alpha''_k``.
    """
    a = sa.as_unity(s)
    n = a.size
    eps = np.asarray(eps, dtype=float)
    if eps.size != n:
        raise ValueError("need one polarization per work spin")
    rho = transverse_state(eps, alpha0)
    if via_ancilla:
        rho, _ = ancilla_cs_equivalence(a, theta_s, "UfVUf-eq-C6", rho)
    else:
        c = g.selective_phase(a, theta_s)
        rho = c @ rho @ c.conj().T
    pulse = g.nonselective_rotation("x", pi / 2, 1, n)
    rho = purge(pulse @ rho @ pulse.conj().T)
    coeff = longitudinal_coefficients(rho, n)
    with np.errstate(divide="ignore", invalid="ignore"):
        measured = np.where(eps != 0, coeff / (eps * a), 0.0)
    return rho, measured
