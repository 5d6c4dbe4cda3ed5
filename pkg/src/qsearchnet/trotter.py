"""Product formulas assembling ``exp(-i theta a_j I_jz)`` from lattice summands.

Every summand is ``A = c U H_jQ U^dag`` with U diagonal, so one
eigendecomposition of ``H_jQ`` serves every factor. A product formula is
stored as a *sequence* of ``(term index, fraction)`` pairs meaning
``exp(-i fraction t A_index)``, written in operator-product order.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import fsum, pi

import numpy as np

from . import coherence as co
from . import gates as g
from . import ntquad as nq
from . import spinalg as sa

MAX_SUZUKI = 3


@dataclass(frozen=True)
class Term:
    """Hermitian ``A = V diag(lam) V^dag``."""
    vecs: np.ndarray
    lam: np.ndarray
    label: tuple = ()

    @classmethod
    def from_matrix(cls, a: np.ndarray, label: tuple = ()) -> "Term":
        if not sa.is_hermitian(a):
            raise ValueError("summand must be hermitian")
        lam, vecs = np.linalg.eigh((a + a.conj().T) / 2)
        return cls(vecs, lam, label)

    def matrix(self) -> np.ndarray:
        return (self.vecs * self.lam) @ self.vecs.conj().T

    def exp(self, tau: float) -> np.ndarray:
        """``exp(-i tau A)``."""
        return (self.vecs * np.exp(-1j * tau * self.lam)) @ self.vecs.conj().T


# --- sequences --------------------------------------------------------------

def first_order_sequence(count: int, reps: int = 1):
    return [(i, 1.0 / reps) for _ in range(reps) for i in range(count)]


def symmetric_sequence(count: int, frac: float = 1.0):
    """Half steps ascending, one full step on the last term, half steps descending."""
    if count == 1:
        return [(0, frac)]
    half = [(i, frac / 2) for i in range(count - 1)]
    return half + [(count - 1, frac)] + half[::-1]


def suzuki_coefficients(m: int) -> list[float]:
    """Weights p_j' of the symmetric second-order blocks in the order-2m fractal.

    ``S_2k(t) = S_2k-2(p t)^2 S_2k-2((1 - 4p) t) S_2k-2(p t)^2`` with
    ``p = 1 / (4 - 4^(1/(2k-1)))``.
    """
    if not 1 <= m <= MAX_SUZUKI:
        raise ValueError(f"suzuki depth m must lie in [1, {MAX_SUZUKI}]")
    coeffs = [1.0]
    for k in range(2, m + 1):
        p = 1 / (4 - 4 ** (1 / (2 * k - 1)))
        mid = 1 - 4 * p
        coeffs = ([p * c for c in coeffs] * 2 + [mid * c for c in coeffs]
                  + [p * c for c in coeffs] * 2)
    return coeffs


def suzuki_sequence(count: int, m: int, reps: int = 1):
    seq = []
    for _ in range(reps):
        for p in suzuki_coefficients(m):
            seq.extend(symmetric_sequence(count, p / reps))
    return seq


def evaluate(sequence, terms, t: float) -> np.ndarray:
    dim = terms[0].vecs.shape[0]
    out = np.eye(dim, dtype=complex)
    for idx, frac in sequence:
        out = out @ terms[idx].exp(frac * t)
    return out


def exact(terms, t: float) -> np.ndarray:
    return sa.expm(sum(term.matrix() for term in terms), t)


def error(sequence, terms, t: float) -> float:
    """Operator 2-norm distance between the product formula and the exact exponential."""
    return sa.op_norm(evaluate(sequence, terms, t) - exact(terms, t))


def fit_slope(x, y) -> float:
    """Least-squares slope of ``log y`` against ``log x``."""
    lx, ly = np.log(np.asarray(x, float)), np.log(np.asarray(y, float))
    return float(np.polyfit(lx, ly, 1)[0])


# --- summand sets -----------------------------------------------------------

@dataclass(frozen=True)
class SummandSet:
    n: int
    s: tuple
    j: int
    rule: nq.LatticeRule
    theta: float
    terms: dict = field(repr=False)
    angles: dict = field(repr=False)
    scales: dict = field(repr=False)

    @property
    def t(self) -> float:
        return self.theta / 2

    def signed(self, sign: int) -> list:
        return self.terms[sign]

    def all_terms(self) -> list:
        return self.terms[1] + self.terms[-1]

    def __len__(self) -> int:
        return len(self.terms[1]) + len(self.terms[-1])


def summands(s, j: int, rule: nq.LatticeRule, theta: float) -> SummandSet:
    """Terms ``A_j(k, k', +-omega)`` ordered by k then k', one list per sign."""
    a = sa.as_unity(s)
    n = a.size
    sa._check_index(j, n)
    if rule.dim != n:
        raise ValueError("lattice rule dimension does not match qubit count")
    h = co.hjq_closed_form(a, j)
    lam, q = np.linalg.eigh(h)
    mag = sa.unity_table(n) / 2
    spect = np.array([k != j for k in range(1, n + 1)], dtype=float)
    omega = np.asarray(rule.omega)
    scale = rule.phi / (8 * n * rule.norm)
    terms, angles, scales = {1: [], -1: []}, {}, {}
    for sign in (1, -1):
        for idx, k in enumerate(rule.ks):
            for kp in range(n):
                ang = spect * (2 * pi * kp / n + 2 * pi * sign * k * omega)
                d = np.exp(-1j * (mag @ ang))
                label = (j, int(k), kp, sign)
                terms[sign].append(Term(d[:, None] * q, scale[idx] * lam, label))
                angles[label] = ang
                scales[label] = float(scale[idx])
    return SummandSet(n, tuple(a), j, rule, float(theta), terms, angles, scales)


def reference(sset: SummandSet) -> np.ndarray:
    """``exp(-i t sum A(+omega)) exp(-i t sum A(-omega))`` without splitting error."""
    return exact(sset.signed(1), sset.t) @ exact(sset.signed(-1), sset.t)


def _pair(sset, seq_plus, seq_minus):
    return evaluate(seq_plus, sset.signed(1), sset.t) @ evaluate(seq_minus, sset.signed(-1), sset.t)


def first_order(sset: SummandSet, L0: int = 1):
    """Generalized Trotter product, L0 repetitions per sign; returns (operator, plan)."""
    if L0 < 1:
        raise ValueError("L0 must be at least 1")
    seq = first_order_sequence(len(sset.signed(1)), L0)
    return _pair(sset, seq, seq), sequence_plan(sset, seq, seq)


def suzuki_symmetric(sset_or_terms, t: float) -> np.ndarray:
    """Second-order symmetric product of a term list (or of one SummandSet sign)."""
    terms = sset_or_terms.signed(1) if isinstance(sset_or_terms, SummandSet) else sset_or_terms
    return evaluate(symmetric_sequence(len(terms)), terms, t)


def suzuki_recursive(sset: SummandSet, m: int, L: int = 1):
    """``[f_{2m-1}(A / L)]^L`` for both signs; returns (operator, plan)."""
    if m < 2:
        raise ValueError("recursive suzuki needs m >= 2")
    if L < 1:
        raise ValueError("L must be at least 1")
    seq = suzuki_sequence(len(sset.signed(1)), m, L)
    return _pair(sset, seq, seq), sequence_plan(sset, seq, seq)


def factor_plan(sset: SummandSet, label: tuple, frac: float) -> g.GatePlan:
    """``exp(-i frac t A)``: diagonal conjugation around the echo plan."""
    n, j = sset.n, sset.j
    spect = tuple(k for k in range(1, n + 1) if k != j)
    tau = frac * sset.t * sset.scales[label]
    inner = co.hjq_plan(sset.s, j, tau)
    if not spect:
        return inner
    ang = sset.angles[label][[k - 1 for k in spect]]
    wrap = g.zphase(ang, spect)
    return g.GatePlan(n, (wrap,), sset.s) @ inner @ g.GatePlan(n, (wrap.inverse(),))


def sequence_plan(sset: SummandSet, seq_plus, seq_minus) -> g.GatePlan:
    plan = g.GatePlan(sset.n, (), sset.s)
    for sign, seq in ((1, seq_plus), (-1, seq_minus)):
        terms = sset.signed(sign)
        for idx, frac in seq:
            plan = plan @ factor_plan(sset, terms[idx].label, frac)
    return plan


def expected_cs_count(n: int, M: int, l: int, m: int, L: int) -> int:
    """``8 n L R [2 n (2 M l + 1) - 1]`` with ``R = 5^(m-1)``."""
    R = 5 ** (m - 1)
    return 8 * n * L * R * (2 * n * (2 * M * l + 1) - 1)


def expected_first_order_cs_count(n: int, M: int, l: int, L0: int) -> int:
    return 8 * n * L0 * n * (2 * M * l + 1)


@dataclass
class RebuildReport:
    scheme: str
    error: float
    splitting_error: float
    quadrature_error: float
    cs_steps: int
    expected_cs_steps: int
    factor_count: int
    s_dependent_non_cs: int

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def compose_uoz(s, theta: float, rule: nq.LatticeRule, scheme: str = "eq89", m: int = 2,
                L: int = 1, L0: int = 1, with_plan: bool = True):
    """Rebuild ``U_oz(theta)`` as a product over qubits; returns (operator, plan, report).

    ``scheme='eq83'`` is the first-order product with L0 repetitions,
    ``scheme='eq89'`` the order-2m fractal with L repetitions.
    """
    a = sa.as_unity(s)
    n = a.size
    if scheme not in ("eq83", "eq89"):
        raise ValueError("scheme must be 'eq83' or 'eq89'")
    out = np.eye(2**n, dtype=complex)
    ref = np.eye(2**n, dtype=complex)
    plan = g.GatePlan(n, (), tuple(a))
    factors = 0
    for j in range(1, n + 1):
        sset = summands(a, j, rule, theta)
        count = len(sset.signed(1))
        if scheme == "eq83":
            seq = first_order_sequence(count, L0)
        else:
            seq = suzuki_sequence(count, m, L)
        out = out @ _pair(sset, seq, seq)
        ref = ref @ reference(sset)
        factors += 2 * len(seq)
        if with_plan:
            plan = plan @ sequence_plan(sset, seq, seq)
    target = g.oracle_pulse(a, theta, "z")
    if scheme == "eq83":
        expected = expected_first_order_cs_count(n, rule.M, rule.l, L0)
    else:
        expected = expected_cs_count(n, rule.M, rule.l, m, L)
    report = RebuildReport(
        scheme=scheme,
        error=sa.op_norm(out - target),
        splitting_error=sa.op_norm(out - ref),
        quadrature_error=sa.op_norm(ref - target),
        cs_steps=plan.count("Cs") if with_plan else 4 * factors,
        expected_cs_steps=expected,
        factor_count=factors,
        s_dependent_non_cs=sum(st.kind == g.ORACLE and st.name != "Cs" for st in plan),
    )
    return out, plan if with_plan else None, report


def coefficient_sum(m: int) -> float:
    return fsum(suzuki_coefficients(m))
