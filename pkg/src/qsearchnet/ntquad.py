"""Number-theoretic lattice quadrature on the unit n-cube.

A :class:`LatticeRule` evaluates a 1-periodic integrand at the points
``k * omega`` for ``|k| <= M l`` with the integer weights of
``(z^-M + ... + z^M)^l``. On a Fourier mode ``exp(-2 pi i (m, y))`` the rule
returns ``D_M((m, omega))^l`` where ``D_M(x) = sin((2M+1) pi x) /
((2M+1) sin(pi x))``, so the error on any finite Fourier sum is known in
closed form; :func:`error_functional` evaluates it.
"""
from __future__ import annotations

from dataclasses import dataclass, field, asdict
from itertools import product
from math import comb, sqrt

import numpy as np
from scipy.special import eval_chebyu

from . import spinalg as sa

_INT64_LIMIT = 2**63 - 1
_FIRST_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
CONSTRAINTS = ("all", "h1", "zero-quantum")


def weights(M: int, l: int) -> np.ndarray:
    """Coefficients of ``(sum_{k=-M}^{M} z^k)^l``, exact int64, index 0 is ``k = -M l``."""
    if M < 1 or l < 1:
        raise ValueError("M and l must be positive integers")
    if (2 * M + 1) ** l > _INT64_LIMIT:
        raise OverflowError(f"(2M+1)^l = {(2 * M + 1) ** l} exceeds the int64 range")
    base = np.ones(2 * M + 1, dtype=np.int64)
    out = np.ones(1, dtype=np.int64)
    for _ in range(l):
        out = np.convolve(out, base)
    return out


def default_omega(n: int) -> np.ndarray:
    """Fractional parts of the square roots of the first n primes."""
    n = sa.check_qubits(n)
    roots = np.sqrt(np.array(_FIRST_PRIMES[:n], dtype=float))
    return roots - np.floor(roots)


@dataclass(frozen=True)
class LatticeRule:
    omega: tuple
    M: int
    l: int
    phi: np.ndarray = field(repr=False, compare=False)

    @property
    def dim(self) -> int:
        return len(self.omega)

    @property
    def norm(self) -> int:
        return (2 * self.M + 1) ** self.l

    @property
    def ks(self) -> np.ndarray:
        span = self.M * self.l
        return np.arange(-span, span + 1)

    def points(self) -> np.ndarray:
        return self.ks[:, None] * np.asarray(self.omega)[None, :]

    def scaled_weights(self) -> np.ndarray:
        return self.phi / self.norm

    def reflected(self) -> "LatticeRule":
        return LatticeRule(tuple(-w for w in self.omega), self.M, self.l, self.phi)

    def point_count(self) -> int:
        return 2 * self.M * self.l + 1


def build(omega, M: int, l: int) -> LatticeRule:
    omega = np.atleast_1d(np.asarray(omega, dtype=float))
    if omega.ndim != 1 or omega.size == 0:
        raise ValueError("omega must be a non-empty vector")
    if not np.all(np.isfinite(omega)):
        raise ValueError("omega entries must be finite")
    return LatticeRule(tuple(float(w) for w in omega), int(M), int(l), weights(M, l))


def integrate(f, rule: LatticeRule, dim: int | None = None):
    """``(2M+1)^-l sum_k Phi(M,l,k) f(k omega)`` for scalar or array valued f."""
    if dim is not None and dim != rule.dim:
        raise ValueError(f"integrand dimension {dim} does not match rule dimension {rule.dim}")
    w = rule.scaled_weights()
    pts = rule.points()
    levels: list[tuple[int, object]] = []
    for wk, y in zip(w, pts):
        value, size = wk * np.asarray(f(y)), 1
        # merge equal-size partial sums, binary-counter style
        while levels and levels[-1][0] == size:
            prev = levels.pop()[1]
            value, size = prev + value, 2 * size
        levels.append((size, value))
    total = levels[-1][1]
    for _, v in reversed(levels[:-1]):
        total = v + total
    return total[()] if np.ndim(total) == 0 else total


def dirichlet_ratio(x, M: int) -> np.ndarray:
    """``sin((2M+1) pi x) / ((2M+1) sin(pi x))``, evaluated from the exponential sum."""
    x = np.asarray(x, dtype=float)
    j = np.arange(-M, M + 1)
    return np.real(np.exp(-2j * np.pi * np.multiply.outer(x, j)).sum(axis=-1)) / (2 * M + 1)


def sine_ratio(x, M: int) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return np.sin((2 * M + 1) * np.pi * x) / ((2 * M + 1) * np.sin(np.pi * x))


def chebyshev_ratio(x, M: int) -> np.ndarray:
    """``U_2M(cos phi) / (2M+1)`` with ``phi = pi <x>``."""
    phi = np.pi * distance_to_integer(x)
    return eval_chebyu(2 * M, np.cos(phi)) / (2 * M + 1)


def distance_to_integer(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return np.abs(x - np.round(x))


def _coeff_items(coeffs):
    items = coeffs.items() if isinstance(coeffs, dict) else coeffs
    return [(np.asarray(m, dtype=int), complex(c)) for m, c in items]


def fourier_sum(coeffs):
    """Callable ``y -> sum_m C(m) exp(-2 pi i (m, y))``."""
    items = _coeff_items(coeffs)

    def f(y):
        y = np.asarray(y, dtype=float)
        return sum(c * np.exp(-2j * np.pi * (m @ y)) for m, c in items)
    return f


def exact_integral(coeffs) -> complex:
    return sum(c for m, c in _coeff_items(coeffs) if not np.any(m))


def error_functional(coeffs, rule: LatticeRule, form: str = "sine") -> complex:
    """Rule minus exact integral on a finite Fourier sum.

    Equals ``sum'_m C(m) D_M((m, omega))^l`` over nonzero m. ``form`` picks
    the sine-ratio or the Chebyshev evaluation of ``D_M``.
    """
    if form not in ("sine", "chebyshev"):
        raise ValueError("form must be 'sine' or 'chebyshev'")
    omega = np.asarray(rule.omega)
    total = 0j
    for m, c in _coeff_items(coeffs):
        if m.size != omega.size:
            raise ValueError("frequency vector dimension does not match rule")
        if not np.any(m):
            continue
        x = float(m @ omega)
        if distance_to_integer(x) < 1e-14:
            raise ValueError(f"(m, omega) is an integer for m = {m.tolist()}")
        ratio = sine_ratio(x, rule.M) if form == "sine" else chebyshev_ratio(x, rule.M)
        total += c * float(ratio) ** rule.l
    return total


# --- lattice-distance constants --------------------------------------------

def integer_vectors(n: int, max_entry: int = 1) -> np.ndarray:
    """All nonzero integer vectors with entries in ``[-max_entry, max_entry]``."""
    n = sa.check_qubits(n)
    vals = np.arange(-max_entry, max_entry + 1)
    grid = np.array(list(product(vals, repeat=n)), dtype=int)
    return grid[np.any(grid != 0, axis=1)]


def constrained_vectors(n: int, constraint: str, max_entry: int = 1) -> np.ndarray:
    if constraint not in CONSTRAINTS:
        raise ValueError(f"constraint must be one of {CONSTRAINTS}")
    if constraint == "all":
        return integer_vectors(n, max_entry)
    m = integer_vectors(n, 1)
    if constraint == "zero-quantum":
        m = m[m.sum(axis=1) == 0]
    return m


def estimate_b(omega, a: float = 1.0, constraint: str = "all", n: int | None = None,
               max_entry: int = 1) -> float:
    """``min <(m, omega)> h(m)^a`` over the constrained set; ``inf`` if the set is empty."""
    if a < 1:
        raise ValueError("exponent a must be at least 1")
    omega = np.asarray(omega, dtype=float)
    n = omega.size if n is None else n
    if omega.size != n:
        raise ValueError("omega length does not match n")
    m = constrained_vectors(n, constraint, max_entry)
    if m.size == 0:
        return float("inf")
    h = np.prod(np.maximum(1, np.abs(m)), axis=1).astype(float)
    return float(np.min(distance_to_integer(m @ omega) * h**a))


def _pair_terms(rule: LatticeRule, zero_quantum: bool):
    """``(multiplicity, |D_M|^(2l))`` over all m(r, t) with r != t."""
    n = rule.dim
    m = integer_vectors(n, 1)
    if zero_quantum:
        m = m[m.sum(axis=1) == 0]
    mult = 2.0 ** np.sum(m == 0, axis=1)
    ratio = sine_ratio(m @ np.asarray(rule.omega), rule.M)
    return mult, np.abs(ratio) ** (2 * rule.l)


def bound_eq70(rule: LatticeRule, element: float = 4.0) -> float:
    mult, terms = _pair_terms(rule, False)
    return element * sqrt(float(mult @ terms))


def bound_eq72(rule: LatticeRule, b: float, element: float = 4.0) -> float:
    n = rule.dim
    return element * sqrt(4**n - 2**n) * (1 / (2 * (2 * rule.M + 1) * b)) ** rule.l


def bound_eq78a(rule: LatticeRule, theta: float) -> float:
    mult, terms = _pair_terms(rule, True)
    if mult.size == 0:
        return 0.0
    return 0.5 * abs(theta) * sqrt(float(mult @ terms))


def bound_eq78b(rule: LatticeRule, theta: float, b: float) -> float:
    n = rule.dim
    if np.isinf(b):
        return 0.0
    return 0.5 * abs(theta) * sqrt(comb(2 * n, n) - 2**n) * (1 / (2 * (2 * rule.M + 1) * b)) ** rule.l


@dataclass
class ErrorReport:
    measured_error: float
    bound_eq70: float
    bound_eq72: float
    bound_eq78b: float
    b_estimate: float
    a: float
    b_h1: float = float("nan")
    bound_eq78a: float = float("nan")
    measured_integration_error: float = float("nan")
    violated: bool = False

    def to_dict(self) -> dict:
        return asdict(self)


def bound_report(s, j: int, rule: LatticeRule, theta: float, a: float = 1.0) -> ErrorReport:
    """All bounds next to the measured residuals for one (s, j, rule, theta).

    ``measured_error`` is the Frobenius distance between the cycled lattice
    generator and ``theta a_j I_jz`` (checked against the zero-quantum
    bounds); ``measured_integration_error`` is the distance between the
    lattice average of ``H_jQ`` and its exact average (checked against the
    all-pairs bounds).
    """
    from . import coherence as co
    s = sa.as_unity(s)
    n = s.size
    target = theta * s[j - 1] * sa.single_spin(j, "z", n)
    gen = co.assemble_oracle_generator(s, j, theta, rule, cycle=True)
    measured = sa.frobenius(gen - target)
    integ = sa.frobenius(co.lattice_average(s, j, rule) - co.diagonal_limit(s, j))
    b_h1 = estimate_b(rule.omega, a, "h1")
    b_zq = estimate_b(rule.omega, a, "zero-quantum")
    rep = ErrorReport(
        measured_error=measured,
        bound_eq70=bound_eq70(rule),
        bound_eq72=bound_eq72(rule, b_h1),
        bound_eq78b=bound_eq78b(rule, theta, b_zq),
        b_estimate=b_zq,
        a=a,
        b_h1=b_h1,
        bound_eq78a=bound_eq78a(rule, theta),
        measured_integration_error=integ,
    )
    slack = 1e-12
    rep.violated = bool(
        measured > rep.bound_eq78a + slack
        or measured > rep.bound_eq78b + slack
        or integ > rep.bound_eq70 + slack
        or integ > rep.bound_eq72 + slack
    )
    return rep
