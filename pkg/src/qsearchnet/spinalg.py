"""Dense operator algebra for n spin-1/2 particles.

Basis convention: qubit 1 is the most significant bit of a basis index, and
unity number ``a_k = +1`` means bit 0, i.e. the spin-up spinor ``(1, 0)``.
Qubit indices in the public API are 1-based.

Operators are plain complex ``numpy.ndarray`` objects; hermiticity,
unitarity and diagonality are checked on demand with :func:`is_hermitian`,
:func:`is_unitary` and :func:`is_diagonal` against the tolerance returned by
:func:`tolerance`.
"""
from __future__ import annotations

from functools import reduce
from math import comb

import numpy as np

MAX_QUBITS = 12

SIGMA = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
}
RAISE = np.array([[0, 1], [0, 0]], dtype=complex)
LOWER = np.array([[0, 0], [1, 0]], dtype=complex)


def check_qubits(n: int) -> int:
    if not isinstance(n, (int, np.integer)) or isinstance(n, bool):
        raise TypeError(f"qubit count must be an integer, got {n!r}")
    if not 1 <= n <= MAX_QUBITS:
        raise ValueError(f"qubit count must lie in [1, {MAX_QUBITS}], got {n}")
    return int(n)


def _check_index(k: int, n: int) -> None:
    if not 1 <= k <= n:
        raise IndexError(f"qubit index {k} out of range for n={n}")


def _check_axis(p: str) -> None:
    if p not in SIGMA:
        raise ValueError(f"axis must be one of 'x', 'y', 'z', got {p!r}")


def tolerance(dim: int) -> float:
    """Default equality tolerance (Frobenius) for operators of size ``dim``."""
    return 1e-12 * dim


# --- unity-number vectors -------------------------------------------------

def as_unity(a) -> np.ndarray:
    """Validate a unity-number vector and return it as an int array."""
    arr = np.asarray(a)
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError("unity vector must be a non-empty 1-d sequence")
    if not np.all((arr == 1) | (arr == -1)):
        raise ValueError(f"unity vector entries must be +1 or -1, got {arr}")
    check_qubits(arr.size)
    return arr.astype(int)


def unity_from_index(s: int, n: int) -> np.ndarray:
    n = check_qubits(n)
    if not 0 <= s < 2**n:
        raise ValueError(f"basis index {s} out of range for n={n}")
    bits = (s >> np.arange(n - 1, -1, -1)) & 1
    return 1 - 2 * bits


def index_from_unity(a) -> int:
    a = as_unity(a)
    bits = (1 - a) // 2
    return int(bits @ (1 << np.arange(a.size - 1, -1, -1)))


def unity_table(n: int) -> np.ndarray:
    """All unity vectors as rows, row r encoding basis index r."""
    n = check_qubits(n)
    r = np.arange(2**n)[:, None]
    return 1 - 2 * ((r >> np.arange(n - 1, -1, -1)) & 1)


# --- elementary operators -------------------------------------------------

def kron(*factors: np.ndarray) -> np.ndarray:
    return reduce(np.kron, factors)


def embed(op: np.ndarray, k: int, n: int) -> np.ndarray:
    """Place a 2x2 operator at qubit slot ``k`` of an n-qubit space."""
    n = check_qubits(n)
    _check_index(k, n)
    left = np.eye(2 ** (k - 1))
    right = np.eye(2 ** (n - k))
    return np.kron(np.kron(left, op), right).astype(complex)


def single_spin(k: int, p: str, n: int) -> np.ndarray:
    """Spin operator ``I_kp = sigma_p / 2`` acting on qubit ``k``."""
    _check_axis(p)
    return embed(SIGMA[p] / 2, k, n)


def collective(p: str, n: int, exclude: int | None = None) -> np.ndarray:
    """Collective spin ``F_p = sum_k I_kp``; with ``exclude=j`` the j-th term is dropped."""
    _check_axis(p)
    n = check_qubits(n)
    if exclude is not None:
        _check_index(exclude, n)
    dim = 2**n
    if p == "z":
        return np.diag(magnetization_vector(n, exclude=exclude)).astype(complex)
    out = np.zeros((dim, dim), dtype=complex)
    for k in range(1, n + 1):
        if k != exclude:
            out += single_spin(k, p, n)
    return out


def raising(k: int, n: int) -> np.ndarray:
    """``I_k^+ = I_kx + i I_ky``."""
    return embed(RAISE, k, n)


def lowering(k: int, n: int) -> np.ndarray:
    return embed(LOWER, k, n)


def pauli_string(axes) -> np.ndarray:
    """Kronecker product of Pauli matrices; ``axes[k]`` in {'x','y','z','e'}.

    Equals ``2^n I_1p1 ... I_npn`` with identity slots for 'e'.
    """
    for p in axes:
        if p != "e":
            _check_axis(p)
    mats = [np.eye(2, dtype=complex) if p == "e" else SIGMA[p] for p in axes]
    check_qubits(len(mats))
    return kron(*mats)


def zstring_diagonal(n: int, targets=None) -> np.ndarray:
    """Diagonal of ``prod_{k in targets} 2 I_kz`` (all qubits by default)."""
    a = unity_table(n)
    cols = range(n) if targets is None else [k - 1 for k in targets]
    out = np.ones(2**n)
    for c in cols:
        out = out * a[:, c]
    return out


def matrix_unit(r: int, s: int, n: int) -> np.ndarray:
    """``E_rs`` with a single 1 at row r, column s."""
    n = check_qubits(n)
    dim = 2**n
    if not (0 <= r < dim and 0 <= s < dim):
        raise ValueError("basis index out of range")
    out = np.zeros((dim, dim), dtype=complex)
    out[r, s] = 1
    return out


def projector_from_unity(a) -> np.ndarray:
    """``E_ss`` built as the Kronecker product of ``E_k/2 + a_k I_kz`` factors."""
    a = as_unity(a)
    factors = [np.eye(2) / 2 + ak * SIGMA["z"] / 2 for ak in a]
    return kron(*factors).astype(complex)


def transition_ops(r: int, s: int, n: int):
    """Single-transition operators ``(I_x^rs, I_y^rs, I_z^rs)``."""
    if r == s:
        raise ValueError("transition operators need r != s")
    e_rs = matrix_unit(r, s, n)
    e_sr = e_rs.T.copy()
    e_rr = matrix_unit(r, r, n)
    e_ss = matrix_unit(s, s, n)
    return (e_rs + e_sr) / 2, (e_rs - e_sr) / 2j, (e_rr - e_ss) / 2


def ones_operator(n: int) -> np.ndarray:
    """All-ones matrix assembled as ``2^n prod_k (E_k/2 + I_kx)``."""
    n = check_qubits(n)
    factor = np.eye(2) / 2 + SIGMA["x"] / 2
    return (2**n * kron(*([factor] * n))).astype(complex)


# --- predicates and norms -------------------------------------------------

def frobenius(a: np.ndarray) -> float:
    return float(np.linalg.norm(a))


def op_norm(a: np.ndarray) -> float:
    """Operator 2-norm (largest singular value)."""
    return float(np.linalg.norm(a, 2))


def is_hermitian(h: np.ndarray, tol: float | None = None) -> bool:
    tol = tolerance(h.shape[0]) if tol is None else tol
    return frobenius(h - h.conj().T) <= tol


def is_unitary(u: np.ndarray, tol: float | None = None) -> bool:
    tol = tolerance(u.shape[0]) if tol is None else tol
    return frobenius(u @ u.conj().T - np.eye(u.shape[0])) <= tol


def is_diagonal(a: np.ndarray, tol: float | None = None) -> bool:
    tol = tolerance(a.shape[0]) if tol is None else tol
    return frobenius(a - np.diag(np.diag(a))) <= tol


def equal_up_to_phase(a: np.ndarray, b: np.ndarray, tol: float | None = None) -> bool:
    """True when ``a = exp(i phi) b`` for some global phase phi."""
    tol = tolerance(a.shape[0]) if tol is None else tol
    inner = np.vdot(b, a)
    if abs(inner) == 0:
        return frobenius(a) <= tol and frobenius(b) <= tol
    phase = inner / abs(inner)
    return frobenius(a - phase * b) <= tol


# --- exponentials ---------------------------------------------------------

def expm(h: np.ndarray, theta: float = 1.0, sign: int = 1) -> np.ndarray:
    """``exp(-i * sign * theta * H)`` for hermitian H via eigendecomposition."""
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    if not is_hermitian(h):
        raise ValueError("expm requires a hermitian generator")
    if is_diagonal(h, tol=0.0):
        return np.diag(np.exp(-1j * sign * theta * np.real(np.diag(h))))
    w, v = np.linalg.eigh((h + h.conj().T) / 2)
    return (v * np.exp(-1j * sign * theta * w)) @ v.conj().T


# --- coherence order ------------------------------------------------------

def magnetization_vector(n: int, exclude: int | None = None) -> np.ndarray:
    """``M_r = sum_k a_k^r / 2`` for every basis index r."""
    a = unity_table(n).astype(float)
    if exclude is not None:
        a[:, exclude - 1] = 0
    return a.sum(axis=1) / 2


def coherence_orders(n: int, exclude: int | None = None) -> np.ndarray:
    """Integer matrix ``p(r, t) = M_r - M_t``."""
    m = magnetization_vector(n, exclude=exclude)
    return np.rint(m[:, None] - m[None, :]).astype(int)


def coherence_decompose(rho: np.ndarray, n: int, exclude: int | None = None) -> dict[int, np.ndarray]:
    """Split ``rho`` into coherence-order components ``{p: rho^p}``.

    Components are matrix-element masks, so they sum back to ``rho`` exactly
    and obey ``exp(-i phi F_z) rho^p exp(i phi F_z) = exp(-i p phi) rho^p``.
    Orders with no nonzero element are omitted. With ``exclude=j`` the order
    is counted over the remaining qubits (rotation by ``F_jz``).
    """
    n = check_qubits(n)
    rho = np.asarray(rho)
    if rho.shape != (2**n, 2**n):
        raise ValueError(f"operator shape {rho.shape} does not match n={n}")
    orders = coherence_orders(n, exclude=exclude)
    terms = {}
    for p in range(-n, n + 1):
        mask = orders == p
        if np.any(rho[mask] != 0):
            terms[p] = np.where(mask, rho, 0)
    return terms


def zero_quantum_count(n: int) -> int:
    """Number of independent off-diagonal zero-quantum elements, ``C(2n, n) - 2^n``."""
    return comb(2 * n, n) - 2**n
