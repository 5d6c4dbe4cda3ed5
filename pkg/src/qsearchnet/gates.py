"""Named unitaries and symbolic gate plans.

A :class:`GatePlan` is an ordered list of :class:`GateStep` objects written
in operator-product order: the realized matrix is
``steps[0] @ steps[1] @ ... @ steps[-1]``, so the last step acts first.

Oracle-selective steps carry no information about the marked state; the
state is supplied as an *oracle* when the plan is realized, mirroring a
black-box call. Every other step is realizable without it.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from math import pi

import numpy as np

from . import spinalg as sa

ORACLE = "oracle-selective"
NONSELECTIVE = "nonselective"
ONE_QUBIT = "one-qubit"
TWO_QUBIT_PHASE = "two-qubit-diagonal-phase"
KINDS = (ORACLE, NONSELECTIVE, ONE_QUBIT, TWO_QUBIT_PHASE)


# --- matrices ---------------------------------------------------------------

def _local_rotation(p: str, theta: float) -> np.ndarray:
    """``exp(-i theta sigma_p / 2)`` on one qubit."""
    return np.cos(theta / 2) * np.eye(2) - 1j * np.sin(theta / 2) * sa.SIGMA[p]


def _product_rotation(p: str, angles) -> np.ndarray:
    """``prod_k exp(-i angles[k] I_kp)`` as a Kronecker product."""
    return sa.kron(*[_local_rotation(p, th) for th in angles])


def nonselective_rotation(p: str, theta: float, m: int, n: int) -> np.ndarray:
    """``R_p(theta, m) = exp(-i theta F_p^m)``."""
    if m < 1:
        raise ValueError("power m must be a positive integer")
    if m == 1:
        return _product_rotation(p, [theta] * sa.check_qubits(n))
    f = sa.collective(p, n)
    return sa.expm(np.linalg.matrix_power(f, m), theta)


def walsh_hadamard(n: int) -> np.ndarray:
    """W assembled from nonselective rotations, global phase ``exp(i n pi/2)`` kept."""
    n = sa.check_qubits(n)
    return (np.exp(1j * n * pi / 2)
            * nonselective_rotation("x", pi, 1, n)
            @ nonselective_rotation("y", pi / 2, 1, n))


def nonsel_phase_c0(beta: float, n: int) -> np.ndarray:
    n = sa.check_qubits(n)
    d = np.ones(2**n, dtype=complex)
    d[0] = np.exp(-1j * beta)
    return np.diag(d)


def nonsel_phase_s(beta: float, n: int) -> np.ndarray:
    """``S(beta) = exp(-i beta 2I_1z x ... x 2I_nz)``."""
    return np.diag(np.exp(-1j * beta * sa.zstring_diagonal(n)))


def uniform_projector(n: int) -> np.ndarray:
    n = sa.check_qubits(n)
    return np.full((2**n, 2**n), 1 / 2**n, dtype=complex)


def diffusion(theta: float, n: int) -> np.ndarray:
    w = walsh_hadamard(n)
    return -w @ nonsel_phase_c0(theta, n) @ w


def diffusion_closed_form(theta: float, n: int) -> np.ndarray:
    return -np.eye(2**n) + (1 - np.exp(-1j * theta)) * uniform_projector(n)


def selective_phase(s, theta: float) -> np.ndarray:
    """``C_s(theta) = exp(-i theta E_ss)``."""
    a = sa.as_unity(s)
    d = np.ones(2**a.size, dtype=complex)
    d[sa.index_from_unity(a)] = np.exp(-1j * theta)
    return np.diag(d)


def is_nonselective_phase(s) -> bool:
    """C_0 and C_{N-1} need no oracle: s is all +1 or all -1."""
    a = sa.as_unity(s)
    return bool(np.all(a == 1) or np.all(a == -1))


def oracle_pulse(s, theta: float, p: str) -> np.ndarray:
    """``U_op(theta) = prod_k exp(-i theta a_k I_kp)``."""
    a = sa.as_unity(s)
    return _product_rotation(p, theta * a)


def oracle_hamiltonian(s, p: str) -> np.ndarray:
    a = sa.as_unity(s)
    return sum(ak * sa.single_spin(k, p, a.size) for k, ak in enumerate(a, start=1))


# --- steps and plans --------------------------------------------------------

@dataclass(frozen=True)
class GateStep:
    kind: str
    name: str
    params: tuple = ()
    targets: tuple | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown step kind {self.kind!r}")
        if self.name not in _REALIZERS:
            raise ValueError(f"unknown step name {self.name!r}")
        object.__setattr__(self, "params", tuple(float(x) for x in self.params))
        if self.targets is not None:
            object.__setattr__(self, "targets", tuple(int(t) for t in self.targets))

    def inverse(self) -> "GateStep":
        if self.name == "W":
            return self
        if self.name in ("Rx", "Ry", "Rz"):
            theta, m = self.params
            return replace(self, params=(-theta, m))
        return replace(self, params=tuple(-x for x in self.params))

    def to_line(self) -> str:
        params = ",".join(repr(x) for x in self.params) or "-"
        line = f"{self.kind} {self.name} {params}"
        if self.targets is not None:
            line += " [" + ",".join(str(t) for t in self.targets) + "]"
        return line

    @classmethod
    def from_line(cls, line: str) -> "GateStep":
        parts = line.split()
        if len(parts) not in (3, 4):
            raise ValueError(f"malformed plan line: {line!r}")
        kind, name, params = parts[:3]
        values = () if params == "-" else tuple(float(x) for x in params.split(","))
        targets = None
        if len(parts) == 4:
            body = parts[3]
            if not (body.startswith("[") and body.endswith("]")):
                raise ValueError(f"malformed targets in plan line: {line!r}")
            inner = body[1:-1]
            targets = tuple(int(t) for t in inner.split(",")) if inner else ()
        return cls(kind, name, values, targets)


@dataclass(frozen=True)
class GatePlan:
    n: int
    steps: tuple = ()
    oracle: tuple | None = field(default=None, compare=False)

    def __post_init__(self):
        sa.check_qubits(self.n)
        object.__setattr__(self, "steps", tuple(self.steps))
        if self.oracle is not None:
            a = sa.as_unity(self.oracle)
            if a.size != self.n:
                raise ValueError("oracle length does not match plan size")
            object.__setattr__(self, "oracle", tuple(int(x) for x in a))

    def __len__(self):
        return len(self.steps)

    def __iter__(self):
        return iter(self.steps)

    def __matmul__(self, other: "GatePlan") -> "GatePlan":
        if other.n != self.n:
            raise ValueError("cannot compose plans of different size")
        oracle = self.oracle if self.oracle is not None else other.oracle
        return GatePlan(self.n, self.steps + other.steps, oracle)

    def with_oracle(self, s) -> "GatePlan":
        return GatePlan(self.n, self.steps, s)

    def dagger(self) -> "GatePlan":
        return GatePlan(self.n, tuple(st.inverse() for st in reversed(self.steps)), self.oracle)

    def count(self, name: str) -> int:
        return sum(st.name == name for st in self.steps)

    def count_kind(self, kind: str) -> int:
        return sum(st.kind == kind for st in self.steps)

    def realize(self, s=None) -> np.ndarray:
        """Dense matrix of the plan; ``s`` overrides the bound oracle."""
        oracle = self.oracle if s is None else tuple(sa.as_unity(s))
        dim = 2**self.n
        out = np.eye(dim, dtype=complex)
        # accumulate left to right; diagonal steps scale columns
        for st in self.steps:
            kind, mat = _action(st, self.n, oracle)
            if kind == "diag":
                out = out * mat[None, :]
            else:
                out = out @ mat
        return out

    def apply(self, psi: np.ndarray, s=None) -> np.ndarray:
        oracle = self.oracle if s is None else tuple(sa.as_unity(s))
        out = np.asarray(psi, dtype=complex)
        for st in reversed(self.steps):
            kind, mat = _action(st, self.n, oracle)
            out = mat * out if kind == "diag" else mat @ out
        return out

    def to_text(self) -> str:
        header = f"# plan n={self.n} steps={len(self.steps)}"
        return "\n".join([header] + [st.to_line() for st in self.steps]) + "\n"

    @classmethod
    def from_text(cls, text: str, n: int | None = None) -> "GatePlan":
        steps = []
        for raw in text.splitlines():
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                for tok in line[1:].split():
                    if tok.startswith("n=") and n is None:
                        n = int(tok[2:])
                continue
            steps.append(GateStep.from_line(line))
        if n is None:
            raise ValueError("plan text does not declare n")
        return cls(n, tuple(steps))


def step_operator(step: GateStep, n: int, s=None) -> np.ndarray:
    kind, mat = _action(step, n, None if s is None else tuple(sa.as_unity(s)))
    return np.diag(mat) if kind == "diag" else mat


def _need_oracle(oracle, name):
    if oracle is None:
        raise ValueError(f"step {name!r} is oracle-selective and needs a marked state")
    return np.asarray(oracle)


def _targets(step, n):
    return tuple(range(1, n + 1)) if step.targets is None else step.targets


def _rotation(step, n, oracle):
    p = step.name[1]
    theta, m = step.params
    tg = _targets(step, n)
    if int(m) == 1:
        angles = [theta if k in tg else 0.0 for k in range(1, n + 1)]
        if p == "z":
            return "diag", np.diag(_product_rotation("z", angles))
        return "full", _product_rotation(p, angles)
    f = sum(sa.single_spin(k, p, n) for k in tg)
    return "full", sa.expm(np.linalg.matrix_power(f, int(m)), theta)


def _zphase(step, n, oracle):
    angles = np.zeros(n)
    for k, phi in zip(_targets(step, n), step.params):
        angles[k - 1] = phi
    mag = sa.unity_table(n) / 2
    return "diag", np.exp(-1j * (mag @ angles))


def _selective(step, n, oracle):
    a = _need_oracle(oracle, step.name)
    d = np.ones(2**n, dtype=complex)
    d[sa.index_from_unity(a)] = np.exp(-1j * step.params[0])
    return "diag", d


def _uo(step, n, oracle):
    a = _need_oracle(oracle, step.name)
    p = step.name[2]
    mat = _product_rotation(p, step.params[0] * a)
    return ("diag", np.diag(mat)) if p == "z" else ("full", mat)


def _ty(step, n, oracle):
    a = _need_oracle(oracle, step.name)
    s = sa.index_from_unity(a)
    _, iy, _ = sa.transition_ops(0, s, n)
    return "full", sa.expm(iy, step.params[0])


def _lomso(step, n, oracle):
    a = _need_oracle(oracle, step.name)
    tg = _targets(step, n)
    sign = int(np.prod([a[k - 1] for k in tg]))
    return "diag", np.exp(-1j * step.params[0] * sign * sa.zstring_diagonal(n, tg))


_REALIZERS = {
    "Rx": _rotation,
    "Ry": _rotation,
    "Rz": _rotation,
    "W": lambda st, n, o: ("full", walsh_hadamard(n)),
    "C0": lambda st, n, o: ("diag", np.diag(nonsel_phase_c0(st.params[0], n))),
    "S": lambda st, n, o: ("diag", np.exp(-1j * st.params[0] * sa.zstring_diagonal(n))),
    "D": lambda st, n, o: ("full", diffusion(st.params[0], n)),
    "Zphase": _zphase,
    "gphase": lambda st, n, o: ("diag", np.full(2**n, np.exp(-1j * st.params[0]))),
    "Cs": _selective,
    "Uox": _uo,
    "Uoy": _uo,
    "Uoz": _uo,
    "Ty": _ty,
    "lomso": _lomso,
}


def _action(step, n, oracle):
    return _REALIZERS[step.name](step, n, oracle)


# --- step constructors ------------------------------------------------------

def rot(p: str, theta: float, targets=None, m: int = 1) -> GateStep:
    """``exp(-i theta (sum_{k in targets} I_kp)^m)``; all qubits when targets is None."""
    kind = NONSELECTIVE if targets is None else ONE_QUBIT
    return GateStep(kind, "R" + p, (theta, m), targets)


def c0(beta: float) -> GateStep:
    return GateStep(NONSELECTIVE, "C0", (beta,))


def s_phase(beta: float) -> GateStep:
    return GateStep(NONSELECTIVE, "S", (beta,))


def w_step() -> GateStep:
    return GateStep(NONSELECTIVE, "W")


def zphase(angles, targets) -> GateStep:
    """``exp(-i sum angles[i] I_{targets[i] z})``."""
    return GateStep(ONE_QUBIT, "Zphase", tuple(angles), tuple(targets))


def cs(theta: float) -> GateStep:
    return GateStep(ORACLE, "Cs", (theta,))


def uo(p: str, theta: float) -> GateStep:
    return GateStep(ORACLE, "Uo" + p, (theta,))


def cs_from_oracle_pulse(s, theta: float) -> GatePlan:
    """Selective phase shift from two y-axis oracle pulses around ``C_0(theta)``."""
    a = sa.as_unity(s)
    steps = (rot("y", pi / 2), uo("y", -pi / 2), c0(theta), uo("y", pi / 2), rot("y", -pi / 2))
    return GatePlan(a.size, steps, tuple(a))
