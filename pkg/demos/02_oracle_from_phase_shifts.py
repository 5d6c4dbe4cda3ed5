"""Rebuild a single-qubit oracle z pulse from selective phase shifts."""
# %%
from math import pi

import numpy as np

from qsearchnet import coherence as co
from qsearchnet import ntquad as nq
from qsearchnet import spinalg as sa

s, j, theta = np.array([1, -1, -1]), 2, pi / 2

# %% spin echoes: 2^n E_ss becomes H_jQ, realized by four wrapped C_s steps
plan = co.hjq_plan(s, j, 0.3)
print(plan.to_text())
print("plan error", sa.frobenius(plan.realize() - sa.expm(co.hjq_closed_form(s, j), 0.3)))

# %% phase cycling keeps the zero-quantum part; offsets remove what is left
h0 = co.zero_quantum_structure(s, j)
print("zero-quantum elements kept", int(np.count_nonzero(np.abs(h0) > 1e-12)))
print("diagonal limit equals 8 a_j I_jz:",
      np.allclose(co.diagonal_limit(s, j), 8 * s[j - 1] * sa.single_spin(j, "z", 3)))
print("exact reconstruction error", sa.frobenius(co.offset_average_product(s, j, theta) - co.target_pulse(s, j, theta)))

# %% a lattice rule replaces the exact offset average
for M in (2, 4, 8, 16):
    rep = nq.bound_report(s, j, nq.build(nq.default_omega(3), M, 3), theta)
    print(f"M={M:2d} measured {rep.measured_error:.3e} bound {rep.bound_eq78b:.3e}")
