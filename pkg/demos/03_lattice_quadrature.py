"""Lattice rules on Fourier sums: the error is known in closed form."""
# %%
import numpy as np

from qsearchnet import ntquad as nq

rng = np.random.default_rng(1)
omega = nq.default_omega(3)
coeffs = [(tuple(rng.integers(-3, 4, size=3)), rng.normal() + 1j * rng.normal()) for _ in range(12)]

# %%
for M, l in ((4, 2), (8, 2), (8, 3), (16, 3)):
    rule = nq.build(omega, M, l)
    err = nq.integrate(nq.fourier_sum(coeffs), rule) - nq.exact_integral(coeffs)
    print(f"M={M:2d} l={l} error {abs(err):.3e}  functional {abs(nq.error_functional(coeffs, rule)):.3e}")

# %% lattice constants shrink with dimension
for n in range(2, 9):
    w = nq.default_omega(n)
    print(n, f"{nq.estimate_b(w, 1.0, 'zero-quantum'):.3e}", f"{nq.estimate_b(w, 1.0, 'h1'):.3e}")
