"""Ancilla spectrum decoding and the ensemble readout."""
# %%
from math import pi

import numpy as np

from qsearchnet import nmrsim as nm
from qsearchnet import spinalg as sa

system = nm.superincreasing_system(4, omega_s=10.0)
marked = sa.unity_from_index(6, 4)
spectrum = nm.ancilla_spectrum(system, marked)
print(spectrum.to_table())

# %% the inverted line decodes back to the marked state
f = [freq for freq, amp, _ in spectrum.lines() if amp.real < 0][0]
print("decoded", nm.knapsack_decode(system, f).tolist(), "marked", marked.tolist())

# %% ensemble readout amplitudes halve with every added qubit
for n in range(2, 7):
    _, meas = nm.ensemble_pipeline(sa.unity_from_index(1, n), pi / 2, np.ones(n))
    print(n, meas.round(12).tolist())
