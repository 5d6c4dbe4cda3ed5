"""Walk through the one-shot search network on a few qubits."""
# %%
import numpy as np

from qsearchnet import gates as g
from qsearchnet import searchnet as sn
from qsearchnet import spinalg as sa

n = 3
s = sa.unity_from_index(5, n)  # |101>
print("marked unity vector", s.tolist())

# %% the conjugator turns the two-level y operator into a diagonal one
u, plan = sn.conjugator(s)
_, iy, _ = sa.transition_ops(0, 5, n)
print(np.round(np.diag(u @ iy @ u.conj().T).real, 12))
print(plan.to_text())

# %% all three variants on the uniform superposition
for variant in sn.VARIANTS:
    net = sn.build_network(s, variant)
    print(f"{variant:15s} amplitude on |s> = {net.amplitude():.12f}  C_s calls = {net.count('Cs')}")

# %% the composed plan uses only oracle pulses, C_s and nonselective steps
net = sn.build_network(s, "composed-eq34")
for kind in g.KINDS:
    print(kind, net.plan.count_kind(kind))
