"""Splitting error of the product formulas on one summand set."""
# %%
import numpy as np

from qsearchnet import ntquad as nq
from qsearchnet import trotter as tr

terms = tr.summands([1, -1, -1], 2, nq.build(nq.default_omega(3), 1, 1), 1.0).signed(1)
c = len(terms)

# %% orders in the step
ts = np.array([3.2, 1.6, 0.8, 0.4, 0.2, 0.1])
for name, seq in (("symmetric", tr.symmetric_sequence(c)), ("fractal m=2", tr.suzuki_sequence(c, 2))):
    errs = [tr.error(seq, terms, t) for t in ts]
    print(name, ["%.2e" % e for e in errs])

# %% repetitions at fixed step
Ls = [1, 2, 4, 8]
for m in (2, 3):
    errs = [tr.error(tr.suzuki_sequence(c, m, L), terms, 3.2) for L in Ls]
    print(f"m={m} L slope {tr.fit_slope(Ls, errs):.2f}")

# %% selective phase shifts in a full rebuild
op, plan, rep = tr.compose_uoz([1, -1], np.pi / 4, nq.build(nq.default_omega(2), 1, 1), "eq89", m=2)
print(rep)
