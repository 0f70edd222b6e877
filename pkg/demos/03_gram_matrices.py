# %% [markdown]
# # The Pauli-extended operator and its moment matrices
#
# F = g1 dA (x) sx + g2 dB (x) sy + g3 C (x) sz. Averaging F^2 over the system
# state leaves a 2x2 matrix N(gamma) that is always positive semidefinite.
# Collecting the moments into a 6x6 matrix splits it into two 3x3 sectors with
# equal determinants, so det M6 = det(M2)^2 is never negative even when M2 is.

# %%
import math

import numpy as np

from uncbench import assemble_m6, bloch_state, expansion_check, extract_moments, minor_report, spin
from uncbench.gram import spin_matrix_n

sp = spin(0.5)
psi = bloch_state(sp, math.pi / 4)
m = extract_moments(sp.l_x, sp.l_y, psi)

# %%
print("F^2 expansion residual:", expansion_check(sp.l_x, sp.l_y, psi, (1, 1, 1)))
print("min eig of N(gamma) on a few gammas:")
for g in [(1, 0, 0), (1, 1, 0), (1, 1, 1), (0.3, -2, 0.7)]:
    print(" ", g, np.linalg.eigvalsh(spin_matrix_n(m, g))[0])

# %%
ga = assemble_m6(m)
print("det M2 =", ga.det_m2, " det M6 =", ga.det_m6, " det M2^2 =", ga.det_m2**2)
print("sector determinants:", ga.det_plus, ga.det_minus)
for name, value in minor_report(ga):
    print(f"{name:<16}{value:+.3e}")
