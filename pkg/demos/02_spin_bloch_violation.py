# %% [markdown]
# # Spin-1/2: where the triple form fails
#
# Along the Bloch family (theta, 0) the pair (Lx, Ly) gives a triple margin of
# -cos^2(theta) sin^2(theta) / 64. The sweep shows the dip, and the violation
# search certifies it at theta = pi/4.

# %%
import math

import numpy as np

from uncbench import ViolationOptions, bloch_state, extract_moments, spin, violation_search
from uncbench.bounds import triple_margin

sp = spin(0.5)
for theta in np.linspace(0, math.pi, 9):
    m = extract_moments(sp.l_x, sp.l_y, bloch_state(sp, theta))
    closed = -(math.cos(theta) * math.sin(theta)) ** 2 / 64
    print(f"theta = {theta:5.3f}  margin = {triple_margin(m):+.6e}  closed form = {closed:+.6e}")

# %%
res = violation_search("spin_bloch", "triple", ViolationOptions(seed=0))
print(res.status, res.best_params, res.best_value, -1 / 256)

# %% [markdown]
# Robertson's bound holds along the same family; the search reports no violation.

# %%
print(violation_search("spin_bloch", "robertson", ViolationOptions(seed=0, resolution=16)).status)
