# %% [markdown]
# # A moving coherent state
#
# A coherent state alpha = i t carries mean momentum sqrt(2) t. The
# kinetic-energy bound is tight at t = 0 and fails for every t > 0; its
# margin follows -(1/16) p0^2 / (p0^2 + 1/2).

# %%
import math

from uncbench import coherent_state, kinetic_position_bound, oscillator, oscillator_moments, effective_time_bound

osc = oscillator(40)
for t in (0.0, 0.25, 1 / math.sqrt(2), 1.0, 2.0):
    psi, leak = coherent_state(osc, 1j * t)
    om = oscillator_moments(osc, psi)
    kp = kinetic_position_bound(om, 1.0)
    p0 = math.sqrt(2) * t
    closed = -(p0**2) / (p0**2 + 0.5) / 16
    print(f"t = {t:5.3f}  margin = {kp.margin:+.9f}  closed = {closed:+.9f}  leak = {leak.top_weight:.1e}")

# %% [markdown]
# The time-scale form has two readings of the prefactor; both are reported.

# %%
psi, _ = coherent_state(osc, 1j / math.sqrt(2))
printed, derived = effective_time_bound(oscillator_moments(osc, psi), 1.0)
print("as printed:", printed.margin, " as derived:", derived.margin)
