# %% [markdown]
# # Looking for saturating states
#
# A product state psi (x) chi annihilated by F makes N(gamma) singular. For
# (x, p) this lands on a squeezed Gaussian and saturates Robertson's bound.

# %%
from uncbench import SaturationOptions, eq2_residual, extract_moments, oscillator, saturation_search

osc = oscillator(32)
res = saturation_search(osc.x, osc.p, opts=SaturationOptions(seed=0, edge_levels=2))
m = extract_moments(osc.x, osc.p, res.best_state)
print("status:", res.status, " evaluations:", res.iterations)
print("kernel residual:", res.details["residual"])
print("Var x Var p - 1/4 =", m.a * m.b - 0.25)
print("variance condition residual:", eq2_residual(osc.x, osc.p, res.best_state))
print("gamma:", res.gamma.as_tuple())
