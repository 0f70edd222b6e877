# %% [markdown]
# # Oscillator ground state
#
# Take E = p^2/2 and x on a truncated Fock basis. In the ground state the
# commutator has zero mean, so Robertson's bound is empty, while the refined
# bound and the kinetic-energy bound both come out exactly tight at 1/16.

# %%
from uncbench import ReportOptions, full_report, oscillator, fock_state, oscillator_moments

osc = oscillator(16)
psi = fock_state(osc, 0)
opts = ReportOptions(oscillator=oscillator_moments(osc, psi))
report = full_report(osc.e_kin, osc.x, psi, opts)

# %%
print(f"{'bound':<18}{'lhs':>12}{'rhs':>12}{'margin':>12}  status")
for bv in report.bounds:
    print(f"{bv.id:<18}{bv.lhs:12.6f}{bv.rhs:12.6f}{bv.margin:12.2e}  {bv.status}")

# %% [markdown]
# Moments behind the numbers: Var E = 1/8, Var x = 1/2, <C> = 0,
# <C^2> = 1/2 and <C2> = -1.

# %%
print(report.moments.as_dict())
for note in report.notes:
    print("note:", note)
