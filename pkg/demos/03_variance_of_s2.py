"""
How noisy is the sample variance?
=================================

Var[s^2] depends on the fourth moment. For normal data it reduces to
2 sigma^4 / (n - 1); skewed or heavy-tailed parents inflate it. Under
dependence the same quantity follows from expected distinct-index
moments, which can be estimated by simulation and plugged in.
"""

# %%
from varmoments import (
    Ar1Spec,
    DistributionSpec,
    IidMomentModel,
    expected_s4,
    run_replications,
    var_s2_general,
    var_s2_iid,
    var_s2_normal,
)

# %%
n = 11
print("normal formula:", var_s2_normal(1.0, n))
rep = run_replications(DistributionSpec.normal(), n, r=20_000, seed=3, symmetric=False)
print(f"simulated:      {rep.var_of_s2:.4f} +/- {rep.se_of_var_s2:.4f}")

# %%
# Exponential parent: mu2c = 1, mu4c = 9.
exp = DistributionSpec.exponential()
m = IidMomentModel.from_central(exp.mean, exp.central_moment(2), exp.central_moment(4))
rep = run_replications(exp, 10, r=20_000, seed=4, symmetric=False)
print(f"exponential: formula {var_s2_iid(m, 10):.4f}, simulated {rep.var_of_s2:.4f} +/- {rep.se_of_var_s2:.4f}")

# %%
# AR(1): average the distinct-index moments over replications, then feed
# them through the general E[s^4] and Var[s^2] expressions.
rep = run_replications(Ar1Spec(1.0, 0.3, 12), r=20_000, seed=5)
esm = rep.mean_symmetric_moments
print(f"E[s^4]:   plug-in {expected_s4(esm):.4f}, direct {rep.mean_of_s4:.4f} +/- {rep.se_of_mean_s4:.4f}")
print(f"Var[s^2]: plug-in {var_s2_general(esm):.4f}, direct {rep.var_of_s2:.4f} +/- {rep.se_of_var_s2:.4f}")
