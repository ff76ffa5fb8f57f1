"""
Bias of the sample variance under AR(1) dependence
==================================================

For a stationary AR(1) process the Bessel-corrected s^2 is no longer
unbiased. Positive autocorrelation pulls it below the marginal variance,
most strongly for short series.
"""

# %%
from varmoments import Ar1Spec, CrossMomentModel, expected_s2_ar1, expected_s2_general, run_replications

# %%
# Closed form against the general cross-moment formula evaluated on the
# full rho^|i-j| covariance matrix.
for rho in (-0.5, 0.0, 0.5, 0.9):
    spec = Ar1Spec(sigma2=1.0, rho=rho, n=20)
    closed = expected_s2_ar1(spec)
    general = expected_s2_general(CrossMomentModel.ar1(spec))
    print(f"rho={rho:+.1f}  E[s^2]={closed:.6f}  general={general:.6f}  gamma0={spec.marginal_variance:.4f}")

# %%
# The bias shrinks as n grows.
for n in (5, 10, 20, 50, 200):
    spec = Ar1Spec(1.0, 0.9, n)
    print(f"n={n:4d}  E[s^2] / gamma0 = {expected_s2_ar1(spec) / spec.marginal_variance:.4f}")

# %%
# Monte Carlo check with stationary starts (no burn-in).
spec = Ar1Spec(1.0, 0.5, 20)
rep = run_replications(spec, r=20_000, seed=1, symmetric=False)
z = (rep.mean_of_s2 - expected_s2_ar1(spec)) / rep.se_of_mean_s2
print(f"simulated {rep.mean_of_s2:.4f} +/- {rep.se_of_mean_s2:.4f}, closed form {expected_s2_ar1(spec):.4f}, z = {z:+.2f}")
