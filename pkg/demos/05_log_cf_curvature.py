"""
Curvature of the log characteristic function
============================================

For a normal law the log characteristic function is a quadratic in u,
so its second derivative is the constant -sigma^2. Estimating it from
the empirical characteristic function of a large sample shows how far
a distribution is from normal.
"""

# %%
import numpy as np

from varmoments import DistributionSpec, ecf_curvature, replication_rng

rng = replication_rng(11)

# %%
for d in (DistributionSpec.normal(), DistributionSpec.exponential()):
    x = d.sample(rng, 100_000)
    c = ecf_curvature(x, u_max=1.0, h=0.05)
    print(f"{d.kind:12s} sigma2_hat={c.sigma2_hat:.4f}  max |Psi'' + sigma2_hat| = {c.max_deviation():.4f}")

# %%
# The exponential curve against its exact value -1 / (1 - iu)^2.
x = DistributionSpec.exponential().sample(rng, 100_000)
c = ecf_curvature(x)
exact = -1.0 / (1.0 - 1j * c.curvature_u) ** 2
for k in range(0, c.curvature_u.size, 8):
    print(
        f"u={c.curvature_u[k]:+.2f}  estimate {c.curvature[k]:.3f}  exact {exact[k]:.3f}  "
        f"se ({c.curvature_se_re[k]:.3f}, {c.curvature_se_im[k]:.3f})"
    )

# %%
# Near a zero of the characteristic function the logarithm is unstable;
# the estimator refuses rather than returning noise.
try:
    ecf_curvature(np.random.default_rng(0).uniform(-1, 1, 5000), u_max=3.4, h=0.1)
except Exception as exc:
    print(type(exc).__name__, exc)
