"""Bootstrap confidence region for the identified interval.

The bound functionals are min/max-type and only directionally
differentiable, so a plain percentile bootstrap is invalid. Instead each
replicate perturbs the estimated densities along its resampled direction,
re-solves the dual programs, and finite-differences the optimal values.
Order statistics of those derivative draws, scaled back by the kernel
rate n**(2/5), push the plug-in bounds outward into a region for the
true value.
"""

import asfbounds as ab

n = 1_000
sample = ab.simulate_sample(n, seed=14)
revealed, stated = sample.revealed_view(), sample.stated_view()

config = ab.AnalysisConfig(B=500, alpha=0.05, xi_scale=1.0, seed=0, workers=2)
region = ab.confidence_region(revealed, stated, 0, config)

print(f"n = {n}, B = {region.B}, r_n = {region.r_n:.2f}, xi_n = {region.xi_n:.4f}")
print(f"plug-in interval  : [{region.lb_hat:.4f}, {region.ub_hat:.4f}]")
print(f"95% region        : [{region.lo:.4f}, {region.hi:.4f}]")
print(f"covers truth 0.5  : {region.lo <= 0.5 <= region.hi}")
print(f"exact interval    : [{ab.analytic_bounds(0).lower:.4f}, "
      f"{ab.analytic_bounds(0).upper:.4f}]")

# a larger step scale shortens the region (heavier smoothing of the
# directional derivative), at some cost in finite-sample coverage
for scale in (0.5, 1.0, 1.5):
    cfg = ab.AnalysisConfig(B=500, xi_scale=scale, seed=0, workers=2)
    r = ab.confidence_region(revealed, stated, 0, cfg)
    print(f"xi_scale = {scale:>4}: length = {r.hi - r.lo:.4f}")
