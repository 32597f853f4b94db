"""Point estimation when decisions and probability reports are matched.

When the same individuals contribute both their stated choice probability
and their later actual decision, the average structural function at an
attribute value x is point identified: regress the decision on the report
within the X = x subsample, then average the fitted curve over the reports
of the whole sample. This script runs that estimator on the benchmark
process (where the true value is exactly 1/2 for both attribute values)
and attaches bootstrap uncertainty.
"""

import asfbounds as ab

sample = ab.simulate_sample(20_000, seed=7)
print(f"simulated {len(sample)} matched records; "
      f"share with x=1: {sample.x.mean():.3f}")

for x in (0, 1):
    point = ab.estimate_asf_matched(sample, x)
    print(f"\nx = {x}")
    print(f"  point estimate : {point.mu_hat:.4f}   (truth: {ab.true_asf(x):.4f})")
    print(f"  queries skipped: {point.n_skipped}")

config = ab.AnalysisConfig(B=200, alpha=0.05, workers=2)
est = ab.bootstrap_matched(sample.take(range(2_000)), 0, seed=1, config=config)
print(f"\nbootstrap on the first 2,000 rows (B = {est.B}):")
print(f"  mu_hat = {est.mu_hat:.4f}, se = {est.se:.4f}")
print(f"  95% percentile interval = [{est.ci_lower:.4f}, {est.ci_upper:.4f}]")
