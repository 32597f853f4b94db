"""Small-scale run of the Monte Carlo coverage study.

Each repetition simulates a fresh sample, splits it into unmatched
revealed/stated views, builds the confidence region, and records whether
it covers the true value. The full grid (sample sizes times step-size
scales, 1,000 repetitions with 1,000 bootstrap draws each) is what
``asfbounds replicate --scale full`` runs; here we use a light grid so the
script finishes in a few minutes.
"""

import asfbounds as ab

plan = ab.MonteCarloPlan(
    n_values=(500,),
    xi_scales=(0.5, 1.0),
    repetitions=25,
    B=100,
    alpha=0.05,
    seed=42,
)
report = ab.run_monte_carlo(plan, ab.AnalysisConfig(workers=2))

print(f"true value {report.true_value:.3f}; exact interval "
      f"[{report.identified_lower:.4f}, {report.identified_upper:.4f}]\n")
print(f"{'n':>6} {'xi_scale':>9} {'coverage':>9} {'excess len':>11} {'failures':>9}")
for cell in report.cells:
    print(f"{cell.n:>6} {cell.xi_scale:>9} {cell.coverage:>9.3f} "
          f"{cell.excess_length:>11.4f} {cell.failures:>9}")

report.to_csv("coverage_demo.csv")
print("\nwrote coverage_demo.csv")
