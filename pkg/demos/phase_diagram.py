"""Success probability against the difficulty coordinate.

Exact recovery of the change-point count switches from impossible to
routine as the coordinate density * rel_jump^2 * n * spacing crosses a
constant, and the crossover sharpens as the problem grows.  A small
seeded sweep makes the S-curve visible in a minute of CPU; the chance
column shows what uniform guessing achieves under the same scoring
rule, which is the honest baseline at the bottom of the curve.
"""

from netcpd.harness import PipelineConfig, SweepGrid, phase_sweep

grid = SweepGrid(
    axes=(
        ("snr", (0.05, 0.8, 3.0, 7.0, 12.0, 18.0, 24.0)),
        ("n_nodes", (40,)),
        ("density", (0.4,)),
        ("spacing", (25,)),
        ("n_steps", (75,)),
    ),
    n_reps=40,
    base_seed=91,
)
pipeline = PipelineConfig(threshold_scale=0.5)

summary = phase_sweep(grid, pipeline)

print("difficulty sweep, 40 replications per cell")
print()
print("     snr   success   chance")
for row in summary.rows:
    snr = float(row["snr"])
    rate = float(row["success_rate"])
    chance = float(row["chance_rate"])
    bar = "#" * int(round(30 * rate))
    print(f"  {snr:6.2f}   {rate:7.2f}  {chance:7.2f}  {bar}")

print()
print(f"Spearman correlation of success with snr: "
      f"{summary.spearman_rho:.3f} (one-sided p={summary.spearman_pvalue:.2e})")
print()
print("Below the crossover the detector is no better than the chance")
print("column; above it, failures vanish. The boundary location is the")
print("constant the theory pins down.")
