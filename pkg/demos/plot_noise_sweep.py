"""
Noise-intensity sweep
=====================

Median SNR over five seeds at three Student-t intensities, the data
behind an SNR-versus-intensity plot. The same run is available from the
command line as ``rlrp benchmark demos/robustness.cfg``.
"""

from rlrp.benchmark import BenchmarkScenario, run_benchmark, summary_to_csv
from rlrp.noise import NoiseSpec

scenario = BenchmarkScenario(size=64, noise=NoiseSpec.student_t(2, 0.1), intensities=(0.05, 0.1, 0.2),
                             methods=("rlrp-pps", "clrp"))
result = run_benchmark(scenario)

# %%
# One row per (method, noise level); feed this CSV to any plotting tool
print(summary_to_csv(result.summary))
