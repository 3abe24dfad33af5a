"""
Deblurring a 4x4 box blur
=========================

The blur is a circular convolution, so its adjoint is the flipped kernel
and the operator norm is at most one.
"""

from rlrp.linops import Blur
from rlrp.benchmark import DESK_SCALE
from rlrp.metrics import snr
from rlrp.noise import NoiseSpec, corrupt
from rlrp.pdhg import pdhg_gap_diagnostic, pdhg_solve
from rlrp.synth import make_ground_truth

gt = make_ground_truth(size=64, seed=2)
phi = Blur.average(4)
b0 = corrupt(gt.composite, phi, NoiseSpec.student_t(2, 0.05, seed=2))

# %%
# Record the gap surrogate to watch convergence
res = pdhg_solve(b0, phi, DESK_SCALE.replace(epsilon=1e-4, max_iter=800), record_gap=True)
gap = pdhg_gap_diagnostic(res)

print("blurred SNR  %.2f dB" % snr(gt.composite, b0))
print("restored SNR %.2f dB" % snr(gt.composite, res.restored))
for k in (10, 100, len(gap)):
    print("gap after %4d iterations: %.3g" % (k, gap[k - 1]))
