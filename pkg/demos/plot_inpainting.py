"""
Inpainting from 40% of the pixels
=================================

Random down-sampling keeps each pixel with probability 0.4. The
primal-dual solver handles any linear degradation, so it is used here.
"""

import math

from rlrp.benchmark import DESK_SCALE
from rlrp.linops import Downsample
from rlrp.metrics import snr
from rlrp.noise import NoiseSpec, corrupt
from rlrp.pdhg import pdhg_solve
from rlrp.synth import make_ground_truth

gt = make_ground_truth(size=64, seed=1)

# %%
# The mask is drawn once from its seed and then fixed
phi = Downsample(keep_probability=0.4, seed=1).materialize(gt.composite.shape)
print(phi)

b0 = corrupt(gt.composite, phi, NoiseSpec.student_t(2, 0.1, seed=1))
print("observed  SNR %.2f dB" % snr(gt.composite, b0))

# %%
# 500 iterations is the usual cap for inpainting
cfg = DESK_SCALE.replace(max_iter=500)
for label, c in (("huber", cfg.c), ("quadratic", math.inf)):
    res = pdhg_solve(b0, phi, cfg.replace(c=c))
    print("%-9s SNR %.2f dB after %d iterations (sigma = eta = %.3f)"
          % (label, snr(gt.composite, res.restored), res.iterations, res.info["sigma"]))
