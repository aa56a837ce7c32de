"""
Breakdown statistics: from ramp failures to a defect density
============================================================

Ramp-to-failure fields from a wafer with two failure populations: a shallow
tail of defect-triggered early breakdowns and the intrinsic wall of the
healthy oxide.  On weakest-link axes the two populations meet in a knee.
"""

import numpy as np

from jjwafer import (
    NoKneeError,
    bimodal_field_sample,
    critical_defect_density,
    find_transition,
    fit_weibull_shape,
    intrinsic_breakdown_field_sample,
    weibull_transform,
)

# 140 dies, 13% failing early around 3.2 MV/cm, the rest near 4.95 MV/cm.
fields = bimodal_field_sample(140, 18 / 140, 3.2, 15.0, 4.95, 3.0, seed=0)
w = weibull_transform(fields)

fit = find_transition(w)
print("knee located after sample", fit.index)
print("P_k    =", round(fit.p_k, 4))
print("E_crit =", round(fit.e_crit, 3), "MV/cm")
print("slopes: defect tail", round(fit.left_slope, 2),
      "vs intrinsic wall", round(fit.right_slope, 2))
print("two-segment SSE", round(fit.sse_two, 2),
      "vs single line", round(fit.sse_one, 2))

d = critical_defect_density(fit.p_k, 25.0)
print("\ndefect density (25 um^2 probes):", f"{d:.3e}", "per cm^2")

# A homogeneous wafer must NOT produce a knee; the detector rejects the
# smooth curvature every single population shows on these axes.
single = intrinsic_breakdown_field_sample(np.random.default_rng(1), 4.95, 3.0, 140)
shape, scale, r2 = fit_weibull_shape(weibull_transform(single))
print("\nsingle-population wafer: shape =", round(shape, 1),
      " scale =", round(scale, 3), " r^2 =", round(r2, 4))
try:
    find_transition(weibull_transform(single))
    print("unexpected knee!")
except NoKneeError as e:
    print("knee search correctly refused:", e)
