"""
Forward conduction models of a thin-oxide junction
==================================================

Evaluates the ohmic tunneling, field-emission, space-charge and power-law
channels for one film and shows where each one matters.
"""

import numpy as np

from jjwafer import (
    OxideModel,
    barrier_height_from_k,
    composite_current,
    direct_tunneling_current,
    fn_scale_for_crossover,
    fowler_nordheim_current,
    implied_area_resistance,
    mott_gurney_current,
    tunnel_coefficient,
)

# The reference film: 4.4 nm of oxide with a 15.7 1/nm decay constant.
film = OxideModel(t_ox=4.4, k=15.7)
area = 25.0  # um^2, a 5x5 plate

print("barrier height implied by k:", round(barrier_height_from_k(15.7), 3), "eV")
print("k implied by a 3.14 eV barrier:",
      round(tunnel_coefficient(3.14, 1.0, 0.75), 3), "1/nm")

# At low voltage the ohmic channel is a plain resistor.  Its area-resistance
# is fixed by (k, t_ox) alone, which is why the exponential makes it such a
# sharp diagnostic: the third digit of k moves RA by tens of percent.
ra = implied_area_resistance(15.7, 4.4)
print("implied RA:", round(ra), "MOhm um^2 ->",
      round(ra / area, 1), "MOhm for this plate")
for dk in (-0.05, 0.0, 0.05):
    print(f"  k = {15.7 + dk:.2f} -> RA = {implied_area_resistance(15.7 + dk, 4.4):,.0f}")

# The field-emission channel needs a prefactor before it is visible at all;
# calibrate it so the two channels cross at 1.0 V, like a sweep that bends
# upward near full bias.
scale = fn_scale_for_crossover(film, area, 1.0)
model = OxideModel(t_ox=4.4, k=15.7, fn_scale=scale)
print("\nfn_scale for a 1.0 V crossover:", f"{scale:.3e}")

# The exponent is ~165 V at these barrier values, so the takeover is
# violent: a few percent past the crossover the field-emission channel has
# grown by orders of magnitude.  Real sweeps show the bend only in a narrow
# window before hitting compliance, which is exactly this shape.
v = np.array([0.05, 0.3, 0.9, 0.95, 1.0, 1.05, 1.1])
i_dt = direct_tunneling_current(v, area, model)
i_fn = fowler_nordheim_current(v, area, model)
i_all = composite_current(v, area, model)
print(f"{'V':>5} {'ohmic [A]':>12} {'field-em [A]':>13} {'total [A]':>12}")
for j in range(v.size):
    print(f"{v[j]:5.2f} {i_dt[j]:12.3e} {i_fn[j]:13.3e} {i_all[j]:12.3e}")

# Space-charge conduction is the other high-bias hypothesis: quadratic in V,
# cubic in 1/t.  With any plausible mobility it dwarfs the measured currents,
# which is the argument for rejecting it on real junctions.
scl = OxideModel(t_ox=4.4, k=15.7, eps_r=9.94, mu=1e-6)
print("\nspace-charge current at 1 V:",
      f"{float(mott_gurney_current(1.0, area, scl)):.3e} A",
      "(vs total", f"{float(composite_current(1.0, area, model)):.3e} A)")
