"""
The whole pipeline: synthesize an etch series, analyze every wafer
==================================================================

Generates the four preset wafers, runs all four analysis stages on each,
prints the trend table, and shows the rendered report for the last wafer.
"""

from jjwafer import PRESET_NAMES, analyze, generate_wafer, preset_spec, render_text

reports = []
for name in PRESET_NAMES:
    ds = generate_wafer(preset_spec(name, seed=0)).dataset
    reports.append(analyze(ds))

print(f"{'wafer':>8} {'C/A':>6} {'t_ox':>6} {'k':>6} {'RA':>9} {'V_BT':>6}")
for rep in reports:
    print(f"{rep.label:>8} {rep.ca_ff_per_um2:6.1f} {rep.t_ox_nm:6.2f} "
          f"{rep.k_per_nm:6.1f} {rep.ra_mohm_um2:9.2f} {rep.v_bt_v:6.2f}")

# Longer etch: thinner oxide, bigger capacitance, higher k, earlier
# breakdown.  The trends are the point; single cells carry noise.  None of
# these wafers has enough defect-triggered failures for a knee, so the
# defect-density column of the full report stays empty.

print("\n" + render_text(reports[-1]))
