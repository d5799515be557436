"""
Calibrating the bias waveform and looking at slow-time phase
============================================================
"""

# %%
import numpy as np

from dopplercloak import Scenario

sc = Scenario()
cal = sc.calibration
print("carrier %.3g Hz, usable span %.1f deg" % (sc.carrier, np.degrees(cal.span)))

# %%
# Round trip: requested phase -> bias -> phase through the map row.
want = np.linspace(0, cal.span, 9)
got = cal.forward(cal(want))
print("max round-trip error %.2e rad" % np.max(np.abs(got - want)))

# %%
# Slow-time phase of the echo: bare target, and coated with the
# cancelling modulation frequency.
plan = sc.plan()
print(plan.to_text())
for label, f_m in (("bare", None), ("cancel", plan.modulation_frequency)):
    train = sc.run(f_m)
    slope = np.polyfit(train.timestamps, train.phase(), 1)[0]
    print("%-7s phase slope %+.4f rad/s" % (label, slope))
