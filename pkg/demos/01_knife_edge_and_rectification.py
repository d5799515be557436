"""
Knife edge of a loaded dipole, and how a dispersive capacitor flattens it
=========================================================================
"""

# %%
# The lag of the dipole current behind its unloaded value, over added
# capacitance and frequency. The pi/4 contour is the knife edge.
import numpy as np

from dopplercloak import (CircuitParams, knife_map, rectify, rectifying_capacitance,
                          surface_phase_map, threshold_capacitance, usable_bandwidth)
from dopplercloak.metasurface import PF

p = CircuitParams()
m = knife_map(p)
print("map shape", m.shape, "resonance %.4g GHz" % (p.resonance / 1e9))

# %%
# Closed-form C_omega against the contour read off the map.
for f in (1.2e9, 1.3e9, 1.4e9, 1.5e9):
    print("%.2f GHz  closed form %.4f pF  from map %.4f pF"
          % (f / 1e9, rectifying_capacitance(p, f) / PF, threshold_capacitance(m, f) / PF))

# %%
# Above about 1.63 GHz the unloaded dipole is already past the threshold,
# so there is no C_omega and rectifying the full dipole map fails loudly.
print(rectifying_capacitance(p, np.array([1.6e9, 1.65e9]), strict=False))

# %%
# The metasurface surrogate has a proper varactor range (0.6-2.6 pF).
smap = surface_phase_map()
curve, rect = rectify(smap)
tol = 0.1 * PF
print("bandwidth before %.0f MHz, after %.0f MHz"
      % (usable_bandwidth(smap, tol) / 1e6, usable_bandwidth(rect, tol) / 1e6))
print(curve.to_csv().splitlines()[:5])
