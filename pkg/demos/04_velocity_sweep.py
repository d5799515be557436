"""
Apparent velocity against modulation frequency
==============================================
"""

# %%
import numpy as np

from dopplercloak import Scenario, velocity_sweep

res = velocity_sweep(Scenario())
for v, (slope, icpt, r2) in zip(res.velocities, res.fits()):
    print("v=%+.2f  slope %.5f m/s/Hz  intercept %+.5f  R^2 %.5f" % (v, slope, icpt, r2))

# %%
# The measured common slope follows -c/(2 f_c): the FFT peak tracks the
# first serrodyne line, whose shift is exactly f_m. The small-signal
# prediction -c*span/(4 pi f_c) is smaller by 2 pi/span.
print("common slope   %.5f" % res.common_slope())
print("expected slope %.5f" % res.expected_slope())
print("-c/(2 f_c)     %.5f" % (-res.speed_of_light / (2 * res.carrier)))

# %%
# The f_m that zeroes v_hat, per velocity.
print(np.column_stack(res.invisibility_points()))
print("invisibility slope %.2f Hz per m/s" % res.invisibility_slope())
