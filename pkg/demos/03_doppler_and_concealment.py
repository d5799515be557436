"""
Doppler spectra, spoofing and concealment behind an MTI canceller
=================================================================
"""

# %%
from dopplercloak import Scenario, evaluate_concealment, process
from dopplercloak.cloak import with_radar

sc = Scenario(velocity=-0.03)
for f_m in (None, -0.5, 0.0, 0.5):
    rep = process(sc.run(f_m))
    print("f_m=%-5s v_hat=%+.4f m/s" % (f_m, rep.estimated_velocity))

# %%
# Concealment: the cloaked echo behind a two-pulse canceller, compared with
# an idle (unmodulated) coating at the true Doppler.
rep = evaluate_concealment(sc)
print(rep.to_text())

# %%
# Same with receiver noise at 20 dB SNR.
noisy = with_radar(sc, snr_db=20.0)
noisy.seed = 7
print("attenuation at 20 dB SNR: %.2f dB" % evaluate_concealment(noisy).attenuation_db)
