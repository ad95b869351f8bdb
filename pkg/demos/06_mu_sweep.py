"""Best squeezing and readout time versus input photon number."""
import numpy as np

from bec_squeeze.params import baseline_config
from bec_squeeze.pipeline import power_law_exponent, sweep_mu

mus = [100, 200, 300, 500, 700, 1000, 1500, 2000]
res = sweep_mu(baseline_config(), mus, both=True, threads=2)

print(" mu_in  theta/pi   lossy dB   t* ms   lossless dB   t* ms")
for a, b in zip(res.select(True), res.select(False)):
    print(f"{a.mu_in:6.0f}  {a.theta_over_pi:7.4f}  {a.best_V_opt_dB:8.2f}  {a.t_star * 1e3:6.1f}"
          f"  {b.best_V_opt_dB:10.2f}  {b.t_star * 1e3:6.1f}")

# %% Kerr-limit scaling of the lossless level over one decade
c = res.columns(False)
sel = (c["mu_in"] >= 100) & (c["mu_in"] <= 1000)
print("exponent:", power_law_exponent(c["mu_in"][sel], 10 ** (c["best_V_opt_dB"][sel] / 10)))
