"""Population loss, coherence decay and the diffusion it brings.

One-, two- and three-body channels drain both components. The same mean
populations set the coherence factor eta_coh = N1 N2 / (N1_0 N2_0), damp the
correlators, and drive a transverse diffusion of the spin covariance.
"""
import numpy as np

from bec_squeeze import baseline_config, find_optimum, run_simulation

lossy = run_simulation(baseline_config())
clean = run_simulation(baseline_config(loss_enabled=False))
pops = lossy.populations

# %% populations and coherence
for t_ms in (0, 25, 50, 100, 125, 150):
    i = int(round(t_ms * 1e-3 / lossy.cfg.dt))
    print(f"{t_ms:4d} ms  N1 = {pops.N1[i]:9.1f}  N2 = {pops.N2[i]:7.2f}  eta_coh = {pops.eta_coh[i]:.4f}"
          f"  s_q = {pops.s_q[i]:.4f} 1/s")

# %% squeezing with and without loss
a, b = find_optimum(lossy), find_optimum(clean)
print(f"lossy    {a.V_min_dB:.2f} dB at {a.t_star * 1e3:.2f} ms")
print(f"lossless {b.V_min_dB:.2f} dB at {b.t_star * 1e3:.2f} ms")

# diffusion contribution at the lossy optimum, relative to the CSS noise J/2
i = a.index
print("trace of diffusion / (J/2):", np.trace(lossy.Gamma_noise[i]) / (lossy.derived.J / 2))
