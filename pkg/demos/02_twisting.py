"""Lossless one-axis twisting of the stored state."""
import numpy as np

from bec_squeeze import baseline_config, find_optimum, run_simulation

cfg = baseline_config(loss_enabled=False)
ts = run_simulation(cfg)
print(f"chi = {ts.derived.chi:.5f} rad/s, J = {ts.derived.J:g}")

# %%
for t_ms in (0, 10, 20, 30, 40, 60, 90, 120):
    i = ts.index_of(t_ms * 1e-3)
    print(f"{t_ms:4d} ms  v_A,min = {ts.v_A_min[i]:.4f}  ({ts.v_A_min_dB[i]:6.2f} dB)  "
          f"axis angle {np.degrees(ts.axis_angle[i]):6.2f} deg")

opt = find_optimum(ts)
print(f"optimum {opt.V_min_dB:.2f} dB at {opt.t_star * 1e3:.2f} ms")

# past the optimum the distribution bends around the sphere and the variance grows again
