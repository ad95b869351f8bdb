"""Writing a weak pulse into the condensate.

A coherent probe with mu_in photons leaves mu_stored excitations behind,
which tilts the collective spin away from the south pole.
"""
import math

import numpy as np

from bec_squeeze import baseline_config, css_coefficients, derive_constants, stored_amplitude

cfg = baseline_config()
d = derive_constants(cfg)

# %% stored amplitude and tilt
amp = stored_amplitude(cfg.mu_in, cfg.eta_write, cfg.zeta_spatial, cfg.phi0)
print(f"|beta| = {amp.beta_mag:.3f}, mu_stored = {amp.mu_stored:g}")
print(f"theta = {d.theta:.4f} rad = {d.theta / math.pi:.4f} pi")

# %% Dicke coefficients: log-space magnitudes survive 2J = 1e5
css = css_coefficients(d.J, d.theta, cfg.phi0)
p = css.probabilities()
print("norm - 1:", p.sum() - 1)
print("<n2> =", np.sum((d.J + css.m) * p), "expected", cfg.N0 * math.sin(d.theta / 2) ** 2)

sl = css.support(cfg.coeff_cutoff_log)
print(f"kept {sl.stop - sl.start} of {p.size} coefficients, discarded weight {css.discarded_weight():.1e}")

# the distribution is essentially a Poissonian over n2 near mu_stored
k = np.argmax(p)
print("most likely m:", css.m[k], "-> n2 =", d.J + css.m[k])
