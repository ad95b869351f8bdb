"""Is the mixture about to demix?"""
from bec_squeeze.params import baseline_config, derive_constants
from bec_squeeze.stability import stability_for_config, weak_excitation_estimates

cfg = baseline_config()
rep = stability_for_config(cfg)
print(f"a12^2 / (a11 a22) = {rep.miscibility_ratio:.4f}")
print(f"growth time {rep.tau_MI * 1e3:.1f} ms, fastest wavelength {rep.lambda_star * 1e6:.1f} um")
print(f"cloud diameter {cfg.d_TF * 1e6:.0f} um -> suppressed by finite size: {rep.finite_size_suppressed}")

# the minority-density expansion behind the quick estimate
d = derive_constants(cfg)
approx, gamma = weak_excitation_estimates(rep.n1, rep.n2, d.g11, d.g22, d.g12)
print(f"Delta exact {rep.Delta_bar:.3e} J, first order {approx:.3e} J")

# the peak-density variant, for comparison
peak = stability_for_config(cfg.replace(density_convention="peak"))
print(f"peak densities: {peak.tau_MI * 1e3:.1f} ms, {peak.lambda_star * 1e6:.1f} um")
