"""Squeezed light from a pulse stored in a two-component BEC.

A weak coherent probe written into the condensate prepares a coherent spin
state; collisions twist it (one-axis twisting) while atoms are lost, and the
readout maps the minimal transverse spin variance onto an optical quadrature.
"""
__version__ = "0.1.0"

from .params import (SimConfig, DerivedParams, load_config, baseline_config,  # noqa: E402
                     derive_constants, loss_coefficients)
from .write import css_coefficients, stored_amplitude, CssState  # noqa: E402
from .correlators import (unitary_correlators, brute_force_moments, ladder_factor,  # noqa: E402
                          CorrelatorSet)
from .loss import (overlap_integrals, integrate_populations, rescale_correlators,  # noqa: E402
                   rescale_factors, LossCoefficients)
from .covariance import (assemble_moments, covariance_matrix, transverse_projection,  # noqa: E402
                         min_transverse_variance, squeezing_parameter, accumulate_diffusion,
                         quadrature_variance)
from .homodyne import (optical_variance, coherent_fringe, sample_quadratures,  # noqa: E402
                       build_heatmap, homodyne_heatmap, HomodyneScan)
from .stability import bogoliubov_branches, demixing_summary, weak_excitation_estimates  # noqa: E402
from .pipeline import run_simulation, find_optimum, sweep_mu, TimeSeries  # noqa: E402
