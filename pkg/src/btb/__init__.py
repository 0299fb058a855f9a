"""Finite-volume simulator for cross-diffusion population dynamics with a
nonlinear Brinkman velocity law."""

from .brinkman import (EllipticOperator, SolverError, assemble,
                       quadratic_form, solve, sqrt_check,
                       velocity_from_pressure)
from .config import (ConfigError, ExperimentConfig, default_initial_data,
                     load_config, benchmark_config_path,
                     benchmark_initial_data, write_config)
from .diagnostics import (DiagnosticsRecord, diffusive_dissipation,
                          entropy_residual, nonlocal_dissipation,
                          spatial_variance, tsallis_entropy)
from .grid import (FaceFluxes, Grid, GridSpec, dirichlet_laplacian,
                   divergence_of_fluxes, gradient_at_faces, integrate,
                   make_grid, neumann_laplacian)
from .harness import (SweepReport, beta_sweep, localization_sweep,
                      reproduce_figure, run_experiment, verify,
                      write_outputs)
from .pressure import (ModelParams, clipped_plus, power_field, pressure,
                       r_trunc, s_trunc)
from .stepping import (PicardDivergence, RunResult, SimulationState,
                       TimeStepConfig, linear_substep, picard_step, run,
                       select_scheme)

__version__ = "0.1.0"
