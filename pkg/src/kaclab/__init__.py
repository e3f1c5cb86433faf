"""kaclab: a numerical laboratory for the inelastic Kac equation.

Spectral (Wild-expansion) solver in Fourier variables, grazing collision
kernels, closed-form fractional Fokker-Planck and drift limits, a DSMC
particle simulator, and the weighted-Fourier diagnostics tying them to
the limit theorems.
"""

from .analysis import (
    AlphaEstimate,
    ConditionAError,
    HolderDiagnostic,
    MetricReport,
    alpha_limit,
    energy_and_moments,
    fourier_metric,
    holder_modulus,
    l1_distance,
    weighted_gridmax,
)
from .core import (
    InitialDatum,
    ModelParams,
    SpectralDensity,
    XiGrid,
    convolution,
    equilibrium,
    equilibrium_spectral,
    gaussian,
    initial_datum_hat,
    interp,
    mixture,
    mp_hat,
    sample_spectral,
)
from .dsmc import (
    ParticleEnsemble,
    collide_pair,
    empirical_chf,
    sample_initial,
    step,
)
from .experiments import (
    CheckResult,
    ExperimentConfig,
    GateError,
    RunResult,
    run_dsmc_crosscheck,
    run_equilibrium_attraction,
    run_fp_longtime,
    run_grazing_drift,
    run_grazing_levy,
    write_csv,
)
from .fokker_planck import (
    FPState,
    drift_solution_hat,
    fp_residual,
    fp_solution_hat,
    mp_physical,
)
from .kernels import (
    GrazingKernel,
    cp_constant,
    energy_loss_rate,
    make_kernel,
    phi_lower,
    sample_theta,
    sample_theta_batch,
)
from .plots import render_figure
from .wild import WildConfig, collocation_oracle, evolve, qplus, wild_step

__version__ = "0.1.0"
