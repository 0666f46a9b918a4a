"""Pseudo-spectral experiments on algebraic decay of heat, Navier-Stokes and
Hall-MHD flows in a large periodic box."""

from .analysis import (
    DecayFit,
    beta_time_integral,
    fit_decay_exponent,
    heat_decay_oracle,
    heat_oracle_slope,
    heat_sup_bound,
    hneg_interp_bound,
    splitting_check,
    splitting_check_x,
)
from .config import ExperimentConfig, load_config, parse_config
from .dynamics import RunResult, SimState, continue_run, run, step_heat, step_ifrk4
from .initial_data import SpectralProfile, calibrate_magnetic, calibrate_smallness, generate
from .io import emit_csv, load_checkpoint, load_csv, save_checkpoint
from .norms import NormKind, ball_mass, hs_norm_sq, l2_norm_sq, low_freq_sup, x_norm, y_norm
from .operators import curl, divergence, hall_term, leray_project, mhd_rhs, nse_nonlinear
from .series import NormSeries, SeriesBundle
from .spectral import Grid, SpectralField, VectorField, make_grid

__version__ = "0.1.0"
