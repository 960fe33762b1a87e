"""Littlewood-Paley analysis, Besov-type norms, paraproducts and mild
Navier-Stokes solutions on the periodic torus."""

from .heat_oseen import bilinear_B, heat_apply, heat_trajectory, oseen_apply, oseen_kernel_l1, singular_convolution_L
from .littlewood_paley import CutoffPair, DyadicDecomposition, cutoffs, lp_block, lp_decompose, lp_low, lp_reconstruct
from .mild_solver import (
    NonContraction,
    PicardTrace,
    RegularityReport,
    SolverConfig,
    StepRejected,
    blowup_monitor,
    bootstrap_check,
    energy_ledger,
    fixed_point_Fu,
    operator_Lu,
    picard_solve,
    small_time_monitor,
    step_integrator_oracle,
)
from .norms import (
    BesovParams,
    TimeGrid,
    TimeSeriesField,
    besov_norm,
    chemin_lerner_norm,
    heat_char_norm,
    lebesgue_norm,
    sobolev_norm,
    uloc_norm,
    weighted_sup_norm,
)
from .paraproduct import bony_residual, pi1, pi2
from .spectral_core import Grid, SpectralField, make_grid, random_band_field

__version__ = "0.1.0"
