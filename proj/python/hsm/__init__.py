"""Hierarchically structured sparsity: proximal operators, banded covariance
estimation, and the experiment harness.

The heavy lifting lives in the compiled extension ``hsm._core``; this package
re-exports its public surface.
"""

from hsm._core import (
    BandEstimate,
    GlProxSolution,
    Hierarchy,
    LogProxSolution,
    MglProxSolution,
    RegressionResult,
    __version__,
    bandwidth,
    estimate_banded,
    fit_regression,
    gen_moving_average,
    gen_stair,
    is_psd,
    lambda_grid,
    min_band_signal,
    min_eigenvalue,
    path_decompose,
    prox_gl,
    prox_gl_path,
    prox_log,
    prox_log_path,
    prox_mgl_path,
    run_experiment,
    sample_covariance,
    sample_gaussian,
)

__all__ = [
    "BandEstimate",
    "GlProxSolution",
    "Hierarchy",
    "LogProxSolution",
    "MglProxSolution",
    "RegressionResult",
    "__version__",
    "bandwidth",
    "estimate_banded",
    "fit_regression",
    "gen_moving_average",
    "gen_stair",
    "is_psd",
    "lambda_grid",
    "min_band_signal",
    "min_eigenvalue",
    "path_decompose",
    "prox_gl",
    "prox_gl_path",
    "prox_log",
    "prox_log_path",
    "prox_mgl_path",
    "run_experiment",
    "sample_covariance",
    "sample_gaussian",
]
