"""tickcorr: covariance estimation for asynchronous tick data.

Fourier and overlap-interval covariance estimators, correlated path
simulators, asynchrony samplers, tick-aggregation clocks, and seeded
experiment runners for studying the decay of measured correlation at
short averaging scales.
"""

from ._kernels import BACKEND as kernel_backend
from .core import (
    CovarianceResult,
    PathBundle,
    RescaledTimes,
    TickSeries,
    cholesky,
    log_returns,
    rescale_times,
)
from .estimators import (
    FourierCoefficients,
    KanataniWeights,
    epps_theory_curve,
    hy_covariance,
    kanatani_weights,
    mm_covariance,
    mm_fourier_coefficients,
    mm_sigma_from_coefficients,
    nyquist_cutoff,
    realized_covariance,
)
from .simulators import (
    SimConfig,
    derive_rng,
    simulate,
    simulate_garch,
    simulate_gbm,
    simulate_merton,
    simulate_ou,
    simulate_variance_gamma,
)
from .asynchrony import decimate_missing, exponential_sample, synchronize_to
from .aggregation import (
    BarSeries,
    VolumeClockConfig,
    calendar_bars,
    dedupe_trades,
    intrinsic_volume_bars,
    synchronized_volume_bars,
)
from .experiments import (
    ExperimentReport,
    make_synthetic_taq,
    read_taq_csv,
    run_missing_data_sweep,
    run_process_comparison,
    run_reno_extended,
    run_reno_recovery,
    run_taq_pipeline,
    summarize_correlations,
    taq_volatility_report,
)

__version__ = "0.1.0"
