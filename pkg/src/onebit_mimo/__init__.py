"""Low-rank MIMO channel estimation from one-bit measurements."""

from .channel import ChannelRealization, array_response, generate_channel, generate_channels
from .estimators import (
    EstimateResult,
    EstimatorConfig,
    fw_estimate,
    ml_frobenius_estimate,
    pga_estimate,
    recover_channel,
)
from .likelihood import LikelihoodContext, baseline_gradient_in_H, gradient, log_likelihood
from .measurement import MeasurementSet, quantize_one_bit, simulate, snr_to_sigma
from .metrics import nmse, peak_to_average_ratio
from .numerics import (
    log_std_normal_cdf,
    nuclear_norm,
    project_nuclear_ball,
    project_simplex,
    std_normal_cdf,
    svd,
    top_singular_pair,
)
from .training import (
    PilotSchedule,
    TrainingBlock,
    dft_training,
    schedule_full,
    schedule_offsets,
    schedule_subsample,
    zc_training,
)

__version__ = "0.1.0"
