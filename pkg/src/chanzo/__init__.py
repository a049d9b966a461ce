"""chanzo: pilot-budgeted black-box tuning of reconfigurable wireless links.

Tune a reflecting surface's phases or a movable antenna's position using
only received-power (or coherent pilot) measurements, and benchmark the
zeroth-order tuner against perfect-CSI bounds, channel-estimation
pipelines and blind sampling baselines at equal pilot cost.
"""

from .baselines import (AngleGrid, DiscretePhaseBook, csm, dft_probe_book,
                        ls_estimate_then_pbf, omp_estimate, pbf_perfect,
                        po_grid, rms)
from .channels import (CascadedChannel, PathSet, Position, RisPhases,
                       gen_cascaded_channel, gen_path_set, ma_channel,
                       ris_end_to_end)
from .errors import BudgetExceededError, ConfigError, RankDeficientWarning
from .harness import (ExperimentConfig, ResultRow, ResultTable, SummaryRow,
                      emit, load_config, run_experiment, run_single, summarize)
from .kernels import backend_name
from .oracle import COHERENT, POWER, PilotOracle, QueryLedger, snr_of, true_power
from .zo import (CENTRAL, FORWARD, PHASE_WRAP, Box, FunctionOracle, Trajectory,
                 ZoParams, quantize_phases, run_zo, zo_gradient)

__version__ = "0.1.0"

__all__ = [
    "AngleGrid", "Box", "BudgetExceededError", "CENTRAL", "COHERENT",
    "CascadedChannel", "ConfigError", "DiscretePhaseBook", "ExperimentConfig",
    "FORWARD", "FunctionOracle", "POWER", "PHASE_WRAP", "PathSet", "PilotOracle",
    "Position", "QueryLedger", "RankDeficientWarning", "ResultRow",
    "ResultTable", "RisPhases",
    "SummaryRow", "Trajectory", "ZoParams", "backend_name", "csm",
    "dft_probe_book", "emit", "gen_cascaded_channel", "gen_path_set",
    "load_config", "ls_estimate_then_pbf", "ma_channel", "omp_estimate",
    "pbf_perfect", "po_grid", "quantize_phases", "ris_end_to_end", "rms",
    "run_experiment", "run_single", "run_zo", "snr_of", "summarize",
    "true_power", "zo_gradient",
]
