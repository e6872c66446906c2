"""Throughput analysis for buffer-aided multi-antenna relay networks.

Monte Carlo estimators and closed-form expressions for an alternating
two-group distributed-beamforming scheme plus three selection/decode-forward
baselines, with per-protocol power budgets, power-split optimization, and a
deterministic experiment harness.
"""

from .analytic import (
    AdbClosedForm,
    adb_closed,
    c11_closed,
    c12_closed,
    c21_closed,
    c22_closed,
)
from .channel import (
    ChannelConfig,
    FadingStream,
    NetworkState,
    erlang_cdf,
    min_erlang_cdf,
    nakagami_sum_cdf,
    nakagami_sum_pdf,
    sample_gains,
    sample_state,
)
from .experiments import (
    CSV_COLUMNS,
    EXPERIMENTS,
    ConfigError,
    ExperimentSpec,
    SweepResult,
    SweepRow,
    emit,
    load_spec,
    parse_csv,
    resolve_spec,
    run_experiment,
    write_csv,
    write_summary,
)
from .power import (
    PROTOCOLS,
    OptimizationError,
    PowerBudget,
    PowerPoint,
    budget_pr,
    maximize_throughput,
    ratio_point,
)
from .simulate import (
    SimConfig,
    ThroughputEstimate,
    adb_component_estimates,
    adb_slot_rate,
    crs_slot_rate,
    df_slot_rate,
    select_sfd,
    sim_adb,
    sim_crs,
    sim_df,
    sim_sfd_mmrs,
)
from .specfun import (
    compositions,
    exp_integral_e1,
    exp_scaled_e1,
    exp_scaled_en,
    log_factorial,
    log_multinomial,
)

__version__ = "0.1.0"
