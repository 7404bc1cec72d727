//! Episodic environment: flies an action table through a scenario and
//! scores it.

mod action;
mod episode;
mod grid;
mod reward;

pub use action::{
    apply_maneuver, read_table, table_from_json, table_to_json, ActionTable, Maneuver, PARAMS, ROWS,
};
pub use episode::{
    combine_pc, element_deviation, evaluate, run_episode, EpisodeConfig, EpisodeOutcome,
    EpisodeSummary, SimTrace, TraceRow, TRACE_COLUMNS,
};
pub use grid::{build_time_grid, GridConfig, TimeGrid};
pub use reward::{
    docking_check, penalty, reward_pc, reward_total, Deviation, EpisodeMetrics, RewardBreakdown,
    RewardThresholds, RewardWeights, PC_FLOOR,
};
