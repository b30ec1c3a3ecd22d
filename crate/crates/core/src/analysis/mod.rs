//! Proportion predictions, parameter sweeps and tabular reports.

pub mod proportions;
pub mod report;
pub mod sweep;

pub use proportions::{
    binomial_sigma, empirical_proportions, theoretical_proportions_p1, theoretical_proportions_p23,
    ProportionBreakdown, XiConvention,
};
pub use report::{format_sig6, to_json, write_csv, CSV_HEADER};
pub use sweep::{
    detection_sweep, efficiency_sweep, run_trials, with_workers, PointSummary, SweepAxis, SweepParam, SweepPoint,
    SweepResult, TrialRow,
};
