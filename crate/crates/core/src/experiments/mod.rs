//! Scenario configuration, the closed-loop runner, tracking metrics and
//! controller comparison.

mod compare;
mod config;
mod metrics;
mod runner;
mod trace;

pub use compare::{compare, percent_decrease, Comparison, Improvement, MetricRow};
pub use config::{ControllerKind, ScenarioConfig, SensorNoise, SCHEMA_VERSION};
pub use metrics::{compute_metrics, lap_rmse, moving_rms, plot_rows, write_plot, Failure, MetricsReport, PlotRow};
pub use runner::{run_scenario, Augmentation, RunOutput};
pub use trace::{read_trace, read_trace_file, write_trace, write_trace_file, TraceRow};
