use serde::{Deserialize, Serialize};

use super::trace::TraceRow;
use crate::dnac::TrainingStats;
use crate::error::{Error, Result};

/// Why a run stopped early.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub time: f64,
    pub reason: String,
}

/// Tracking metrics over the post-warmup part of a run, computed on the
/// simulated truth, plus run bookkeeping filled in by the runner.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub scenario: String,
    pub controller: String,
    pub seed: u64,
    pub warmup_s: f64,
    pub rms_window_s: f64,
    /// Post-warmup samples the metrics were computed on.
    pub samples: usize,
    pub attitude_l2_deg: f64,
    pub position_l2_cm: f64,
    pub velocity_l2_cm_s: f64,
    pub std_roll_deg: f64,
    pub std_pitch_deg: f64,
    /// Moving RMS of the attitude error norm, one value per full window.
    pub moving_rms_deg: Vec<f64>,
    /// Attitude RMSE per trajectory period.
    pub lap_rmse_deg: Vec<f64>,
    pub failure: Option<Failure>,
    pub control_steps: u64,
    pub training: TrainingStats,
    pub controller_faults: u64,
    /// Time the augmentation was cut off after a fault.
    pub severed_at: Option<f64>,
    pub max_w_norm: f64,
    /// Largest force and torque norm of any single disturbance output.
    pub max_disturbance_force_n: f64,
    pub max_disturbance_torque_nm: f64,
}

impl MetricsReport {
    pub fn failed(&self) -> bool {
        self.failure.is_some()
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

fn attitude_error_deg(row: &TraceRow) -> f64 {
    row.roll_err.hypot(row.pitch_err).to_degrees()
}

fn norm(v: [f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    if n == 0 {
        0.0
    } else {
        sum / n as f64
    }
}

/// Population standard deviation.
fn std_dev(values: &[f64]) -> f64 {
    let m = mean(values.iter().copied());
    mean(values.iter().map(|v| (v - m) * (v - m))).sqrt()
}

fn post_warmup(trace: &[TraceRow], warmup: f64) -> &[TraceRow] {
    let start = trace.partition_point(|r| r.t < warmup);
    &trace[start..]
}

/// Window length in samples, from the trace's own sample spacing.
fn window_samples(trace: &[TraceRow], window: f64) -> usize {
    match trace {
        [a, b, ..] if b.t > a.t => ((window / (b.t - a.t)).round() as usize).max(1),
        _ => 1,
    }
}

/// Moving RMS of the attitude error norm in degrees; element `k` covers
/// samples `k .. k + w`.
pub fn moving_rms(errors_deg: &[f64], w: usize) -> Vec<f64> {
    if w == 0 || errors_deg.len() < w {
        return Vec::new();
    }
    errors_deg
        .windows(w)
        .map(|win| (win.iter().map(|e| e * e).sum::<f64>() / w as f64).sqrt())
        .collect()
}

pub fn compute_metrics(trace: &[TraceRow], warmup: f64, window: f64) -> Result<MetricsReport> {
    let rows = post_warmup(trace, warmup);
    if rows.is_empty() {
        return Err(Error::config("no trace samples after the warmup interval"));
    }
    if !(window > 0.0) {
        return Err(Error::config("rms window must be positive"));
    }
    let att: Vec<f64> = rows.iter().map(attitude_error_deg).collect();
    let roll: Vec<f64> = rows.iter().map(|r| r.roll_err.to_degrees()).collect();
    let pitch: Vec<f64> = rows.iter().map(|r| r.pitch_err.to_degrees()).collect();
    Ok(MetricsReport {
        warmup_s: warmup,
        rms_window_s: window,
        samples: rows.len(),
        attitude_l2_deg: mean(att.iter().copied()),
        position_l2_cm: mean(rows.iter().map(|r| 100.0 * norm(r.position_error()))),
        velocity_l2_cm_s: mean(rows.iter().map(|r| 100.0 * norm(r.velocity_error()))),
        std_roll_deg: std_dev(&roll),
        std_pitch_deg: std_dev(&pitch),
        moving_rms_deg: moving_rms(&att, window_samples(trace, window)),
        ..MetricsReport::default()
    })
}

/// Attitude RMSE in degrees for each complete period `[kP, (k+1)P)`,
/// excluding samples before `warmup`.
pub fn lap_rmse(trace: &[TraceRow], period: f64, warmup: f64) -> Vec<f64> {
    let Some(last) = trace.last() else {
        return Vec::new();
    };
    let half_step = match trace {
        [a, b, ..] => 0.5 * (b.t - a.t),
        _ => 0.0,
    };
    let mut out = Vec::new();
    let mut k = 0usize;
    loop {
        let (lo, hi) = (k as f64 * period, (k + 1) as f64 * period);
        if last.t + half_step < hi - half_step {
            break;
        }
        let sq: Vec<f64> = trace
            .iter()
            .filter(|r| r.t >= lo.max(warmup) && r.t < hi)
            .map(|r| attitude_error_deg(r).powi(2))
            .collect();
        if !sq.is_empty() {
            out.push(mean(sq.into_iter()).sqrt());
        }
        k += 1;
    }
    out
}

/// One point of the moving-RMS plot: window end time, RMS, and the RMS
/// plus/minus the standard deviation of the error norm in the window.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlotRow {
    pub t: f64,
    pub moving_rms_deg: f64,
    pub band_low_deg: f64,
    pub band_high_deg: f64,
}

pub fn plot_rows(trace: &[TraceRow], warmup: f64, window: f64) -> Vec<PlotRow> {
    let rows = post_warmup(trace, warmup);
    let w = window_samples(trace, window);
    if rows.len() < w {
        return Vec::new();
    }
    let att: Vec<f64> = rows.iter().map(attitude_error_deg).collect();
    let rms = moving_rms(&att, w);
    att.windows(w)
        .zip(rms)
        .enumerate()
        .map(|(k, (win, m))| {
            let s = std_dev(win);
            PlotRow {
                t: rows[k + w - 1].t,
                moving_rms_deg: m,
                band_low_deg: (m - s).max(0.0),
                band_high_deg: m + s,
            }
        })
        .collect()
}

pub fn write_plot<W: std::io::Write>(rows: &[PlotRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}
