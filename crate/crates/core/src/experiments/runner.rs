use log::{debug, info, warn};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::config::{ControllerKind, ScenarioConfig};
use super::metrics::{compute_metrics, lap_rmse, Failure, MetricsReport};
use super::trace::TraceRow;
use crate::baselines::{DmracState, MracState, PidState};
use crate::disturbances::{compose, DisturbanceSet, FORCE_BOUND, TORQUE_BOUND};
use crate::dnac::{DnacCheckpoint, DnacState, ReplaySample, TrainingStats};
use crate::error::{Error, Result};
use crate::plant::{augment_and_apply, euler_rates, norm3, rk4_step, CascadeState, RigidBodyState};

/// The adaptive controller in the added-torque slot.
#[derive(Clone, Debug)]
pub enum Augmentation {
    None,
    Mrac(MracState<f64>),
    Dmrac(DmracState<f64>),
    Dnac(DnacState<f64>),
}

/// Added torque for one control step plus what goes into the trace.
struct AddedTorque {
    torque: [f64; 2],
    estimate: [f64; 2],
}

impl Augmentation {
    pub fn new(config: &ScenarioConfig) -> Result<Self> {
        Ok(match config.controller {
            ControllerKind::Pid => Augmentation::None,
            ControllerKind::PidMrac => Augmentation::Mrac(MracState::new(&config.mrac)?),
            ControllerKind::PidDmrac => Augmentation::Dmrac(DmracState::new(&config.dmrac, config.seed)?),
            ControllerKind::PidDnac => Augmentation::Dnac(DnacState::new(config.dnac.clone(), config.seed)?),
        })
    }

    fn reset_reference(&mut self, x0: &[f64]) -> Result<()> {
        match self {
            Augmentation::Mrac(m) => m.reset_reference(x0),
            Augmentation::Dmrac(d) => d.reset_reference(x0),
            _ => Ok(()),
        }
    }

    pub fn weight_norm(&self) -> f64 {
        match self {
            Augmentation::None => 0.0,
            Augmentation::Mrac(m) => m.weight_norm(),
            Augmentation::Dmrac(d) => d.weight_norm(),
            Augmentation::Dnac(d) => d.outer_norm(),
        }
    }

    pub fn training_stats(&self) -> TrainingStats {
        match self {
            Augmentation::Dmrac(d) => d.stats().clone(),
            Augmentation::Dnac(d) => d.stats().clone(),
            _ => TrainingStats::default(),
        }
    }

    fn buffer_len(&self) -> usize {
        match self {
            Augmentation::Dmrac(d) => d.estimator().buffer().len(),
            Augmentation::Dnac(d) => d.buffer().len(),
            _ => 0,
        }
    }

    /// Command plus the adaptive update that uses the tracking error.
    fn command(&mut self, x: &[f64; 2], x_d: &[f64; 2], x_d_rate: &[f64; 2], dt: f64) -> Result<AddedTorque> {
        let pair = |v: &[f64]| [v[0], v[1]];
        match self {
            Augmentation::None => Ok(AddedTorque {
                torque: [0.0; 2],
                estimate: [0.0; 2],
            }),
            Augmentation::Mrac(m) => {
                let out = m.step(x, x_d, dt)?;
                Ok(AddedTorque {
                    torque: pair(&out.torque),
                    estimate: pair(&out.estimate),
                })
            }
            Augmentation::Dmrac(d) => {
                let out = d.step(x, x_d, dt)?;
                Ok(AddedTorque {
                    torque: pair(&out.torque),
                    estimate: pair(&out.estimate),
                })
            }
            Augmentation::Dnac(d) => {
                let e = [x[0] - x_d[0], x[1] - x_d[1]];
                let estimate = d.estimate_uncertainty(x)?;
                let u = d.compute_control(&e, x_d_rate, x)?;
                d.update_outer_weights(&e, x, dt)?;
                Ok(AddedTorque {
                    torque: pair(&u),
                    estimate: pair(&estimate),
                })
            }
        }
    }

    /// Stores `(ẋ, x, ĝ·total)`; runs a training pass when the buffer fills.
    /// Returns whether a pass ran.
    fn learn(&mut self, x_dot: &[f64; 2], x: &[f64; 2], total: &[f64; 2]) -> Result<bool> {
        let due = match self {
            Augmentation::Dmrac(d) => {
                let s = ReplaySample::new(x_dot.to_vec(), x.to_vec(), scale(total, d.law().g_hat()));
                d.record_sample(s)?
            }
            Augmentation::Dnac(d) => {
                let s = ReplaySample::new(x_dot.to_vec(), x.to_vec(), scale(total, d.g_hat()));
                d.record_sample(s)?
            }
            _ => return Ok(false),
        };
        if !due {
            return Ok(false);
        }
        let result = match self {
            Augmentation::Dmrac(d) => d.train_inner(),
            Augmentation::Dnac(d) => d.train_inner(),
            _ => unreachable!(),
        };
        match result {
            Ok(losses) => debug!("training pass done, epoch losses {losses:?}"),
            Err(e) => warn!("{e}; inner weights kept"),
        }
        Ok(true)
    }

    pub fn dnac_checkpoint(&self) -> Option<DnacCheckpoint<f64>> {
        match self {
            Augmentation::Dnac(d) => Some(d.checkpoint()),
            _ => None,
        }
    }
}

fn scale(u: &[f64; 2], g: &[f64]) -> Vec<f64> {
    vec![u[0] * g[0], u[1] * g[1]]
}

/// Everything a run produces.
#[derive(Clone, Debug)]
pub struct RunOutput {
    pub trace: Vec<TraceRow>,
    pub report: MetricsReport,
    pub augmentation: Augmentation,
    pub final_state: RigidBodyState<f64>,
}

impl RunOutput {
    pub fn dnac_checkpoint(&self) -> Option<DnacCheckpoint<f64>> {
        self.augmentation.dnac_checkpoint()
    }
}

/// Simulates one scenario. A crash ends the run early and is reported in
/// `report.failure`; only configuration problems are returned as errors.
pub fn run_scenario(config: &ScenarioConfig) -> Result<RunOutput> {
    config.validate()?;
    let dt_c = config.control_dt;
    let substeps = config.substeps();
    let dt_p = dt_c / substeps as f64;
    let steps = config.control_steps();
    let params = &config.plant;

    let (p0, v0) = config.trajectory.position_ref(0.0_f64);
    let mut state = RigidBodyState::at_rest(p0);
    state.velocity = v0;

    let mut cascade = CascadeState::<f64>::new(&config.cascade, params)?;
    let mut pid = PidState::<f64>::new(&config.pid)?;
    let mut aug = Augmentation::new(config)?;
    aug.reset_reference(&state.roll_pitch())?;
    let mut disturbances = DisturbanceSet::new(&config.disturbances, config.seed)?;
    let mut noise = SensorNoise::new(config);

    let mut trace = Vec::with_capacity(steps);
    let mut failure = None;
    let mut faults = 0u64;
    let mut severed_at = None;
    let mut max_w: f64 = 0.0;
    let mut max_force: f64 = 0.0;
    let mut max_torque: f64 = 0.0;
    let mut steps_done = 0u64;

    info!(
        "running {} ({}) seed {} for {} s",
        if config.name.is_empty() { "scenario" } else { &config.name },
        config.controller,
        config.seed,
        config.duration
    );

    'outer: for k in 0..steps {
        let t = k as f64 * dt_c;
        let meas = noise.measure(&state);
        let x = meas.roll_pitch();
        let rates = euler_rates(&meas.attitude, &meas.body_rates);
        let x_dot = [rates[0], rates[1]];

        let (p_ref, v_ref) = config.trajectory.position_ref(t);
        let out = cascade.step(&meas, &p_ref, &v_ref, dt_c)?;
        let x_d = out.attitude_ref;
        let x_d_rate = out.attitude_ref_rate;

        let base = pid.step(
            &[x_d[0] - x[0], x_d[1] - x[1]],
            &[x_d_rate[0] - x_dot[0], x_d_rate[1] - x_dot[1]],
            dt_c,
        )?;
        let base = [base[0], base[1]];
        let yaw_torque = cascade.yaw_torque(&meas, 0.0, dt_c)?;

        let mut fault = false;
        let mut added = AddedTorque {
            torque: [0.0; 2],
            estimate: [0.0; 2],
        };
        if severed_at.is_none() {
            match aug.command(&x, &x_d, &x_d_rate, dt_c) {
                Ok(a) if a.torque.iter().all(|v| v.is_finite()) => added = a,
                Ok(_) => fault = true,
                Err(e @ (Error::ControllerFault(_) | Error::Input(_))) => {
                    warn!("t = {t:.3} s: {e}; augmentation severed");
                    fault = true;
                }
                Err(e) => return Err(e),
            }
        }
        if fault {
            faults += 1;
            severed_at = Some(t);
            added.torque = [0.0; 2];
        }
        if config.zero_augmentation {
            added.torque = [0.0; 2];
        }

        let (cmd, total) = augment_and_apply(base, added.torque, yaw_torque, out.thrust, params)?;

        let mut trained = false;
        if severed_at.is_none() {
            match aug.learn(&x_dot, &x, &total) {
                Ok(t) => trained = t,
                Err(e) => {
                    warn!("t = {t:.3} s: {e}; augmentation severed");
                    faults += 1;
                    severed_at = Some(t);
                    fault = true;
                }
            }
        }
        let w_norm = aug.weight_norm();
        max_w = max_w.max(w_norm);

        let row = TraceRow {
            t,
            x: state.position[0],
            y: state.position[1],
            z: state.position[2],
            vx: state.velocity[0],
            vy: state.velocity[1],
            vz: state.velocity[2],
            roll: state.attitude[0],
            pitch: state.attitude[1],
            yaw: state.attitude[2],
            p: state.body_rates[0],
            q: state.body_rates[1],
            r: state.body_rates[2],
            x_ref: p_ref[0],
            y_ref: p_ref[1],
            z_ref: p_ref[2],
            vx_ref: v_ref[0],
            vy_ref: v_ref[1],
            vz_ref: v_ref[2],
            roll_ref: x_d[0],
            pitch_ref: x_d[1],
            roll_ref_rate: x_d_rate[0],
            pitch_ref_rate: x_d_rate[1],
            roll_err: state.attitude[0] - x_d[0],
            pitch_err: state.attitude[1] - x_d[1],
            base_roll: base[0],
            base_pitch: base[1],
            added_roll: added.torque[0],
            added_pitch: added.torque[1],
            total_roll: total[0],
            total_pitch: total[1],
            yaw_torque: cmd.torque[2],
            thrust: cmd.thrust,
            fhat_roll: added.estimate[0],
            fhat_pitch: added.estimate[1],
            w_norm,
            buffer_len: aug.buffer_len() as u32,
            trained,
            fault,
        };
        if !row.is_finite() {
            failure = Some(Failure {
                time: t,
                reason: "non-finite value in trace".into(),
            });
            break;
        }
        trace.push(row);
        steps_done += 1;

        for j in 0..substeps {
            let ts = t + j as f64 * dt_p;
            let parts = disturbances.wrenches(&state, ts, dt_p);
            for w in &parts {
                let (f, tq) = (norm3(&w.force), norm3(&w.torque));
                if (f > FORCE_BOUND || tq > TORQUE_BOUND) && max_force <= FORCE_BOUND && max_torque <= TORQUE_BOUND {
                    warn!("disturbance wrench out of bounds at t = {ts:.3} s: |f| = {f:.3} N, |tau| = {tq:.3} N·m");
                }
                max_force = max_force.max(f);
                max_torque = max_torque.max(tq);
            }
            let wrench = compose(&parts);
            match rk4_step(&state, &cmd, &wrench, params, dt_p) {
                Ok(next) => state = next,
                Err(e) => {
                    let e = e.at_time(ts);
                    warn!("{e}");
                    failure = Some(match e {
                        Error::Crash { time, reason } => Failure { time, reason },
                        other => Failure {
                            time: ts,
                            reason: other.to_string(),
                        },
                    });
                    break 'outer;
                }
            }
        }
    }

    let mut report = match compute_metrics(&trace, config.warmup, config.rms_window) {
        Ok(r) => r,
        Err(e) if failure.is_some() => {
            debug!("no metrics for failed run: {e}");
            MetricsReport {
                warmup_s: config.warmup,
                rms_window_s: config.rms_window,
                ..MetricsReport::default()
            }
        }
        Err(e) => return Err(e),
    };
    if let Some(period) = config.trajectory.period() {
        report.lap_rmse_deg = lap_rmse(&trace, period, config.warmup);
    }
    report.scenario = config.name.clone();
    report.controller = config.controller.name().to_string();
    report.seed = config.seed;
    report.failure = failure;
    report.control_steps = steps_done;
    report.training = aug.training_stats();
    report.controller_faults = faults;
    report.severed_at = severed_at;
    report.max_w_norm = max_w;
    report.max_disturbance_force_n = max_force;
    report.max_disturbance_torque_nm = max_torque;
    info!(
        "{} seed {}: attitude L2 {:.3} deg, position L2 {:.2} cm{}",
        report.controller,
        report.seed,
        report.attitude_l2_deg,
        report.position_l2_cm,
        if report.failed() { " (failed)" } else { "" }
    );
    Ok(RunOutput {
        trace,
        report,
        augmentation: aug,
        final_state: state,
    })
}

/// Gaussian attitude and rate noise on the fed-back state.
struct SensorNoise {
    rng: Option<ChaCha8Rng>,
    attitude: Normal<f64>,
    rate: Normal<f64>,
}

impl SensorNoise {
    fn new(config: &ScenarioConfig) -> Self {
        let n = &config.sensor_noise;
        let zero = Normal::new(0.0, 0.0).expect("zero-variance normal");
        let enabled = n.enabled && (n.attitude_std_deg > 0.0 || n.rate_std_deg_s > 0.0);
        Self {
            rng: enabled.then(|| ChaCha8Rng::seed_from_u64(config.seed.wrapping_mul(0x9E37_79B9_7F4A_7C15))),
            attitude: Normal::new(0.0, n.attitude_std_deg.to_radians()).unwrap_or(zero),
            rate: Normal::new(0.0, n.rate_std_deg_s.to_radians()).unwrap_or(zero),
        }
    }

    fn measure(&mut self, truth: &RigidBodyState<f64>) -> RigidBodyState<f64> {
        let Some(rng) = self.rng.as_mut() else {
            return *truth;
        };
        let mut m = *truth;
        for i in 0..3 {
            m.attitude[i] += self.attitude.sample(rng);
            m.body_rates[i] += self.rate.sample(rng);
        }
        m
    }
}
