use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::Result;

/// One control step. Angles in rad, positions in m, torques in N·m.
/// Errors are `x − x_d`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub vx: f64,
    pub vy: f64,
    pub vz: f64,
    pub roll: f64,
    pub pitch: f64,
    pub yaw: f64,
    pub p: f64,
    pub q: f64,
    pub r: f64,
    pub x_ref: f64,
    pub y_ref: f64,
    pub z_ref: f64,
    pub vx_ref: f64,
    pub vy_ref: f64,
    pub vz_ref: f64,
    pub roll_ref: f64,
    pub pitch_ref: f64,
    pub roll_ref_rate: f64,
    pub pitch_ref_rate: f64,
    pub roll_err: f64,
    pub pitch_err: f64,
    pub base_roll: f64,
    pub base_pitch: f64,
    pub added_roll: f64,
    pub added_pitch: f64,
    pub total_roll: f64,
    pub total_pitch: f64,
    pub yaw_torque: f64,
    pub thrust: f64,
    pub fhat_roll: f64,
    pub fhat_pitch: f64,
    pub w_norm: f64,
    pub buffer_len: u32,
    pub trained: bool,
    pub fault: bool,
}

impl TraceRow {
    pub fn position_error(&self) -> [f64; 3] {
        [self.x - self.x_ref, self.y - self.y_ref, self.z - self.z_ref]
    }

    pub fn velocity_error(&self) -> [f64; 3] {
        [self.vx - self.vx_ref, self.vy - self.vy_ref, self.vz - self.vz_ref]
    }

    pub fn is_finite(&self) -> bool {
        [
            self.t, self.x, self.y, self.z, self.vx, self.vy, self.vz, self.roll, self.pitch, self.yaw, self.p,
            self.q, self.r, self.x_ref, self.y_ref, self.z_ref, self.vx_ref, self.vy_ref, self.vz_ref,
            self.roll_ref, self.pitch_ref, self.roll_ref_rate, self.pitch_ref_rate, self.roll_err,
            self.pitch_err, self.base_roll, self.base_pitch, self.added_roll, self.added_pitch,
            self.total_roll, self.total_pitch, self.yaw_torque, self.thrust, self.fhat_roll,
            self.fhat_pitch, self.w_norm,
        ]
        .iter()
        .all(|v| v.is_finite())
    }
}

/// Writes a header row followed by one row per control step.
pub fn write_trace<W: Write>(rows: &[TraceRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_trace<R: Read>(input: R) -> Result<Vec<TraceRow>> {
    let mut r = csv::Reader::from_reader(input);
    let mut rows = Vec::new();
    for row in r.deserialize() {
        rows.push(row?);
    }
    Ok(rows)
}

pub fn write_trace_file(rows: &[TraceRow], path: impl AsRef<Path>) -> Result<()> {
    write_trace(rows, std::io::BufWriter::new(File::create(path)?))
}

pub fn read_trace_file(path: impl AsRef<Path>) -> Result<Vec<TraceRow>> {
    read_trace(std::io::BufReader::new(File::open(path)?))
}
