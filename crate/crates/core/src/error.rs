use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Shapes, gains or scenario fields are inconsistent.
    #[error("configuration error: {0}")]
    Config(String),

    /// A caller supplied a non-finite or out-of-domain value.
    #[error("input error: {0}")]
    Input(String),

    /// Inner-layer training produced a non-finite loss or gradient. The
    /// training pass was discarded and the previous weights kept.
    #[error("training error in pass {pass}, minibatch {batch}: {reason}")]
    Training {
        pass: u64,
        batch: usize,
        reason: String,
    },

    /// An augmentation controller produced a non-finite output or update.
    #[error("controller fault: {0}")]
    ControllerFault(String),

    /// The simulated vehicle left the valid flight envelope.
    #[error("crash at t = {time:.3} s: {reason}")]
    Crash { time: f64, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    /// A crash whose time is filled in by the caller via
    /// [`at_time`](Self::at_time).
    pub(crate) fn crash(reason: impl Into<String>) -> Self {
        Error::Crash {
            time: f64::NAN,
            reason: reason.into(),
        }
    }

    /// Stamps the simulation time onto a crash; other errors pass through.
    pub fn at_time(self, t: f64) -> Self {
        match self {
            Error::Crash { reason, .. } => Error::Crash { time: t, reason },
            other => other,
        }
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Crash { .. } => 2,
            Error::Config(_) | Error::Json(_) => 3,
            _ => 1,
        }
    }
}
