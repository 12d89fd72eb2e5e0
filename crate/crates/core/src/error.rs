use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("unknown potential `{0}`")]
    UnknownPotential(String),
    #[error("unknown observable `{0}`")]
    UnknownObservable(String),
    #[error("parameter `{name}` out of domain: {reason}")]
    Parameter { name: String, reason: String },
    #[error("non-finite value: {0}")]
    Numeric(String),
    #[error("divergence at step {step}: {context}")]
    Divergence { step: u64, context: String },
    #[error("weight overflow at coarse step {step}: log weight {log_weight}")]
    WeightOverflow { step: u64, log_weight: f64 },
    #[error("regime error: {0}")]
    Regime(String),
    #[error("geometric draw j = {j} exceeds j_cap = {cap}")]
    JCap { j: u32, cap: u32 },
    #[error("rate fit failed: {0}")]
    Fit(String),
    #[error("range error: {0}")]
    Range(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("potential is not isotropic: {0}")]
    Isotropy(String),
    #[error("config error at `{key}`: {reason}")]
    Config { key: String, reason: String },
    #[error("level {level}, draw {index}: {source}")]
    Sample {
        level: usize,
        index: u64,
        #[source]
        source: Box<Error>,
    },
    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    pub fn param(name: &str, reason: impl Into<String>) -> Self {
        Error::Parameter { name: name.to_string(), reason: reason.into() }
    }

    pub fn config(key: &str, reason: impl Into<String>) -> Self {
        Error::Config { key: key.to_string(), reason: reason.into() }
    }

    /// Strips `Sample` context wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::Sample { source, .. } => source.root(),
            e => e,
        }
    }

    /// Process exit code used by the CLI: 2 config, 3 runtime, 4 j_cap.
    pub fn exit_code(&self) -> i32 {
        match self.root() {
            Error::Config { .. }
            | Error::Parameter { .. }
            | Error::UnknownPotential(_)
            | Error::UnknownObservable(_)
            | Error::Regime(_)
            | Error::Isotropy(_)
            | Error::Io(_) => 2,
            Error::JCap { .. } => 4,
            _ => 3,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
