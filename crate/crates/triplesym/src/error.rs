use thiserror::Error;

/// Errors surfaced by the library.
///
/// The CLI maps these onto exit codes: configuration/input problems → 2,
/// numerical failures (stiffness, overflow, root tracking) → 3. Certification
/// *failures* are not errors; they are carried inside reports.
#[derive(Debug, Error)]
pub enum Error {
    #[error("input error: {0}")]
    Input(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("construction error: {0}")]
    Construction(String),

    #[error("analysis error: {0}")]
    Analysis(String),

    #[error("quality error: {0}")]
    Quality(String),

    #[error("stiffness error: {0}")]
    Stiffness(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Exit code the CLI uses for this error class.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Input(_) | Error::Config(_) | Error::Construction(_) => 2,
            Error::Analysis(_) | Error::Quality(_) => 1,
            Error::Stiffness(_) | Error::Numerical(_) | Error::Io(_) => 3,
        }
    }
}
