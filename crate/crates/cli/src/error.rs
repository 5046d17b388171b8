use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(String),
    #[error(transparent)]
    Lib(#[from] symlab::Error),
}

impl CliError {
    /// 1 for a rejected oracle, 3 for numerical trouble, 2 for everything
    /// the caller got wrong.
    pub fn exit_code(&self) -> i32 {
        use symlab::Error as E;
        match self {
            CliError::Lib(E::OracleNotInClass { .. }) => 1,
            CliError::Lib(E::NumericalFailure(_) | E::NonSeparableSpectrum { .. } | E::FunctionUndefinedOnSpectrum(_)) => 3,
            _ => 2,
        }
    }
}
