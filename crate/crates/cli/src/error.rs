use ghost_opa_core::Error as CoreError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{0} check(s) failed")]
    CheckFailed(usize),
}

impl CliError {
    /// 2 usage or configuration, 3 numerical tolerance, 4 resource bound.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io { .. } => 2,
            CliError::Core(CoreError::Domain { .. } | CoreError::Contract(_)) => 2,
            CliError::Core(CoreError::Numerical { .. }) | CliError::CheckFailed(_) => 3,
            CliError::Core(CoreError::Resource(_)) => 4,
        }
    }
}
