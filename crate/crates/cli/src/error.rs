use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),

    #[error(transparent)]
    Core(#[from] phibnorm::Error),
}

impl CliError {
    /// 2 for anything the user must fix before a run can start.
    pub fn exit_code(&self) -> i32 {
        2
    }
}
