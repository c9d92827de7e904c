use std::path::PathBuf;

/// Operational failures; every variant maps to exit status 1.
#[derive(Debug, thiserror::Error)]
pub enum LabError {
    #[error("cannot read {}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{}: schema violation: {message}", path.display())]
    Schema { path: PathBuf, message: String },
    #[error("{module}: {source}")]
    Core {
        module: &'static str,
        source: threshold_core::Error,
    },
    #[error("{module}: {message}")]
    Validation { module: &'static str, message: String },
    #[error("invalid arguments: {0}")]
    Usage(String),
    #[error("cannot write output: {0}")]
    Output(String),
}

/// Tags core errors with the module that raised them.
pub(crate) trait InModule<T> {
    fn in_module(self, module: &'static str) -> Result<T, LabError>;
}

impl<T> InModule<T> for threshold_core::Result<T> {
    fn in_module(self, module: &'static str) -> Result<T, LabError> {
        self.map_err(|source| LabError::Core { module, source })
    }
}
