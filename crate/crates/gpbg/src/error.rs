use gpbg_core::CoreError;

pub type Result<T> = std::result::Result<T, GpbgError>;

#[derive(Debug, thiserror::Error)]
pub enum GpbgError {
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("tensor of {entries} entries exceeds the memory guard of {limit}")]
    MemoryGuardExceeded { entries: u128, limit: u64 },
    #[error("expansion has {terms} terms, cap is {cap}")]
    TermCapExceeded { terms: u128, cap: u64 },
    #[error("dispersed support reaches {reach:.3}, beyond half the box {half_box:.3}")]
    WraparoundRisk { reach: f64, half_box: f64 },
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("malformed file: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl GpbgError {
    /// Size and safety guards, as opposed to bad input or failed checks.
    pub fn is_guard(&self) -> bool {
        matches!(
            self,
            GpbgError::MemoryGuardExceeded { .. }
                | GpbgError::TermCapExceeded { .. }
                | GpbgError::WraparoundRisk { .. }
                | GpbgError::Core(CoreError::SizeGuardExceeded { .. })
                | GpbgError::Core(CoreError::DepthCapExceeded { .. })
        )
    }
}
