use core::fmt;

pub type Result<T> = core::result::Result<T, CoreError>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CoreError {
    /// An enumeration would produce more than the allowed number of items.
    SizeGuardExceeded { count: u128, limit: u64 },
    /// A collision map or matrix violates `1 <= mu[l] <= k+l-1`, or has the wrong length.
    InvalidMap(&'static str),
    /// A permutation is not a bijection on `{1,…,n}`.
    InvalidPermutation,
    /// `acceptable_move` was asked for a column where `μ(k+j+1) < μ(k+j)` fails.
    MoveNotApplicable { column: usize },
    /// The symbolic expansion exceeds the depth cap.
    DepthCapExceeded { n: usize, cap: usize },
    /// No case of the bound scheduler applies to a term.
    SchedulerStuck(&'static str),
    /// Factor bounds passed to `combine_factors` do not describe one forest.
    InconsistentForest(&'static str),
}

impl fmt::Display for CoreError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoreError::SizeGuardExceeded { count, limit } => {
                write!(f, "size guard exceeded: {count} items (limit {limit})")
            }
            CoreError::InvalidMap(why) => write!(f, "invalid collision map: {why}"),
            CoreError::InvalidPermutation => write!(f, "not a permutation"),
            CoreError::MoveNotApplicable { column } => {
                write!(f, "acceptable move not applicable at column {column}")
            }
            CoreError::DepthCapExceeded { n, cap } => {
                write!(f, "expansion depth {n} exceeds the cap of {cap}")
            }
            CoreError::SchedulerStuck(why) => write!(f, "bound scheduler stuck: {why}"),
            CoreError::InconsistentForest(why) => write!(f, "inconsistent forest: {why}"),
        }
    }
}

impl core::error::Error for CoreError {}
