use std::fmt;

use serde::Serialize;

/// A structural condition that must hold before a result of the theory can be
/// used (Z-structure, nonnegative right-hand side, ...).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Precondition {
    NotZTensor,
    NotPartiallyZTensor,
    NegativeRhs,
    NegativeEntries,
    NoZPermutation,
    PermutedRhsNegative,
    PositivityCertificate,
}

impl fmt::Display for Precondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let msg = match self {
            Precondition::NotZTensor => "tensor is not a Z-tensor (positive off-diagonal entry)",
            Precondition::NotPartiallyZTensor => "tensor is not a partially Z-tensor",
            Precondition::NegativeRhs => "right-hand side has a negative component",
            Precondition::NegativeEntries => "tensor has a negative entry",
            Precondition::NoZPermutation => "no row permutation turns the tensor into a Z-tensor",
            Precondition::PermutedRhsNegative => {
                "permuted right-hand side has a negative component"
            }
            Precondition::PositivityCertificate => "A z^(m-1) > 0 fails for the supplied z",
        };
        f.write_str(msg)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    Domain(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("not applicable: {0}")]
    NotApplicable(Precondition),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("refusing to enumerate supports for n = {n} (limit {limit})")]
    TooLarge { n: usize, limit: usize },
    #[error("instance generation failed: {0}")]
    Generation(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}
