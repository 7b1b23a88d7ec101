use std::time::Duration;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("point {point} is outside the universe 0..{v}")]
    UnknownPoint { point: u32, v: u32 },
    #[error("operation needs strength t = {expected}, design has t = {found}")]
    Strength { expected: u32, found: u32 },
    #[error("invalid design: {0}")]
    InvalidDesign(String),
    #[error("block count for {0} is not an integer")]
    NonIntegral(String),
    #[error("v = {0} is not an admissible order for a Steiner triple system")]
    InadmissibleOrder(u32),
    #[error("not a permutation: {0}")]
    BadPermutation(String),
    #[error("permutation is not an automorphism: {0}")]
    NotAutomorphism(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("certification failed: {0}")]
    Certification(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("unknown dataset `{0}`")]
    UnknownDataset(String),
    #[error("search gave up after {0:?} without a verdict")]
    Timeout(Duration),
    #[error("parallel-class enumeration hit the cap of {0}")]
    CapExceeded(usize),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
