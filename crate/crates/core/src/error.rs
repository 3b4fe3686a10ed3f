use alloc::string::String;

use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{0} are not nearest neighbours")]
    NotAdjacent(String),
    #[error("empty vertex set")]
    EmptySet,
    #[error("not a path: {0}")]
    InvalidPath(String),
    #[error("edge {0} lies outside the environment window")]
    OutOfWindow(String),
    #[error("vertex {0} lies outside the region")]
    OutsideRegion(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("no infinite-cluster proxy in the window")]
    RegularizationUnavailable,
    #[error("target {0} is unreachable")]
    NoPath(String),
    #[error("window too small: radius {required} required, {actual} available")]
    WindowTooSmall { required: u32, actual: u32 },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("enumeration guard exceeded: {0}")]
    GuardExceeded(String),
    #[error("no q-open connector between the crossings of the annulus of radius {0}")]
    BypassInfeasible(u32),
}
