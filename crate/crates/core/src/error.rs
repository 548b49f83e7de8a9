use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("valuation of zero is not defined for {0}")]
    ZeroArgument(&'static str),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("resource limit exceeded: {what} = {value} (limit {limit})")]
    ResourceLimit {
        what: &'static str,
        value: u64,
        limit: u64,
    },
}
