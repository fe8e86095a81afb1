use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("capacity exceeded: n = {n} is above the limit of {cap} for {what}")]
    Capacity { n: usize, cap: usize, what: &'static str },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("no revival detected for n = {n}")]
    NoRevival { n: usize },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
