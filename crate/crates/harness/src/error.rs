use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Core(#[from] oneshot_core::Error),

    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },

    #[error("invalid experiment: {0}")]
    Experiment(String),

    #[error("cell {cell}: {source}")]
    Cell {
        cell: String,
        #[source]
        source: oneshot_core::Error,
    },

    #[error("worker pool: {0}")]
    Pool(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, HarnessError>;
