use std::path::PathBuf;

use thiserror::Error;

use crate::augment::AugmentError;
use crate::cipher::CipherError;
use crate::corpus_store::LoadError;
use crate::eval::EvalError;
use crate::llm::BackendError;
use crate::morphology::MorphError;
use crate::prompt::PromptError;
use crate::retrieval::RetrievalError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Load(#[from] LoadError),
    #[error(transparent)]
    Morph(#[from] MorphError),
    #[error(transparent)]
    Retrieval(#[from] RetrievalError),
    #[error(transparent)]
    Prompt(#[from] PromptError),
    #[error(transparent)]
    Cipher(#[from] CipherError),
    #[error(transparent)]
    Backend(#[from] BackendError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Augment(#[from] AugmentError),
    #[error("stage {stage}: {message}")]
    Stage { stage: String, message: String },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code: 2 for backend failures, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Backend(_) => 2,
            Error::Augment(AugmentError::Backend { .. }) => 2,
            _ => 1,
        }
    }
}
