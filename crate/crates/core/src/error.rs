// Licensed under the Apache License, Version 2.0 (the "License"); you may
// not use this file except in compliance with the License. You may obtain
// a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
// License for the specific language governing permissions and limitations
// under the License.

use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("self-loop on vertex {0}")]
    SelfLoop(usize),
    #[error("unknown vertex {0}")]
    UnknownVertex(usize),
    #[error("edge weight must be at least 1")]
    ZeroWeight,
    #[error("attribute {0:?} is not in the catalog")]
    UnknownAttribute(String),
    #[error("attribute {label:?} is cataloged as {expected} but used as {found}")]
    KindMismatch {
        label: String,
        expected: &'static str,
        found: &'static str,
    },
    #[error("duplicate catalog label {0:?}")]
    DuplicateCatalogLabel(String),
    #[error("empty input")]
    EmptyInput,
    #[error("EmptyGraph: total edge weight is zero, modularity is undefined")]
    EmptyGraph,
    #[error("partition covers {assigned} vertices but the graph has {expected}")]
    IncompletePartition { assigned: usize, expected: usize },
    #[error("unknown community {0}")]
    UnknownCommunity(usize),
    #[error("cannot merge community {0} with itself")]
    SameCommunity(usize),
    #[error("graph has {n} vertices, exhaustive search is limited to {max}")]
    TooLarge { n: usize, max: usize },
    #[error("bad configuration: {0}")]
    BadConfig(String),
    #[error("attribute {0:?} has no community assignment")]
    MissingAttribute(String),
    #[error("partition contains no attribute vertices")]
    EmptyPartition,
    #[error("{}:{line}: {message}", path.display())]
    Parse {
        path: PathBuf,
        line: u64,
        message: String,
    },
    #[error("dataset {name:?}: {inner}")]
    Dataset { name: String, inner: Box<Error> },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn parse(path: impl Into<PathBuf>, line: u64, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            message: message.into(),
        }
    }

    pub(crate) fn in_dataset(self, name: &str) -> Self {
        Error::Dataset {
            name: name.to_owned(),
            inner: Box::new(self),
        }
    }

    /// The innermost error, looking through dataset context.
    pub fn root(&self) -> &Error {
        match self {
            Error::Dataset { inner, .. } => inner.root(),
            other => other,
        }
    }
}
