use std::path::PathBuf;

/// Errors raised anywhere in the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("cannot parse group spec `{spec}`: {reason}")]
    GroupSpec { spec: String, reason: String },

    #[error("Cayley table violates the group axioms: {reason}")]
    GroupAxiom {
        reason: String,
        /// Failing triple `(a, b, c)` with `(ab)c != a(bc)`, when the failure is associativity.
        triple: Option<(usize, usize, usize)>,
    },

    #[error("group of order {order} exceeds the cap of {cap}")]
    GroupTooLarge { order: usize, cap: usize },

    #[error("unknown group element `{0}`")]
    UnknownElement(String),

    #[error("generating sequence: {0}")]
    Generators(String),

    #[error("order relation has a cycle through points {witness:?}")]
    Cycle { witness: Vec<usize> },

    #[error("point index {index} out of range for a poset of {size} points")]
    UnknownPoint { index: usize, size: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("graph: {0}")]
    Graph(String),

    #[error("poset of {size} points exceeds the cap of {cap}")]
    CapExceeded { size: usize, cap: usize },

    #[error("automorphism search exceeded the {seconds:.1}s time limit")]
    Timeout { seconds: f64 },

    #[error("malformed action: {0}")]
    MalformedAction(String),

    #[error("construction `{method}`: {reason}")]
    Construction {
        method: &'static str,
        reason: String,
    },

    #[error("search: {0}")]
    Search(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{context}: {source}")]
    Json {
        context: String,
        #[source]
        source: serde_json::Error,
    },
}

impl Error {
    /// Short machine-readable tag for error reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::GroupSpec { .. } => "group-spec",
            Error::GroupAxiom { .. } => "group-axiom",
            Error::GroupTooLarge { .. } => "group-too-large",
            Error::UnknownElement(_) => "unknown-element",
            Error::Generators(_) => "generators",
            Error::Cycle { .. } => "cycle",
            Error::UnknownPoint { .. } => "unknown-point",
            Error::Precondition(_) => "precondition",
            Error::Graph(_) => "graph",
            Error::CapExceeded { .. } => "cap-exceeded",
            Error::Timeout { .. } => "timeout",
            Error::MalformedAction(_) => "malformed-action",
            Error::Construction { .. } => "construction",
            Error::Search(_) => "search",
            Error::Io { .. } => "io",
            Error::Json { .. } => "json",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
