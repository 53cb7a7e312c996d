use thiserror::Error;

/// Errors raised while loading models or constructing automata.
///
/// Negative verification results are never errors; they are reported as
/// [`Verdict`](crate::verify::Verdict)s.
#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),

    #[error("schema error: {0}")]
    Schema(String),

    #[error("automaton `{automaton}` is nondeterministic: state `{state}` has two `{event}` transitions")]
    Determinism {
        automaton: String,
        state: String,
        event: String,
    },

    #[error("unknown {kind} `{name}` referenced in {context}")]
    Reference {
        kind: &'static str,
        name: String,
        context: String,
    },

    #[error("supervisor alphabets {first} and {second} share events other than tick: {shared:?}")]
    Disjointness {
        first: usize,
        second: usize,
        shared: Vec<String>,
    },

    #[error("cannot compose `{left}` and `{right}`: shared events besides tick: {shared:?}")]
    Composition {
        left: String,
        right: String,
        shared: Vec<String>,
    },

    #[error("channel {from}->{to} exceeded its queue cap of {cap} entries after {trace:?}")]
    QueueCap {
        from: usize,
        to: usize,
        cap: usize,
        trace: Vec<String>,
    },

    #[error("state cap of {cap} exceeded while building the {what}")]
    StateCap { what: &'static str, cap: usize },

    #[error("invalid model: {0}")]
    Model(String),
}

impl Error {
    /// Short machine-readable category.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Io(_) => "io",
            Error::Json(_) => "json",
            Error::Schema(_) => "schema",
            Error::Determinism { .. } => "determinism",
            Error::Reference { .. } => "reference",
            Error::Disjointness { .. } => "disjointness",
            Error::Composition { .. } => "composition",
            Error::QueueCap { .. } => "queue-cap",
            Error::StateCap { .. } => "state-cap",
            Error::Model(_) => "model",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
