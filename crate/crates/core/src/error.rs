use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// Schema or corpus content violates an invariant.
    #[error("validation error: {0}")]
    Validation(String),
    /// Caller broke an operation's precondition.
    #[error("usage error: {0}")]
    Usage(String),
    /// Annotations disagree with the text they point into.
    #[error("data error: {0}")]
    Data(String),
    #[error("unsupported value: {0}")]
    Unsupported(String),
    /// Shapes or layouts of models and inputs do not line up.
    #[error("compatibility error: {0}")]
    Compatibility(String),
    #[error("training error: {0}")]
    Training(String),
    /// Encoder returned unusable output.
    #[error("encoder error: {0}")]
    Encoder(String),
    /// Encoder backend unreachable, closed or timed out.
    #[error("transport error: {0}")]
    Transport(String),
    /// Encoder backend answered with a malformed or mismatched message.
    #[error("protocol error: {0}")]
    Protocol(String),
    #[error("expansion cache miss: provider `{provider}` has no entry for `{term}`")]
    CacheMiss { provider: String, term: String },
    #[error("alignment error: {0}")]
    Alignment(String),
    #[error("{context}: {source}")]
    Context {
        context: String,
        #[source]
        source: alloc::boxed::Box<Error>,
    },
}

impl Error {
    pub fn context(self, context: impl Into<String>) -> Self {
        Error::Context {
            context: context.into(),
            source: alloc::boxed::Box::new(self),
        }
    }
}

macro_rules! bail {
    ($kind:ident, $($arg:tt)*) => {
        return Err($crate::Error::$kind(alloc::format!($($arg)*)))
    };
}
pub(crate) use bail;
