use std::fmt;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Error taxonomy shared by the library and the CLI.
///
/// The variants map onto the CLI exit codes: usage problems surface as
/// `InvalidArgument` (exit 1 when raised during flag validation, exit 2
/// afterwards), numerical preconditions as `Domain`, size guards as
/// `Resource`, and file-system / format problems as `Io` / `Parse`
/// (exit 3).
#[derive(Debug)]
pub enum Error {
    /// A caller-supplied value violates a documented precondition.
    InvalidArgument(String),
    /// The input is structurally valid but lies outside the mathematical
    /// domain of the operation (e.g. asking for frame bounds of a
    /// non-frame).
    Domain(String),
    /// A size guard was exceeded; the message names the limit and a
    /// cheaper alternative where one exists.
    Resource(String),
    /// An underlying file-system operation failed.
    Io {
        context: String,
        source: std::io::Error,
    },
    /// A document could not be decoded; the message names the offending
    /// field or byte range.
    Parse(String),
}

impl Error {
    /// Shorthand used throughout the crate.
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn resource(msg: impl Into<String>) -> Self {
        Error::Resource(msg.into())
    }

    pub fn parse(msg: impl Into<String>) -> Self {
        Error::Parse(msg.into())
    }

    pub fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            context: context.into(),
            source,
        }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::Resource(msg) => write!(f, "resource limit: {msg}"),
            Error::Io { context, source } => write!(f, "i/o error: {context}: {source}"),
            Error::Parse(msg) => write!(f, "parse error: {msg}"),
        }
    }
}

impl std::error::Error for Error {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            Error::Io { source, .. } => Some(source),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_includes_category_and_message() {
        let e = Error::invalid("hop must divide N");
        assert_eq!(e.to_string(), "invalid argument: hop must divide N");
        let e = Error::domain("filterbank does not cover the spectrum");
        assert!(e.to_string().starts_with("domain error:"));
    }

    #[test]
    fn io_error_chains_source() {
        use std::error::Error as _;
        let inner = std::io::Error::new(std::io::ErrorKind::NotFound, "missing");
        let e = Error::io("reading fb.json", inner);
        assert!(e.source().is_some());
        assert!(e.to_string().contains("fb.json"));
    }
}
