use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("polygon needs at least 3 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("vertex {0} is repeated")]
    RepeatedVertex(usize),
    #[error("vertices {0}, {1}, {2} are collinear")]
    DegenerateCollinear(usize, usize, usize),
    #[error("polygon is not convex at vertex {0}")]
    NotConvex(usize),
    #[error("parameter out of range: {0}")]
    ParameterOutOfRange(String),
    #[error("two-symbol fixed point needs distinct vertices, got {0} twice")]
    SameVertex(usize),
    #[error("subdivision exceeds the cell cap of {cap} at depth {depth}")]
    DepthTooLarge { depth: usize, cap: usize },
    #[error("the image of cell {cell} is not strictly inside a single cell at depth {depth}")]
    NotStrictlyInside { cell: usize, depth: usize },
    #[error("attractor list is empty")]
    EmptyAttractorList,
    #[error("polynomial degree {degree} is below the required order {order}")]
    DegreeBelowD { degree: usize, order: usize },
    #[error("no admissible order found below the search cap {0}")]
    NotFoundWithinCap(usize),
    #[error("no coefficient up to index {0} reaches the threshold")]
    AllLeadingCoefficientsBelowThreshold(usize),
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Variant name, for machine-matchable messages.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::TooFewVertices(_) => "TooFewVertices",
            Error::RepeatedVertex(_) => "RepeatedVertex",
            Error::DegenerateCollinear(..) => "DegenerateCollinear",
            Error::NotConvex(_) => "NotConvex",
            Error::ParameterOutOfRange(_) => "ParameterOutOfRange",
            Error::SameVertex(_) => "SameVertex",
            Error::DepthTooLarge { .. } => "DepthTooLarge",
            Error::NotStrictlyInside { .. } => "NotStrictlyInside",
            Error::EmptyAttractorList => "EmptyAttractorList",
            Error::DegreeBelowD { .. } => "DegreeBelowD",
            Error::NotFoundWithinCap(_) => "NotFoundWithinCap",
            Error::AllLeadingCoefficientsBelowThreshold(_) => "AllLeadingCoefficientsBelowThreshold",
            Error::Parse { .. } => "Parse",
            Error::Io(_) => "Io",
        }
    }

    pub fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
