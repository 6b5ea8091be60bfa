use core::fmt;

/// Crate-wide result alias.
pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Which half of the main channel's decomposition vanished.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Component {
    /// `Ψ⊥ hᴴ`: the part of Bob's channel orthogonal to Eve's LOS direction.
    ZeroForcing,
    /// `Ψ hᴴ`: the part of Bob's channel along Eve's LOS direction.
    EveAligned,
}

impl fmt::Display for Component {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Component::ZeroForcing => {
                f.write_str("zero-forcing component (orthogonal to Eve's LOS)")
            }
            Component::EveAligned => f.write_str("Eve-aligned component (along Eve's LOS)"),
        }
    }
}

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {what} (got {value})")]
    Domain {
        /// Description of the violated precondition.
        what: &'static str,
        /// Offending value, or NaN when there is no single scalar to report.
        value: f64,
    },
    /// Bob's channel is numerically parallel or orthogonal to Eve's LOS response.
    #[error("degenerate geometry: the {component} of the main channel has norm {norm:e}, below tolerance {tolerance:e}")]
    DegenerateGeometry {
        /// The vanishing component.
        component: Component,
        /// Its norm.
        norm: f64,
        /// The tolerance it fell under.
        tolerance: f64,
    },
    /// The anchors do not pin down a 2-D location.
    #[error("degenerate anchors: Fisher matrix determinant {determinant:e} is below {threshold:e} ({anchors} anchors)")]
    DegenerateAnchors {
        /// Determinant of the Fisher matrix.
        determinant: f64,
        /// Conditioning threshold it fell under.
        threshold: f64,
        /// Number of anchors in the set.
        anchors: usize,
    },
    /// An iterative routine hit its iteration cap.
    #[error("{routine} did not converge within {iterations} iterations")]
    NonConvergence {
        /// Routine name.
        routine: &'static str,
        /// Iteration cap.
        iterations: usize,
    },
    /// Too many random draws had to be discarded.
    #[error("{skipped} of {total} {what} were discarded, above the allowed fraction {allowed}")]
    TooManyDiscarded {
        /// What was being drawn.
        what: &'static str,
        /// Number discarded.
        skipped: usize,
        /// Number attempted.
        total: usize,
        /// Allowed fraction.
        allowed: f64,
    },
}

impl Error {
    pub(crate) fn domain(what: &'static str, value: f64) -> Self {
        Error::Domain { what, value }
    }
}
