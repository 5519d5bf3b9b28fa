use crate::rational::Rational;

/// Crate-wide error type. Negative verdicts that carry mathematical content
/// (`NotIntegrable`) are ordinary values of this enum so that batch drivers
/// can report them without unwinding.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("ground set must have at least one atom")]
    EmptyGround,
    #[error("duplicate atom label `{0}`")]
    DuplicateAtom(String),
    #[error("unknown atom label `{0}`")]
    UnknownAtom(String),
    #[error("ground sets do not match")]
    GroundMismatch,
    #[error("ground sets of more than {max} atoms are not supported here (got {got})")]
    GroundTooLarge { max: usize, got: usize },
    #[error("family is not a ring of sets: {0}")]
    NotARing(String),
    #[error("set is not a member of the ring")]
    NotInRing,
    #[error("set function is not additive: {0}")]
    NotAdditive(String),
    #[error("set function takes a negative value")]
    NegativeValue,
    #[error("quantity is not measurable for this structure")]
    NotMeasurable,
    #[error("quantity has a negative value where a nonnegative one is required")]
    NegativeQuantity,
    #[error("not integrable: lower and upper layer integrals differ ({0})")]
    NotIntegrable(Box<LayerGap>),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("set function is not a probability")]
    NotAProbability,
    #[error("function is not convex: {0}")]
    NotConvex(String),
    #[error("function attains no minimum on the represented range")]
    NoMinimizer,
    #[error("thresholds do not bracket all breakpoints")]
    UnbracketedBreakpoints,
    #[error("threshold grid must contain the minimizer")]
    MissingMinimizerThreshold,
    #[error("argument must lie strictly inside (0, 1)")]
    OutsideUnitInterval,
    #[error("law is supported outside the enumeration")]
    UnenumeratedSupport,
    #[error("law masses must be positive and sum to one")]
    NotALaw,
}

/// The two tails of a failed integrability check, `lower < upper`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LayerGap {
    pub lower: Rational,
    /// `None` encodes an infinite upper layer integral.
    pub upper: Option<Rational>,
}

impl std::fmt::Display for LayerGap {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &self.upper {
            Some(u) => write!(f, "lower = {}, upper = {}", self.lower, u),
            None => write!(f, "lower = {}, upper = inf", self.lower),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
