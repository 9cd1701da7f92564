use std::fmt;

use thiserror::Error;

/// Which condition of the lowering-order characterization failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LoweringCondition {
    /// Every coefficient polynomial vanishes on the horizon.
    ZeroOperator,
    /// `deg a_nu <= nu - k` is violated at `nu`.
    DegreeBound,
    /// The normalization scalar `lambda_{n+k}` vanishes.
    LambdaVanishes,
    /// The operator carries a relaxed-degree flag (an auxiliary `J^(m)`).
    Relaxed,
}

impl fmt::Display for LoweringCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            LoweringCondition::ZeroOperator => "zero operator",
            LoweringCondition::DegreeBound => "degree bound deg a_nu <= nu - k",
            LoweringCondition::LambdaVanishes => "lambda vanishes",
            LoweringCondition::Relaxed => "relaxed-degree operator",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("scalars live in different quadratic extensions ({0} vs {1})")]
    FieldMismatch(String, String),
    #[error("affine map with zero dilation")]
    DegenerateAffine,
    #[error("coefficient a_{0} has degree above {0}")]
    DegreeViolation(usize),
    #[error("degree {degree} exceeds horizon {horizon}")]
    HorizonExceeded { degree: usize, horizon: usize },
    #[error("image of x^{0} has degree above {0}")]
    NotDegreeNonincreasing(usize),
    #[error("bad parameter: {0}")]
    BadParameter(String),
    #[error("operator is not an isomorphism: lambda_{0} = 0")]
    NotIsomorphism(usize),
    #[error("not a lowering operator: {condition} at index {index}")]
    NotLowering {
        condition: LoweringCondition,
        index: usize,
    },
    #[error("operation needs a canonical (non-relaxed) operator")]
    RelaxedOperator,
    #[error("result would have no valid moments")]
    EmptyResult,
    #[error("not enough structure coefficients for degree {0}")]
    NeedMoreCoeffs(usize),
    #[error("polynomial {0} is not monic of exact degree {0}")]
    NotMonic(usize),
    #[error("invalid structure coefficients: {0}")]
    InvalidStructure(String),
    #[error("no classical solution: {0}")]
    NoClassicalSolution(String),
    #[error("inadmissible Pearson pair: leading solve coefficient vanishes at n = {0}")]
    InadmissiblePair(usize),
    #[error("form is not regular: <u, P_{0}^2> = 0")]
    NotRegular(usize),
    #[error("no solution: {0}")]
    NoSolution(String),
    #[error("operator has lowering order {found}, solver expects {expected}")]
    ProfileMismatch { expected: usize, found: usize },
    #[error("operator has a nonzero coefficient a_{0}; only three-term operators are supported here")]
    NotThreeTerm(usize),
    #[error("sequence is not a fixed point of the normalized J-image (first failure at n = {0})")]
    NotAFixedPoint(usize),
    #[error("sequential solve is inconsistent at degree {0}")]
    NoFixedPointSequence(usize),
    #[error("eigenrelation J(P_n) = lambda_n P_n fails at n = {0}")]
    EigenrelationFailed(usize),
    #[error("polynomial-side and dual-side verdicts disagree (polynomial: {polynomial}, dual: {dual})")]
    SidesDisagree { polynomial: bool, dual: bool },
    #[error("operator JSON declares N = {declared} but lists {listed} coefficients")]
    HorizonMismatch { declared: usize, listed: usize },
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Stable machine-readable code, used by the CLI reports and the C ABI.
    pub fn code(&self) -> &'static str {
        match self {
            Error::FieldMismatch(..) => "FieldMismatch",
            Error::DegenerateAffine => "DegenerateAffine",
            Error::DegreeViolation(_) => "DegreeViolation",
            Error::HorizonExceeded { .. } => "HorizonExceeded",
            Error::NotDegreeNonincreasing(_) => "NotDegreeNonincreasing",
            Error::BadParameter(_) => "BadParameter",
            Error::NotIsomorphism(_) => "NotIsomorphism",
            Error::NotLowering { .. } => "NotLowering",
            Error::RelaxedOperator => "RelaxedOperator",
            Error::EmptyResult => "EmptyResult",
            Error::NeedMoreCoeffs(_) => "NeedMoreCoeffs",
            Error::NotMonic(_) => "NotMonic",
            Error::InvalidStructure(_) => "InvalidStructure",
            Error::NoClassicalSolution(_) => "NoClassicalSolution",
            Error::InadmissiblePair(_) => "InadmissiblePair",
            Error::NotRegular(_) => "NotRegular",
            Error::NoSolution(_) => "NoSolution",
            Error::ProfileMismatch { .. } => "ProfileMismatch",
            Error::NotThreeTerm(_) => "NotThreeTerm",
            Error::NotAFixedPoint(_) => "NotAFixedPoint",
            Error::NoFixedPointSequence(_) => "NoFixedPointSequence",
            Error::EigenrelationFailed(_) => "EigenrelationFailed",
            Error::SidesDisagree { .. } => "SidesDisagree",
            Error::HorizonMismatch { .. } => "HorizonMismatch",
            Error::Parse(_) => "Parse",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
