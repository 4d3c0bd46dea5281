use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KernelError {
    #[error("bandwidth must be positive and finite, got {0}")]
    NonPositiveBandwidth(f64),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RegressError {
    #[error("sample needs at least 2 points, got {0}")]
    TooFewPoints(usize),
    #[error("non-finite value at sample index {0}")]
    NonFinite(usize),
    #[error("evaluation grid is empty")]
    EmptyGrid,
    #[error("evaluation grid is not strictly increasing at index {0}")]
    NonMonotoneGrid(usize),
    #[error("kernel window at x = {0} contains no sample point")]
    UndefinedAtPoint(f64),
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimplicialError {
    #[error("complex is not closed under faces: {0:?} is missing")]
    InvalidComplex(Vec<usize>),
    #[error("boundary degree must be at least 1")]
    ZeroDegree,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PersistenceError {
    #[error("grid has {grid} points but {values} values were given")]
    LengthMismatch { grid: usize, values: usize },
    #[error("grid is not strictly increasing at index {0}")]
    NonMonotoneGrid(usize),
    #[error("non-finite value at index {0}")]
    NonFinite(usize),
    #[error("epsilon must be positive and finite, got {0}")]
    NonPositiveEpsilon(f64),
    #[error("no values to build a filtration from")]
    EmptyValues,
    #[error("no sample point has a defined derivative estimate")]
    AllPointsUndefined,
    #[error("filtration is not nested between levels {0} and {1}")]
    NotNested(usize, usize),
    #[error("theorem constant denominator is zero")]
    ZeroDenominator,
    #[error(transparent)]
    Regress(#[from] RegressError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricError {
    #[error("diagrams have different homological degrees ({0} vs {1})")]
    DegreeMismatch(usize, usize),
    #[error("value lists have different lengths ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("diagram contains a non-finite coordinate")]
    NonFinite,
    #[error(transparent)]
    Persistence(#[from] PersistenceError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SignificanceError {
    #[error("need at least 3 points for a slope fit, got {0}")]
    TooFewPoints(usize),
    #[error("residual and weight lists differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("all weights are identical; the slope is not identifiable")]
    DegenerateRegressor,
    #[error("level {0} is not attained at a local extremum of the derivative estimate")]
    LevelNotAttained(f64),
    #[error("estimate has fewer than 2 defined grid points")]
    TooFewGridPoints,
    #[error(transparent)]
    Regress(#[from] RegressError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StructureError {
    #[error("diagram has no features")]
    EmptyDiagram,
    #[error("derivative estimate has no sign change in the region")]
    NoZeroCrossing,
    #[error("region [{0}, {1}] is not inside the data range")]
    RegionOutsideData(f64, f64),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Regress(#[from] RegressError),
    #[error(transparent)]
    Persistence(#[from] PersistenceError),
    #[error(transparent)]
    Significance(#[from] SignificanceError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DatagenError {
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error(transparent)]
    Regress(#[from] RegressError),
}
