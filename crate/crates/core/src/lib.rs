//! Shape inference for regression curves from the persistent homology of the
//! estimated derivative.
//!
//! The pipeline: kernel-smooth the data ([`regress`]), build super-level
//! barcodes of the derivative estimate ([`persistence`]), test the bar
//! endpoints ([`significance`]) and read off monotonicity, convexity or
//! modality ([`structures`]). [`metric`] compares diagrams, [`simplicial`]
//! is an exact homology oracle, and [`datagen`] produces seeded scenarios.
// `!(a < b)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod datagen;
pub mod error;
pub mod kernels;
pub mod metric;
pub mod persistence;
pub mod regress;
pub mod scalar;
pub mod significance;
pub mod simplicial;
pub mod structures;

#[cfg(any(test, feature = "oracles"))]
pub mod oracle;

pub use datagen::{derive_seed, generate, true_curves, true_diagram, Scenario, ScenarioKind};
pub use error::{
    DatagenError, KernelError, MetricError, PersistenceError, RegressError, SignificanceError, SimplicialError,
    StructureError,
};
pub use kernels::{KernelFamily, KernelSpec};
pub use metric::{bottleneck_distance, stability_check};
pub use persistence::{
    build_discrete_filtration, build_plan, estimated_persistence, superlevel_barcode_0d, theorem_constant,
    DiscreteFiltration, Feature, FiltrationPlan, PersistenceDiagram, TheoremInputs,
};
pub use regress::{evaluate_on_grid, nw_derivative, nw_estimate, weights_and_residuals, CurveEstimate, Sample};
pub use scalar::Scalar;
pub use significance::{assess_feature, fit_slope, FeatureSignificance, SlopeFit};
pub use simplicial::{betti, boundary_matrix, nerve_of_intervals, FieldKind, SimplicialComplex};
pub use structures::{
    convexity, modality, monotonicity, zero_crossings, Conclusion, StructureConfig, StructureKind, StructureVerdict,
};

pub type Sample64 = Sample<f64>;
pub type KernelSpec64 = KernelSpec<f64>;
pub type CurveEstimate64 = CurveEstimate<f64>;
pub type PersistenceDiagram64 = PersistenceDiagram<f64>;
pub type Feature64 = Feature<f64>;
pub type StructureConfig64 = StructureConfig<f64>;
pub type StructureVerdict64 = StructureVerdict<f64>;
