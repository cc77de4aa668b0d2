//! The fibration weak factorization system: pushout-products and
//! pullback-homs, generating trivial cofibrations, uniform fibration
//! structures, the bounded small-object factorization, and classifying types.

pub mod classifying;
pub mod factor;
pub mod generators;
pub mod leibniz;
pub mod structure;

pub use classifying::{classifying_type, ClassifierKind, ClassifyingType, FibClassifier};
pub use factor::{cellular_round, factor_tcof_fib, SmallObjectLimits, TcofFibFactorization};
pub use generators::{enumerate_generators, GeneratingTrivialCofibration, Mode};
pub use leibniz::{check_leibniz, pullback_hom, pullback_hom_on, pushout_product, pushout_product_with, PullbackHom, PushoutProduct};
pub use structure::{
    biased_pullback_hom, derive_biased, fibration_structure, route_a, route_b, FibAnalysis, FibrationStructure,
    ProblemCell, Problems, Route, RouteA, FIBRANCY_CAVEAT,
};
