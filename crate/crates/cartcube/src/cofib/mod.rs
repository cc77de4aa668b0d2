//! Cofibrations and trivial fibrations: classes of monos, the partial map
//! classifier, lifting, and the three descriptions of trivial fibrations.

pub mod class;
pub mod lifting;
pub mod plus;

pub use class::{check_axioms, CofibrationClass};
pub use lifting::{count_fillers, solve_lifting, unliftable_square, Lifting, LiftingProblem};
pub use plus::{check_classifier, check_monad_laws, plus, plus_over, Plus, PlusCell};
pub mod tfib;

pub use tfib::{
    factor_cof_tfib, find_section, is_trivial_fibration, trivial_fibration_structure, CofTfibFactorization,
    TfibAnalysis, UniformFillingStructure,
};
pub mod classifying;

pub use classifying::{tfib_classifier, TfibClassifier};
