//! Connected components, homotopies, homotopy equivalences and weak
//! homotopy equivalences relative to a family of fibrant test objects.

pub mod paths;
pub mod pi0;
pub mod premodel;
pub mod relation;
pub mod whe;

pub use paths::{find_homotopy, homotopy_by_transpose, homotopy_equivalence, symmetry, transitivity, BoxFilling, Homotopy, HomotopyEquivalence};
pub use pi0::{check_pi0_product, pi0, pi0_map, Pi0};
pub use whe::{certify_fibrant, standard_family, weak_homotopy_equivalence, TestObject};
pub use premodel::{premodel_sample_suite, PremodelSamples};
pub use relation::{check_homotopy_relation, standard_sources};
