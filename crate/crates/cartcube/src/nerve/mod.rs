//! Categories of elements, the realization–nerve adjunction, cubical nerves
//! and small universes.

pub mod cubical;
pub mod elements;
pub mod nu;
pub mod slice;
pub mod universe;

pub use cubical::{check_full_faithfulness, cube_poset, cubical_nerve, CubicalNerve};
pub use elements::Elements;
pub use nu::{check_adjunction, check_unit_pullback, elements_map, nerve, nerve_with, unit, NerveData};
pub use slice::Slices;
pub use universe::{check_universe_omega, universe, Universe};
