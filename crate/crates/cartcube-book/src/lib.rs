//! Guide chapters compiled as documentation tests.

#[doc = include_str!("../../../book/src/intro.md")]
pub mod intro {}

#[doc = include_str!("../../../book/src/cubes.md")]
pub mod cubes {}

#[doc = include_str!("../../../book/src/presheaves.md")]
pub mod presheaves {}

#[doc = include_str!("../../../book/src/interval.md")]
pub mod interval {}

#[doc = include_str!("../../../book/src/cofibrations.md")]
pub mod cofibrations {}

#[doc = include_str!("../../../book/src/fibrations.md")]
pub mod fibrations {}

#[doc = include_str!("../../../book/src/homotopy.md")]
pub mod homotopy {}

#[doc = include_str!("../../../book/src/nerves.md")]
pub mod nerves {}

#[doc = include_str!("../../../book/src/checks.md")]
pub mod checks {}
