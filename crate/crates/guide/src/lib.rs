//! Book chapters compiled as doctests. One module per chapter so a failing
//! listing is easy to trace back to its file.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/design.md")]
pub mod design {}
#[doc = include_str!("../../../book/src/sample-size.md")]
pub mod sample_size {}
#[doc = include_str!("../../../book/src/mde-network-size.md")]
pub mod mde_network_size {}
#[doc = include_str!("../../../book/src/allocation.md")]
pub mod allocation {}
#[doc = include_str!("../../../book/src/tables-curves.md")]
pub mod tables_curves {}
#[doc = include_str!("../../../book/src/simulation.md")]
pub mod simulation {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
