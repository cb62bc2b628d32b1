//! IO, exact simulation and fixtures around the `trotterc-core`
//! compiler. The binary in `main.rs` exposes the `compile`, `report`,
//! `simulate` and `sweep` subcommands on top of these modules.

pub mod fixtures;
pub mod io;
pub mod sim;
