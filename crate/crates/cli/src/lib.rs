//! Library side of the experiment runner: the brute-force embedding oracle
//! and the threshold grid. The binary in `main.rs` wires these and the core
//! crate into subcommands.

pub mod grid;
pub mod oracle;
