//! Trap-invariant verification of parametric component-based systems.
//!
//! A system is `n` copies of each component type, synchronised by an
//! interaction formula. Safety is proven for every `n` at once by compiling
//! the parametric trap constraint to automata and checking that no bad
//! state satisfies the resulting invariant.

pub mod ashcroft;
pub mod automata;
pub mod caps;
pub mod diag;
pub mod frontend;
pub mod logic;
pub mod model;
pub mod petri;
pub mod trapinv;
pub mod wss_compile;
