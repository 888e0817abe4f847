//! Dirac's constrained-Hamiltonian algorithm over an exact symbolic kernel,
//! with classical and quantum checks for a particle confined to a circle.

pub mod brackets;
pub mod dirac;
pub mod dynamics;
pub mod expr;
pub mod quantum;
