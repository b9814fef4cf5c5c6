//! Inverse design for convex Hamilton-Jacobi equations and conservation laws
//! with space-dependent Hamiltonians.
//!
//! Given a target profile `W` at time `T`, [`inverse::compute_u_star`]
//! produces the minimal initial datum reaching it and
//! [`inverse::membership`] decides whether another datum reaches it too.

pub mod counterexample;
pub mod error;
pub mod flow;
pub mod grid;
pub mod hamiltonian;
pub mod inverse;
pub mod io;
pub mod pde;
pub mod rays;
pub(crate) mod roots;

pub use error::{Error, Result};
pub use grid::{derivative, primitive, GridProfile, Layout};
pub use hamiltonian::{Hamiltonian, HamiltonianModel, ModelSpec, Reversed};
