//! Néel-wall energetics in thin ferromagnetic films.
//!
//! * [`specfun`]: the interaction kernel `I(t)` and relatives.
//! * [`geometry`]: wall configurations, pseudo-distance and Möbius maps.
//! * [`renorm`]: renormalised energies of wall configurations, admissible
//!   angle ranges and their minimisation.
//! * [`potentials`]: boundary-vortex potentials and the energy identities
//!   they satisfy.
//! * [`micromag`]: the reduced one-dimensional micromagnetic energy on a
//!   grid and its minimisation.
//! * [`profiles`]: step-function limits and their transition decomposition.

pub mod acceptance;
pub mod error;
pub mod geometry;
pub mod micromag;
pub mod potentials;
pub mod profiles;
pub mod quad;
pub mod renorm;
pub mod specfun;

pub use error::{NeelError, Result};
pub use geometry::{Model, Sign, WallConfig};
