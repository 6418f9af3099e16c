//! Limiting stray-field potentials of single walls and wall configurations,
//! and the energy identities they satisfy.
//!
//! Unconfined potentials are evaluated in closed form through
//! `F(w) = e^w E_1(w)` with `w = x2 - i x1`: `v = Re F`, `u = -Im F`.
//! Confined potentials come from the strip map `F(w) = -1/cosh w`.

mod energy;
mod fields;

pub use energy::{
    boundary_l2, conjugacy_residual, cross_term, dirichlet_annulus, extrapolate_to_zero, harmonicity_residual,
    near_wall_energy, polar_integral, w1_closed_form, w1_unconfined, CrossTerm, Estimate, LimitEstimate, PolarGrid,
    ResidualGrid,
};
pub use fields::{
    strip_inverse, strip_map, u_confined, u_unconfined, u_unconfined_quadrature, v_confined, v_unconfined,
    v_unconfined_quadrature, wall_potential, FieldSample, NearWallData, Potential, StarField,
};
