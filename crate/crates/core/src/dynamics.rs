//! Closed-system evolution under a time-independent Hamiltonian.

use crate::mixtures::{DensityOperator, Ensemble};
use crate::qalgebra::{apply_unitary, check_dim, propagator, Observable};
use crate::Result;

/// `U ρ U†` with `U = exp(−iHt)`.
pub fn evolve_density(rho: &DensityOperator, h: &Observable, t: f64) -> Result<DensityOperator> {
    check_dim(h.dim(), rho.dim())?;
    let u = propagator(h, t)?;
    Ok(DensityOperator::from_trusted(&u * rho.matrix() * u.adjoint()))
}

/// Evolves every member ket; probabilities are untouched.
pub fn evolve_ensemble(e: &Ensemble, h: &Observable, t: f64) -> Result<Ensemble> {
    check_dim(h.dim(), e.dim())?;
    let u = propagator(h, t)?;
    e.map_kets(|k| apply_unitary(&u, k))
}
