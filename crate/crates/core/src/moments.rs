//! Moments of the expectation-value random variable over an ensemble.
//!
//! For an ensemble `{|φᵢ⟩, pᵢ}` and observable `O`, the random variable `X`
//! takes the value `⟨φᵢ|O|φᵢ⟩` with probability `pᵢ`. Its first moment is
//! fixed by the density operator; higher moments are not, which is what lets
//! [`distinguish`] separate ensembles that share the same ρ.

use rayon::prelude::*;

use crate::mixtures::Ensemble;
use crate::qalgebra::{check_dim, expectation, spin_component, Ket, Observable, SpinDirection};
use crate::Result;

/// Default discrimination tolerance.
pub const DEFAULT_TOL: f64 = crate::EPS_EIG;

/// An (observable, order) pair at which two ensembles have different moments.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentWitness {
    pub observable: String,
    pub direction: Option<SpinDirection>,
    pub order: u32,
    pub value_a: f64,
    pub value_b: f64,
    pub gap: f64,
}

/// Realization of `X` on a pure state: `⟨k|O|k⟩`.
pub fn rv_value(k: &Ket, o: &Observable) -> Result<f64> {
    expectation(k, o)
}

/// `(pᵢ, ⟨φᵢ|O|φᵢ⟩)` for every member, in member order.
pub fn rv_distribution(e: &Ensemble, o: &Observable) -> Result<Vec<(f64, f64)>> {
    check_dim(e.dim(), o.dim())?;
    e.members().iter().map(|m| Ok((m.prob, rv_value(&m.ket, o)?))).collect()
}

fn power_sum(dist: &[(f64, f64)], n: u32, shift: f64) -> f64 {
    dist.iter().map(|&(p, x)| p * (x - shift).powi(n as i32)).sum()
}

/// `μₙ(X) = Σᵢ pᵢ ⟨φᵢ|O|φᵢ⟩ⁿ`.
pub fn moment(e: &Ensemble, o: &Observable, n: u32) -> Result<f64> {
    let dist = rv_distribution(e, o)?;
    if n == 0 {
        return Ok(1.0);
    }
    Ok(power_sum(&dist, n, 0.0))
}

/// `Σᵢ pᵢ (⟨φᵢ|O|φᵢ⟩ − μ₁)ⁿ`.
pub fn central_moment(e: &Ensemble, o: &Observable, n: u32) -> Result<f64> {
    let dist = rv_distribution(e, o)?;
    match n {
        0 => Ok(1.0),
        1 => Ok(0.0),
        _ => {
            let mean = power_sum(&dist, 1, 0.0);
            Ok(power_sum(&dist, n, mean))
        }
    }
}

/// `[(1, μ₁), …, (max_n, μ_max_n)]`.
pub fn moment_profile(e: &Ensemble, o: &Observable, max_n: u32) -> Result<Vec<(u32, f64)>> {
    let dist = rv_distribution(e, o)?;
    Ok((1..=max_n).map(|n| (n, power_sum(&dist, n, 0.0))).collect())
}

/// Scans `observables` in the given order and, for each, orders `1..=max_order`
/// ascending; returns the first pair whose moments differ by more than `tol`.
///
/// `None` means no witness was found in the scanned set, not that the
/// ensembles are equal.
pub fn distinguish(
    a: &Ensemble,
    b: &Ensemble,
    observables: &[Observable],
    max_order: u32,
    tol: f64,
) -> Result<Option<MomentWitness>> {
    check_dim(a.dim(), b.dim())?;
    for o in observables {
        check_dim(a.dim(), o.dim())?;
    }
    // find_map_first keeps the sequential-scan result regardless of worker timing.
    observables
        .par_iter()
        .map(|o| -> Result<Option<MomentWitness>> {
            let da = rv_distribution(a, o)?;
            let db = rv_distribution(b, o)?;
            for n in 1..=max_order {
                let (va, vb) = (power_sum(&da, n, 0.0), power_sum(&db, n, 0.0));
                let gap = (va - vb).abs();
                if gap > tol {
                    return Ok(Some(MomentWitness {
                        observable: o.label().to_string(),
                        direction: None,
                        order: n,
                        value_a: va,
                        value_b: vb,
                        gap,
                    }));
                }
            }
            Ok(None)
        })
        .find_map_first(|r| match r {
            Ok(None) => None,
            other => Some(other),
        })
        .unwrap_or(Ok(None))
}

/// [`distinguish`] over spin components along `directions`; the witness
/// records the direction.
pub fn distinguish_directions(
    a: &Ensemble,
    b: &Ensemble,
    directions: &[SpinDirection],
    max_order: u32,
    tol: f64,
) -> Result<Option<MomentWitness>> {
    let observables: Vec<Observable> = directions.iter().map(spin_component).collect();
    let found = distinguish(a, b, &observables, max_order, tol)?;
    Ok(found.map(|mut w| {
        w.direction = directions.iter().find(|d| d.to_string() == w.observable).copied();
        w
    }))
}

/// The three axes followed by a Fibonacci-sphere grid of `grid_size` directions.
pub fn default_directions(grid_size: usize) -> Vec<SpinDirection> {
    let mut dirs = vec![SpinDirection::X, SpinDirection::Y, SpinDirection::Z];
    dirs.extend(SpinDirection::fibonacci_sphere(grid_size));
    dirs
}
