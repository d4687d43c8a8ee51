//! Von Neumann statistical mixtures and their density operators.
//!
//! An [`Ensemble`] keeps its member list exactly as given: no merging of
//! duplicate kets, no reordering and no diagonalization. Two ensembles with
//! the same [`DensityOperator`] remain distinct values.

use num_complex::Complex64;

use crate::qalgebra::{check_dim, herm_eig_matrix, hermitian_part, max_abs_diff, CMatrix, Ket, Observable};
use crate::{Error, Result, EPS_EIG, EPS_PROB};

#[derive(Clone, Debug, PartialEq)]
pub struct Member {
    pub ket: Ket,
    pub prob: f64,
}

/// Ordered collection `{|φᵢ⟩, pᵢ}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Ensemble {
    members: Vec<Member>,
    dim: usize,
}

pub fn make_ensemble(pairs: Vec<(Ket, f64)>) -> Result<Ensemble> {
    let dim = match pairs.first() {
        Some((k, _)) => k.dim(),
        None => return Err(Error::EmptyEnsemble),
    };
    let mut sum = 0.0;
    for (index, (ket, prob)) in pairs.iter().enumerate() {
        check_dim(dim, ket.dim())?;
        if !(*prob >= 0.0) {
            return Err(Error::NegativeProbability { index, prob: *prob });
        }
        sum += prob;
    }
    if !((sum - 1.0).abs() <= EPS_PROB) {
        return Err(Error::ProbabilitySumNotOne { sum });
    }
    let members = pairs.into_iter().map(|(ket, prob)| Member { ket, prob }).collect();
    Ok(Ensemble { members, dim })
}

impl Ensemble {
    pub fn new(pairs: Vec<(Ket, f64)>) -> Result<Self> {
        make_ensemble(pairs)
    }

    /// Single pure preparation.
    pub fn pure(ket: Ket) -> Self {
        let dim = ket.dim();
        Ensemble { members: vec![Member { ket, prob: 1.0 }], dim }
    }

    /// `{|+x⟩, ½; |−x⟩, ½}`.
    pub fn zeh_mixture_1() -> Self {
        make_ensemble(vec![(Ket::plus_x(), 0.5), (Ket::minus_x(), 0.5)]).unwrap()
    }

    /// `{|+y⟩, ½; |−y⟩, ½}`.
    pub fn zeh_mixture_2() -> Self {
        make_ensemble(vec![(Ket::plus_y(), 0.5), (Ket::minus_y(), 0.5)]).unwrap()
    }

    /// `{|+z⟩, ½; |−z⟩, ½}`, the unpolarized Stern-Gerlach beam.
    pub fn z_basis_mixture() -> Self {
        make_ensemble(vec![(Ket::plus_z(), 0.5), (Ket::minus_z(), 0.5)]).unwrap()
    }

    pub fn members(&self) -> &[Member] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn probabilities(&self) -> impl Iterator<Item = f64> + '_ {
        self.members.iter().map(|m| m.prob)
    }

    /// Member-wise transform keeping probabilities; used by evolution.
    pub(crate) fn map_kets<F>(&self, mut f: F) -> Result<Ensemble>
    where
        F: FnMut(&Ket) -> Result<Ket>,
    {
        let members = self
            .members
            .iter()
            .map(|m| Ok(Member { ket: f(&m.ket)?, prob: m.prob }))
            .collect::<Result<Vec<_>>>()?;
        Ok(Ensemble { members, dim: self.dim })
    }

    /// Member-wise equality up to global phases, order-sensitive.
    pub fn same_members(&self, other: &Ensemble, tol: f64) -> bool {
        self.len() == other.len()
            && self.dim == other.dim
            && self
                .members
                .iter()
                .zip(&other.members)
                .all(|(a, b)| (a.prob - b.prob).abs() <= tol && a.ket.same_ray(&b.ket, tol))
    }

    /// True when every member is the same ray as the first.
    pub fn is_physically_pure(&self, tol: f64) -> bool {
        let first = &self.members[0].ket;
        self.members.iter().filter(|m| m.prob > 0.0).all(|m| m.ket.same_ray(first, tol))
    }
}

/// Hermitian, positive-semidefinite, unit-trace matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityOperator {
    matrix: CMatrix,
}

impl DensityOperator {
    /// Validates the density-operator invariants on an arbitrary matrix.
    pub fn new(matrix: CMatrix) -> Result<Self> {
        let matrix = hermitian_part(&matrix)?;
        let trace = matrix.trace().re;
        if !((trace - 1.0).abs() <= EPS_PROB) {
            return Err(Error::TraceNotOne(trace));
        }
        let eig = herm_eig_matrix(&matrix)?;
        if let Some(&low) = eig.values.first() {
            if low < -EPS_EIG {
                return Err(Error::NegativeEigenvalue(low));
            }
        }
        Ok(DensityOperator { matrix })
    }

    /// Internal constructor for matrices that satisfy the invariants by
    /// construction (convex sums of projectors, unitary conjugates, partial traces).
    pub(crate) fn from_trusted(matrix: CMatrix) -> Self {
        let matrix = (&matrix + matrix.adjoint()).unscale(2.0);
        DensityOperator { matrix }
    }

    pub fn from_ket(k: &Ket) -> Self {
        DensityOperator { matrix: k.projector() }
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        DensityOperator { matrix: CMatrix::identity(dim, dim).unscale(dim as f64) }
    }

    pub fn diagonal(weights: &[f64]) -> Result<Self> {
        let n = weights.len();
        let mut m = CMatrix::zeros(n, n);
        for (i, &w) in weights.iter().enumerate() {
            m[(i, i)] = Complex64::new(w, 0.0);
        }
        DensityOperator::new(m)
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    /// Eigenvalues ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        herm_eig_matrix(&self.matrix).expect("density operator is Hermitian").values
    }

    /// `Tr{ρ O}`.
    pub fn expectation(&self, o: &Observable) -> Result<f64> {
        check_dim(self.dim(), o.dim())?;
        Ok((&self.matrix * o.matrix()).trace().re)
    }

    pub fn distance(&self, other: &DensityOperator) -> f64 {
        max_abs_diff(&self.matrix, &other.matrix)
    }

    pub fn is_projector(&self, tol: f64) -> bool {
        max_abs_diff(&(&self.matrix * &self.matrix), &self.matrix) <= tol
    }
}

/// `ρ = Σᵢ pᵢ |φᵢ⟩⟨φᵢ|`.
pub fn density_of(e: &Ensemble) -> DensityOperator {
    let n = e.dim();
    let m = e
        .members()
        .iter()
        .fold(CMatrix::zeros(n, n), |acc, m| acc + m.ket.projector() * Complex64::new(m.prob, 0.0));
    DensityOperator::from_trusted(m)
}

/// `Tr ρ²`.
pub fn purity(rho: &DensityOperator) -> f64 {
    // Tr(ρ²) = Σ |ρ_jk|² for Hermitian ρ.
    rho.matrix().iter().map(|z| z.norm_sqr()).sum()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EntropyBase {
    Nat,
    Bits,
}

/// `−Σ λ log λ` with `0·log 0 = 0` and `k_B = 1`.
pub fn von_neumann_entropy(rho: &DensityOperator, base: EntropyBase) -> Result<f64> {
    let values = herm_eig_matrix(rho.matrix())?.values;
    entropy_of_spectrum(&values, base)
}

pub(crate) fn entropy_of_spectrum(values: &[f64], base: EntropyBase) -> Result<f64> {
    let mut s = 0.0;
    for &l in values {
        if l < -EPS_EIG {
            return Err(Error::NegativeEigenvalue(l));
        }
        if l > 0.0 {
            s -= match base {
                EntropyBase::Nat => l * l.ln(),
                EntropyBase::Bits => l * l.log2(),
            };
        }
    }
    Ok(s.max(0.0))
}

/// Max entrywise distance between the two density operators is at most `tol`.
pub fn density_equal(a: &Ensemble, b: &Ensemble, tol: f64) -> Result<bool> {
    check_dim(a.dim(), b.dim())?;
    Ok(density_of(a).distance(&density_of(b)) <= tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::LN_2;

    #[test]
    fn make_ensemble_examples() {
        let m1 = Ensemble::zeh_mixture_1();
        assert_eq!(m1.len(), 2);
        assert!(m1.members()[0].ket.same_ray(&Ket::plus_x(), EPS_EIG));

        let single = make_ensemble(vec![(Ket::plus_z(), 1.0)]).unwrap();
        assert_eq!(single.len(), 1);

        let bad = make_ensemble(vec![(Ket::plus_x(), 0.6), (Ket::minus_x(), 0.5)]);
        assert!(matches!(bad, Err(Error::ProbabilitySumNotOne { .. })));
    }

    #[test]
    fn make_ensemble_errors() {
        assert_eq!(make_ensemble(vec![]), Err(Error::EmptyEnsemble));
        let neg = make_ensemble(vec![(Ket::plus_x(), 1.1), (Ket::minus_x(), -0.1)]);
        assert!(matches!(neg, Err(Error::NegativeProbability { index: 1, .. })));
        let mixed = make_ensemble(vec![(Ket::plus_x(), 0.5), (Ket::basis(3, 0).unwrap(), 0.5)]);
        assert!(matches!(mixed, Err(Error::DimensionMismatch { expected: 2, found: 3 })));
        let nan = make_ensemble(vec![(Ket::plus_x(), f64::NAN)]);
        assert!(matches!(nan, Err(Error::NegativeProbability { .. })));
    }

    #[test]
    fn zeh_densities_are_half_identity() {
        let half = DensityOperator::maximally_mixed(2);
        assert!(density_of(&Ensemble::zeh_mixture_1()).distance(&half) < 1e-12);
        assert!(density_of(&Ensemble::zeh_mixture_2()).distance(&half) < 1e-12);
    }

    #[test]
    fn singleton_gives_projector() {
        let rho = density_of(&Ensemble::pure(Ket::plus_x()));
        assert!(rho.is_projector(EPS_EIG));
        assert!((purity(&rho) - 1.0).abs() < EPS_EIG);
    }

    #[test]
    fn purity_examples() {
        assert!((purity(&DensityOperator::maximally_mixed(2)) - 0.5).abs() < EPS_EIG);
        assert!((purity(&DensityOperator::from_ket(&Ket::plus_x())) - 1.0).abs() < EPS_EIG);
        let d = DensityOperator::diagonal(&[0.25, 0.75]).unwrap();
        assert!((purity(&d) - 0.625).abs() < EPS_EIG);
    }

    #[test]
    fn entropy_examples() {
        let p = DensityOperator::from_ket(&Ket::plus_y());
        assert!(von_neumann_entropy(&p, EntropyBase::Nat).unwrap().abs() < EPS_EIG);
        let s = von_neumann_entropy(&DensityOperator::maximally_mixed(2), EntropyBase::Nat).unwrap();
        assert!((s - LN_2).abs() < 1e-12);
        let bits = von_neumann_entropy(&DensityOperator::maximally_mixed(4), EntropyBase::Bits).unwrap();
        assert!((bits - 2.0).abs() < 1e-12);
        let d = DensityOperator::diagonal(&[0.25, 0.75]).unwrap();
        let want = -(0.25 * 0.25f64.ln() + 0.75 * 0.75f64.ln());
        assert!((von_neumann_entropy(&d, EntropyBase::Nat).unwrap() - want).abs() < 1e-12);
    }

    #[test]
    fn entropy_clamps_small_negative_eigenvalues() {
        assert_eq!(entropy_of_spectrum(&[-1e-12, 1.0], EntropyBase::Nat).unwrap(), 0.0);
        assert!(matches!(
            entropy_of_spectrum(&[-1e-3, 1.001], EntropyBase::Nat),
            Err(Error::NegativeEigenvalue(_))
        ));
    }

    #[test]
    fn density_operator_validation() {
        let m = CMatrix::from_row_slice(2, 2, &[Complex64::new(1.5, 0.0), Complex64::new(0.0, 0.0),
                                                Complex64::new(0.0, 0.0), Complex64::new(-0.5, 0.0)]);
        assert!(matches!(DensityOperator::new(m), Err(Error::NegativeEigenvalue(_))));
        assert!(matches!(DensityOperator::diagonal(&[0.5, 0.6]), Err(Error::TraceNotOne(_))));
    }

    #[test]
    fn density_equal_examples() {
        let m1 = Ensemble::zeh_mixture_1();
        let m2 = Ensemble::zeh_mixture_2();
        assert!(density_equal(&m1, &m2, 1e-9).unwrap());
        assert!(!density_equal(&m1, &Ensemble::pure(Ket::plus_x()), 1e-9).unwrap());
        let reordered = make_ensemble(vec![(Ket::minus_x(), 0.5), (Ket::plus_x(), 0.5)]).unwrap();
        assert!(density_equal(&m1, &reordered, 1e-9).unwrap());
        assert!(!m1.same_members(&reordered, 1e-9));
        let three = Ensemble::pure(Ket::basis(3, 0).unwrap());
        assert!(matches!(density_equal(&m1, &three, 1e-9), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn zeh_ensembles_share_rho_but_differ_as_collections() {
        let m1 = Ensemble::zeh_mixture_1();
        let m2 = Ensemble::zeh_mixture_2();
        assert!(density_equal(&m1, &m2, EPS_EIG).unwrap());
        assert!(!m1.same_members(&m2, EPS_EIG));
        assert_ne!(m1, m2);
    }

    #[test]
    fn physical_purity_both_directions() {
        let dup = make_ensemble(vec![(Ket::plus_x(), 0.3), (Ket::plus_x().with_phase(1.0), 0.7)]).unwrap();
        assert!(dup.is_physically_pure(EPS_EIG));
        assert!((purity(&density_of(&dup)) - 1.0).abs() < EPS_EIG);

        let m1 = Ensemble::zeh_mixture_1();
        assert!(!m1.is_physically_pure(EPS_EIG));
        assert!(purity(&density_of(&m1)) < 1.0 - EPS_EIG);
    }
}
