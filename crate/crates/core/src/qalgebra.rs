//! Complex linear algebra for small dense Hilbert spaces.
//!
//! Basis order is `|+z⟩, |−z⟩` for a single spin-1/2 and subsystem-1 major
//! for composite spaces: composite index `i₁·d₂ + i₂`. Units have ħ = 1, so
//! spin components carry eigenvalues ±1/2.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::{Error, Result, EPS_HERM, EPS_NORM};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// A normalized pure state. Global phase is carried but never physically meaningful.
#[derive(Clone, Debug, PartialEq)]
pub struct Ket {
    amps: CVector,
}

/// Normalizes `amplitudes` into a [`Ket`].
pub fn make_ket(amplitudes: &[Complex64]) -> Result<Ket> {
    if amplitudes.is_empty() {
        return Err(Error::EmptyInput);
    }
    let v = CVector::from_column_slice(amplitudes);
    let norm = v.norm();
    if norm == 0.0 || !norm.is_finite() {
        return Err(Error::ZeroVector);
    }
    Ok(Ket { amps: v.unscale(norm) })
}

impl Ket {
    pub fn new(amplitudes: &[Complex64]) -> Result<Self> {
        make_ket(amplitudes)
    }

    pub fn from_real(amplitudes: &[f64]) -> Result<Self> {
        let c: Vec<Complex64> = amplitudes.iter().map(|&a| Complex64::new(a, 0.0)).collect();
        make_ket(&c)
    }

    /// Computational basis vector `index` of a `dim`-dimensional space.
    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::EmptyInput);
        }
        if index >= dim {
            return Err(Error::DimensionMismatch { expected: dim, found: index + 1 });
        }
        let mut v = CVector::zeros(dim);
        v[index] = ONE;
        Ok(Ket { amps: v })
    }

    // Wraps an already-normalized vector; callers guarantee unit norm.
    pub(crate) fn from_normalized(v: CVector) -> Self {
        debug_assert!((v.norm() - 1.0).abs() < 1e-9);
        Ket { amps: v }
    }

    pub fn plus_z() -> Self {
        Self::from_normalized(CVector::from_column_slice(&[ONE, ZERO]))
    }

    pub fn minus_z() -> Self {
        Self::from_normalized(CVector::from_column_slice(&[ZERO, ONE]))
    }

    pub fn plus_x() -> Self {
        make_ket(&[ONE, ONE]).unwrap()
    }

    pub fn minus_x() -> Self {
        make_ket(&[ONE, -ONE]).unwrap()
    }

    pub fn plus_y() -> Self {
        make_ket(&[ONE, I]).unwrap()
    }

    pub fn minus_y() -> Self {
        make_ket(&[ONE, -I]).unwrap()
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        self.amps.as_slice()
    }

    pub fn as_vector(&self) -> &CVector {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.norm()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Ket) -> Complex64 {
        self.amps.dotc(&other.amps)
    }

    /// The same ray multiplied by `e^{iφ}`.
    pub fn with_phase(&self, phi: f64) -> Ket {
        Ket { amps: self.amps.map(|a| a * Complex64::from_polar(1.0, phi)) }
    }

    /// `|k⟩⟨k|`.
    pub fn projector(&self) -> CMatrix {
        &self.amps * self.amps.adjoint()
    }

    /// Phase-free comparison: max entrywise distance between the two projectors.
    pub fn projector_distance(&self, other: &Ket) -> f64 {
        if self.dim() != other.dim() {
            return f64::INFINITY;
        }
        max_abs_diff(&self.projector(), &other.projector())
    }

    pub fn same_ray(&self, other: &Ket, tol: f64) -> bool {
        self.projector_distance(other) <= tol
    }
}

/// Hermitian operator with a free-text label used in reports.
#[derive(Clone, Debug, PartialEq)]
pub struct Observable {
    matrix: CMatrix,
    label: String,
}

impl Observable {
    /// Validates Hermiticity within `EPS_HERM` and stores the exactly
    /// Hermitian part `(M + M†)/2`.
    pub fn new(matrix: CMatrix, label: impl Into<String>) -> Result<Self> {
        let matrix = hermitian_part(&matrix)?;
        Ok(Observable { matrix, label: label.into() })
    }

    pub fn identity(dim: usize) -> Self {
        Observable { matrix: CMatrix::identity(dim, dim), label: format!("I{dim}") }
    }

    pub fn zero(dim: usize) -> Self {
        Observable { matrix: CMatrix::zeros(dim, dim), label: "0".into() }
    }

    pub fn sx() -> Self {
        spin_component(&SpinDirection::X).with_label("sx")
    }

    pub fn sy() -> Self {
        spin_component(&SpinDirection::Y).with_label("sy")
    }

    pub fn sz() -> Self {
        spin_component(&SpinDirection::Z).with_label("sz")
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn scale(&self, factor: f64) -> Observable {
        Observable {
            matrix: self.matrix.map(|z| z * factor),
            label: format!("{}*{}", factor, self.label),
        }
    }

    pub fn add(&self, other: &Observable) -> Result<Observable> {
        check_dim(self.dim(), other.dim())?;
        Ok(Observable {
            matrix: &self.matrix + &other.matrix,
            label: format!("{}+{}", self.label, other.label),
        })
    }
}

impl fmt::Display for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label)
    }
}

/// Max entrywise deviation from Hermiticity, `max |M_jk − conj(M_kj)|`.
pub fn hermiticity_residue(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut r: f64 = 0.0;
    for j in 0..n {
        for k in j..n {
            r = r.max((m[(j, k)] - m[(k, j)].conj()).norm());
        }
    }
    r
}

pub(crate) fn hermitian_part(m: &CMatrix) -> Result<CMatrix> {
    if m.nrows() == 0 {
        return Err(Error::EmptyInput);
    }
    check_dim(m.nrows(), m.ncols())?;
    let residue = hermiticity_residue(m);
    if !(residue <= EPS_HERM) {
        return Err(Error::NotHermitian { residue });
    }
    Ok((m + m.adjoint()).unscale(2.0))
}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    if a.shape() != b.shape() {
        return f64::INFINITY;
    }
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// `⟨k|O|k⟩`.
pub fn expectation(k: &Ket, o: &Observable) -> Result<f64> {
    check_dim(o.dim(), k.dim())?;
    let v = k.as_vector();
    let q = v.dotc(&(o.matrix() * v));
    debug_assert!(q.im.abs() <= EPS_HERM * (1.0 + o.matrix().norm()), "imaginary residue {}", q.im);
    Ok(q.re)
}

/// Real unit 3-vector selecting a spin axis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpinDirection {
    n: [f64; 3],
}

impl SpinDirection {
    pub const X: SpinDirection = SpinDirection { n: [1.0, 0.0, 0.0] };
    pub const Y: SpinDirection = SpinDirection { n: [0.0, 1.0, 0.0] };
    pub const Z: SpinDirection = SpinDirection { n: [0.0, 0.0, 1.0] };

    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let norm = (x * x + y * y + z * z).sqrt();
        if !((norm - 1.0).abs() <= EPS_NORM) {
            return Err(Error::NotUnitVector(x, y, z));
        }
        Ok(SpinDirection { n: [x, y, z] })
    }

    /// Normalizes an arbitrary nonzero vector.
    pub fn normalized(x: f64, y: f64, z: f64) -> Result<Self> {
        let norm = (x * x + y * y + z * z).sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::NotUnitVector(x, y, z));
        }
        Ok(SpinDirection { n: [x / norm, y / norm, z / norm] })
    }

    pub fn components(&self) -> [f64; 3] {
        self.n
    }

    /// `count` nearly uniform directions on the sphere (golden-angle spiral).
    pub fn fibonacci_sphere(count: usize) -> Vec<SpinDirection> {
        let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
        (0..count)
            .map(|i| {
                let z = 1.0 - 2.0 * (i as f64 + 0.5) / count as f64;
                let r = (1.0 - z * z).max(0.0).sqrt();
                let phi = golden * i as f64;
                SpinDirection::normalized(r * phi.cos(), r * phi.sin(), z).unwrap()
            })
            .collect()
    }
}

impl fmt::Display for SpinDirection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "dir:{},{},{}", self.n[0], self.n[1], self.n[2])
    }
}

/// `n·σ / 2` in the `|+z⟩, |−z⟩` basis.
pub fn spin_component(d: &SpinDirection) -> Observable {
    let [x, y, z] = d.n;
    let half = 0.5;
    let m = CMatrix::from_row_slice(
        2,
        2,
        &[
            Complex64::new(half * z, 0.0),
            Complex64::new(half * x, -half * y),
            Complex64::new(half * x, half * y),
            Complex64::new(-half * z, 0.0),
        ],
    );
    Observable { matrix: m, label: d.to_string() }
}

/// Spectral decomposition of a Hermitian matrix, eigenvalues ascending.
#[derive(Clone, Debug)]
pub struct HermEig {
    pub values: Vec<f64>,
    pub vectors: Vec<Ket>,
}

impl HermEig {
    /// `Σ λₖ |vₖ⟩⟨vₖ|`.
    pub fn reconstruct(&self) -> CMatrix {
        let n = self.values.len();
        self.values
            .iter()
            .zip(&self.vectors)
            .fold(CMatrix::zeros(n, n), |acc, (&l, v)| acc + v.projector() * Complex64::new(l, 0.0))
    }

    /// `Σ f(λₖ) |vₖ⟩⟨vₖ|`.
    pub fn apply<F: Fn(f64) -> Complex64>(&self, f: F) -> CMatrix {
        let n = self.values.len();
        let mut out = CMatrix::zeros(n, n);
        for (&l, v) in self.values.iter().zip(&self.vectors) {
            let w = f(l);
            let a = v.as_vector();
            out += (a * a.adjoint()) * w;
        }
        out
    }
}

pub fn herm_eig(o: &Observable) -> Result<HermEig> {
    herm_eig_matrix(o.matrix())
}

/// Eigendecomposition of any matrix that is Hermitian within `EPS_HERM`.
pub fn herm_eig_matrix(m: &CMatrix) -> Result<HermEig> {
    let h = hermitian_part(m)?;
    let n = h.nrows();
    if n == 1 {
        return Ok(HermEig { values: vec![h[(0, 0)].re], vectors: vec![Ket::basis(1, 0)?] });
    }
    let eig = h.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = order
        .iter()
        .map(|&i| {
            let col: CVector = eig.eigenvectors.column(i).into_owned();
            let norm = col.norm();
            Ket::from_normalized(col.unscale(norm))
        })
        .collect();
    Ok(HermEig { values, vectors })
}

/// `exp(−iHt)` via the spectral decomposition of `H`.
pub fn propagator(h: &Observable, t: f64) -> Result<CMatrix> {
    let eig = herm_eig(h)?;
    Ok(eig.apply(|l| Complex64::from_polar(1.0, -l * t)))
}

/// `exp(−iHt)|k⟩`, renormalized.
pub fn evolve_pure(k: &Ket, h: &Observable, t: f64) -> Result<Ket> {
    check_dim(h.dim(), k.dim())?;
    let u = propagator(h, t)?;
    apply_unitary(&u, k)
}

pub(crate) fn apply_unitary(u: &CMatrix, k: &Ket) -> Result<Ket> {
    check_dim(u.ncols(), k.dim())?;
    let v = u * k.as_vector();
    let norm = v.norm();
    Ok(Ket::from_normalized(v.unscale(norm)))
}

/// Kronecker product of kets, subsystem 1 major.
pub fn tensor(a: &Ket, b: &Ket) -> Ket {
    Ket::from_normalized(a.as_vector().kronecker(b.as_vector()))
}

/// Kronecker product of observables, subsystem 1 major.
pub fn tensor_obs(a: &Observable, b: &Observable) -> Observable {
    Observable {
        matrix: a.matrix().kronecker(b.matrix()),
        label: format!("{}⊗{}", a.label, b.label),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    use crate::EPS_EIG;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn make_ket_normalizes() {
        let k = Ket::from_real(&[1.0, 0.0]).unwrap();
        assert_eq!(k.amplitudes(), &[ONE, ZERO]);
        let k = Ket::from_real(&[1.0, 1.0]).unwrap();
        assert!((k.amplitudes()[0].re - FRAC_1_SQRT_2).abs() < EPS_NORM);
        assert!((k.amplitudes()[1].re - FRAC_1_SQRT_2).abs() < EPS_NORM);
        assert!(k.same_ray(&Ket::plus_x(), EPS_NORM));
        assert_eq!(k.dim(), 2);
    }

    #[test]
    fn make_ket_errors() {
        assert_eq!(Ket::from_real(&[0.0, 0.0]), Err(Error::ZeroVector));
        assert_eq!(make_ket(&[]), Err(Error::EmptyInput));
    }

    #[test]
    fn expectation_examples() {
        assert!((expectation(&Ket::plus_x(), &Observable::sx()).unwrap() - 0.5).abs() < EPS_EIG);
        assert!(expectation(&Ket::plus_y(), &Observable::sx()).unwrap().abs() < EPS_EIG);
        assert!((expectation(&Ket::plus_z(), &Observable::sz()).unwrap() - 0.5).abs() < EPS_EIG);
        assert!(matches!(
            expectation(&Ket::basis(3, 0).unwrap(), &Observable::sx()),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn spin_component_axes() {
        let sx = spin_component(&SpinDirection::new(1.0, 0.0, 0.0).unwrap());
        let expected = CMatrix::from_row_slice(2, 2, &[ZERO, c(0.5, 0.0), c(0.5, 0.0), ZERO]);
        assert_eq!(sx.matrix(), &expected);
        let sz = spin_component(&SpinDirection::new(0.0, 0.0, 1.0).unwrap());
        let expected = CMatrix::from_row_slice(2, 2, &[c(0.5, 0.0), ZERO, ZERO, c(-0.5, 0.0)]);
        assert_eq!(sz.matrix(), &expected);
        assert!(matches!(SpinDirection::new(0.0, 2.0, 0.0), Err(Error::NotUnitVector(..))));
    }

    #[test]
    fn sy_matches_pauli() {
        let expected = CMatrix::from_row_slice(2, 2, &[ZERO, c(0.0, -0.5), c(0.0, 0.5), ZERO]);
        assert_eq!(Observable::sy().matrix(), &expected);
        assert!((expectation(&Ket::plus_y(), &Observable::sy()).unwrap() - 0.5).abs() < EPS_EIG);
        assert!((expectation(&Ket::minus_y(), &Observable::sy()).unwrap() + 0.5).abs() < EPS_EIG);
    }

    #[test]
    fn observable_rejects_non_hermitian() {
        let m = CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ZERO, ZERO]);
        assert!(matches!(Observable::new(m, "bad"), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn herm_eig_sz_and_sx() {
        let e = herm_eig(&Observable::sz()).unwrap();
        assert_eq!(e.values.len(), 2);
        assert!((e.values[0] + 0.5).abs() < EPS_EIG && (e.values[1] - 0.5).abs() < EPS_EIG);
        assert!(e.vectors[0].same_ray(&Ket::minus_z(), EPS_EIG));
        assert!(e.vectors[1].same_ray(&Ket::plus_z(), EPS_EIG));

        let e = herm_eig(&Observable::sx()).unwrap();
        assert!((e.values[0] + 0.5).abs() < EPS_EIG && (e.values[1] - 0.5).abs() < EPS_EIG);
        assert!(e.vectors[0].same_ray(&Ket::minus_x(), EPS_EIG));
        assert!(e.vectors[1].same_ray(&Ket::plus_x(), EPS_EIG));
    }

    #[test]
    fn herm_eig_degenerate() {
        let half = Observable::identity(2).scale(0.5);
        let e = herm_eig(&half).unwrap();
        assert!(e.values.iter().all(|l| (l - 0.5).abs() < EPS_EIG));
        assert!(e.vectors[0].inner(&e.vectors[1]).norm() < EPS_EIG);
        assert!(max_abs_diff(&e.reconstruct(), half.matrix()) < EPS_EIG);
    }

    #[test]
    fn herm_eig_rejects_non_hermitian() {
        let m = CMatrix::from_row_slice(2, 2, &[ONE, c(0.0, 1.0), c(0.0, 1.0), ONE]);
        assert!(matches!(herm_eig_matrix(&m), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn evolve_pure_examples() {
        let k = Ket::plus_x();
        let out = evolve_pure(&k, &Observable::sx(), 0.0).unwrap();
        assert!(max_abs_diff(&CMatrix::from_column_slice(2, 1, out.amplitudes()),
                             &CMatrix::from_column_slice(2, 1, k.amplitudes())) < EPS_EIG);

        let out = evolve_pure(&Ket::plus_z(), &Observable::sz(), 1.234).unwrap();
        assert!(out.same_ray(&Ket::plus_z(), EPS_EIG));

        // diag(e^{-it/2}, e^{it/2}) applied to (1,1)/√2 at t = π/2 is (1, i)/√2 up to phase.
        let out = evolve_pure(&Ket::plus_x(), &Observable::sz(), PI / 2.0).unwrap();
        let closed = make_ket(&[Complex64::from_polar(1.0, -PI / 4.0), Complex64::from_polar(1.0, PI / 4.0)]).unwrap();
        assert!(out.same_ray(&closed, EPS_EIG));
        assert!(out.same_ray(&Ket::plus_y(), EPS_EIG));
    }

    #[test]
    fn evolve_pure_dimension_mismatch() {
        let r = evolve_pure(&Ket::basis(3, 0).unwrap(), &Observable::sz(), 1.0);
        assert!(matches!(r, Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn tensor_examples() {
        let k = tensor(&Ket::plus_z(), &Ket::plus_z());
        assert_eq!(k.amplitudes(), &[ONE, ZERO, ZERO, ZERO]);

        let k = tensor(&Ket::plus_z(), &Ket::minus_z());
        let op = tensor_obs(&Observable::sz(), &Observable::identity(2));
        let applied = op.matrix() * k.as_vector();
        assert!((applied - k.as_vector() * c(0.5, 0.0)).norm() < EPS_EIG);
        assert!((expectation(&k, &op).unwrap() - 0.5).abs() < EPS_EIG);
    }

    #[test]
    fn tensor_index_convention() {
        let a = make_ket(&[c(1.0, 0.0), c(2.0, 0.0)]).unwrap();
        let b = make_ket(&[c(3.0, 0.0), c(0.0, 5.0), c(7.0, 0.0)]).unwrap();
        let ab = tensor(&a, &b);
        for i1 in 0..2 {
            for i2 in 0..3 {
                let want = a.amplitudes()[i1] * b.amplitudes()[i2];
                assert!((ab.amplitudes()[i1 * 3 + i2] - want).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn fibonacci_sphere_is_unit() {
        let grid = SpinDirection::fibonacci_sphere(64);
        assert_eq!(grid.len(), 64);
        for d in grid {
            let [x, y, z] = d.components();
            assert!(((x * x + y * y + z * z).sqrt() - 1.0).abs() < EPS_NORM);
        }
    }
}
