//! Two-subsystem pure states, partial traces and the coupled-then-decoupled
//! scenario.
//!
//! A reduced operator obtained from an entangled global pure state is an
//! *improper* mixture: it is not a statistical mixture of subsystem pure
//! states, and reports label it with [`REDUCED_OPERATOR_LABEL`].

use num_complex::Complex64;

use crate::mixtures::{entropy_of_spectrum, purity, DensityOperator, EntropyBase};
use crate::qalgebra::{
    check_dim, expectation, herm_eig, herm_eig_matrix, max_abs_diff, tensor, tensor_obs, CMatrix, HermEig, Ket,
    Observable,
};
use crate::{Error, Result, EPS_SCENARIO};

pub const REDUCED_OPERATOR_LABEL: &str = "reduced operator (improper mixture)";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subsystem {
    First,
    Second,
}

/// Pure state of a `d₁·d₂` composite, subsystem-1 major.
#[derive(Clone, Debug, PartialEq)]
pub struct BipartiteState {
    ket: Ket,
    dims: (usize, usize),
}

impl BipartiteState {
    pub fn new(ket: Ket, dims: (usize, usize)) -> Result<Self> {
        if dims.0 == 0 || dims.1 == 0 {
            return Err(Error::EmptyInput);
        }
        check_dim(dims.0 * dims.1, ket.dim())?;
        Ok(BipartiteState { ket, dims })
    }

    pub fn product(a: &Ket, b: &Ket) -> Self {
        BipartiteState { ket: tensor(a, b), dims: (a.dim(), b.dim()) }
    }

    /// `(|+z,+z⟩ + |−z,−z⟩)/√2`.
    pub fn bell() -> Self {
        let ket = Ket::from_real(&[1.0, 0.0, 0.0, 1.0]).unwrap();
        BipartiteState { ket, dims: (2, 2) }
    }

    pub fn ket(&self) -> &Ket {
        &self.ket
    }

    pub fn dims(&self) -> (usize, usize) {
        self.dims
    }

    pub fn density(&self) -> DensityOperator {
        DensityOperator::from_ket(&self.ket)
    }

    pub fn reduced(&self, keep: Subsystem) -> DensityOperator {
        partial_trace(&self.density(), self.dims, keep).expect("dims validated at construction")
    }
}

/// `Tr₂ ρ` (keep the first subsystem) or `Tr₁ ρ` (keep the second).
pub fn partial_trace(rho: &DensityOperator, dims: (usize, usize), keep: Subsystem) -> Result<DensityOperator> {
    let (d1, d2) = dims;
    check_dim(d1 * d2, rho.dim())?;
    let m = rho.matrix();
    let out = match keep {
        Subsystem::First => CMatrix::from_fn(d1, d1, |i, ip| {
            (0..d2).map(|j| m[(i * d2 + j, ip * d2 + j)]).sum::<Complex64>()
        }),
        Subsystem::Second => CMatrix::from_fn(d2, d2, |j, jp| {
            (0..d1).map(|i| m[(i * d2 + j, i * d2 + jp)]).sum::<Complex64>()
        }),
    };
    Ok(DensityOperator::from_trusted(out))
}

/// `Tr₁{ρ₁ O₁}` with `ρ₁ = Tr₂ |s⟩⟨s|`.
pub fn reduced_expectation(s: &BipartiteState, o1: &Observable) -> Result<f64> {
    check_dim(s.dims.0, o1.dim())?;
    s.reduced(Subsystem::First).expectation(o1)
}

/// Full-space `⟨s|O₁ ⊗ I|s⟩`, the reference value for [`reduced_expectation`].
pub fn full_space_expectation(s: &BipartiteState, o1: &Observable) -> Result<f64> {
    check_dim(s.dims.0, o1.dim())?;
    expectation(&s.ket, &tensor_obs(o1, &Observable::identity(s.dims.1)))
}

/// True iff the reduced purity falls below `1 − tol`.
pub fn is_entangled(s: &BipartiteState, tol: f64) -> bool {
    purity(&s.reduced(Subsystem::First)) < 1.0 - tol
}

/// Two subsystems prepared in pure states at `t0`, coupled by `hint` until
/// `t1`, then evolving freely.
#[derive(Clone, Debug)]
pub struct ScenarioSpec {
    pub h1: Observable,
    pub h2: Observable,
    pub hint: Observable,
    /// Subsystem-1 Hamiltonian after decoupling; defaults to `h1`.
    pub h1_after: Option<Observable>,
    pub psi1: Ket,
    pub psi2: Ket,
    pub t0: f64,
    pub t1: f64,
    pub sample_times: Vec<f64>,
}

impl ScenarioSpec {
    /// Two spins in `|+x⟩` with no local fields and coupling `ω sz⊗sz` on `[0, π/ω]`.
    pub fn spin_spin(omega: f64, sample_times: Vec<f64>) -> Self {
        let hint = tensor_obs(&Observable::sz(), &Observable::sz()).scale(omega);
        ScenarioSpec {
            h1: Observable::zero(2),
            h2: Observable::zero(2),
            hint,
            h1_after: None,
            psi1: Ket::plus_x(),
            psi2: Ket::plus_x(),
            t0: 0.0,
            t1: std::f64::consts::PI / omega,
            sample_times,
        }
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.psi1.dim(), self.psi2.dim())
    }

    pub fn validate(&self) -> Result<()> {
        let (d1, d2) = self.dims();
        check_dim(d1, self.h1.dim())?;
        check_dim(d2, self.h2.dim())?;
        check_dim(d1 * d2, self.hint.dim())?;
        if let Some(h) = &self.h1_after {
            check_dim(d1, h.dim())?;
        }
        if !(self.t0 <= self.t1) {
            return Err(Error::NonAscendingTimes(self.t1));
        }
        let mut prev = self.t0;
        for &t in &self.sample_times {
            if !(t >= prev) {
                return Err(Error::NonAscendingTimes(t));
            }
            prev = t;
        }
        match self.sample_times.last() {
            Some(&last) if last >= self.t1 => Ok(()),
            _ => Err(Error::InvalidConfig("the last sample time must not precede t1".into())),
        }
    }

    fn coupled_hamiltonian(&self) -> Result<Observable> {
        self.free_hamiltonian(&self.h1)?.add(&self.hint)
    }

    fn free_hamiltonian(&self, h1: &Observable) -> Result<Observable> {
        let (d1, d2) = self.dims();
        tensor_obs(h1, &Observable::identity(d2)).add(&tensor_obs(&Observable::identity(d1), &self.h2))
    }
}

#[derive(Clone, Debug)]
pub struct TrajectoryPoint {
    pub t: f64,
    pub reduced: DensityOperator,
    pub purity: f64,
    /// Natural-log entropy of the reduced operator.
    pub entropy: f64,
    /// Purity of the global state; stays 1.
    pub global_purity: f64,
    /// For samples after decoupling that follow another such sample, the max
    /// entrywise gap between `ρ₁(t)` and `U₁ ρ₁(t_prev) U₁†`.
    pub lvn_residual: Option<f64>,
}

impl TrajectoryPoint {
    pub fn lvn_ok(&self) -> bool {
        self.lvn_residual.is_none_or(|r| r <= EPS_SCENARIO)
    }
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub points: Vec<TrajectoryPoint>,
    pub t1: f64,
}

impl Trajectory {
    pub fn lvn_violations(&self) -> Vec<f64> {
        self.points.iter().filter(|p| !p.lvn_ok()).map(|p| p.t).collect()
    }
}

fn unitary(eig: &HermEig, dt: f64) -> CMatrix {
    eig.apply(|l| Complex64::from_polar(1.0, -l * dt))
}

/// Exact piecewise-constant evolution of the global pure state, reporting the
/// subsystem-1 reduced operator at every sample time.
pub fn run_scenario(spec: &ScenarioSpec) -> Result<Trajectory> {
    spec.validate()?;
    let dims = spec.dims();
    let h1_after = spec.h1_after.as_ref().unwrap_or(&spec.h1);
    let coupled = herm_eig(&spec.coupled_hamiltonian()?)?;
    let free = herm_eig(&spec.free_hamiltonian(h1_after)?)?;
    let local = herm_eig(h1_after)?;

    let psi0 = tensor(&spec.psi1, &spec.psi2);
    let psi_t1 = unitary(&coupled, spec.t1 - spec.t0) * psi0.as_vector();

    let mut points: Vec<TrajectoryPoint> = Vec::with_capacity(spec.sample_times.len());
    for &t in &spec.sample_times {
        let v = if t <= spec.t1 {
            unitary(&coupled, t - spec.t0) * psi0.as_vector()
        } else {
            unitary(&free, t - spec.t1) * &psi_t1
        };
        let global = Ket::new(v.as_slice())?;
        let state = BipartiteState::new(global, dims)?;
        let global_rho = state.density();
        let reduced = state.reduced(Subsystem::First);
        let spectrum = herm_eig_matrix(reduced.matrix())?.values;

        let lvn_residual = match points.last() {
            Some(prev) if prev.t >= spec.t1 => {
                let u1 = unitary(&local, t - prev.t);
                let predicted = &u1 * prev.reduced.matrix() * u1.adjoint();
                Some(max_abs_diff(&predicted, reduced.matrix()))
            }
            _ => None,
        };

        points.push(TrajectoryPoint {
            t,
            purity: purity(&reduced),
            entropy: entropy_of_spectrum(&spectrum, EntropyBase::Nat)?,
            global_purity: purity(&global_rho),
            reduced,
            lvn_residual,
        });
    }
    Ok(Trajectory { points, t1: spec.t1 })
}
