//! Seeded Monte-Carlo estimates of ensemble moments.
//!
//! Two nested levels of sampling: each *preparation* draws an ensemble member
//! with its probability, then `m_inner` projective measurements (Born rule)
//! on that member estimate the per-state expectation `X = ⟨φ|O|φ⟩`. Raising
//! that sample mean to the n-th power and averaging over preparations gives a
//! plug-in estimate of `μₙ(X)` with a positive bias of order `1/m_inner`.
//!
//! With `m_inner = 1` the estimator degenerates to moments of single outcomes,
//! which depend only on the density operator and cannot separate ensembles
//! sharing ρ.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;

use crate::mixtures::Ensemble;
use crate::qalgebra::{check_dim, herm_eig, Ket, Observable};
use crate::{Error, Result, EPS_EIG};

/// Generator used for every draw.
///
/// Worker `w` uses `ChaCha20Rng::seed_from_u64(seed)` with its stream set to
/// `w`, so each worker has an independent keystream derived from one seed.
pub const RNG_ALGORITHM: &str = "ChaCha20 (rand_chacha 0.9); worker w: seed_from_u64(seed), set_stream(w)";

pub type SamplerRng = ChaCha20Rng;

/// Agreement band for an estimate against an exact moment: within
/// `STDERR_BAND · stderr + BIAS_ALLOWANCE`. The allowance covers the plug-in
/// bias at `m_inner = 10⁴` (for a ±½ observable, `Var(X̄) ≤ 1/(4·m_inner)`).
pub const STDERR_BAND: f64 = 4.0;
pub const BIAS_ALLOWANCE: f64 = 1e-4;

pub fn within_band(estimate: &MomentEstimate, exact: f64) -> bool {
    (estimate.estimate - exact).abs() <= STDERR_BAND * estimate.stderr + BIAS_ALLOWANCE
}

pub fn worker_rng(seed: u64, worker: usize) -> SamplerRng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(worker as u64);
    rng
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SamplerConfig {
    pub seed: u64,
    /// Number of preparations (ensemble draws).
    pub n_outer: usize,
    /// Measurement shots per preparation.
    pub m_inner: usize,
    /// Preparations are split into this many contiguous blocks, each with its
    /// own derived generator. Part of the reproducibility key.
    pub workers: usize,
}

impl SamplerConfig {
    pub fn new(seed: u64, n_outer: usize, m_inner: usize) -> Self {
        SamplerConfig { seed, n_outer, m_inner, workers: 1 }
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_outer == 0 || self.m_inner == 0 || self.workers == 0 {
            return Err(Error::InvalidConfig("n_outer, m_inner and workers must be at least 1".into()));
        }
        Ok(())
    }
}

/// Inverse-CDF draw of a member index over the member order.
pub fn sample_member<R: Rng + ?Sized>(e: &Ensemble, rng: &mut R) -> usize {
    let u: f64 = rng.random();
    let mut cum = 0.0;
    let mut last_positive = 0;
    for (i, m) in e.members().iter().enumerate() {
        if m.prob > 0.0 {
            last_positive = i;
        }
        cum += m.prob;
        if u < cum {
            return i;
        }
    }
    // u landed in the rounding slack above the cumulative sum.
    last_positive
}

/// Projective-measurement outcome distribution of `O` on a fixed ket, with
/// eigenvalues equal within `EPS_EIG` merged into a single outcome.
#[derive(Clone, Debug, PartialEq)]
pub struct OutcomeDistribution {
    pub outcomes: Vec<f64>,
    pub probs: Vec<f64>,
}

impl OutcomeDistribution {
    pub fn new(k: &Ket, o: &Observable) -> Result<Self> {
        check_dim(o.dim(), k.dim())?;
        let eig = herm_eig(o)?;
        let mut outcomes: Vec<f64> = Vec::new();
        let mut probs: Vec<f64> = Vec::new();
        let mut group: Vec<f64> = Vec::new();
        for (i, (&l, v)) in eig.values.iter().zip(&eig.vectors).enumerate() {
            let p = v.inner(k).norm_sqr();
            let starts_group = i == 0 || (l - group[group.len() - 1]).abs() > EPS_EIG;
            if starts_group {
                if !group.is_empty() {
                    *outcomes.last_mut().unwrap() = group.iter().sum::<f64>() / group.len() as f64;
                }
                group.clear();
                outcomes.push(l);
                probs.push(0.0);
            }
            group.push(l);
            *probs.last_mut().unwrap() += p;
        }
        if !group.is_empty() {
            *outcomes.last_mut().unwrap() = group.iter().sum::<f64>() / group.len() as f64;
        }
        let total: f64 = probs.iter().sum();
        probs.iter_mut().for_each(|p| *p /= total);
        Ok(OutcomeDistribution { outcomes, probs })
    }

    pub fn mean(&self) -> f64 {
        self.outcomes.iter().zip(&self.probs).map(|(x, p)| x * p).sum()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.random();
        let mut cum = 0.0;
        for (x, p) in self.outcomes.iter().zip(&self.probs) {
            cum += p;
            if u < cum {
                return *x;
            }
        }
        let i = self.probs.iter().rposition(|&p| p > 0.0).unwrap_or(self.outcomes.len() - 1);
        self.outcomes[i]
    }
}

/// One Born-rule outcome of measuring `O` on `k`: an eigenvalue of `O`.
pub fn born_sample<R: Rng + ?Sized>(k: &Ket, o: &Observable, rng: &mut R) -> Result<f64> {
    Ok(OutcomeDistribution::new(k, o)?.sample(rng))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MomentEstimate {
    pub estimate: f64,
    /// Sample standard deviation of the powered per-preparation means over `√n_outer`.
    pub stderr: f64,
}

/// Two-level plug-in estimate of `μₙ(X)`. Bit-identical for identical configs.
pub fn estimate_moment(e: &Ensemble, o: &Observable, n: u32, cfg: &SamplerConfig) -> Result<MomentEstimate> {
    cfg.validate()?;
    if n == 0 {
        return Err(Error::InvalidConfig("moment order must be at least 1".into()));
    }
    check_dim(e.dim(), o.dim())?;
    let dists = e
        .members()
        .iter()
        .map(|m| OutcomeDistribution::new(&m.ket, o))
        .collect::<Result<Vec<_>>>()?;

    let workers = cfg.workers.min(cfg.n_outer);
    let blocks: Vec<Vec<f64>> = (0..workers)
        .into_par_iter()
        .map(|w| {
            let start = w * cfg.n_outer / workers;
            let end = (w + 1) * cfg.n_outer / workers;
            let mut rng = worker_rng(cfg.seed, w);
            (start..end)
                .map(|_| {
                    let dist = &dists[sample_member(e, &mut rng)];
                    let total: f64 = (0..cfg.m_inner).map(|_| dist.sample(&mut rng)).sum();
                    (total / cfg.m_inner as f64).powi(n as i32)
                })
                .collect()
        })
        .collect();

    // Combined in worker-index order.
    let values: Vec<f64> = blocks.into_iter().flatten().collect();
    let count = values.len() as f64;
    let mean = values.iter().sum::<f64>() / count;
    let stderr = if values.len() > 1 {
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (count - 1.0);
        (var / count).sqrt()
    } else {
        0.0
    };
    Ok(MomentEstimate { estimate: mean, stderr })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qalgebra::expectation;

    #[test]
    fn singleton_always_index_zero() {
        let e = Ensemble::pure(Ket::plus_z());
        let mut rng = worker_rng(7, 0);
        assert!((0..1000).all(|_| sample_member(&e, &mut rng) == 0));
    }

    #[test]
    fn member_frequency_mixture_1() {
        let e = Ensemble::zeh_mixture_1();
        let mut rng = worker_rng(1, 0);
        let n = 100_000;
        let zeros = (0..n).filter(|_| sample_member(&e, &mut rng) == 0).count();
        let freq = zeros as f64 / n as f64;
        assert!((freq - 0.5).abs() < 0.01, "{freq}");
    }

    #[test]
    fn same_seed_same_draws() {
        let e = Ensemble::zeh_mixture_2();
        let mut a = worker_rng(99, 0);
        let mut b = worker_rng(99, 0);
        let da: Vec<usize> = (0..256).map(|_| sample_member(&e, &mut a)).collect();
        let db: Vec<usize> = (0..256).map(|_| sample_member(&e, &mut b)).collect();
        assert_eq!(da, db);
        let mut c = worker_rng(99, 1);
        let dc: Vec<usize> = (0..256).map(|_| sample_member(&e, &mut c)).collect();
        assert_ne!(da, dc);
    }

    #[test]
    fn born_eigenstate_is_deterministic() {
        let mut rng = worker_rng(3, 0);
        for _ in 0..1000 {
            assert_eq!(born_sample(&Ket::plus_z(), &Observable::sz(), &mut rng).unwrap(), 0.5);
        }
    }

    #[test]
    fn born_frequencies_plus_x_on_sz() {
        let dist = OutcomeDistribution::new(&Ket::plus_x(), &Observable::sz()).unwrap();
        let mut rng = worker_rng(5, 0);
        let n = 100_000;
        let ups = (0..n).filter(|_| dist.sample(&mut rng) > 0.0).count();
        assert!((ups as f64 / n as f64 - 0.5).abs() < 0.01);
    }

    #[test]
    fn born_mean_plus_y_on_sx_tends_to_zero() {
        let mut rng = worker_rng(11, 0);
        let n = 200_000;
        let mean: f64 = (0..n)
            .map(|_| born_sample(&Ket::plus_y(), &Observable::sx(), &mut rng).unwrap())
            .sum::<f64>()
            / n as f64;
        // Outcome variance ¼, so the standard error is 1/(2√n) ≈ 0.0011.
        assert!(mean.abs() < 0.0045, "{mean}");
    }

    #[test]
    fn degenerate_eigenvalues_merge() {
        let k = Ket::from_real(&[1.0, 2.0, 2.0]).unwrap();
        let o = Observable::identity(3).scale(0.5);
        let dist = OutcomeDistribution::new(&k, &o).unwrap();
        assert_eq!(dist.outcomes.len(), 1);
        assert!((dist.probs[0] - 1.0).abs() < 1e-12);
        assert!((dist.mean() - expectation(&k, &o).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn born_dimension_mismatch() {
        let mut rng = worker_rng(0, 0);
        assert!(born_sample(&Ket::basis(3, 0).unwrap(), &Observable::sz(), &mut rng).is_err());
    }

    #[test]
    fn singleton_estimate_is_exact() {
        let e = Ensemble::pure(Ket::plus_z());
        let est = estimate_moment(&e, &Observable::sz(), 1, &SamplerConfig::new(4, 200, 50)).unwrap();
        assert_eq!(est.estimate, 0.5);
        assert_eq!(est.stderr, 0.0);
    }

    #[test]
    fn estimate_is_reproducible_and_worker_keyed() {
        let e = Ensemble::zeh_mixture_2();
        let cfg = SamplerConfig::new(42, 500, 100).with_workers(4);
        let a = estimate_moment(&e, &Observable::sx(), 2, &cfg).unwrap();
        let b = estimate_moment(&e, &Observable::sx(), 2, &cfg).unwrap();
        assert_eq!(a.estimate.to_bits(), b.estimate.to_bits());
        assert_eq!(a.stderr.to_bits(), b.stderr.to_bits());
    }

    #[test]
    fn invalid_config_rejected() {
        let e = Ensemble::zeh_mixture_1();
        assert!(estimate_moment(&e, &Observable::sx(), 2, &SamplerConfig::new(0, 0, 10)).is_err());
        assert!(estimate_moment(&e, &Observable::sx(), 0, &SamplerConfig::new(0, 10, 10)).is_err());
    }
}
