use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::Value;

use qmix::mixtures::DensityOperator;
use qmix::moments::MomentWitness;

use crate::input::{matrix_to_grid, ComplexPair, InputDigest};

#[derive(Clone, Debug, Serialize)]
pub struct Tolerances {
    pub eps_norm: f64,
    pub eps_herm: f64,
    pub eps_eig: f64,
    pub eps_prob: f64,
    pub eps_scenario: f64,
    pub tol: f64,
}

impl Tolerances {
    pub fn with_tol(tol: f64) -> Self {
        Tolerances {
            eps_norm: qmix::EPS_NORM,
            eps_herm: qmix::EPS_HERM,
            eps_eig: qmix::EPS_EIG,
            eps_prob: qmix::EPS_PROB,
            eps_scenario: qmix::EPS_SCENARIO,
            tol,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RngInfo {
    pub algorithm: String,
    pub seed: u64,
    pub workers: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct WitnessRecord {
    pub observable: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub direction: Option<[f64; 3]>,
    pub order: u32,
    pub value_a: f64,
    pub value_b: f64,
    pub gap: f64,
}

impl From<&MomentWitness> for WitnessRecord {
    fn from(w: &MomentWitness) -> Self {
        WitnessRecord {
            observable: w.observable.clone(),
            direction: w.direction.map(|d| d.components()),
            order: w.order,
            value_a: w.value_a,
            value_b: w.value_b,
            gap: w.gap,
        }
    }
}

/// Machine-readable command output. Field order is fixed by the struct and
/// maps are sorted, so serialization is deterministic.
#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub arguments: BTreeMap<String, Value>,
    pub version: String,
    pub inputs: Vec<InputDigest>,
    pub tolerances: Tolerances,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rng: Option<RngInfo>,
    pub results: Value,
    pub witnesses: Vec<WitnessRecord>,
    pub notes: Vec<String>,
    #[serde(skip)]
    pub human: Vec<String>,
    #[serde(skip)]
    pub csv: Option<String>,
}

impl Report {
    pub fn new(command: &str, tol: f64) -> Self {
        Report {
            command: command.to_string(),
            arguments: BTreeMap::new(),
            version: format!("qmix {}", env!("CARGO_PKG_VERSION")),
            inputs: Vec::new(),
            tolerances: Tolerances::with_tol(tol),
            rng: None,
            results: Value::Null,
            witnesses: Vec::new(),
            notes: Vec::new(),
            human: Vec::new(),
            csv: None,
        }
    }

    pub fn arg(mut self, key: &str, value: impl Serialize) -> Self {
        self.arguments.insert(key.to_string(), serde_json::to_value(value).expect("serializable argument"));
        self
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_human(&self) -> String {
        let mut out = format!("# {} ({})\n", self.command, self.version);
        for line in &self.human {
            out.push_str(line);
            out.push('\n');
        }
        if let Some(rng) = &self.rng {
            out.push_str(&format!("rng: {} seed={} workers={}\n", rng.algorithm, rng.seed, rng.workers));
        }
        for note in &self.notes {
            out.push_str(&format!("note: {note}\n"));
        }
        let t = &self.tolerances;
        out.push_str(&format!(
            "tolerances: tol={:e} eps_norm={:e} eps_herm={:e} eps_eig={:e} eps_prob={:e} eps_scenario={:e}\n",
            t.tol, t.eps_norm, t.eps_herm, t.eps_eig, t.eps_prob, t.eps_scenario
        ));
        out
    }
}

pub fn density_grid(rho: &DensityOperator) -> Vec<Vec<ComplexPair>> {
    matrix_to_grid(rho.matrix())
}

pub fn format_matrix(rho: &DensityOperator) -> Vec<String> {
    let m = rho.matrix();
    (0..m.nrows())
        .map(|r| {
            let cells: Vec<String> = (0..m.ncols())
                .map(|c| format!("{:+.6}{:+.6}i", m[(r, c)].re, m[(r, c)].im))
                .collect();
            format!("  [ {} ]", cells.join("  "))
        })
        .collect()
}
