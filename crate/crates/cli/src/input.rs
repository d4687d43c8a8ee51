//! Ensemble and scenario files, and the observable spec syntax.
//!
//! Both file kinds are JSON; complex numbers are `[re, im]` pairs and
//! matrices are row-major grids of pairs.

use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use qmix::bipartite::ScenarioSpec;
use qmix::mixtures::{make_ensemble, Ensemble};
use qmix::qalgebra::{spin_component, CMatrix, Ket, Observable, SpinDirection};

use crate::CliError;

pub type ComplexPair = [f64; 2];

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateEntry {
    pub amplitudes: Vec<ComplexPair>,
    pub prob: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub dim: usize,
    pub states: Vec<StateEntry>,
}

impl EnsembleFile {
    pub fn from_ensemble(e: &Ensemble, label: Option<&str>) -> Self {
        EnsembleFile {
            label: label.map(str::to_string),
            dim: e.dim(),
            states: e
                .members()
                .iter()
                .map(|m| StateEntry {
                    amplitudes: m.ket.amplitudes().iter().map(|z| [z.re, z.im]).collect(),
                    prob: m.prob,
                })
                .collect(),
        }
    }

    /// Validates against the ensemble invariants, naming the offending field.
    pub fn to_ensemble(&self, source: &str) -> Result<Ensemble, CliError> {
        let field = |field: String, err: qmix::Error| CliError::Field { origin: source.to_string(), field, err };
        let mut pairs = Vec::with_capacity(self.states.len());
        for (i, s) in self.states.iter().enumerate() {
            if s.amplitudes.len() != self.dim {
                return Err(field(
                    format!("states[{i}].amplitudes"),
                    qmix::Error::DimensionMismatch { expected: self.dim, found: s.amplitudes.len() },
                ));
            }
            let amps: Vec<Complex64> = s.amplitudes.iter().map(|&[re, im]| Complex64::new(re, im)).collect();
            let ket = Ket::new(&amps).map_err(|e| field(format!("states[{i}].amplitudes"), e))?;
            pairs.push((ket, s.prob));
        }
        make_ensemble(pairs).map_err(|e| {
            let name = match &e {
                qmix::Error::NegativeProbability { index, .. } => format!("states[{index}].prob"),
                qmix::Error::ProbabilitySumNotOne { .. } => "states[*].prob".to_string(),
                _ => "states".to_string(),
            };
            field(name, e)
        })
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Io { path: path.to_path_buf(), err: e.to_string() })
}

fn syntax(source: &str, e: serde_json::Error) -> CliError {
    CliError::Syntax { origin: source.to_string(), line: e.line(), column: e.column(), msg: e.to_string() }
}

pub fn parse_ensemble_str(text: &str, source: &str) -> Result<Ensemble, CliError> {
    let file: EnsembleFile = serde_json::from_str(text).map_err(|e| syntax(source, e))?;
    file.to_ensemble(source)
}

pub fn parse_ensemble_file(path: &Path) -> Result<Ensemble, CliError> {
    parse_ensemble_str(&read(path)?, &path.display().to_string())
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub h1: Vec<Vec<ComplexPair>>,
    pub h2: Vec<Vec<ComplexPair>>,
    pub hint: Vec<Vec<ComplexPair>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h1_after: Option<Vec<Vec<ComplexPair>>>,
    pub psi1: Vec<ComplexPair>,
    pub psi2: Vec<ComplexPair>,
    pub t0: f64,
    pub t1: f64,
    pub sample_times: Vec<f64>,
}

pub fn matrix_to_grid(m: &CMatrix) -> Vec<Vec<ComplexPair>> {
    (0..m.nrows()).map(|r| (0..m.ncols()).map(|c| [m[(r, c)].re, m[(r, c)].im]).collect()).collect()
}

fn grid_to_observable(grid: &[Vec<ComplexPair>], name: &str, source: &str) -> Result<Observable, CliError> {
    let n = grid.len();
    let field = |err| CliError::Field { origin: source.to_string(), field: name.to_string(), err };
    if n == 0 {
        return Err(field(qmix::Error::EmptyInput));
    }
    if let Some(row) = grid.iter().find(|r| r.len() != n) {
        return Err(field(qmix::Error::DimensionMismatch { expected: n, found: row.len() }));
    }
    let m = CMatrix::from_fn(n, n, |r, c| Complex64::new(grid[r][c][0], grid[r][c][1]));
    Observable::new(m, name).map_err(field)
}

fn pairs_to_ket(pairs: &[ComplexPair], name: &str, source: &str) -> Result<Ket, CliError> {
    let amps: Vec<Complex64> = pairs.iter().map(|&[re, im]| Complex64::new(re, im)).collect();
    Ket::new(&amps).map_err(|err| CliError::Field { origin: source.to_string(), field: name.to_string(), err })
}

impl ScenarioFile {
    pub fn from_spec(spec: &ScenarioSpec) -> Self {
        let ket = |k: &Ket| k.amplitudes().iter().map(|z| [z.re, z.im]).collect();
        ScenarioFile {
            h1: matrix_to_grid(spec.h1.matrix()),
            h2: matrix_to_grid(spec.h2.matrix()),
            hint: matrix_to_grid(spec.hint.matrix()),
            h1_after: spec.h1_after.as_ref().map(|h| matrix_to_grid(h.matrix())),
            psi1: ket(&spec.psi1),
            psi2: ket(&spec.psi2),
            t0: spec.t0,
            t1: spec.t1,
            sample_times: spec.sample_times.clone(),
        }
    }

    pub fn to_spec(&self, source: &str) -> Result<ScenarioSpec, CliError> {
        let spec = ScenarioSpec {
            h1: grid_to_observable(&self.h1, "h1", source)?,
            h2: grid_to_observable(&self.h2, "h2", source)?,
            hint: grid_to_observable(&self.hint, "hint", source)?,
            h1_after: self.h1_after.as_deref().map(|g| grid_to_observable(g, "h1_after", source)).transpose()?,
            psi1: pairs_to_ket(&self.psi1, "psi1", source)?,
            psi2: pairs_to_ket(&self.psi2, "psi2", source)?,
            t0: self.t0,
            t1: self.t1,
            sample_times: self.sample_times.clone(),
        };
        spec.validate()
            .map_err(|err| CliError::Field { origin: source.to_string(), field: "scenario".into(), err })?;
        Ok(spec)
    }
}

pub fn parse_scenario_str(text: &str, source: &str) -> Result<ScenarioSpec, CliError> {
    let file: ScenarioFile = serde_json::from_str(text).map_err(|e| syntax(source, e))?;
    file.to_spec(source)
}

pub fn parse_scenario_file(path: &Path) -> Result<ScenarioSpec, CliError> {
    parse_scenario_str(&read(path)?, &path.display().to_string())
}

/// `sx | sy | sz | dir:<nx>,<ny>,<nz>`; `dir:` vectors are normalized.
pub fn parse_observable_spec(spec: &str) -> Result<Observable, CliError> {
    let usage = || CliError::Usage(format!("bad observable spec `{spec}`; expected sx, sy, sz or dir:<nx>,<ny>,<nz>"));
    match spec.trim() {
        "sx" => Ok(Observable::sx()),
        "sy" => Ok(Observable::sy()),
        "sz" => Ok(Observable::sz()),
        other => {
            let rest = other.strip_prefix("dir:").ok_or_else(usage)?;
            let parts = rest
                .split(',')
                .map(|p| p.trim().parse::<f64>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|_| usage())?;
            let [x, y, z] = parts[..] else { return Err(usage()) };
            let d = SpinDirection::normalized(x, y, z).map_err(|_| usage())?;
            Ok(spin_component(&d).with_label(other))
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct InputDigest {
    pub path: PathBuf,
    pub sha256: String,
}

pub fn digest(path: &Path) -> Result<InputDigest, CliError> {
    use sha2::{Digest, Sha256};
    let bytes = fs::read(path).map_err(|e| CliError::Io { path: path.to_path_buf(), err: e.to_string() })?;
    let hash = Sha256::digest(&bytes);
    let sha256 = hash.iter().map(|b| format!("{b:02x}")).collect();
    Ok(InputDigest { path: path.to_path_buf(), sha256 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use qmix::EPS_EIG;

    const MIXTURE_1: &str = r#"{
        "label": "mixture 1",
        "dim": 2,
        "states": [
            {"amplitudes": [[0.7071067811865476, 0.0], [0.7071067811865476, 0.0]], "prob": 0.5},
            {"amplitudes": [[0.7071067811865476, 0.0], [-0.7071067811865476, 0.0]], "prob": 0.5}
        ]
    }"#;

    #[test]
    fn parses_mixture_1() {
        let e = parse_ensemble_str(MIXTURE_1, "m1").unwrap();
        assert!(e.same_members(&Ensemble::zeh_mixture_1(), EPS_EIG));
    }

    #[test]
    fn negative_prob_names_state() {
        let text = r#"{"dim": 2, "states": [
            {"amplitudes": [[1, 0], [0, 0]], "prob": 1.1},
            {"amplitudes": [[0, 0], [1, 0]], "prob": -0.1}]}"#;
        let err = parse_ensemble_str(text, "bad.json").unwrap_err();
        match &err {
            CliError::Field { field, err: qmix::Error::NegativeProbability { index: 1, .. }, .. } => {
                assert_eq!(field, "states[1].prob")
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(err.to_string().contains("states[1].prob"));
    }

    #[test]
    fn mixed_lengths_are_dimension_mismatch() {
        let text = r#"{"dim": 2, "states": [
            {"amplitudes": [[1, 0], [0, 0]], "prob": 0.5},
            {"amplitudes": [[0, 0], [1, 0], [0, 0]], "prob": 0.5}]}"#;
        let err = parse_ensemble_str(text, "bad.json").unwrap_err();
        assert!(matches!(err, CliError::Field { err: qmix::Error::DimensionMismatch { expected: 2, found: 3 }, .. }));
    }

    #[test]
    fn syntax_error_has_location() {
        let err = parse_ensemble_str("{\n  \"dim\": 2,\n  \"states\": [\n}", "broken.json").unwrap_err();
        match err {
            CliError::Syntax { line, .. } => assert_eq!(line, 4),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn observable_specs() {
        assert_eq!(parse_observable_spec("sx").unwrap().matrix(), Observable::sx().matrix());
        let d = parse_observable_spec("dir:0,0,2").unwrap();
        assert!(qmix::qalgebra::max_abs_diff(d.matrix(), Observable::sz().matrix()) < 1e-15);
        assert_eq!(d.label(), "dir:0,0,2");
        for bad in ["sw", "dir:1,0", "dir:0,0,0", "dir:a,b,c"] {
            assert!(matches!(parse_observable_spec(bad), Err(CliError::Usage(_))), "{bad}");
        }
    }

    #[test]
    fn scenario_roundtrip() {
        let spec = ScenarioSpec::spin_spin(1.0, vec![0.0, 1.0, std::f64::consts::PI, 4.0]);
        let text = serde_json::to_string(&ScenarioFile::from_spec(&spec)).unwrap();
        let back = parse_scenario_str(&text, "s").unwrap();
        assert_eq!(back.sample_times, spec.sample_times);
        assert!(qmix::qalgebra::max_abs_diff(back.hint.matrix(), spec.hint.matrix()) < 1e-15);
    }

    #[test]
    fn scenario_rejects_non_hermitian() {
        let spec = ScenarioSpec::spin_spin(1.0, vec![0.0, 4.0]);
        let mut file = ScenarioFile::from_spec(&spec);
        file.h1[0][1] = [1.0, 0.0];
        let err = file.to_spec("s").unwrap_err();
        assert!(matches!(err, CliError::Field { ref field, err: qmix::Error::NotHermitian { .. }, .. } if field == "h1"));
    }
}
