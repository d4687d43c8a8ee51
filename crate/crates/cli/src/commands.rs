use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;
use serde_json::json;

use qmix::bipartite::{run_scenario, ScenarioSpec, REDUCED_OPERATOR_LABEL};
use qmix::mixtures::{density_equal, density_of, purity, von_neumann_entropy, EntropyBase, Ensemble};
use qmix::moments::{default_directions, distinguish, distinguish_directions, moment, moment_profile};
use qmix::qalgebra::Observable;
use qmix::sampling::{estimate_moment, within_band, SamplerConfig, BIAS_ALLOWANCE, RNG_ALGORITHM, STDERR_BAND};

use crate::input::{digest, parse_ensemble_file, parse_observable_spec, parse_scenario_file, EnsembleFile};
use crate::report::{density_grid, format_matrix, Report, RngInfo, WitnessRecord};
use crate::CliError;

pub const ZEH_PROFILE_ORDER: u32 = 6;

fn profile_line(name: &str, profile: &[(u32, f64)]) -> String {
    let values: Vec<String> = profile.iter().map(|(n, v)| format!("μ{n}={v:.6}")).collect();
    format!("{name}: {}", values.join("  "))
}

#[derive(Serialize)]
struct ZehDemoResults {
    mixture_a: EnsembleFile,
    mixture_b: EnsembleFile,
    rho_a: Vec<Vec<[f64; 2]>>,
    rho_b: Vec<Vec<[f64; 2]>>,
    density_distance: f64,
    density_equal: bool,
    x_profile_a: Vec<(u32, f64)>,
    x_profile_b: Vec<(u32, f64)>,
    z_profile_a: Vec<(u32, f64)>,
    z_profile_b: Vec<(u32, f64)>,
    entropy_a: f64,
    entropy_b: f64,
    equal_entropy: bool,
}

/// Mixtures `{|±x⟩, ½}` and `{|±y⟩, ½}`: same ρ, same entropy, different
/// even moments of `X = ⟨φ|sx|φ⟩`.
pub fn cmd_zeh_demo(tol: f64) -> Result<Report, CliError> {
    let a = Ensemble::zeh_mixture_1();
    let b = Ensemble::zeh_mixture_2();
    let (sx, sz) = (Observable::sx(), Observable::sz());
    let rho_a = density_of(&a);
    let rho_b = density_of(&b);
    let x_a = moment_profile(&a, &sx, ZEH_PROFILE_ORDER)?;
    let x_b = moment_profile(&b, &sx, ZEH_PROFILE_ORDER)?;
    let z_a = moment_profile(&a, &sz, ZEH_PROFILE_ORDER)?;
    let z_b = moment_profile(&b, &sz, ZEH_PROFILE_ORDER)?;
    let s_a = von_neumann_entropy(&rho_a, EntropyBase::Nat)?;
    let s_b = von_neumann_entropy(&rho_b, EntropyBase::Nat)?;
    let equal = density_equal(&a, &b, tol)?;
    let witness = distinguish(&a, &b, &[sx.clone(), Observable::sy(), sz.clone()], ZEH_PROFILE_ORDER, tol)?;
    let equal_entropy = (s_a - s_b).abs() <= tol;

    let mut report = Report::new("zeh-demo", tol).arg("max_order", ZEH_PROFILE_ORDER);
    let mut h = vec!["mixture a: {|+x>, 1/2; |-x>, 1/2}".to_string(), "mixture b: {|+y>, 1/2; |-y>, 1/2}".into()];
    h.push("rho_a =".into());
    h.extend(format_matrix(&rho_a));
    h.push("rho_b =".into());
    h.extend(format_matrix(&rho_b));
    h.push(format!("density operators equal: {equal} (max entry gap {:.3e})", rho_a.distance(&rho_b)));
    h.push(profile_line("X = <sx> moments, a", &x_a));
    h.push(profile_line("X = <sx> moments, b", &x_b));
    h.push(profile_line("Z = <sz> moments, a", &z_a));
    h.push(profile_line("Z = <sz> moments, b", &z_b));
    h.push(format!("entropy a = {s_a:.12} nat, entropy b = {s_b:.12} nat"));
    match &witness {
        Some(w) => h.push(format!(
            "witness: {} order {}: {:.6} vs {:.6} (gap {:.6})",
            w.observable, w.order, w.value_a, w.value_b, w.gap
        )),
        None => h.push("witness: none found".into()),
    }
    report.human = h;
    if equal_entropy && witness.is_some() {
        report.notes.push("equal entropy, distinct ensembles".into());
    }
    if equal && witness.is_some() {
        report.notes.push("equal density operators, distinct ensembles".into());
    }
    let mut csv = String::from("n,x_a,x_b,z_a,z_b\n");
    for i in 0..x_a.len() {
        let _ = writeln!(csv, "{},{},{},{},{}", x_a[i].0, x_a[i].1, x_b[i].1, z_a[i].1, z_b[i].1);
    }
    report.csv = Some(csv);
    report.witnesses = witness.iter().map(WitnessRecord::from).collect();
    report.results = serde_json::to_value(ZehDemoResults {
        mixture_a: EnsembleFile::from_ensemble(&a, Some("mixture 1")),
        mixture_b: EnsembleFile::from_ensemble(&b, Some("mixture 2")),
        rho_a: density_grid(&rho_a),
        rho_b: density_grid(&rho_b),
        density_distance: rho_a.distance(&rho_b),
        density_equal: equal,
        x_profile_a: x_a,
        x_profile_b: x_b,
        z_profile_a: z_a,
        z_profile_b: z_b,
        entropy_a: s_a,
        entropy_b: s_b,
        equal_entropy,
    })
    .expect("serializable");
    Ok(report)
}

pub fn cmd_moments(file: &Path, observable: &str, max_order: u32, tol: f64) -> Result<Report, CliError> {
    if max_order == 0 {
        return Err(CliError::Usage("--max-order must be at least 1".into()));
    }
    let e = parse_ensemble_file(file)?;
    let o = parse_observable_spec(observable)?;
    let profile = moment_profile(&e, &o, max_order)?;
    let central: Vec<(u32, f64)> = (1..=max_order)
        .map(|n| Ok((n, qmix::moments::central_moment(&e, &o, n)?)))
        .collect::<Result<_, qmix::Error>>()?;
    let trace_mean = density_of(&e).expectation(&o)?;

    let mut report = Report::new("moments", tol)
        .arg("file", file)
        .arg("observable", observable)
        .arg("max_order", max_order);
    report.inputs.push(digest(file)?);
    report.human.push(format!("ensemble: {} members, dim {}", e.len(), e.dim()));
    report.human.push(format!("{:>4}  {:>16}  {:>16}", "n", "moment", "central"));
    for ((n, m), (_, c)) in profile.iter().zip(&central) {
        report.human.push(format!("{n:>4}  {m:>16.12}  {c:>16.12}"));
    }
    report.human.push(format!("Tr(rho O) = {trace_mean:.12}"));
    let mut csv = String::from("n,moment,central_moment\n");
    for ((n, m), (_, c)) in profile.iter().zip(&central) {
        let _ = writeln!(csv, "{n},{m},{c}");
    }
    report.csv = Some(csv);
    report.results = json!({
        "observable": o.label(),
        "profile": profile,
        "central_profile": central,
        "trace_mean": trace_mean,
    });
    Ok(report)
}

pub fn cmd_distinguish(file_a: &Path, file_b: &Path, grid: usize, max_order: u32, tol: f64) -> Result<Report, CliError> {
    if max_order == 0 {
        return Err(CliError::Usage("--max-order must be at least 1".into()));
    }
    let a = parse_ensemble_file(file_a)?;
    let b = parse_ensemble_file(file_b)?;
    if a.dim() != 2 || b.dim() != 2 {
        return Err(CliError::Usage("distinguish scans spin-1/2 directions; both ensembles must have dim 2".into()));
    }
    let dirs = default_directions(grid);
    let witness = distinguish_directions(&a, &b, &dirs, max_order, tol)?;
    let equal = density_equal(&a, &b, tol)?;
    let gap = density_of(&a).distance(&density_of(&b));

    let mut report = Report::new("distinguish", tol)
        .arg("file_a", file_a)
        .arg("file_b", file_b)
        .arg("grid", grid)
        .arg("max_order", max_order);
    report.inputs.push(digest(file_a)?);
    report.inputs.push(digest(file_b)?);
    report.human.push(format!("directions scanned: {} (3 axes + {grid} grid)", dirs.len()));
    report.human.push(format!("density operators equal: {equal} (max entry gap {gap:.3e})"));
    match &witness {
        Some(w) => report.human.push(format!(
            "witness: {} order {}: {:.12} vs {:.12} (gap {:.6e})",
            w.observable, w.order, w.value_a, w.value_b, w.gap
        )),
        None => {
            report.human.push("witness: none found".into());
            report.notes.push("no witness in the scanned set; this does not prove the ensembles equal".into());
        }
    }
    if equal && witness.is_some() {
        report.notes.push("equal density operators, distinct ensembles".into());
    }
    let mut csv = String::from("observable,n,moment_a,moment_b\n");
    for d in &dirs {
        let o = qmix::qalgebra::spin_component(d);
        for n in 1..=max_order {
            let _ = writeln!(csv, "\"{}\",{n},{},{}", o.label(), moment(&a, &o, n)?, moment(&b, &o, n)?);
        }
    }
    report.csv = Some(csv);
    report.witnesses = witness.iter().map(WitnessRecord::from).collect();
    report.results = json!({
        "directions_scanned": dirs.len(),
        "density_equal": equal,
        "density_distance": gap,
        "witness_found": witness.is_some(),
    });
    Ok(report)
}

pub fn cmd_entropy(file: &Path, tol: f64) -> Result<Report, CliError> {
    let e = parse_ensemble_file(file)?;
    let rho = density_of(&e);
    let nat = von_neumann_entropy(&rho, EntropyBase::Nat)?;
    let bits = von_neumann_entropy(&rho, EntropyBase::Bits)?;
    let p = purity(&rho);
    let spectrum = rho.eigenvalues();
    let pure = (p - 1.0).abs() <= qmix::EPS_EIG;

    let mut report = Report::new("entropy", tol).arg("file", file);
    report.inputs.push(digest(file)?);
    report.human.push("rho =".into());
    report.human.extend(format_matrix(&rho));
    report.human.push(format!("eigenvalues: {spectrum:?}"));
    report.human.push(format!("purity Tr(rho^2) = {p:.12}{}", if pure { " (projector)" } else { "" }));
    report.human.push(format!("entropy = {nat:.12} nat = {bits:.12} bit"));
    report.csv = Some(format!("entropy_nat,entropy_bits,purity\n{nat},{bits},{p}\n"));
    report.results = json!({
        "rho": density_grid(&rho),
        "eigenvalues": spectrum,
        "purity": p,
        "projector": pure,
        "entropy_nat": nat,
        "entropy_bits": bits,
    });
    Ok(report)
}

pub fn cmd_simulate(file: &Path, observable: &str, order: u32, cfg: SamplerConfig, tol: f64) -> Result<Report, CliError> {
    if order == 0 {
        return Err(CliError::Usage("--order must be at least 1".into()));
    }
    cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    let e = parse_ensemble_file(file)?;
    let o = parse_observable_spec(observable)?;
    let est = estimate_moment(&e, &o, order, &cfg)?;
    let exact = moment(&e, &o, order)?;
    let ok = within_band(&est, exact);

    let mut report = Report::new("simulate", tol)
        .arg("file", file)
        .arg("observable", observable)
        .arg("order", order)
        .arg("seed", cfg.seed)
        .arg("n_outer", cfg.n_outer)
        .arg("m_inner", cfg.m_inner)
        .arg("workers", cfg.workers);
    report.inputs.push(digest(file)?);
    report.rng = Some(RngInfo { algorithm: RNG_ALGORITHM.into(), seed: cfg.seed, workers: cfg.workers });
    report.human.push(format!("observable {}, order {order}", o.label()));
    report.human.push(format!("estimate = {:.9} ± {:.3e} (stderr)", est.estimate, est.stderr));
    report.human.push(format!("exact    = {exact:.9}"));
    report.human.push(format!(
        "agreement within {STDERR_BAND}·stderr + {BIAS_ALLOWANCE:e}: {ok}"
    ));
    report.notes.push(format!(
        "plug-in estimator: powered per-preparation sample means; bias is O(1/m_inner) and not corrected (m_inner = {})",
        cfg.m_inner
    ));
    if cfg.m_inner == 1 {
        report.notes.push("m_inner = 1 estimates moments of single outcomes, not of X".into());
    }
    report.csv = Some(format!("estimate,stderr,exact\n{},{},{}\n", est.estimate, est.stderr, exact));
    report.results = json!({
        "observable": o.label(),
        "order": order,
        "estimate": est.estimate,
        "stderr": est.stderr,
        "exact": exact,
        "stderr_band": STDERR_BAND,
        "bias_allowance": BIAS_ALLOWANCE,
        "within_band": ok,
    });
    Ok(report)
}

/// Spin-spin fixture used when no scenario file is given.
pub fn default_scenario() -> ScenarioSpec {
    ScenarioSpec::spin_spin(1.0, (0..=16).map(|i| i as f64 * PI / 8.0).collect())
}

pub fn cmd_landau_feynman(scenario: Option<&Path>, tol: f64) -> Result<Report, CliError> {
    let spec = match scenario {
        Some(p) => parse_scenario_file(p)?,
        None => default_scenario(),
    };
    let traj = run_scenario(&spec)?;

    let mut report = Report::new("landau-feynman", tol)
        .arg("scenario", scenario.map_or("builtin:spin-spin".to_string(), |p| p.display().to_string()));
    if let Some(p) = scenario {
        report.inputs.push(digest(p)?);
    }
    report.human.push(format!("coupling window [{}, {}]; subsystem 1: {REDUCED_OPERATOR_LABEL}", spec.t0, spec.t1));
    report.human.push(format!(
        "{:>12}  {:>14}  {:>14}  {:>14}  {:>12}",
        "t", "purity", "entropy", "global purity", "LvN resid"
    ));
    let mut csv = String::from("t,purity,entropy,global_purity,lvn_residual\n");
    let mut points = Vec::new();
    for p in &traj.points {
        let resid = p.lvn_residual.map_or("-".to_string(), |r| format!("{r:.2e}"));
        report.human.push(format!(
            "{:>12.6}  {:>14.10}  {:>14.10}  {:>14.10}  {:>12}",
            p.t, p.purity, p.entropy, p.global_purity, resid
        ));
        let _ = writeln!(
            csv,
            "{},{},{},{},{}",
            p.t,
            p.purity,
            p.entropy,
            p.global_purity,
            p.lvn_residual.map_or(String::new(), |r| r.to_string())
        );
        points.push(json!({
            "t": p.t,
            "coupled": p.t <= spec.t1,
            "reduced_operator": density_grid(&p.reduced),
            "purity": p.purity,
            "entropy": p.entropy,
            "global_purity": p.global_purity,
            "lvn_residual": p.lvn_residual,
        }));
    }
    let violations = traj.lvn_violations();
    if violations.is_empty() {
        report.notes.push("post-decoupling evolution of the reduced operator is unitary on subsystem 1".into());
    } else {
        report.notes.push(format!("LvN check violated at t = {violations:?}"));
    }
    report.csv = Some(csv);
    report.results = json!({
        "label": REDUCED_OPERATOR_LABEL,
        "t0": spec.t0,
        "t1": spec.t1,
        "dims": spec.dims(),
        "trajectory": points,
        "lvn_violations": violations,
    });
    Ok(report)
}
