use std::f64::consts::TAU;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use harmonia::central_config::{cc_residual, refine_cc, verify_continuum, FamilyFailure};
use harmonia::dynamics::{energy_drift, integrate, Trajectory};
use harmonia::mechanics::moment_of_inertia;
use harmonia::saari::{inertia_variation, saari_check, verify_counterexample};
use harmonia::PhaseState;
use thiserror::Error;

use crate::csv::{self, CsvError};
use crate::report::{sci, RunReport};
use crate::scenario::{parse_scenario, Scenario, ScenarioError};

/// Sign-off tolerance for the family residuals in `family` and `reproduce theorem1`.
pub const FAMILY_TOL: f64 = 1e-12;
pub const THEOREM1_SAMPLES: usize = 64;
pub const THEOREM2_DT: f64 = 1e-3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Core(#[from] harmonia::Error),
    #[error(transparent)]
    Csv(#[from] CsvError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Theorem {
    Theorem1,
    Theorem2,
}

pub fn load_scenario(path: &Path) -> Result<Scenario, CliError> {
    let bytes = fs::read(path).map_err(|source| CliError::Io { path: path.to_owned(), source })?;
    Ok(parse_scenario(&bytes)?)
}

fn initial_state(s: &Scenario) -> Result<PhaseState, CliError> {
    Ok(PhaseState::new(s.positions.clone(), s.velocities.clone(), 0.0)?)
}

fn run(s: &Scenario) -> Result<Trajectory, CliError> {
    Ok(integrate(&initial_state(s)?, &s.integrator()?, &s.potential, &s.masses)?)
}

fn pair_label((i, j): (usize, usize)) -> String {
    format!("{}-{}", i + 1, j + 1)
}

/// Integrate the scenario and write the trajectory CSV to `out`.
pub fn cmd_simulate(s: &Scenario, out: &mut impl Write) -> Result<RunReport, CliError> {
    let traj = run(s)?;
    csv::write_trajectory(&traj, out)?;
    let mut r = RunReport::new("simulate");
    r.measure("potential", s.potential.name())
        .measure("bodies", s.masses.len())
        .measure("samples", traj.len())
        .measure("t_end", sci(traj.last().t))
        .measure("energy_drift", sci(energy_drift(&traj)?));
    match inertia_variation(&traj) {
        Ok(v) => r.measure("inertia_variation", sci(v)),
        Err(_) => r.measure("inertia_variation", "undefined (I = 0)"),
    };
    Ok(r)
}

pub fn cmd_cc_check(s: &Scenario) -> Result<RunReport, CliError> {
    let report = cc_residual(&s.positions, &s.masses, &s.potential, s.tolerances.cc)?;
    let mut r = RunReport::new("cc-check");
    r.measure("potential", s.potential.name())
        .measure("residual", sci(report.residual))
        .measure("omega_squared", sci(report.omega_squared))
        .measure("tol", sci(report.tol))
        .measure("central_configuration", report.is_cc);
    Ok(r)
}

pub fn cmd_cc_refine(s: &Scenario, k: f64, max_iter: usize) -> Result<RunReport, CliError> {
    let refined = refine_cc(&s.positions, &s.masses, &s.potential, k, max_iter, s.tolerances.cc)?;
    let mut r = RunReport::new("cc-refine");
    r.measure("potential", s.potential.name())
        .measure("k", sci(k))
        .measure("iterations", refined.iterations)
        .measure("residual", sci(refined.report.residual))
        .measure("omega_squared", sci(refined.report.omega_squared))
        .measure("inertia", sci(moment_of_inertia(&refined.config, &s.masses)));
    for (i, q) in refined.config.points().iter().enumerate() {
        r.detail(format!("q{} = [{}, {}]", i + 1, csv::format_number(q.x), csv::format_number(q.y)));
    }
    Ok(r)
}

fn family_report(command: &str, k: f64, samples: usize) -> Result<RunReport, CliError> {
    let fam = verify_continuum(k, samples, FAMILY_TOL)?;
    let max_residual = fam.samples.iter().map(|s| s.report.residual).fold(0.0, f64::max);
    let max_inertia_gap = fam.samples.iter().map(|s| (s.inertia - k).abs()).fold(0.0, f64::max);
    let equivalent = matches!(fam.failure, Some(FamilyFailure::Equivalent { .. }));

    let mut r = RunReport::new(command);
    r.measure("k", sci(k))
        .measure("samples", fam.samples.len())
        .measure("max_residual", sci(max_residual))
        .measure("max_inertia_gap", sci(max_inertia_gap))
        .measure("potential_spread", sci(fam.potential_spread))
        .measure("r23_increasing", fam.r23_increasing);
    if let Some(FamilyFailure::Equivalent { first, second }) = fam.failure {
        r.measure("equivalent_pair", format!("{} {}", first + 1, second + 1));
    }
    r.detail(format!("{:>4}  {:>12}  {:>12}  {:>12}  {:>12}", "j", "eta", "residual", "inertia", "r23"));
    for (j, s) in fam.samples.iter().enumerate() {
        r.detail(format!(
            "{:>4}  {:>12}  {:>12}  {:>12}  {:>12}",
            j + 1,
            sci(s.eta),
            sci(s.report.residual),
            sci(s.inertia),
            sci(s.r23)
        ));
    }
    r.check("central", fam.samples.iter().all(|s| s.report.is_cc))
        .check("inertia", max_inertia_gap <= 1e-12 * k)
        .check("inequivalent", !equivalent)
        .check("family", fam.verdict);
    Ok(r)
}

pub fn cmd_family(k: f64, samples: usize) -> Result<RunReport, CliError> {
    family_report("family", k, samples)
}

pub fn cmd_saari(s: &Scenario) -> Result<RunReport, CliError> {
    let traj = run(s)?;
    let report = saari_check(&traj, s.tolerances.inertia, s.tolerances.rigidity)?;
    let cert = &report.certificate.distances;
    let mut r = RunReport::new("saari");
    r.measure("classification", report.classification.as_str())
        .measure("inertia_variation", sci(report.inertia_variation))
        .measure("tol_inertia", sci(report.tol_inertia))
        .measure("rigidity_defect", sci(report.rigidity_defect))
        .measure("tol_rigidity", sci(report.tol_rigidity))
        .measure("worst_time", sci(report.certificate.worst_time))
        .measure("distance_pair", pair_label(cert.pair))
        .measure("distance_min", sci(cert.min_distance))
        .measure("distance_max", sci(cert.max_distance))
        .measure("squared_swing", sci(cert.squared_swing));
    Ok(r)
}

pub fn cmd_reproduce(which: Theorem) -> Result<RunReport, CliError> {
    match which {
        Theorem::Theorem1 => family_report("reproduce theorem1", 1.0, THEOREM1_SAMPLES),
        Theorem::Theorem2 => reproduce_theorem2(1.0),
    }
}

fn reproduce_theorem2(k: f64) -> Result<RunReport, CliError> {
    let rep = verify_counterexample(k, TAU, THEOREM2_DT)?;
    let cert = &rep.re_check.distances;
    let swing_ok = cert.pair == (0, 3) && (cert.squared_swing - 2.0 * k).abs() <= 1e-10;
    let mut r = RunReport::new("reproduce theorem2");
    r.measure("k", sci(k))
        .measure("t_end", sci(TAU))
        .measure("dt", sci(THEOREM2_DT))
        .measure("sample_times", rep.sample_times)
        .measure("acceleration_error", sci(rep.acceleration_error))
        .measure("closed_form_inertia_variation", sci(rep.closed_form_inertia_variation))
        .measure("integrated_inertia_variation", sci(rep.integrated_inertia_variation))
        .measure("integrated_position_error", sci(rep.integrated_position_error))
        .measure("rigidity_defect", sci(rep.re_check.defect))
        .measure("worst_time", sci(rep.re_check.worst_time))
        .measure("witness_defect", sci(rep.witness_defect))
        .measure("distance_pair", pair_label(cert.pair))
        .measure("squared_swing", sci(cert.squared_swing));
    r.check("equations_of_motion", rep.acceleration_ok)
        .check("constant_inertia", rep.inertia_ok)
        .check("not_rigid", rep.non_rigid_ok && rep.re_check.defect > 1e-2 * k.sqrt())
        .check("r14_swing", swing_ok);
    Ok(r)
}
