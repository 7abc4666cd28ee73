//! End-to-end acceptance gate. Prints one `PASS`/`FAIL` line per criterion and exits nonzero if
//! any fails. Randomized criteria draw from the corpus seeded by `HARMONIA_SEED`.

use std::f64::consts::{FRAC_PI_3, PI, TAU};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use harmonia::central_config::{cc_residual, refine_cc};
use harmonia::corpus::{seed_from_env, Corpus};
use harmonia::dynamics::{
    closed_form_rhombus, energy_drift, integrate, rotating_re_solution, uniform_times, IntegratorSpec, Method,
    Trajectory,
};
use harmonia::mechanics::{
    field_norm, inertia_gradient, moment_of_inertia, mutual_distances, potential_energy, potential_gradient,
};
use harmonia::saari::{build_theorem2_state, saari_check, Classification, DEFAULT_INERTIA_TOL, DEFAULT_RIGIDITY_TOL};
use harmonia::{MassVector, PhaseState, PlanarConfiguration, Point, Potential};
use rand::Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn reproduce(which: &str) -> Result<(String, Duration), String> {
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_harmonia"))
        .args(["reproduce", which])
        .output()
        .map_err(|e| format!("spawn failed: {e}"))?;
    let elapsed = start.elapsed();
    let stdout = String::from_utf8_lossy(&out.stdout).into_owned();
    ensure(out.status.code() == Some(0), || {
        format!("exit {:?}\n{stdout}{}", out.status.code(), String::from_utf8_lossy(&out.stderr))
    })?;
    Ok((stdout, elapsed))
}

fn field<'a>(report: &'a str, key: &str) -> Option<&'a str> {
    report
        .lines()
        .filter_map(|l| l.trim().split_once(char::is_whitespace))
        .find(|(k, _)| *k == key)
        .map(|(_, v)| v.trim())
}

fn measurement(report: &str, key: &str) -> Result<f64, String> {
    field(report, key).and_then(|v| v.parse().ok()).ok_or_else(|| format!("no numeric `{key}` in report"))
}

fn theorem1() -> Outcome {
    let (report, elapsed) = reproduce("theorem1")?;
    // sample rows: j, eta, residual, inertia, r23
    let rows: Vec<Vec<f64>> = report
        .lines()
        .map(|l| l.split_whitespace().map(str::parse::<f64>).collect::<Result<Vec<_>, _>>())
        .filter_map(|r| r.ok())
        .filter(|r| r.len() == 5)
        .collect();
    ensure(rows.len() == 64, || format!("{} sample rows", rows.len()))?;
    let worst = rows.iter().map(|r| r[2]).fold(0.0, f64::max);
    ensure(worst <= 1e-12, || format!("residual {worst:e}"))?;
    let gap = rows.iter().map(|r| (r[3] - 1.0).abs()).fold(0.0, f64::max);
    ensure(gap <= 1e-12, || format!("|I - 1| = {gap:e}"))?;
    ensure(rows.windows(2).all(|w| w[1][4] > w[0][4]), || "r23 not increasing".into())?;
    ensure(report.contains("check inequivalent: pass"), || "equivalent pair found".into())?;
    ensure(elapsed < Duration::from_secs(1), || format!("took {elapsed:?}"))?;
    Ok(format!("64 samples, max residual {worst:.1e}, {elapsed:.0?}"))
}

fn theorem2() -> Outcome {
    let (report, elapsed) = reproduce("theorem2")?;
    ensure(measurement(&report, "sample_times")? >= 1000.0, || "fewer than 1000 times".into())?;
    let acc = measurement(&report, "acceleration_error")?;
    ensure(acc <= 1e-10, || format!("acceleration error {acc:e}"))?;
    let closed = measurement(&report, "closed_form_inertia_variation")?;
    ensure(closed <= 1e-12, || format!("closed-form inertia variation {closed:e}"))?;
    let integrated = measurement(&report, "integrated_inertia_variation")?;
    ensure(integrated <= 1e-8, || format!("rk4 inertia variation {integrated:e}"))?;
    let defect = measurement(&report, "rigidity_defect")?;
    ensure(defect > 1e-2, || format!("rigidity defect {defect:e}"))?;
    ensure(field(&report, "distance_pair") == Some("1-4"), || "certificate pair is not 1-4".into())?;
    let swing = measurement(&report, "squared_swing")?;
    ensure((swing - 2.0).abs() <= 1e-6, || format!("r14 swing {swing}"))?;
    ensure(report.contains("check r14_swing: pass") && report.contains("result: pass"), || report.clone())?;
    ensure(elapsed < Duration::from_secs(5), || format!("took {elapsed:?}"))?;
    Ok(format!("defect {defect:.3e}, r14^2 swing {swing}, {elapsed:.0?}"))
}

fn everywhere_central() -> Outcome {
    let corpus = Corpus::new(seed_from_env()).systems(1000, 2..=6, 0.0);
    let mut worst = 0.0f64;
    for s in &corpus {
        let r = cc_residual(&s.config, &s.masses, &Potential::Harmonic, 1e-9).map_err(|e| e.to_string())?;
        ensure(r.is_cc, || format!("residual {:e}", r.residual))?;
        let gap = (r.omega_squared - 2.0 / s.masses.total()).abs();
        ensure(gap <= 1e-9, || format!("omega^2 off by {gap:e}"))?;
        worst = worst.max(r.residual);
    }
    Ok(format!("1000 configurations, max residual {worst:.1e}"))
}

fn oracle_equivalence() -> Outcome {
    let spec = IntegratorSpec::with_stride(Method::Rk4, 1e-3, TAU, 1).map_err(|e| e.to_string())?;
    let start = build_theorem2_state(1.0).map_err(|e| e.to_string())?;
    let traj =
        integrate(&start, &spec, &Potential::Harmonic, &MassVector::unit(4).unwrap()).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for s in traj.samples() {
        let exact = closed_form_rhombus(1.0, s.t).map_err(|e| e.to_string())?;
        for (a, b) in s.config.points().iter().zip(exact.config.points()) {
            worst = worst.max((a - b).norm());
        }
    }
    ensure(worst <= 1e-6, || format!("position error {worst:e}"))?;
    Ok(format!("{} steps, max position error {worst:.1e}", traj.len() - 1))
}

fn re_controls() -> Outcome {
    let mut corpus = Corpus::new(seed_from_env().wrapping_add(5));
    let mut worst = 0.0f64;
    for s in corpus.systems(20, 2..=6, 0.1) {
        let c = s.config.to_cm_frame(&s.masses);
        let period = TAU / s.masses.total().sqrt();
        let traj = Trajectory::from_fn(&uniform_times(0.0, period, 200), Potential::Harmonic, s.masses.clone(), |t| {
            rotating_re_solution(&c, &s.masses, t)
        })
        .map_err(|e| e.to_string())?;
        let r = saari_check(&traj, DEFAULT_INERTIA_TOL, DEFAULT_RIGIDITY_TOL).map_err(|e| e.to_string())?;
        ensure(r.classification == Classification::RelativeEquilibrium, || r.classification.as_str().into())?;
        ensure(r.rigidity_defect <= 1e-9, || format!("defect {:e}", r.rigidity_defect))?;
        worst = worst.max(r.rigidity_defect);
    }

    let masses = corpus.masses(4, 3.0);
    let config = corpus.configuration(4, 2.0);
    let velocities = corpus.points(4, 1.0);
    let spec = IntegratorSpec::new(Method::Rk4, 1e-3, TAU).unwrap();
    let state = PhaseState::new(config, velocities, 0.0).unwrap();
    let traj = integrate(&state, &spec, &Potential::Harmonic, &masses).map_err(|e| e.to_string())?;
    let r = saari_check(&traj, DEFAULT_INERTIA_TOL, DEFAULT_RIGIDITY_TOL).map_err(|e| e.to_string())?;
    ensure(r.classification == Classification::VaryingInertia, || r.classification.as_str().into())?;
    Ok(format!("20 rotating solutions RE (max defect {worst:.1e}); random run {}", r.classification.as_str()))
}

fn finite_difference(config: &PlanarConfiguration, f: impl Fn(&PlanarConfiguration) -> f64) -> Vec<Point> {
    const H: f64 = 1e-6;
    let base = config.points().to_vec();
    let at = |i: usize, axis: usize, h: f64| {
        let mut pts = base.clone();
        pts[i][axis] += h;
        f(&PlanarConfiguration::new(pts).unwrap())
    };
    (0..base.len())
        .map(|i| Point::new((at(i, 0, H) - at(i, 0, -H)) / (2.0 * H), (at(i, 1, H) - at(i, 1, -H)) / (2.0 * H)))
        .collect()
}

fn relative_gap(fd: &[Point], exact: &[Point]) -> f64 {
    let diff: Vec<Point> = fd.iter().zip(exact).map(|(a, b)| a - b).collect();
    field_norm(&diff) / field_norm(exact).max(f64::MIN_POSITIVE)
}

fn gradients() -> Outcome {
    let potentials = [Potential::Harmonic, Potential::Newtonian, Potential::power(3.0, 0.5).unwrap()];
    let corpus = Corpus::new(seed_from_env().wrapping_add(6)).systems(300, 2..=6, 0.1);
    let mut worst = 0.0f64;
    for s in &corpus {
        let gap = relative_gap(
            &finite_difference(&s.config, |c| moment_of_inertia(c, &s.masses)),
            &inertia_gradient(&s.config, &s.masses),
        );
        ensure(gap <= 1e-6, || format!("grad I gap {gap:e}"))?;
        worst = worst.max(gap);
        for p in &potentials {
            let exact = potential_gradient(p, &s.config, &s.masses).map_err(|e| e.to_string())?;
            let fd = finite_difference(&s.config, |c| potential_energy(p, c, &s.masses).unwrap());
            let gap = relative_gap(&fd, &exact);
            ensure(gap <= 1e-6, || format!("{} gap {gap:e}", p.name()))?;
            worst = worst.max(gap);
        }
    }
    Ok(format!("300 systems x 3 potentials, max relative gap {worst:.1e}"))
}

fn conservation() -> Outcome {
    let masses = MassVector::unit(4).unwrap();
    let start = build_theorem2_state(1.0).unwrap();
    let spec = IntegratorSpec::with_stride(Method::VelocityVerlet, 1e-3, 100.0, 100).unwrap();
    let forward = integrate(&start, &spec, &Potential::Harmonic, &masses).map_err(|e| e.to_string())?;
    let drift = energy_drift(&forward).map_err(|e| e.to_string())?;
    ensure(drift < 1e-6, || format!("energy drift {drift:e}"))?;

    let mut back = forward.last().clone();
    back.velocities.iter_mut().for_each(|v| *v = -*v);
    let home = integrate(&back, &spec, &Potential::Harmonic, &masses).map_err(|e| e.to_string())?;
    let miss =
        home.last().config.points().iter().zip(start.config.points()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    ensure(miss <= 1e-9, || format!("reversal misses by {miss:e}"))?;
    Ok(format!("1e5 verlet steps, drift {drift:.1e}, reversal error {miss:.1e}"))
}

fn newtonian_contrast() -> Outcome {
    let mut corpus = Corpus::new(seed_from_env().wrapping_add(7));
    let masses = MassVector::unit(3).unwrap();
    let jittered: Vec<Point> = (0..3)
        .map(|i| {
            let angle = 2.0 * FRAC_PI_3 * i as f64 + PI / 2.0;
            let jitter = Point::new(corpus.rng().gen_range(-0.05..=0.05), corpus.rng().gen_range(-0.05..=0.05));
            Point::new(angle.cos(), angle.sin()) + jitter
        })
        .collect();
    let start = PlanarConfiguration::new(jittered).unwrap();
    let refined = refine_cc(&start, &masses, &Potential::Newtonian, 1.0, 10_000, 1e-12).map_err(|e| e.to_string())?;
    let r = mutual_distances(&refined.config);
    let d: Vec<f64> = r.pairs().map(|(_, _, d)| d).collect();
    let spread = d.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - d.iter().cloned().fold(f64::INFINITY, f64::min);
    ensure(spread <= 1e-8, || format!("side lengths differ by {spread:e}"))?;

    let random = corpus.separated_configuration(3, 10.0, 0.1);
    let report = cc_residual(&random, &masses, &Potential::Newtonian, 1e-9).map_err(|e| e.to_string())?;
    ensure(!report.is_cc, || format!("random triangle central (residual {:e})", report.residual))?;
    Ok(format!(
        "Lagrange recovered in {} iterations (spread {spread:.1e}); random is_cc = false (residual {:.2e})",
        refined.iterations, report.residual
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("1 isosceles family reproduction", theorem1),
        ("2 constant-inertia counterexample reproduction", theorem2),
        ("3 harmonic configurations are all central", everywhere_central),
        ("4 rk4 matches the closed-form rhombus", oracle_equivalence),
        ("5 relative-equilibrium controls", re_controls),
        ("6 gradients match finite differences", gradients),
        ("7 verlet conservation and reversibility", conservation),
        ("8 Newtonian contrast", newtonian_contrast),
    ];
    println!("acceptance (seed {})", seed_from_env());
    let mut failed = 0;
    for (name, run) in criteria {
        match run() {
            Ok(detail) => println!("PASS criterion {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {name}: {why}");
            }
        }
    }
    println!("{} of 8 criteria passed", 8 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
