//! Central configurations: configurations where `∇I = ω² ∇U` for a scalar `ω²`, i.e. critical
//! points of `U` restricted to an ellipsoid `I = k`.
//!
//! Under the harmonic potential `∇U = (M/2) ∇I` everywhere, so every configuration is central
//! with `ω² = 2/M`. For three unit masses this produces the isosceles continuum of
//! [`theorem1_family`].

use std::f64::consts::FRAC_PI_2;

use crate::corpus::Sample;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::mechanics::{
    self, center_of_mass, field_dot, field_norm, inertia_gradient, moment_of_inertia, potential_gradient, MassVector,
    PlanarConfiguration, Point, Potential,
};
use crate::saari::{rigid_fit_in, FitGroup};

/// Default tolerance on the normalized CC residual.
pub const DEFAULT_CC_TOL: f64 = 1e-9;
/// Tolerance used when deciding rotational equivalence inside family checks.
pub const DEFAULT_EQUIVALENCE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CCReport {
    /// `|∇I - ω² ∇U| / (1 + |∇I|)`.
    pub residual: f64,
    pub omega_squared: f64,
    pub is_cc: bool,
    pub tol: f64,
}

/// Least-squares `ω²` in `∇I = ω² ∇U` and the normalized misfit.
pub fn cc_residual(
    config: &PlanarConfiguration,
    masses: &MassVector,
    potential: &Potential,
    tol: f64,
) -> Result<CCReport> {
    let grad_u = potential_gradient(potential, config, masses)?;
    let grad_i = inertia_gradient(config, masses);
    let norm_u = field_norm(&grad_u);
    let norm_i = field_norm(&grad_i);
    if norm_u <= 1e-14 * (1.0 + norm_i) {
        return Err(Error::DegenerateGradient { grad_u: norm_u, grad_i: norm_i });
    }
    let omega_squared = field_dot(&grad_i, &grad_u) / (norm_u * norm_u);
    let misfit: Vec<Point> = grad_i.iter().zip(&grad_u).map(|(gi, gu)| gi - gu * omega_squared).collect();
    let residual = field_norm(&misfit) / (1.0 + norm_i);
    Ok(CCReport { residual, omega_squared, is_cc: residual <= tol, tol })
}

/// CC residuals of a batch of systems under one potential.
pub fn cc_residuals(samples: &[Sample], potential: &Potential, tol: f64, exec: Execution) -> Vec<Result<CCReport>> {
    exec.map(samples, |s| cc_residual(&s.config, &s.masses, potential, tol))
}

/// Outcome of [`refine_cc`].
#[derive(Debug, Clone, PartialEq)]
pub struct Refinement {
    pub config: PlanarConfiguration,
    /// Gradient steps taken after the initial rescale.
    pub iterations: usize,
    pub report: CCReport,
}

const INITIAL_STEP: f64 = 0.1;
const MAX_HALVINGS: usize = 30;

fn rescale_to(config: &PlanarConfiguration, masses: &MassVector, k: f64) -> Result<PlanarConfiguration> {
    let inertia = moment_of_inertia(config, masses);
    if !(inertia.is_finite() && inertia > 0.0) {
        return Err(Error::DegenerateGradient { grad_u: 0.0, grad_i: 0.0 });
    }
    Ok(config.scaled_about(center_of_mass(config, masses), (k / inertia).sqrt()))
}

/// Component of `∇U` tangent to the level set of `I`.
fn projected_gradient(config: &PlanarConfiguration, masses: &MassVector, potential: &Potential) -> Result<Vec<Point>> {
    let grad_u = potential_gradient(potential, config, masses)?;
    let grad_i = inertia_gradient(config, masses);
    let ii = field_dot(&grad_i, &grad_i);
    if ii == 0.0 {
        return Err(Error::DegenerateGradient { grad_u: field_norm(&grad_u), grad_i: 0.0 });
    }
    let along = field_dot(&grad_u, &grad_i) / ii;
    Ok(grad_u.iter().zip(&grad_i).map(|(gu, gi)| gu - gi * along).collect())
}

/// Projected gradient descent for a central configuration on `{I = k}`.
///
/// Each iteration steps along the tangential part of `∓∇U` and rescales about the center of
/// mass back onto `I = k`. The step starts at 0.1 and is halved (at most 30 times) until the
/// norm of the projected gradient shrinks; that test also picks the sign of the step.
pub fn refine_cc(
    config0: &PlanarConfiguration,
    masses: &MassVector,
    potential: &Potential,
    k: f64,
    max_iter: usize,
    tol: f64,
) -> Result<Refinement> {
    if !(k.is_finite() && k > 0.0) {
        return Err(Error::InvalidArgument(format!("k must be positive, got {k}")));
    }
    let mut config = rescale_to(config0, masses, k)?;
    let mut iterations = 0;
    loop {
        let report = cc_residual(&config, masses, potential, tol)?;
        if report.is_cc {
            return Ok(Refinement { config, iterations, report });
        }
        if iterations == max_iter {
            return Err(Error::NoConvergence { iterations, residual: report.residual });
        }
        let direction = projected_gradient(&config, masses, potential)?;
        let current = field_norm(&direction);
        let mut step = INITIAL_STEP;
        let mut accepted = None;
        'search: for _ in 0..=MAX_HALVINGS {
            // descent on U first, then ascent: Newtonian CCs such as Lagrange's are maxima of U on I = k
            for sign in [-1.0, 1.0] {
                let moved = PlanarConfiguration::new(
                    config.points().iter().zip(&direction).map(|(q, d)| q + d * (sign * step)).collect(),
                )?;
                let trial = rescale_to(&moved, masses, k)?;
                // a singular trial point (a collision) counts as an increase
                if let Ok(p) = projected_gradient(&trial, masses, potential) {
                    if field_norm(&p) < current {
                        accepted = Some(trial);
                        break 'search;
                    }
                }
            }
            step *= 0.5;
        }
        match accepted {
            Some(next) => config = next,
            None => return Err(Error::NoConvergence { iterations, residual: report.residual }),
        }
        iterations += 1;
    }
}

/// Isosceles three-body configuration on `I = k`:
/// `q1 = (0, y1)`, `q2 = (-x3, 0)`, `q3 = (x3, 0)` with `y1 = √(3k/2) cos η`, `x3 = √(k/2) sin η`.
pub fn theorem1_family(k: f64, eta: f64) -> Result<PlanarConfiguration> {
    if !(k.is_finite() && k > 0.0) {
        return Err(Error::InvalidArgument(format!("k must be positive, got {k}")));
    }
    let y1 = (1.5 * k).sqrt() * eta.cos();
    let x3 = (0.5 * k).sqrt() * eta.sin();
    PlanarConfiguration::new(vec![Point::new(0.0, y1), Point::new(-x3, 0.0), Point::new(x3, 0.0)])
}

/// Best rotation-only residual after moving both configurations to their center-of-mass frames.
pub fn rotation_residual(a: &PlanarConfiguration, b: &PlanarConfiguration, masses: &MassVector) -> f64 {
    rigid_fit_in(&a.to_cm_frame(masses), &b.to_cm_frame(masses), masses, FitGroup::Rotations).residual
}

/// Whether some rotation maps labeled body `b_i` onto `a_i` for every `i`, up to translation.
pub fn rotationally_equivalent(
    a: &PlanarConfiguration,
    b: &PlanarConfiguration,
    masses: &MassVector,
    tol: f64,
) -> bool {
    let scale = moment_of_inertia(a, masses).max(moment_of_inertia(b, masses)).sqrt();
    rotation_residual(a, b, masses) <= tol * (1.0 + scale)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FamilySample {
    pub eta: f64,
    pub config: PlanarConfiguration,
    pub report: CCReport,
    pub inertia: f64,
    pub potential: f64,
    /// Base length `r23 = 2 x3`.
    pub r23: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum FamilyFailure {
    NotCentral { index: usize, residual: f64 },
    InertiaMismatch { index: usize, inertia: f64 },
    Equivalent { first: usize, second: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct FamilyReport {
    pub k: f64,
    pub samples: Vec<FamilySample>,
    pub verdict: bool,
    pub failure: Option<FamilyFailure>,
    /// Whether `r23` strictly increases along the samples.
    pub r23_increasing: bool,
    /// `max U - min U` over the samples.
    pub potential_spread: f64,
}

/// `n_samples` parameters spread uniformly over `(0, π/2]`.
pub fn family_parameters(n_samples: usize) -> Vec<f64> {
    (1..=n_samples).map(|j| FRAC_PI_2 * j as f64 / n_samples as f64).collect()
}

/// Sample the isosceles family on `I = k` and check each member is a CC on the ellipsoid and
/// that no two members are rotationally equivalent.
pub fn verify_continuum(k: f64, n_samples: usize, tol: f64) -> Result<FamilyReport> {
    verify_continuum_with(k, n_samples, tol, Execution::default())
}

pub fn verify_continuum_with(k: f64, n_samples: usize, tol: f64, exec: Execution) -> Result<FamilyReport> {
    if n_samples < 2 {
        return Err(Error::InvalidArgument(format!("need at least two family samples, got {n_samples}")));
    }
    let masses = MassVector::unit(3)?;
    let potential = Potential::Harmonic;
    let etas = family_parameters(n_samples);
    let samples = exec
        .map(&etas, |&eta| -> Result<FamilySample> {
            let config = theorem1_family(k, eta)?;
            let report = cc_residual(&config, &masses, &potential, tol)?;
            let inertia = moment_of_inertia(&config, &masses);
            let u = mechanics::potential_energy(&potential, &config, &masses)?;
            let r23 = (config.points()[2] - config.points()[1]).norm();
            Ok(FamilySample { eta, config, report, inertia, potential: u, r23 })
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;

    let mut failure = samples.iter().enumerate().find_map(|(index, s)| {
        if !s.report.is_cc {
            Some(FamilyFailure::NotCentral { index, residual: s.report.residual })
        } else if (s.inertia - k).abs() > 1e-12 * k {
            Some(FamilyFailure::InertiaMismatch { index, inertia: s.inertia })
        } else {
            None
        }
    });
    if failure.is_none() {
        let hits = exec.map_range(samples.len(), |i| {
            (i + 1..samples.len())
                .find(|&j| {
                    rotationally_equivalent(&samples[i].config, &samples[j].config, &masses, DEFAULT_EQUIVALENCE_TOL)
                })
                .map(|j| FamilyFailure::Equivalent { first: i, second: j })
        });
        failure = hits.into_iter().flatten().next();
    }

    let r23_increasing = samples.windows(2).all(|w| w[1].r23 > w[0].r23);
    let (lo, hi) = samples
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), s| (lo.min(s.potential), hi.max(s.potential)));
    Ok(FamilyReport { k, verdict: failure.is_none(), failure, samples, r23_increasing, potential_spread: hi - lo })
}
