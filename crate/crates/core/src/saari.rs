//! Relative-equilibrium detection and the constant-inertia counterexample.
//!
//! A solution is a relative equilibrium when a single orthogonal 2×2 matrix `Ω(t)` carries the
//! reference configuration onto `q(t)` for every body, about the origin. For each sample the
//! best such `Ω` has a closed form in the plane, so the rigidity defect of a trajectory is the
//! supremum over samples of the best-fit residual.

use std::f64::consts::FRAC_PI_4;

use nalgebra::Matrix2;

use crate::dynamics::{self, closed_form_rhombus, integrate, IntegratorSpec, Method, Trajectory};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::mechanics::{self, moment_of_inertia, MassVector, PhaseState, PlanarConfiguration, Point, Potential};

/// Default relative tolerance on inertia constancy.
pub const DEFAULT_INERTIA_TOL: f64 = 1e-8;
/// Default rigidity tolerance, scaled by `√I(t0)`.
pub const DEFAULT_RIGIDITY_TOL: f64 = 1e-6;

/// Which part of O(2) a fit may use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitGroup {
    /// Rotations and reflections.
    Orthogonal,
    /// Rotations only (det = +1).
    Rotations,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RigidFitResult {
    pub omega: Matrix2<f64>,
    /// `√(min Σ m_i |q_i - Ω r_i|² / M)`.
    pub residual: f64,
    pub det_sign: i8,
    /// The reference had every body at the origin, so `Ω` is undetermined and set to identity.
    pub degenerate: bool,
}

/// Best orthogonal `Ω` (about the origin) minimizing `Σ m_i |config_i - Ω reference_i|²`.
pub fn rigid_fit(config: &PlanarConfiguration, reference: &PlanarConfiguration, masses: &MassVector) -> RigidFitResult {
    rigid_fit_in(config, reference, masses, FitGroup::Orthogonal)
}

pub fn rigid_fit_in(
    config: &PlanarConfiguration,
    reference: &PlanarConfiguration,
    masses: &MassVector,
    group: FitGroup,
) -> RigidFitResult {
    assert_eq!(config.len(), reference.len(), "rigid_fit needs equally sized configurations");
    assert_eq!(config.len(), masses.len(), "rigid_fit needs one mass per body");
    let q = config.points();
    let r = reference.points();
    let m = masses.as_slice();

    let misfit = |omega: &Matrix2<f64>| -> f64 {
        let sum: f64 = (0..q.len()).map(|i| m[i] * (q[i] - omega * r[i]).norm_squared()).sum();
        (sum / masses.total()).sqrt()
    };

    if r.iter().all(|p| *p == Point::zeros()) {
        let omega = Matrix2::identity();
        return RigidFitResult { omega, residual: misfit(&omega), det_sign: 1, degenerate: true };
    }

    // Maximizing Σ m q·(R(θ) s) over θ gives θ = atan2(Σ m s×q, Σ m s·q).
    let best_rotation = |flip: f64| -> Matrix2<f64> {
        let (mut dot, mut cross) = (0.0, 0.0);
        for i in 0..q.len() {
            let s = Point::new(r[i].x, flip * r[i].y);
            dot += m[i] * s.dot(&q[i]);
            cross += m[i] * (s.x * q[i].y - s.y * q[i].x);
        }
        mechanics::rotation(cross.atan2(dot)) * Matrix2::new(1.0, 0.0, 0.0, flip)
    };

    let proper = best_rotation(1.0);
    let proper_res = misfit(&proper);
    if group == FitGroup::Rotations {
        return RigidFitResult { omega: proper, residual: proper_res, det_sign: 1, degenerate: false };
    }
    let improper = best_rotation(-1.0);
    let improper_res = misfit(&improper);
    if improper_res < proper_res {
        RigidFitResult { omega: improper, residual: improper_res, det_sign: -1, degenerate: false }
    } else {
        RigidFitResult { omega: proper, residual: proper_res, det_sign: 1, degenerate: false }
    }
}

/// `max_t |I(t) - I(t0)| / I(t0)`.
pub fn inertia_variation(traj: &Trajectory) -> Result<f64> {
    let inertias = traj.inertias();
    let i0 = inertias[0];
    if i0 <= 0.0 {
        return Err(Error::ZeroInertia);
    }
    Ok(inertias.iter().map(|i| (i - i0).abs() / i0).fold(0.0, f64::max))
}

/// Largest spread `max_t r_ij - min_t r_ij` over all pairs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistanceCertificate {
    /// Zero-based pair `i < j`.
    pub pair: (usize, usize),
    pub min_distance: f64,
    pub max_distance: f64,
    /// `max r_ij² - min r_ij²` for the selected pair.
    pub squared_swing: f64,
}

impl DistanceCertificate {
    pub fn variation(&self) -> f64 {
        self.max_distance - self.min_distance
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RelativeEquilibriumCheck {
    pub is_relative_equilibrium: bool,
    /// Supremum over samples of the rigid-fit residual against the first sample.
    pub defect: f64,
    /// Sample time where `defect` is attained.
    pub worst_time: f64,
    pub worst_fit: RigidFitResult,
    pub distances: DistanceCertificate,
    /// `√I(t0)`, the scale the tolerance is applied against.
    pub scale: f64,
    pub degenerate_reference: bool,
}

pub fn is_relative_equilibrium(traj: &Trajectory, tol: f64) -> RelativeEquilibriumCheck {
    is_relative_equilibrium_with(traj, tol, Execution::default())
}

pub fn is_relative_equilibrium_with(traj: &Trajectory, tol: f64, exec: Execution) -> RelativeEquilibriumCheck {
    let masses = traj.masses();
    let reference = &traj.first().config;
    let fits = exec.map(traj.samples(), |s| rigid_fit(&s.config, reference, masses));
    let (worst_idx, worst_fit) =
        fits.iter()
            .enumerate()
            .fold((0, fits[0]), |best, (i, f)| if f.residual > best.1.residual { (i, *f) } else { best });

    let distances = distance_certificate(traj, exec);
    let scale = moment_of_inertia(reference, masses).sqrt();
    let degenerate_reference = fits[0].degenerate;
    let is_re = if degenerate_reference { distances.variation() <= tol } else { worst_fit.residual <= tol * scale };
    RelativeEquilibriumCheck {
        is_relative_equilibrium: is_re,
        defect: worst_fit.residual,
        worst_time: traj.samples()[worst_idx].t,
        worst_fit,
        distances,
        scale,
        degenerate_reference,
    }
}

fn distance_certificate(traj: &Trajectory, exec: Execution) -> DistanceCertificate {
    let tables = exec.map(traj.samples(), |s| mechanics::mutual_distances(&s.config));
    let n = traj.masses().len();
    let mut best: Option<DistanceCertificate> = None;
    for i in 0..n {
        for j in i + 1..n {
            let (lo, hi) = tables
                .iter()
                .map(|t| t.get(i, j))
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| (lo.min(r), hi.max(r)));
            let cert = DistanceCertificate {
                pair: (i, j),
                min_distance: lo,
                max_distance: hi,
                squared_swing: hi * hi - lo * lo,
            };
            if best.is_none_or(|b| cert.variation() > b.variation()) {
                best = Some(cert);
            }
        }
    }
    best.expect("at least two bodies")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    RelativeEquilibrium,
    ConstantInertiaNotRe,
    VaryingInertia,
}

impl Classification {
    pub fn as_str(&self) -> &'static str {
        match self {
            Classification::RelativeEquilibrium => "relative_equilibrium",
            Classification::ConstantInertiaNotRe => "constant_inertia_not_re",
            Classification::VaryingInertia => "varying_inertia",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SaariReport {
    pub inertia_variation: f64,
    pub rigidity_defect: f64,
    pub classification: Classification,
    pub certificate: RelativeEquilibriumCheck,
    pub tol_inertia: f64,
    pub tol_rigidity: f64,
}

/// Classify a trajectory by inertia constancy and rigidity.
pub fn saari_check(traj: &Trajectory, tol_inertia: f64, tol_rigidity: f64) -> Result<SaariReport> {
    let variation = inertia_variation(traj)?;
    let re = is_relative_equilibrium(traj, tol_rigidity);
    let classification = if variation > tol_inertia {
        Classification::VaryingInertia
    } else if re.is_relative_equilibrium {
        Classification::RelativeEquilibrium
    } else {
        Classification::ConstantInertiaNotRe
    };
    Ok(SaariReport {
        inertia_variation: variation,
        rigidity_defect: re.defect,
        classification,
        certificate: re,
        tol_inertia,
        tol_rigidity,
    })
}

/// Initial state of the rhombus counterexample: the closed form at `t = 0`.
pub fn build_theorem2_state(k: f64) -> Result<PhaseState> {
    closed_form_rhombus(k, 0.0)
}

/// Number of uniform intervals used to sample the closed form.
pub const COUNTEREXAMPLE_INTERVALS: usize = 1000;

#[derive(Debug, Clone, PartialEq)]
pub struct CounterexampleReport {
    pub k: f64,
    pub method: Method,
    /// Max over sample times of the gap between the closed form's second derivative and the
    /// accelerations of the potential.
    pub acceleration_error: f64,
    pub acceleration_ok: bool,
    pub closed_form_inertia_variation: f64,
    pub integrated_inertia_variation: f64,
    pub integrated_position_error: f64,
    pub inertia_ok: bool,
    pub re_check: RelativeEquilibriumCheck,
    /// Rigid-fit residual between the configurations at `t = π/4` and `t = 0`.
    pub witness_defect: f64,
    pub non_rigid_ok: bool,
    pub sample_times: usize,
}

impl CounterexampleReport {
    pub fn passed(&self) -> bool {
        self.acceleration_ok && self.inertia_ok && self.non_rigid_ok
    }
}

/// Uniform grid over `[0, t_end]` merged with every multiple of `π/4` it contains, so the
/// collision instants of the rhombus are sampled exactly.
pub fn counterexample_times(t_end: f64) -> Vec<f64> {
    let mut times = dynamics::uniform_times(0.0, t_end, COUNTEREXAMPLE_INTERVALS);
    let quarters = (t_end / FRAC_PI_4 + 1e-12).floor() as usize;
    times.extend((0..=quarters).map(|j| j as f64 * FRAC_PI_4).filter(|t| *t <= t_end));
    times.sort_by(|a, b| a.partial_cmp(b).expect("finite times"));
    times.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * t_end.max(1.0));
    times
}

/// Check the three claims about the rhombus solution: it solves the equations of motion, it has
/// constant `I = k` (exactly and under numerical integration), and it is not rigid.
pub fn verify_counterexample(k: f64, t_end: f64, dt: f64) -> Result<CounterexampleReport> {
    verify_counterexample_with(k, t_end, dt, Method::Rk4)
}

pub fn verify_counterexample_with(k: f64, t_end: f64, dt: f64, method: Method) -> Result<CounterexampleReport> {
    for (name, value) in [("k", k), ("t_end", t_end), ("dt", dt)] {
        if !(value.is_finite() && value > 0.0) {
            return Err(Error::InvalidArgument(format!("{name} must be positive, got {value}")));
        }
    }
    let masses = MassVector::unit(4)?;
    let potential = Potential::Harmonic;
    let amp = dynamics::rhombus_amplitude(k);

    let times = counterexample_times(t_end);
    let closed = Trajectory::from_fn(&times, potential, masses.clone(), |t| closed_form_rhombus(k, t))?;

    // (a) accelerations from U against d²/dt² of the closed form
    let errors = Execution::default().map(closed.samples(), |s| -> Result<f64> {
        let acc = dynamics::accelerations(&potential, &s.config, &masses)?;
        let (sin, cos) = (2.0 * s.t).sin_cos();
        let (y1dd, x3dd) = (-4.0 * amp * cos, -4.0 * amp * sin);
        let exact = [Point::new(0.0, y1dd), Point::new(-x3dd, 0.0), Point::new(x3dd, 0.0), Point::new(0.0, -y1dd)];
        Ok(acc.iter().zip(&exact).map(|(a, e)| (a - e).norm()).fold(0.0, f64::max))
    });
    let acceleration_error = errors.into_iter().collect::<Result<Vec<_>>>()?.into_iter().fold(0.0, f64::max);
    let acceleration_ok = acceleration_error <= 1e-10 * (1.0 + 4.0 * amp);

    // (b) inertia constancy, closed form and integrated
    let closed_form_inertia_variation = inertia_variation(&closed)?;
    let spec = IntegratorSpec::with_stride(method, dt, t_end, dynamics::DEFAULT_SAMPLE_STRIDE)?;
    let integrated = integrate(&build_theorem2_state(k)?, &spec, &potential, &masses)?;
    let integrated_inertia_variation = inertia_variation(&integrated)?;
    let integrated_position_error = integrated
        .samples()
        .iter()
        .map(|s| -> Result<f64> {
            let exact = closed_form_rhombus(k, s.t)?;
            Ok(s.config.points().iter().zip(exact.config.points()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    let inertia_ok = closed_form_inertia_variation <= 1e-12 && integrated_inertia_variation <= 1e-8;

    // (c) no orthogonal Ω maps q(0) onto q(t) for all t
    let re_check = is_relative_equilibrium(&closed, DEFAULT_RIGIDITY_TOL);
    let witness = closed_form_rhombus(k, FRAC_PI_4)?;
    let witness_defect = rigid_fit(&witness.config, &closed.first().config, &masses).residual;
    let non_rigid_ok = !re_check.is_relative_equilibrium && re_check.defect > 0.0 && witness_defect > 0.0;

    Ok(CounterexampleReport {
        k,
        method,
        acceleration_error,
        acceleration_ok,
        closed_form_inertia_variation,
        integrated_inertia_variation,
        integrated_position_error,
        inertia_ok,
        re_check,
        witness_defect,
        non_rigid_ok,
        sample_times: times.len(),
    })
}
