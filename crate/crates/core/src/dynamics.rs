//! Integration of `m_i q̈_i = -∂U/∂q_i`, trajectory containers, and the exact harmonic
//! solutions used as oracles.

use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::Matrix2;

use crate::error::{Error, Result};
use crate::mechanics::{
    self, center_of_mass, MassVector, PhaseState, PlanarConfiguration, Point, Potential, COLLISION_DISTANCE,
};

pub const DEFAULT_SAMPLE_STRIDE: usize = 10;

/// Per-body accelerations `a_i = -(1/m_i) ∂U/∂q_i`.
pub fn accelerations(potential: &Potential, config: &PlanarConfiguration, masses: &MassVector) -> Result<Vec<Point>> {
    let grad = mechanics::potential_gradient(potential, config, masses)?;
    Ok(grad.iter().zip(masses.as_slice()).map(|(g, m)| -g / *m).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    VelocityVerlet,
    Rk4,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorSpec {
    pub method: Method,
    pub dt: f64,
    /// Duration of the run, measured from the initial state's time.
    pub t_end: f64,
    pub sample_stride: usize,
}

impl IntegratorSpec {
    pub fn new(method: Method, dt: f64, t_end: f64) -> Result<Self> {
        Self::with_stride(method, dt, t_end, DEFAULT_SAMPLE_STRIDE)
    }

    pub fn with_stride(method: Method, dt: f64, t_end: f64, sample_stride: usize) -> Result<Self> {
        let spec = Self { method, dt, t_end, sample_stride };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::InvalidIntegrator(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.t_end.is_finite() && self.t_end >= self.dt) {
            return Err(Error::InvalidIntegrator(format!(
                "t_end must be at least dt, got t_end = {} with dt = {}",
                self.t_end, self.dt
            )));
        }
        if self.sample_stride == 0 {
            return Err(Error::InvalidIntegrator("sample_stride must be positive".into()));
        }
        Ok(())
    }

    /// Step sizes covering `t_end`: whole `dt` steps plus one shorter closing step if needed.
    fn steps(&self) -> (usize, Option<f64>) {
        let whole = (self.t_end / self.dt + 1e-9).floor() as usize;
        let rest = self.t_end - whole as f64 * self.dt;
        if rest > 1e-9 * self.dt {
            (whole, Some(rest))
        } else {
            (whole, None)
        }
    }
}

/// Time-ordered samples of one solution.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    samples: Vec<PhaseState>,
    potential: Potential,
    masses: MassVector,
}

impl Trajectory {
    pub fn new(samples: Vec<PhaseState>, potential: Potential, masses: MassVector) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::InvalidArgument("trajectory needs at least one sample".into()));
        }
        for s in &samples {
            if !s.is_finite() {
                return Err(Error::NonFiniteState { t: s.t });
            }
            if s.config.len() != masses.len() || s.velocities.len() != masses.len() {
                return Err(Error::LengthMismatch { expected: masses.len(), actual: s.config.len() });
            }
        }
        if let Some(w) = samples.windows(2).find(|w| w[1].t <= w[0].t) {
            return Err(Error::InvalidArgument(format!(
                "sample times must be strictly increasing ({} then {})",
                w[0].t, w[1].t
            )));
        }
        Ok(Self { samples, potential, masses })
    }

    /// Sample an exact solution at the given times.
    pub fn from_fn(
        times: &[f64],
        potential: Potential,
        masses: MassVector,
        solution: impl Fn(f64) -> Result<PhaseState>,
    ) -> Result<Self> {
        let samples = times.iter().map(|&t| solution(t)).collect::<Result<Vec<_>>>()?;
        Self::new(samples, potential, masses)
    }

    pub fn samples(&self) -> &[PhaseState] {
        &self.samples
    }

    pub fn potential(&self) -> &Potential {
        &self.potential
    }

    pub fn masses(&self) -> &MassVector {
        &self.masses
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn first(&self) -> &PhaseState {
        &self.samples[0]
    }

    pub fn last(&self) -> &PhaseState {
        self.samples.last().expect("nonempty")
    }

    pub fn times(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.t).collect()
    }

    pub fn energies(&self) -> Result<Vec<f64>> {
        self.samples.iter().map(|s| mechanics::total_energy(&self.potential, s, &self.masses)).collect()
    }

    pub fn inertias(&self) -> Vec<f64> {
        self.samples.iter().map(|s| mechanics::moment_of_inertia(&s.config, &self.masses)).collect()
    }
}

/// `times.len() == intervals + 1` evenly spaced points covering `[start, end]`.
pub fn uniform_times(start: f64, end: f64, intervals: usize) -> Vec<f64> {
    let intervals = intervals.max(1);
    (0..=intervals).map(|j| start + (end - start) * j as f64 / intervals as f64).collect()
}

struct Stepper<'a> {
    potential: &'a Potential,
    masses: &'a MassVector,
}

impl Stepper<'_> {
    fn accel(&self, q: &[Point]) -> Result<Vec<Point>> {
        accelerations(self.potential, &PlanarConfiguration::from_points_unchecked(q.to_vec()), self.masses)
    }

    fn verlet(&self, q: &mut [Point], v: &mut [Point], a: &mut Vec<Point>, h: f64) -> Result<()> {
        for ((qi, vi), ai) in q.iter_mut().zip(v.iter_mut()).zip(a.iter()) {
            *vi += ai * (0.5 * h);
            *qi += *vi * h;
        }
        *a = self.accel(q)?;
        for (vi, ai) in v.iter_mut().zip(a.iter()) {
            *vi += ai * (0.5 * h);
        }
        Ok(())
    }

    fn rk4(&self, q: &mut [Point], v: &mut [Point], h: f64) -> Result<()> {
        let shifted = |base: &[Point], d: &[Point], s: f64| -> Vec<Point> {
            base.iter().zip(d).map(|(b, di)| b + di * s).collect()
        };
        let k1q = v.to_vec();
        let k1v = self.accel(q)?;
        let k2q = shifted(v, &k1v, 0.5 * h);
        let k2v = self.accel(&shifted(q, &k1q, 0.5 * h))?;
        let k3q = shifted(v, &k2v, 0.5 * h);
        let k3v = self.accel(&shifted(q, &k2q, 0.5 * h))?;
        let k4q = shifted(v, &k3v, h);
        let k4v = self.accel(&shifted(q, &k3q, h))?;
        for i in 0..q.len() {
            q[i] += (k1q[i] + (k2q[i] + k3q[i]) * 2.0 + k4q[i]) * (h / 6.0);
            v[i] += (k1v[i] + (k2v[i] + k3v[i]) * 2.0 + k4v[i]) * (h / 6.0);
        }
        Ok(())
    }
}

/// Integrate from `state0` for `spec.t_end`, keeping every `spec.sample_stride`-th state plus
/// the first and last.
pub fn integrate(
    state0: &PhaseState,
    spec: &IntegratorSpec,
    potential: &Potential,
    masses: &MassVector,
) -> Result<Trajectory> {
    spec.validate()?;
    potential.validate()?;
    if state0.config.len() != masses.len() || state0.velocities.len() != masses.len() {
        return Err(Error::LengthMismatch { expected: masses.len(), actual: state0.config.len() });
    }
    if !state0.is_finite() {
        return Err(Error::NonFiniteState { t: state0.t });
    }

    let stepper = Stepper { potential, masses };
    let mut q = state0.config.points().to_vec();
    let mut v = state0.velocities.clone();
    let mut a = stepper.accel(&q)?;
    let (whole, closing) = spec.steps();
    let total_steps = whole + usize::from(closing.is_some());

    let mut previous = q.clone();
    let mut samples = Vec::with_capacity(total_steps / spec.sample_stride + 2);
    samples.push(state0.clone());
    for step in 1..=total_steps {
        let (h, t) = if step <= whole {
            (spec.dt, state0.t + step as f64 * spec.dt)
        } else {
            (closing.expect("closing step"), state0.t + spec.t_end)
        };
        match spec.method {
            Method::VelocityVerlet => stepper.verlet(&mut q, &mut v, &mut a, h)?,
            Method::Rk4 => stepper.rk4(&mut q, &mut v, h)?,
        }
        let finite = q.iter().chain(v.iter()).all(|p| p.x.is_finite() && p.y.is_finite());
        if !finite {
            return Err(Error::NonFiniteState { t });
        }
        if potential.is_singular() {
            check_swept_collisions(&previous, &q)?;
        }
        previous.copy_from_slice(&q);
        if step % spec.sample_stride == 0 || step == total_steps {
            samples.push(PhaseState {
                config: PlanarConfiguration::from_points_unchecked(q.clone()),
                velocities: v.clone(),
                t,
            });
        }
    }
    Trajectory::new(samples, *potential, masses.clone())
}

/// Fail if the straight-line relative motion of any pair over the last step passes within
/// `COLLISION_DISTANCE`; a fixed step would otherwise jump across a head-on collision.
fn check_swept_collisions(before: &[Point], after: &[Point]) -> Result<()> {
    for i in 0..before.len() {
        for j in i + 1..before.len() {
            let d0 = before[i] - before[j];
            let d1 = after[i] - after[j];
            let dd = d1 - d0;
            let len2 = dd.norm_squared();
            let s = if len2 > 0.0 { (-d0.dot(&dd) / len2).clamp(0.0, 1.0) } else { 0.0 };
            let closest = (d0 + dd * s).norm();
            if closest < COLLISION_DISTANCE {
                return Err(Error::CollisionSingularity { i, j, distance: closest });
            }
        }
    }
    Ok(())
}

/// `max_t |H(t) - H(t0)| / max(1, |H(t0)|)`.
pub fn energy_drift(traj: &Trajectory) -> Result<f64> {
    let energies = traj.energies()?;
    let h0 = energies[0];
    let scale = h0.abs().max(1.0);
    Ok(energies.iter().map(|h| (h - h0).abs() / scale).fold(0.0, f64::max))
}

fn require_positive(name: &str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("{name} must be positive, got {value}")))
    }
}

/// Exact rhombus solution of the four-body harmonic problem with constant `I = k`:
/// `y1 = √(k/2) cos 2t`, `x3 = √(k/2) sin 2t`, `x2 = -x3`, `y4 = -y1`.
pub fn closed_form_rhombus(k: f64, t: f64) -> Result<PhaseState> {
    require_positive("k", k)?;
    let amp = (k / 2.0).sqrt();
    let (s, c) = (2.0 * t).sin_cos();
    let (y1, x3) = (amp * c, amp * s);
    let (dy1, dx3) = (-2.0 * amp * s, 2.0 * amp * c);
    let config = PlanarConfiguration::new(vec![
        Point::new(0.0, y1),
        Point::new(-x3, 0.0),
        Point::new(x3, 0.0),
        Point::new(0.0, -y1),
    ])?;
    let velocities = vec![Point::new(0.0, dy1), Point::new(-dx3, 0.0), Point::new(dx3, 0.0), Point::new(0.0, -dy1)];
    Ok(PhaseState { config, velocities, t })
}

/// Amplitude `√(k/2)` of each rhombus coordinate; `FRAC_1_SQRT_2` at `k = 1`.
pub fn rhombus_amplitude(k: f64) -> f64 {
    FRAC_1_SQRT_2 * k.sqrt()
}

/// Rigid rotation of `config0` about the origin at angular speed `√M`.
///
/// Under the harmonic potential with the center of mass at the origin every body obeys
/// `q̈_i = -M q_i`, so uniform rotation at `√M` is an exact solution and a relative
/// equilibrium for any shape.
pub fn rotating_re_solution(config0: &PlanarConfiguration, masses: &MassVector, t: f64) -> Result<PhaseState> {
    let cm = center_of_mass(config0, masses);
    if cm.norm() > 1e-12 {
        return Err(Error::CmNotAtOrigin(cm.norm()));
    }
    let omega = masses.total().sqrt();
    let config = config0.rotated(omega * t);
    let quarter_turn = Matrix2::new(0.0, -1.0, 1.0, 0.0);
    let velocities = config.points().iter().map(|q| quarter_turn * q * omega).collect();
    Ok(PhaseState { config, velocities, t })
}

/// A close approach between two bodies found in a sampled trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Encounter {
    pub t: f64,
    /// Zero-based body indices, `i < j`.
    pub pair: (usize, usize),
    pub distance: f64,
}

/// Samples where `r_ij` is a local minimum (over neighboring samples) and at most `threshold`.
pub fn encounters(traj: &Trajectory, threshold: f64) -> Vec<Encounter> {
    let dists: Vec<_> = traj.samples().iter().map(|s| mechanics::mutual_distances(&s.config)).collect();
    let n = traj.masses().len();
    let mut found = Vec::new();
    for (idx, table) in dists.iter().enumerate() {
        for (i, j, r) in table.pairs() {
            if r > threshold {
                continue;
            }
            let prev = idx.checked_sub(1).map(|p| dists[p].get(i, j));
            let next = dists.get(idx + 1).map(|d| d.get(i, j));
            if prev.is_none_or(|p| r <= p) && next.is_none_or(|x| r < x) {
                found.push(Encounter { t: traj.samples()[idx].t, pair: (i, j), distance: r });
            }
        }
    }
    debug_assert!(found.iter().all(|e| e.pair.1 < n));
    found
}
