//! Masses, planar configurations, potentials and the scalar invariants built from them.
//!
//! The canonical moment of inertia is the mutual-distance form
//! `I = (1/M) Σ_{i<j} m_i m_j r_ij²`, which is translation invariant. The Cartesian form
//! `Σ m_i |q_i|²` is exposed separately; the two agree exactly when the center of mass sits at
//! the origin and otherwise differ by `M |q_cm|²`.

use nalgebra::{Matrix2, Vector2};

use crate::error::{Error, Result};

/// A point (or velocity, or per-body gradient) in the plane.
pub type Point = Vector2<f64>;

/// Separation below which a singular potential is considered to be at a collision.
pub const COLLISION_DISTANCE: f64 = 1e-12;

/// Positive, finite masses of at least two bodies.
#[derive(Debug, Clone, PartialEq)]
pub struct MassVector(Vec<f64>);

impl MassVector {
    pub fn new(masses: Vec<f64>) -> Result<Self> {
        if masses.len() < 2 {
            return Err(Error::InvalidMasses(format!("need at least two bodies, got {}", masses.len())));
        }
        if let Some((i, m)) = masses.iter().enumerate().find(|(_, m)| !(m.is_finite() && **m > 0.0)) {
            return Err(Error::InvalidMasses(format!("m[{i}] = {m} is not a positive finite number")));
        }
        Ok(Self(masses))
    }

    /// `n` unit masses.
    pub fn unit(n: usize) -> Result<Self> {
        Self::new(vec![1.0; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }
}

/// Total mass `M = Σ m_i`.
pub fn total_mass(masses: &MassVector) -> f64 {
    masses.total()
}

/// Positions of `n` labeled bodies in the plane.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanarConfiguration(Vec<Point>);

impl PlanarConfiguration {
    pub fn new(points: Vec<Point>) -> Result<Self> {
        if let Some(i) = points.iter().position(|p| !(p.x.is_finite() && p.y.is_finite())) {
            return Err(Error::InvalidConfiguration(format!("q[{i}] is not finite")));
        }
        Ok(Self(points))
    }

    /// Caller guarantees finiteness (integrator stages check it after each step).
    pub(crate) fn from_points_unchecked(points: Vec<Point>) -> Self {
        Self(points)
    }

    pub fn from_xy(coords: &[[f64; 2]]) -> Result<Self> {
        Self::new(coords.iter().map(|c| Point::new(c[0], c[1])).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn points(&self) -> &[Point] {
        &self.0
    }

    pub fn into_points(self) -> Vec<Point> {
        self.0
    }

    /// Coordinates flattened as `(x_1, y_1, x_2, y_2, ...)`.
    pub fn to_flat(&self) -> Vec<f64> {
        self.0.iter().flat_map(|p| [p.x, p.y]).collect()
    }

    pub fn translated(&self, shift: Point) -> Self {
        Self(self.0.iter().map(|p| p + shift).collect())
    }

    /// Apply a linear map about the origin to every body.
    pub fn transformed(&self, map: &Matrix2<f64>) -> Self {
        Self(self.0.iter().map(|p| map * p).collect())
    }

    pub fn rotated(&self, angle: f64) -> Self {
        self.transformed(&rotation(angle))
    }

    /// Scale every body about `center` by `factor`.
    pub fn scaled_about(&self, center: Point, factor: f64) -> Self {
        Self(self.0.iter().map(|p| center + (p - center) * factor).collect())
    }

    /// The same configuration translated so its center of mass is at the origin.
    pub fn to_cm_frame(&self, masses: &MassVector) -> Self {
        self.translated(-center_of_mass(self, masses))
    }
}

/// Rotation matrix by `angle` radians.
pub fn rotation(angle: f64) -> Matrix2<f64> {
    let (s, c) = angle.sin_cos();
    Matrix2::new(c, -s, s, c)
}

/// Positions, velocities and time.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseState {
    pub config: PlanarConfiguration,
    pub velocities: Vec<Point>,
    pub t: f64,
}

impl PhaseState {
    pub fn new(config: PlanarConfiguration, velocities: Vec<Point>, t: f64) -> Result<Self> {
        if velocities.len() != config.len() {
            return Err(Error::LengthMismatch { expected: config.len(), actual: velocities.len() });
        }
        let state = Self { config, velocities, t };
        if !state.is_finite() {
            return Err(Error::NonFiniteState { t });
        }
        Ok(state)
    }

    /// A state with every body at rest.
    pub fn at_rest(config: PlanarConfiguration, t: f64) -> Self {
        let velocities = vec![Point::zeros(); config.len()];
        Self { config, velocities, t }
    }

    pub fn is_finite(&self) -> bool {
        self.t.is_finite()
            && self.config.points().iter().all(|p| p.x.is_finite() && p.y.is_finite())
            && self.velocities.iter().all(|v| v.x.is_finite() && v.y.is_finite())
    }
}

/// Pair potential selecting `U`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Potential {
    /// `U = (1/2) Σ_{i<j} m_i m_j r_ij² = (M/2) I`.
    Harmonic,
    /// `U = -Σ_{i<j} m_i m_j / r_ij`.
    Newtonian,
    /// `U = a Σ_{i<j} m_i m_j r_ij^α`.
    Power { exponent: f64, coupling: f64 },
}

impl Potential {
    pub fn power(exponent: f64, coupling: f64) -> Result<Self> {
        let p = Potential::Power { exponent, coupling };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Potential::Power { exponent, coupling } => {
                if !exponent.is_finite() || exponent == 0.0 {
                    return Err(Error::InvalidArgument(format!(
                        "power exponent must be finite and nonzero, got {exponent}"
                    )));
                }
                if !(coupling.is_finite() && coupling > 0.0) {
                    return Err(Error::InvalidArgument(format!("power coupling must be positive, got {coupling}")));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// Whether forces blow up at a collision.
    pub fn is_singular(&self) -> bool {
        match *self {
            Potential::Harmonic => false,
            Potential::Newtonian => true,
            Potential::Power { exponent, .. } => exponent <= 1.0,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Potential::Harmonic => "harmonic",
            Potential::Newtonian => "newtonian",
            Potential::Power { .. } => "power",
        }
    }
}

/// Symmetric table of pairwise separations `r_ij`.
#[derive(Debug, Clone, PartialEq)]
pub struct MutualDistanceTable {
    n: usize,
    r: Vec<f64>,
}

impl MutualDistanceTable {
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Zero-based `r_ij`.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.r[i * self.n + j]
    }

    /// Iterate `(i, j, r_ij)` over the pairs `i < j`.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n).flat_map(move |i| (i + 1..self.n).map(move |j| (i, j, self.get(i, j))))
    }

    pub fn satisfies_triangle_inequality(&self, slack: f64) -> bool {
        let n = self.n;
        (0..n).all(|i| (0..n).all(|j| (0..n).all(|k| self.get(i, k) <= self.get(i, j) + self.get(j, k) + slack)))
    }
}

fn assert_paired(config: &PlanarConfiguration, masses: &MassVector) {
    assert_eq!(
        config.len(),
        masses.len(),
        "configuration has {} bodies but {} masses were given",
        config.len(),
        masses.len()
    );
}

fn check_paired(config: &PlanarConfiguration, masses: &MassVector) -> Result<()> {
    if config.len() != masses.len() {
        return Err(Error::LengthMismatch { expected: masses.len(), actual: config.len() });
    }
    Ok(())
}

pub fn mutual_distances(config: &PlanarConfiguration) -> MutualDistanceTable {
    let q = config.points();
    let n = q.len();
    let mut r = vec![0.0; n * n];
    for i in 0..n {
        for j in i + 1..n {
            let d = (q[i] - q[j]).norm();
            r[i * n + j] = d;
            r[j * n + i] = d;
        }
    }
    MutualDistanceTable { n, r }
}

/// `(Σ m_i q_i) / M`.
pub fn center_of_mass(config: &PlanarConfiguration, masses: &MassVector) -> Point {
    assert_paired(config, masses);
    let weighted = config.points().iter().zip(masses.as_slice()).fold(Point::zeros(), |acc, (q, m)| acc + q * *m);
    weighted / masses.total()
}

/// Canonical moment of inertia, `(1/M) Σ_{i<j} m_i m_j r_ij²`.
pub fn moment_of_inertia(config: &PlanarConfiguration, masses: &MassVector) -> f64 {
    assert_paired(config, masses);
    pair_sum(config, masses, |r2| r2) / masses.total()
}

/// `Σ m_i |q_i|²`, measured about the origin.
pub fn moment_of_inertia_cartesian(config: &PlanarConfiguration, masses: &MassVector) -> f64 {
    assert_paired(config, masses);
    config.points().iter().zip(masses.as_slice()).map(|(q, m)| m * q.norm_squared()).sum()
}

fn pair_sum(config: &PlanarConfiguration, masses: &MassVector, f: impl Fn(f64) -> f64) -> f64 {
    let q = config.points();
    let m = masses.as_slice();
    let mut sum = 0.0;
    for i in 0..q.len() {
        for j in i + 1..q.len() {
            sum += m[i] * m[j] * f((q[i] - q[j]).norm_squared());
        }
    }
    sum
}

/// Gradient of the canonical `I`: body `i` gets `2 m_i (q_i - q_cm)`.
pub fn inertia_gradient(config: &PlanarConfiguration, masses: &MassVector) -> Vec<Point> {
    let cm = center_of_mass(config, masses);
    config.points().iter().zip(masses.as_slice()).map(|(q, m)| (q - cm) * (2.0 * m)).collect()
}

pub fn potential_energy(potential: &Potential, config: &PlanarConfiguration, masses: &MassVector) -> Result<f64> {
    check_paired(config, masses)?;
    match *potential {
        Potential::Harmonic => Ok(0.5 * pair_sum(config, masses, |r2| r2)),
        Potential::Newtonian => singular_pair_sum(config, masses, |r| -1.0 / r),
        Potential::Power { exponent, coupling } => {
            if exponent < 0.0 {
                Ok(coupling * singular_pair_sum(config, masses, |r| r.powf(exponent))?)
            } else {
                Ok(coupling * pair_sum(config, masses, |r2| r2.sqrt().powf(exponent)))
            }
        }
    }
}

fn singular_pair_sum(config: &PlanarConfiguration, masses: &MassVector, f: impl Fn(f64) -> f64) -> Result<f64> {
    let q = config.points();
    let m = masses.as_slice();
    let mut sum = 0.0;
    for i in 0..q.len() {
        for j in i + 1..q.len() {
            let r = (q[i] - q[j]).norm();
            if r < COLLISION_DISTANCE {
                return Err(Error::CollisionSingularity { i, j, distance: r });
            }
            sum += m[i] * m[j] * f(r);
        }
    }
    Ok(sum)
}

/// Exact gradient of `U`, one planar vector per body.
pub fn potential_gradient(
    potential: &Potential,
    config: &PlanarConfiguration,
    masses: &MassVector,
) -> Result<Vec<Point>> {
    check_paired(config, masses)?;
    match *potential {
        Potential::Harmonic => {
            let total = masses.total();
            let cm = center_of_mass(config, masses);
            Ok(config.points().iter().zip(masses.as_slice()).map(|(q, m)| (q - cm) * (total * m)).collect())
        }
        // d/dq_i of -m_i m_j / r = m_i m_j (q_i - q_j) / r³
        Potential::Newtonian => pair_gradient(config, masses, true, |r| r.powi(-3)),
        // d/dq_i of a m_i m_j r^α = a α m_i m_j r^(α-2) (q_i - q_j)
        Potential::Power { exponent, coupling } => {
            let scale = coupling * exponent;
            pair_gradient(config, masses, potential.is_singular(), |r| scale * r.powf(exponent - 2.0))
        }
    }
}

/// `grad_i = Σ_j m_i m_j w(r_ij) (q_i - q_j)`.
fn pair_gradient(
    config: &PlanarConfiguration,
    masses: &MassVector,
    singular: bool,
    weight: impl Fn(f64) -> f64,
) -> Result<Vec<Point>> {
    let q = config.points();
    let m = masses.as_slice();
    let mut grad = vec![Point::zeros(); q.len()];
    for i in 0..q.len() {
        for j in i + 1..q.len() {
            let d = q[i] - q[j];
            let r = d.norm();
            if r < COLLISION_DISTANCE {
                if singular {
                    return Err(Error::CollisionSingularity { i, j, distance: r });
                }
                if r == 0.0 {
                    continue;
                }
            }
            let f = d * (m[i] * m[j] * weight(r));
            grad[i] += f;
            grad[j] -= f;
        }
    }
    Ok(grad)
}

pub fn kinetic_energy(velocities: &[Point], masses: &MassVector) -> f64 {
    0.5 * velocities.iter().zip(masses.as_slice()).map(|(v, m)| m * v.norm_squared()).sum::<f64>()
}

/// `H = (1/2) Σ m_i |q̇_i|² + U(q)`.
pub fn total_energy(potential: &Potential, state: &PhaseState, masses: &MassVector) -> Result<f64> {
    if state.velocities.len() != masses.len() {
        return Err(Error::LengthMismatch { expected: masses.len(), actual: state.velocities.len() });
    }
    Ok(kinetic_energy(&state.velocities, masses) + potential_energy(potential, &state.config, masses)?)
}

/// Euclidean norm of a per-body vector field viewed as an element of `R^{2n}`.
pub fn field_norm(field: &[Point]) -> f64 {
    field.iter().map(|p| p.norm_squared()).sum::<f64>().sqrt()
}

/// Dot product of two per-body vector fields in `R^{2n}`.
pub fn field_dot(a: &[Point], b: &[Point]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.dot(y)).sum()
}
