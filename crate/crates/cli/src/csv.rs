//! Trajectory CSV: header `t,qx1,qy1,vx1,vy1,...,I,U,E`, every value with 17 significant digits.

use std::io::{self, Write};

use harmonia::dynamics::Trajectory;
use harmonia::mechanics::{moment_of_inertia, potential_energy, total_energy};
use harmonia::{MassVector, PhaseState, PlanarConfiguration, Point, Potential};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CsvError {
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error(transparent)]
    Core(#[from] harmonia::Error),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// One row's trailing `I, U, E` columns.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Diagnostics {
    pub inertia: f64,
    pub potential: f64,
    pub energy: f64,
}

pub fn format_number(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn header(n: usize) -> String {
    let mut cols = vec!["t".to_owned()];
    for i in 1..=n {
        cols.extend([format!("qx{i}"), format!("qy{i}"), format!("vx{i}"), format!("vy{i}")]);
    }
    cols.extend(["I", "U", "E"].map(str::to_owned));
    cols.join(",")
}

pub fn diagnostics(state: &PhaseState, potential: &Potential, masses: &MassVector) -> harmonia::Result<Diagnostics> {
    Ok(Diagnostics {
        inertia: moment_of_inertia(&state.config, masses),
        potential: potential_energy(potential, &state.config, masses)?,
        energy: total_energy(potential, state, masses)?,
    })
}

pub fn write_trajectory(traj: &Trajectory, out: &mut impl Write) -> Result<(), CsvError> {
    writeln!(out, "{}", header(traj.masses().len()))?;
    for s in traj.samples() {
        let d = diagnostics(s, traj.potential(), traj.masses())?;
        let mut row = vec![format_number(s.t)];
        for (q, v) in s.config.points().iter().zip(&s.velocities) {
            row.extend([q.x, q.y, v.x, v.y].map(format_number));
        }
        row.extend([d.inertia, d.potential, d.energy].map(format_number));
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}

/// Parse CSV text back into a trajectory plus the `I, U, E` columns as written.
pub fn read_trajectory(
    text: &str,
    potential: Potential,
    masses: MassVector,
) -> Result<(Trajectory, Vec<Diagnostics>), CsvError> {
    let n = masses.len();
    let mut lines = text.lines().enumerate();
    let malformed = |line: usize, message: String| CsvError::Malformed { line: line + 1, message };

    let (_, head) = lines.next().ok_or_else(|| malformed(0, "empty input".into()))?;
    if head != header(n) {
        return Err(malformed(0, format!("header does not match {n} bodies")));
    }

    let mut samples = Vec::new();
    let mut diags = Vec::new();
    for (idx, line) in lines {
        let values: Vec<f64> = line
            .split(',')
            .map(|f| f.parse::<f64>().map_err(|e| malformed(idx, format!("`{f}`: {e}"))))
            .collect::<Result<_, _>>()?;
        if values.len() != 4 * n + 4 {
            return Err(malformed(idx, format!("expected {} columns, got {}", 4 * n + 4, values.len())));
        }
        let body = &values[1..1 + 4 * n];
        let q = body.chunks(4).map(|c| Point::new(c[0], c[1])).collect();
        let v = body.chunks(4).map(|c| Point::new(c[2], c[3])).collect();
        let config = PlanarConfiguration::new(q)?;
        samples.push(PhaseState::new(config, v, values[0])?);
        let tail = &values[1 + 4 * n..];
        diags.push(Diagnostics { inertia: tail[0], potential: tail[1], energy: tail[2] });
    }
    Ok((Trajectory::new(samples, potential, masses)?, diags))
}
