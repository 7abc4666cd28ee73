//! Plain-text command reports.

use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    Pass,
    Error,
    VerificationFailed,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        match self {
            ExitStatus::Pass => 0,
            ExitStatus::Error => 1,
            ExitStatus::VerificationFailed => 2,
        }
    }
}

/// Key/value measurements, free-form detail lines and named checks. The exit status is
/// [`ExitStatus::VerificationFailed`] as soon as one check fails.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunReport {
    pub command: String,
    pub measurements: Vec<(String, String)>,
    pub details: Vec<String>,
    pub checks: Vec<(String, bool)>,
}

pub fn sci(x: f64) -> String {
    format!("{x:.6e}")
}

impl RunReport {
    pub fn new(command: impl Into<String>) -> Self {
        Self { command: command.into(), ..Self::default() }
    }

    pub fn measure(&mut self, key: &str, value: impl fmt::Display) -> &mut Self {
        self.measurements.push((key.to_owned(), value.to_string()));
        self
    }

    pub fn detail(&mut self, line: impl Into<String>) -> &mut Self {
        self.details.push(line.into());
        self
    }

    pub fn check(&mut self, name: &str, ok: bool) -> &mut Self {
        self.checks.push((name.to_owned(), ok));
        self
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|(_, ok)| *ok)
    }

    pub fn status(&self) -> ExitStatus {
        if self.passed() {
            ExitStatus::Pass
        } else {
            ExitStatus::VerificationFailed
        }
    }

    pub fn value(&self, key: &str) -> Option<&str> {
        self.measurements.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "fail"
    }
}

impl fmt::Display for RunReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.command)?;
        let width = self.measurements.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
        for (k, v) in &self.measurements {
            writeln!(f, "  {k:<width$}  {v}")?;
        }
        for line in &self.details {
            writeln!(f, "  {line}")?;
        }
        for (name, ok) in &self.checks {
            writeln!(f, "check {name}: {}", verdict(*ok))?;
        }
        if !self.checks.is_empty() {
            writeln!(f, "result: {}", verdict(self.passed()))?;
        }
        Ok(())
    }
}
