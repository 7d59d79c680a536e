//! Run configuration read from TOML.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::fd::{geometric_schedule, ContinuationOptions, Grid1D};
use crate::materials::LayeredGeometry;
use crate::roots::Region;
use crate::C64;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    Eigs2,
    Eigs3,
    WidthScan,
    Simplicity,
    Asymptotics,
    Bifurcate,
    Profile,
}

impl Task {
    pub fn name(&self) -> &'static str {
        match self {
            Task::Eigs2 => "eigs2",
            Task::Eigs3 => "eigs3",
            Task::WidthScan => "width-scan",
            Task::Simplicity => "simplicity",
            Task::Asymptotics => "asymptotics",
            Task::Bifurcate => "bifurcate",
            Task::Profile => "profile",
        }
    }

    fn needs_fd(&self) -> bool {
        matches!(self, Task::Asymptotics | Task::Bifurcate | Task::Profile)
    }
}

fn d_eps_min() -> f64 {
    1e-3
}
fn d_eps_max() -> f64 {
    0.1
}
fn d_steps() -> usize {
    25
}
fn d_tol() -> f64 {
    crate::fd::newton::DEFAULT_TOL
}
fn d_max_iters() -> usize {
    crate::fd::newton::DEFAULT_MAX_ITERS
}
fn d_jump() -> f64 {
    0.1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContinuationConfig {
    #[serde(default = "d_eps_min")]
    pub eps_min: f64,
    #[serde(default = "d_eps_max")]
    pub eps_max: f64,
    #[serde(default = "d_steps")]
    pub steps: usize,
    #[serde(default = "d_tol")]
    pub tol: f64,
    #[serde(default = "d_max_iters")]
    pub max_iters: usize,
    #[serde(default)]
    pub predictor_order: u8,
    /// Reuse the previous solution without amplitude rescaling.
    #[serde(default)]
    pub strict_paper_continuation: bool,
    #[serde(default = "d_jump")]
    pub max_omega_jump: f64,
    /// After the geometric part, continue linearly with this step...
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub extra_step: Option<f64>,
    /// ...up to this eps.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub extra_until: Option<f64>,
    /// Write one profile CSV per accepted point.
    #[serde(default)]
    pub profiles: bool,
}

impl Default for ContinuationConfig {
    fn default() -> Self {
        Self {
            eps_min: d_eps_min(),
            eps_max: d_eps_max(),
            steps: d_steps(),
            tol: d_tol(),
            max_iters: d_max_iters(),
            predictor_order: 0,
            strict_paper_continuation: false,
            max_omega_jump: d_jump(),
            extra_step: None,
            extra_until: None,
            profiles: false,
        }
    }
}

impl ContinuationConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |f: &str, msg: String| Err(Error::Config(format!("continuation.{f}: {msg}")));
        if !(self.eps_min > 0.0 && self.eps_min.is_finite()) {
            return bad("eps_min", format!("must be positive, got {}", self.eps_min));
        }
        if !(self.eps_max > self.eps_min && self.eps_max.is_finite()) {
            return bad("eps_max", format!("must exceed eps_min, got {}", self.eps_max));
        }
        if self.steps < 2 {
            return bad("steps", format!("need at least 2, got {}", self.steps));
        }
        if !(self.tol > 0.0) {
            return bad("tol", format!("must be positive, got {}", self.tol));
        }
        if self.max_iters == 0 {
            return bad("max_iters", "must be at least 1".into());
        }
        if self.predictor_order > 1 {
            return bad("predictor_order", format!("must be 0 or 1, got {}", self.predictor_order));
        }
        if !(self.max_omega_jump > 0.0) {
            return bad("max_omega_jump", format!("must be positive, got {}", self.max_omega_jump));
        }
        match (self.extra_step, self.extra_until) {
            (None, None) => {}
            (Some(s), Some(u)) => {
                if !(s > 0.0 && s.is_finite()) {
                    return bad("extra_step", format!("must be positive, got {s}"));
                }
                if !(u > self.eps_max && u.is_finite()) {
                    return bad("extra_until", format!("must exceed eps_max, got {u}"));
                }
            }
            _ => return bad("extra_step", "extra_step and extra_until go together".into()),
        }
        Ok(())
    }

    pub fn schedule(&self) -> Result<Vec<f64>> {
        let mut s = geometric_schedule(self.eps_min, self.eps_max, self.steps)?;
        if let (Some(step), Some(until)) = (self.extra_step, self.extra_until) {
            let mut i = 1;
            loop {
                let e = self.eps_max + step * i as f64;
                if e > until * (1.0 + 1e-12) {
                    break;
                }
                s.push(e);
                i += 1;
            }
        }
        Ok(s)
    }

    pub fn options(&self) -> ContinuationOptions {
        ContinuationOptions {
            tol: self.tol,
            max_iters: self.max_iters,
            predictor_order: self.predictor_order,
            rescale: !self.strict_paper_continuation,
            max_omega_jump: self.max_omega_jump,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanConfig {
    pub omega_min: f64,
    pub omega_max: f64,
    pub points: usize,
    pub m: Vec<i64>,
}

impl ScanConfig {
    pub fn omegas(&self) -> Vec<f64> {
        let n = self.points;
        (0..n)
            .map(|i| self.omega_min + (self.omega_max - self.omega_min) * i as f64 / (n - 1) as f64)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct ProfileConfig {
    /// Sample the linear eigenfunction instead of a nonlinear solution.
    #[serde(default)]
    pub linear: bool,
    /// Amplitude of the nonlinear solution to sample.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub task: Task,
    pub output_dir: PathBuf,
    pub k: f64,
    /// Eigenvalue to follow; the nearest certified root is used.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega0_guess: Option<C64>,
    pub geometry: LayeredGeometry,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub region: Option<Region>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<Grid1D>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub continuation: Option<ContinuationConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scan: Option<ScanConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile: Option<ProfileConfig>,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    /// SHA-256 of the canonical serialization, lowercase hex. output_dir is
    /// left out so the same run written elsewhere carries the same hash.
    pub fn hash(&self) -> Result<String> {
        let mut c = self.clone();
        c.output_dir = PathBuf::from(".");
        let d = Sha256::digest(c.to_toml()?.as_bytes());
        Ok(d.iter().map(|b| format!("{b:02x}")).collect())
    }

    pub fn continuation_or_default(&self) -> ContinuationConfig {
        self.continuation.clone().unwrap_or_default()
    }

    pub fn validate(&self) -> Result<()> {
        let cfg = |m: String| Err(Error::Config(m));
        if self.output_dir.as_os_str().is_empty() {
            return cfg("output_dir: must not be empty".into());
        }
        if !(self.k.is_finite() && self.k > 0.0) {
            return cfg(format!("k: must be positive and finite, got {}", self.k));
        }
        self.geometry
            .validate()
            .map_err(|e| Error::Config(format!("geometry: {e}")))?;
        if let Some(r) = &self.region {
            r.validate().map_err(|e| Error::Config(format!("region: {e}")))?;
        }
        if let Some(w) = self.omega0_guess {
            if !(w.re.is_finite() && w.im.is_finite()) {
                return cfg("omega0_guess: must be finite".into());
            }
        }
        let two = self.geometry.as_two_layer().is_ok();
        let three = self.geometry.as_sandwich().is_ok();
        match self.task {
            Task::Eigs2 if !two => return cfg("geometry: eigs2 needs two layers with the interface at 0".into()),
            Task::Eigs3 | Task::WidthScan if !three => {
                return cfg(format!("geometry: {} needs a three-layer sandwich on (0, d)", self.task.name()));
            }
            Task::Simplicity if !(two || three) => {
                return cfg("geometry: simplicity needs a two-layer or sandwich geometry".into());
            }
            _ => {}
        }
        if matches!(self.task, Task::Eigs2 | Task::Eigs3 | Task::Simplicity) && self.region.is_none() {
            return cfg(format!("region: required for {}", self.task.name()));
        }
        if self.task == Task::WidthScan {
            let Some(s) = &self.scan else {
                return cfg("scan: required for width-scan".into());
            };
            if !(s.omega_min.is_finite() && s.omega_max > s.omega_min && s.omega_max.is_finite()) {
                return cfg("scan: need finite omega_min < omega_max".into());
            }
            if s.points < 2 {
                return cfg(format!("scan.points: need at least 2, got {}", s.points));
            }
            if s.m.is_empty() {
                return cfg("scan.m: list at least one branch index".into());
            }
        }
        if self.task.needs_fd() {
            if !two {
                return cfg(format!("geometry: {} needs two layers with the interface at 0", self.task.name()));
            }
            let Some(g) = &self.grid else {
                return cfg(format!("grid: required for {}", self.task.name()));
            };
            g.validate().map_err(|e| Error::Config(format!("grid: {e}")))?;
            if self.omega0_guess.is_none() && self.region.is_none() {
                return cfg("omega0_guess: give omega0_guess or region to select the eigenvalue".into());
            }
            self.continuation_or_default().validate()?;
        }
        if self.task == Task::Profile {
            let p = self.profile.clone().unwrap_or_default();
            match (p.linear, p.eps) {
                (true, Some(_)) => return cfg("profile: linear and eps are exclusive".into()),
                (false, None) => return cfg("profile: set linear = true or eps".into()),
                (false, Some(e)) if !(e > 0.0 && e.is_finite()) => {
                    return cfg(format!("profile.eps: must be positive, got {e}"));
                }
                _ => {}
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const PT: &str = r#"
task = "bifurcate"
output_dir = "out/pt"
k = 1.0
omega0_guess = [1.79, 0.0]

[geometry]
interfaces = [0.0]

[[geometry.layers]]
model = "drude"
plasma_frequency = 0.5
damping = 0.7
chi3 = [1.0, 0.0]

[[geometry.layers]]
model = "drude"
plasma_frequency = 0.5
damping = -0.7
chi3 = [1.0, 0.0]

[grid]
l = 120.0
n = 17999

[continuation]
eps_max = 0.1
"#;

    #[test]
    fn parses_and_round_trips() {
        let c = RunConfig::from_toml(PT).unwrap();
        c.validate().unwrap();
        assert_eq!(c.task, Task::Bifurcate);
        assert_eq!(c.continuation_or_default().steps, 25);
        let again = RunConfig::from_toml(&c.to_toml().unwrap()).unwrap();
        assert_eq!(again, c);
        assert_eq!(again.hash().unwrap(), c.hash().unwrap());
        assert_eq!(c.hash().unwrap().len(), 64);
    }

    #[test]
    fn unknown_field_names_the_field() {
        let e = RunConfig::from_toml(&PT.replace("k = 1.0", "k = 1.0\nkk = 2")).unwrap_err();
        assert!(e.to_string().contains("kk"), "{e}");
    }

    #[test]
    fn bad_grid_is_rejected() {
        let c = RunConfig::from_toml(&PT.replace("n = 17999", "n = 18000")).unwrap();
        assert!(c.validate().is_err());
        assert!(RunConfig::from_toml(&PT.replace("n = 17999", "n = -5")).is_err());
    }

    #[test]
    fn extended_schedule() {
        let c = ContinuationConfig {
            eps_max: 0.14,
            steps: 30,
            extra_step: Some(0.0025),
            extra_until: Some(0.17),
            ..Default::default()
        };
        c.validate().unwrap();
        let s = c.schedule().unwrap();
        assert_eq!(s.len(), 42);
        assert!((s[41] - 0.17).abs() < 1e-12);
        assert!(s.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn hash_changes_with_content() {
        let a = RunConfig::from_toml(PT).unwrap();
        let b = RunConfig::from_toml(&PT.replace("eps_max = 0.1", "eps_max = 0.2")).unwrap();
        assert_ne!(a.hash().unwrap(), b.hash().unwrap());
    }
}
