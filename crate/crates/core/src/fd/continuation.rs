use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::grid::{Grid1D, GridField};
use super::newton::{newton_solve, verify_solution, DEFAULT_MAX_ITERS, DEFAULT_TOL};
use super::system::{BranchState, FdContext};
use crate::asymptotics::{predictor_state, ExpansionData};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContinuationOptions {
    pub tol: f64,
    pub max_iters: usize,
    /// 0: eps^{1/2} phi0, 1: adds eps^{3/2} phi.
    pub predictor_order: u8,
    /// Rescale the previous solution by (eps_{n+1}/eps_n)^{1/2} before reuse.
    pub rescale: bool,
    /// A converged point whose omega moves more than this from the previous
    /// point is rejected; past a fold Newton can land on unrelated states.
    pub max_omega_jump: f64,
}

impl Default for ContinuationOptions {
    fn default() -> Self {
        Self {
            tol: DEFAULT_TOL,
            max_iters: DEFAULT_MAX_ITERS,
            predictor_order: 0,
            rescale: true,
            max_omega_jump: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchPoint {
    pub epsilon: f64,
    pub omega: C64,
    pub residual_norm: f64,
    pub newton_iters: usize,
    pub pt_defect: f64,
    pub divergence_jump: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchFailure {
    pub epsilon: f64,
    pub message: String,
}

#[derive(Debug, Clone)]
pub struct BifurcationBranch {
    pub points: Vec<BranchPoint>,
    pub states: Vec<BranchState>,
    pub failure: Option<BranchFailure>,
    pub grid: Grid1D,
    pub config_hash: Option<String>,
}

impl BifurcationBranch {
    pub fn truncated(&self) -> bool {
        self.failure.is_some()
    }
}

/// n points from a to b, equally spaced in log.
pub fn geometric_schedule(a: f64, b: f64, n: usize) -> Result<Vec<f64>> {
    if !(a > 0.0 && b > a) || n < 2 {
        return Err(Error::InvalidParameter(format!(
            "schedule needs 0 < eps_min < eps_max and at least 2 steps (got {a}, {b}, {n})"
        )));
    }
    let r = (b / a).ln() / (n - 1) as f64;
    Ok((0..n).map(|i| if i == n - 1 { b } else { a * (r * i as f64).exp() }).collect())
}

/// Natural-parameter continuation in eps. The first point starts from the
/// predictor, later points from the previous solution.
pub fn continuation(
    schedule: &[f64],
    ctx: &FdContext,
    data: &ExpansionData,
    phi0: &GridField,
    opts: &ContinuationOptions,
) -> Result<BifurcationBranch> {
    if schedule.is_empty() || schedule[0] <= 0.0 || schedule.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter(
            "eps schedule must be positive and strictly increasing".into(),
        ));
    }
    let mut branch = BifurcationBranch {
        points: Vec::new(),
        states: Vec::new(),
        failure: None,
        grid: ctx.grid,
        config_hash: None,
    };
    for (i, &eps) in schedule.iter().enumerate() {
        let guess = match branch.states.last() {
            None => predictor_state(eps, data, phi0, opts.predictor_order)?,
            Some(prev) => {
                let f = if opts.rescale { (eps / prev.epsilon).sqrt() } else { 1.0 };
                let m = prev.dof.len();
                let mut dof = prev.dof.clone();
                dof[..m - 2].iter_mut().for_each(|v| *v *= f);
                BranchState { dof, epsilon: eps }
            }
        };
        let w_prev = branch.points.last().map(|p| p.omega).unwrap_or(guess.omega());
        let solved = newton_solve(&guess, ctx, opts.tol, opts.max_iters).and_then(|out| {
            let jump = (out.state.omega() - w_prev).norm();
            if jump > opts.max_omega_jump {
                Err(Error::Rejected(format!(
                    "omega jumped by {jump:.3e} to {}",
                    out.state.omega()
                )))
            } else {
                Ok(out)
            }
        });
        match solved {
            Ok(out) => {
                let d = verify_solution(&out.state, ctx)?;
                branch.points.push(BranchPoint {
                    epsilon: eps,
                    omega: out.state.omega(),
                    residual_norm: out.residual_norm,
                    newton_iters: out.iterations,
                    pt_defect: d.pt_defect,
                    divergence_jump: d.divergence_jump,
                });
                branch.states.push(out.state);
            }
            Err(e) => {
                branch.failure = Some(BranchFailure {
                    epsilon: eps,
                    message: format!("point {i}: {e}"),
                });
                break;
            }
        }
    }
    Ok(branch)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schedule_endpoints() {
        let s = geometric_schedule(1e-3, 1e-1, 25).unwrap();
        assert_eq!(s.len(), 25);
        assert!((s[0] - 1e-3).abs() < 1e-18 && s[24] == 1e-1);
        assert!(s.windows(2).all(|w| w[1] > w[0]));
        assert!(geometric_schedule(1e-1, 1e-3, 5).is_err());
    }
}
