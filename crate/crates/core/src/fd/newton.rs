use num_complex::Complex64 as C64;

use super::grid::GridField;
use super::system::{assemble, nonlinear_mode, real_jacobian, BranchState, FdContext};
use crate::error::{Error, Result};

pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_ITERS: usize = 50;
/// Converged states with max |U| below this are the trivial solution.
pub const TRIVIAL_GUARD: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct NewtonOutcome {
    pub state: BranchState,
    pub iterations: usize,
    pub residual_norm: f64,
}

fn inf_norm(v: &[C64]) -> f64 {
    v.iter().fold(0.0, |m, c| m.max(c.re.abs()).max(c.im.abs()))
}

/// Real columns of the largest U2 entry; the phase null direction of the
/// PDE block has a nonzero component there.
fn deflation_columns(z: &[C64], n: usize) -> [usize; 2] {
    let j = (0..n)
        .max_by(|&a, &b| z[2 * a + 1].norm().total_cmp(&z[2 * b + 1].norm()))
        .unwrap_or(0);
    [4 * j + 2, 4 * j + 3]
}

/// Newton iteration on the nonlinear residual. Each step solves the bordered
/// banded Jacobian by a deflated banded LU plus a small Schur complement.
pub fn newton_solve(state0: &BranchState, ctx: &FdContext, tol: f64, max_iters: usize) -> Result<NewtonOutcome> {
    state0.check(ctx)?;
    let n = ctx.grid.n;
    let mode = nonlinear_mode(state0);
    let mut z = state0.to_complex();
    let mut it = 0;
    loop {
        let a = assemble(ctx, &z, mode, true)?;
        let rn = inf_norm(&a.values);
        if !rn.is_finite() {
            return Err(Error::NoConvergence {
                iterations: it,
                residual: rn,
            });
        }
        if rn <= tol {
            let state = BranchState::from_complex(&z, state0.epsilon);
            if state.max_abs_u() < TRIVIAL_GUARD {
                return Err(Error::Rejected(format!(
                    "converged to the trivial field (max |u| = {:e})",
                    state.max_abs_u()
                )));
            }
            return Ok(NewtonOutcome {
                state,
                iterations: it,
                residual_norm: rn,
            });
        }
        if it >= max_iters {
            return Err(Error::NoConvergence {
                iterations: it,
                residual: rn,
            });
        }
        let jac = real_jacobian(ctx, &a)?;
        let f: Vec<f64> = a.values.iter().flat_map(|c| [-c.re, -c.im]).collect();
        let dx = jac.solve(&f, &deflation_columns(&z, n))?;
        for (q, zq) in z.iter_mut().enumerate() {
            *zq += C64::new(dx[2 * q], dx[2 * q + 1]);
        }
        it += 1;
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostics {
    /// Max residual over equation (a) rows (including both rows at 0).
    pub residual_a: f64,
    /// Max residual over equation (b) rows.
    pub residual_b: f64,
    /// |<u, phi0*> - sqrt(eps)|.
    pub normalization_error: f64,
    pub pt_defect: f64,
    /// |[[V u1 - i h1]]| at 0.
    pub divergence_jump: f64,
    /// max(|u| at the first and last node) / max |u|.
    pub boundary_ratio: f64,
    pub max_abs_u: f64,
}

pub fn verify_solution(state: &BranchState, ctx: &FdContext) -> Result<Diagnostics> {
    state.check(ctx)?;
    let n = ctx.grid.n;
    let js = ctx.grid.j_star();
    let a = assemble(ctx, &state.to_complex(), nonlinear_mode(state), false)?;
    let (mut ra, mut rb) = (0.0f64, 0.0f64);
    for j in 0..n {
        ra = ra.max(a.values[2 * j].norm());
        if j == js {
            ra = ra.max(a.values[2 * j + 1].norm());
        } else {
            rb = rb.max(a.values[2 * j + 1].norm());
        }
    }
    let f: &GridField = &a.fields;
    let umax = f.max_abs();
    let edge = |v: &[C64; 3]| v.iter().fold(0.0f64, |m, c| m.max(c.norm()));
    let boundary = edge(&f.values[0]).max(edge(&f.values[n - 1]));
    Ok(Diagnostics {
        residual_a: ra,
        residual_b: rb,
        normalization_error: a.values[2 * n].norm(),
        pt_defect: f.pt_defect(),
        divergence_jump: a.h1_jump.norm(),
        boundary_ratio: if umax > 0.0 { boundary / umax } else { 0.0 },
        max_abs_u: umax,
    })
}

/// Eigenpair of the discretized linear pencil near omega_guess, normalized
/// by <u, phi0*> = 1.
pub fn discrete_linear_eigenpair(ctx: &FdContext, omega_guess: C64, start: &GridField) -> Result<(C64, GridField)> {
    let lin = ctx.linearized();
    let st = BranchState::from_field(start, omega_guess, 1.0);
    let out = newton_solve(&st, &lin, DEFAULT_TOL, DEFAULT_MAX_ITERS)?;
    let f = assemble(&lin, &out.state.to_complex(), nonlinear_mode(&out.state), false)?.fields;
    Ok((out.state.omega(), f))
}

/// First-order data of the discrete branch itself: the discrete linear
/// eigenvalue omega0_h and nu_h = d omega / d eps at 0, the latter by a
/// Richardson-extrapolated secant through two tiny-amplitude Newton solves.
pub fn discrete_expansion_reference(
    ctx: &FdContext,
    omega0: C64,
    nu: C64,
    phi0: &GridField,
    eps_ref: f64,
) -> Result<(C64, C64)> {
    let (w0h, phih) = discrete_linear_eigenpair(ctx, omega0, phi0)?;
    let q = |eps: f64| -> Result<C64> {
        let st = BranchState::from_field(&phih.scale(C64::new(eps.sqrt(), 0.0)), w0h + eps * nu, eps);
        let out = newton_solve(&st, ctx, DEFAULT_TOL * eps.sqrt(), DEFAULT_MAX_ITERS)?;
        Ok((out.state.omega() - w0h) / eps)
    };
    let (q1, q2) = (q(eps_ref)?, q(2.0 * eps_ref)?);
    Ok((w0h, 2.0 * q1 - q2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigenfunctions::{adjoint_eigenfunction, eigenfunction};
    use crate::fd::grid::Grid1D;
    use crate::fd::system::residual;
    use crate::materials::{LayeredGeometry, MaterialLayer};

    const OMEGA_PT: f64 = 1.791_413_390_648_518_5;

    fn setup(l: f64, n: usize) -> (FdContext, GridField, C64) {
        let a = MaterialLayer::drude(0.5, 0.7).with_chi3(C64::new(1.0, 0.0));
        let g = LayeredGeometry::two_layer(a.clone(), a.pt_partner());
        let w = C64::new(OMEGA_PT, 0.0);
        let phi = eigenfunction(1.0, w, &g).unwrap();
        let adj = adjoint_eigenfunction(1.0, w, &g, &phi).unwrap();
        let grid = Grid1D::new(l, n).unwrap();
        let ctx = FdContext::new(1.0, &g, grid, &adj).unwrap();
        (ctx, GridField::from_field(grid, &phi), w)
    }

    #[test]
    fn linear_residual_is_second_order() {
        let mut errs = Vec::new();
        let ns = [1999usize, 3999, 7999];
        for &n in &ns {
            let (ctx, phi, w) = setup(120.0, n);
            let st = BranchState::from_field(&phi, w, 1.0);
            let r = residual(&st, &ctx.linearized()).unwrap();
            errs.push(r.iter().fold(0.0f64, |m, v| m.max(v.abs())));
        }
        let slope = (errs[0] / errs[2]).ln() / (ns[2] as f64 / ns[0] as f64).ln();
        assert!((slope - 2.0).abs() < 0.2, "{errs:?} {slope}");
    }

    #[test]
    fn zero_start_is_singular() {
        let (ctx, _, w) = setup(20.0, 201);
        let st = BranchState::from_field(&GridField::zeros(ctx.grid), w, 1e-3);
        assert!(newton_solve(&st, &ctx, 1e-10, 20).is_err());
    }

    #[test]
    fn pt_newton_converges_and_stays_real() {
        let (ctx, phi, w) = setup(40.0, 1999);
        let eps: f64 = 1e-3;
        let guess = BranchState::from_field(&phi.scale(C64::new(eps.sqrt(), 0.0)), w + eps * -0.2572, eps);
        let out = newton_solve(&guess, &ctx, 1e-10, 50).unwrap();
        assert!(out.residual_norm <= 1e-10);
        let w = out.state.omega();
        assert!(w.im.abs() < 1e-8, "{w}");
        let d = verify_solution(&out.state, &ctx).unwrap();
        assert!(d.pt_defect < 1e-6, "{d:?}");
        assert!(d.divergence_jump < 1e-8, "{d:?}");
        assert!(d.normalization_error < 1e-10);
        // restart at the solution
        let again = newton_solve(&out.state, &ctx, 1e-10, 50).unwrap();
        assert!(again.iterations <= 1);
    }

    #[test]
    fn discrete_eigenvalue_is_close_to_exact() {
        let (ctx, phi, w) = setup(40.0, 1999);
        let (wh, _) = discrete_linear_eigenpair(&ctx, w, &phi).unwrap();
        assert!((wh - w).norm() < 1e-3, "{wh}");
        assert!(wh.im.abs() < 1e-10);
    }
}
