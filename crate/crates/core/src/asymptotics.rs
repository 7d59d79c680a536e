//! Kerr nonlinearity, the first-order frequency shift nu, the first field
//! correction phi and the small-amplitude predictor.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::expfield::{ExpSum, Field};
use crate::fd::continuation::BifurcationBranch;
use crate::fd::grid::{Grid1D, GridField};
use crate::fd::system::{assemble, real_jacobian, BranchState, FdContext, Mode, Source};
use crate::materials::{LayeredGeometry, MaterialLayer};

/// Transversality threshold on <dB phi0, phi0*>.
pub const TRANSVERSALITY_TOL: f64 = 1e-10;

/// h = -i w chi3 (2 |u_E|^2 u_E + (u_E . u_E) conj(u_E)) with u_E = (u1, u2, 0).
pub fn nonlinearity_h(layer: &MaterialLayer, omega: C64, u: [C64; 3]) -> [C64; 3] {
    let p = h_partials(layer.chi3, omega, u[0], u[1]);
    [p.h[0], p.h[1], C64::new(0.0, 0.0)]
}

/// h1, h2 with Wirtinger derivatives a[i][j] = dh_i/de_j, b[i][j] = dh_i/d conj(e_j).
#[derive(Debug, Clone, Copy)]
pub struct HPartials {
    pub h: [C64; 2],
    pub a: [[C64; 2]; 2],
    pub b: [[C64; 2]; 2],
}

pub fn h_partials(chi3: C64, omega: C64, e1: C64, e2: C64) -> HPartials {
    let zero = C64::new(0.0, 0.0);
    if chi3 == zero {
        return HPartials {
            h: [zero; 2],
            a: [[zero; 2]; 2],
            b: [[zero; 2]; 2],
        };
    }
    let c = -C64::i() * omega * chi3;
    let e = [e1, e2];
    let s = e1.norm_sqr() + e2.norm_sqr();
    let p = e1 * e1 + e2 * e2;
    let mut out = HPartials {
        h: [zero; 2],
        a: [[zero; 2]; 2],
        b: [[zero; 2]; 2],
    };
    for i in 0..2 {
        out.h[i] = c * (2.0 * s * e[i] + p * e[i].conj());
        for j in 0..2 {
            let d = if i == j { 1.0 } else { 0.0 };
            out.a[i][j] = c * (2.0 * e[j].conj() * e[i] + 2.0 * s * d + 2.0 * e[j] * e[i].conj());
            out.b[i][j] = c * (2.0 * e[j] * e[i] + p * d);
        }
    }
    out
}

/// h(x, omega, phi) for a closed-form field, exactly.
pub fn h_field(geometry: &LayeredGeometry, omega: C64, phi: &Field) -> Field {
    phi.map_pieces(|j, p| {
        let c = -C64::i() * omega * geometry.layers[j].chi3;
        let s = p[0].mul(&p[0].conj()).add(&p[1].mul(&p[1].conj()));
        let q = p[0].mul(&p[0]).add(&p[1].mul(&p[1]));
        let h = |e: &ExpSum| s.mul(e).scale(C64::new(2.0, 0.0)).add(&q.mul(&e.conj())).scale(c);
        [h(&p[0]), h(&p[1]), ExpSum::zero()]
    })
}

/// dB/domega phi = (i V' phi1, i V' phi2, i phi3).
pub fn db_field(geometry: &LayeredGeometry, omega: C64, phi: &Field) -> Result<Field> {
    let dv: Vec<C64> = geometry
        .layers
        .iter()
        .map(|l| l.dpotential(omega))
        .collect::<Result<_>>()?;
    let i = C64::i();
    Ok(phi.map_pieces(|j, p| [p[0].scale(i * dv[j]), p[1].scale(i * dv[j]), p[2].scale(i)]))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Quadrature {
    /// Exact integration of the exponential sums.
    Exact,
    /// Split trapezoid on the FD grid over [-L, L].
    Trapezoid(Grid1D),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NuResult {
    pub nu: C64,
    pub numerator: C64,
    pub denominator: C64,
    /// Bound on |nu| error from truncating the integrals to [-L, L] (0 for exact).
    pub tail_bound: f64,
}

/// nu = -<h(phi0), phi0*> / <dB phi0, phi0*>.
pub fn first_order_coefficient_nu(
    k: f64,
    omega0: C64,
    phi0: &Field,
    phi0_star: &Field,
    geometry: &LayeredGeometry,
    quad: Quadrature,
) -> Result<NuResult> {
    if k == 0.0 {
        return Err(Error::InvalidParameter("k must be nonzero".into()));
    }
    let h = h_field(geometry, omega0, phi0);
    let db = db_field(geometry, omega0, phi0)?;
    let (num, den, tail_num, tail_den) = match quad {
        Quadrature::Exact => (h.inner(phi0_star)?, db.inner(phi0_star)?, 0.0, 0.0),
        Quadrature::Trapezoid(g) => {
            g.validate()?;
            let s = GridField::from_field(g, phi0_star);
            (
                GridField::from_field(g, &h).inner(&s),
                GridField::from_field(g, &db).inner(&s),
                h.inner_tail_bound(phi0_star, g.l),
                db.inner_tail_bound(phi0_star, g.l),
            )
        }
    };
    if den.norm() <= TRANSVERSALITY_TOL {
        return Err(Error::DegenerateFactor(
            "transversality: <dB phi0, phi0*> vanishes",
        ));
    }
    let nu = -num / den;
    Ok(NuResult {
        nu,
        numerator: num,
        denominator: den,
        tail_bound: (tail_num + nu.norm() * tail_den) / den.norm(),
    })
}

#[derive(Debug, Clone)]
pub struct PhiSolution {
    pub phi: GridField,
    /// Multiplier of the border column; vanishes for the continuous problem.
    pub s: C64,
    /// Max PDE-row residual relative to the max right-hand side row.
    pub relative_residual: f64,
    /// <phi, phi0*> by the split trapezoid.
    pub orthogonality: C64,
}

/// Solves L(omega0) phi = h(phi0) + nu dB phi0 with <phi, phi0*> = 0 through
/// the bordered system [L, phi0; <., phi0*>, 0].
pub fn solve_phi(
    ctx: &FdContext,
    geometry: &LayeredGeometry,
    omega0: C64,
    nu: C64,
    phi0: &Field,
) -> Result<PhiSolution> {
    let r = h_field(geometry, omega0, phi0).add(&db_field(geometry, omega0, phi0)?.scale(nu));
    solve_linear_source(ctx, omega0, &r, phi0)
}

/// Bordered linear solve for a generic source field r.
pub fn solve_linear_source(ctx: &FdContext, omega: C64, r: &Field, border: &Field) -> Result<PhiSolution> {
    let lin = ctx.linearized();
    let g = lin.grid;
    let source = Source::from_field(g, r);
    let bsrc = Source::from_field(g, border);
    let mode = Mode::Linear {
        omega,
        source: &source,
        border: &bsrc,
    };
    let n = g.n;
    let mut z = vec![C64::new(0.0, 0.0); 2 * n + 1];
    let a0 = assemble(&lin, &z, mode, true)?;
    let rhs_scale = a0.values[..2 * n].iter().fold(0.0f64, |m, v| m.max(v.norm()));
    let jac = real_jacobian(&lin, &a0)?;
    let bs = GridField::from_field(g, border);
    let jd = (0..n)
        .max_by(|&a, &b| bs.values[a][1].norm().total_cmp(&bs.values[b][1].norm()))
        .unwrap_or(0);
    let deflate = [4 * jd + 2, 4 * jd + 3];
    let mut a = a0;
    for _ in 0..2 {
        let f: Vec<f64> = a.values.iter().flat_map(|c| [-c.re, -c.im]).collect();
        let dx = jac.solve(&f, &deflate)?;
        for (q, zq) in z.iter_mut().enumerate() {
            *zq += C64::new(dx[2 * q], dx[2 * q + 1]);
        }
        a = assemble(&lin, &z, mode, false)?;
    }
    let res = a.values[..2 * n].iter().fold(0.0f64, |m, v| m.max(v.norm()));
    let phi = a.fields;
    let orthogonality = phi.inner(&lin.adjoint);
    Ok(PhiSolution {
        phi,
        s: z[2 * n],
        relative_residual: res / rhs_scale.max(f64::MIN_POSITIVE),
        orthogonality,
    })
}

#[derive(Debug, Clone)]
pub struct ExpansionData {
    pub omega0: C64,
    pub nu: C64,
    pub phi: GridField,
    pub sigma_estimate: Option<C64>,
    /// Unit factor applied to the raw eigenfunction to fix its phase.
    pub phase_convention: C64,
}

/// Predictor (omega0 + eps nu, eps^{1/2} phi0 [+ eps^{3/2} phi]).
pub fn predictor(eps: f64, data: &ExpansionData, phi0: &GridField, order: u8) -> Result<(C64, GridField)> {
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter(format!("epsilon = {eps} must be positive")));
    }
    let mut u = phi0.scale(C64::new(eps.sqrt(), 0.0));
    if order >= 1 {
        u = u.add(&data.phi.scale(C64::new(eps.powf(1.5), 0.0)));
    }
    Ok((data.omega0 + eps * data.nu, u))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SigmaFit {
    pub sigma: C64,
    /// Max |omega - omega0 - eps nu - eps^2 sigma| over the points.
    pub residual: f64,
}

/// Least-squares sigma in omega = omega0 + eps nu + eps^2 sigma, fitted to
/// the scaled defects (omega - omega0 - eps nu)/eps^2.
pub fn fit_sigma(points: &[(f64, C64)], omega0: C64, nu: C64) -> Result<SigmaFit> {
    let mut eps: Vec<f64> = points.iter().map(|p| p.0).collect();
    eps.sort_by(f64::total_cmp);
    eps.dedup();
    if eps.len() < 3 {
        return Err(Error::InvalidParameter(
            "sigma fit needs at least 3 points with distinct epsilon".into(),
        ));
    }
    let q: Vec<C64> = points.iter().map(|&(e, w)| (w - omega0 - e * nu) / (e * e)).collect();
    let sigma = q.iter().sum::<C64>() / q.len() as f64;
    let residual = points
        .iter()
        .map(|&(e, w)| (w - omega0 - e * nu - e * e * sigma).norm())
        .fold(0.0, f64::max);
    Ok(SigmaFit { sigma, residual })
}

pub fn estimate_sigma(branch: &BifurcationBranch, omega0: C64, nu: C64) -> Result<SigmaFit> {
    let pts: Vec<(f64, C64)> = branch.points.iter().map(|p| (p.epsilon, p.omega)).collect();
    fit_sigma(&pts, omega0, nu)
}

/// Least-squares slope of log|omega - omega0 - eps nu| against log eps.
pub fn convergence_slope(points: &[(f64, C64)], omega0: C64, nu: C64) -> Result<f64> {
    let xy: Vec<(f64, f64)> = points
        .iter()
        .map(|&(e, w)| (e.ln(), (w - omega0 - e * nu).norm().ln()))
        .filter(|p| p.1.is_finite())
        .collect();
    if xy.len() < 3 {
        return Err(Error::InvalidParameter("slope fit needs at least 3 points".into()));
    }
    let m = xy.len() as f64;
    let (sx, sy) = xy.iter().fold((0.0, 0.0), |a, p| (a.0 + p.0, a.1 + p.1));
    let (mx, my) = (sx / m, sy / m);
    let sxy: f64 = xy.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = xy.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Ok(sxy / sxx)
}

/// Solvability condition of the two-layer source problem L_p u = r written
/// through the half-line integrals of the reduced first-order system; it
/// vanishes exactly when r is orthogonal to phi0*.
pub fn two_layer_solvability(k: f64, omega: C64, geometry: &LayeredGeometry, r: &Field) -> Result<C64> {
    let (l, rt) = geometry.as_two_layer()?;
    let (vm, vp) = (l.potential(omega)?, rt.potential(omega)?);
    let (mm, mp) = (l.decay_rate(k, omega)?, rt.decay_rate(k, omega)?);
    let i = C64::i();
    let kc = C64::new(k, 0.0);
    let lm = &r.pieces[0];
    let rp = &r.pieces[1];
    let rho_m = lm[1]
        .scale(i / vm)
        .add(&lm[0].scale(-kc / (vm * mm)))
        .add(&lm[2].scale(C64::new(1.0, 0.0) / mm));
    let rho_p = rp[1]
        .scale(i / vp)
        .add(&rp[0].scale(kc / (vp * mp)))
        .add(&rp[2].scale(C64::new(-1.0, 0.0) / mp));
    let im = rho_m.mul(&ExpSum::single(C64::new(1.0, 0.0), mm)).integrate(f64::NEG_INFINITY, 0.0)?;
    let ip = rho_p.mul(&ExpSum::single(C64::new(1.0, 0.0), -mp)).integrate(0.0, f64::INFINITY)?;
    Ok(0.5 * (mp * vm - mm * vp) * im + mp * vp * ip)
}

/// Reference state for a converged solution at amplitude eps, built from
/// the expansion; used to seed Newton.
pub fn predictor_state(eps: f64, data: &ExpansionData, phi0: &GridField, order: u8) -> Result<BranchState> {
    let (w, u) = predictor(eps, data, phi0, order)?;
    Ok(BranchState::from_field(&u, w, eps))
}

/// Everything the nonlinear solver needs at one simple eigenvalue.
#[derive(Debug, Clone)]
pub struct ExpansionSetup {
    pub k: f64,
    pub geometry: LayeredGeometry,
    pub phi0: Field,
    pub phi0_star: Field,
    pub phi0_grid: GridField,
    pub ctx: FdContext,
    /// nu from exact integration of the exponential sums.
    pub nu_exact: NuResult,
    /// nu from the split trapezoid on the FD grid.
    pub nu_grid: NuResult,
    pub phi: PhiSolution,
    pub data: ExpansionData,
}

impl ExpansionSetup {
    /// Builds phi0, phi0*, nu (grid quadrature, as used downstream) and phi
    /// at the eigenvalue omega0 of a two-layer geometry.
    pub fn new(k: f64, geometry: &LayeredGeometry, omega0: C64, grid: Grid1D) -> Result<Self> {
        geometry.as_two_layer()?;
        let raw = crate::eigenfunctions::eigenfunction_raw(k, geometry, omega0)?;
        let phi0 = crate::eigenfunctions::eigenfunction(k, omega0, geometry)?;
        let phase = {
            let a = raw.eval_side(0.0, crate::expfield::Side::Left)[1];
            let b = phi0.eval_side(0.0, crate::expfield::Side::Left)[1];
            let q = b / a;
            q / q.norm()
        };
        let phi0_star = crate::eigenfunctions::adjoint_eigenfunction(k, omega0, geometry, &phi0)?;
        let nu_exact = first_order_coefficient_nu(k, omega0, &phi0, &phi0_star, geometry, Quadrature::Exact)?;
        let nu_grid =
            first_order_coefficient_nu(k, omega0, &phi0, &phi0_star, geometry, Quadrature::Trapezoid(grid))?;
        let ctx = FdContext::new(k, geometry, grid, &phi0_star)?;
        let phi = solve_phi(&ctx, geometry, omega0, nu_grid.nu, &phi0)?;
        let data = ExpansionData {
            omega0,
            nu: nu_grid.nu,
            phi: phi.phi.clone(),
            sigma_estimate: None,
            phase_convention: phase,
        };
        Ok(Self {
            k,
            geometry: geometry.clone(),
            phi0_grid: GridField::from_field(grid, &phi0),
            phi0,
            phi0_star,
            ctx,
            nu_exact,
            nu_grid,
            phi,
            data,
        })
    }
}
