//! Reduced two-component system on the grid, its residual and analytic
//! Jacobian.
//!
//! Complex unknowns are ordered per node as (U1_j, U2_j), with U1 at the
//! interface node holding the left limit, followed by one extra unknown
//! (omega for the nonlinear problem, the bordering multiplier for the linear
//! source problem). The real layout splits each complex unknown into
//! (re, im) in place, so node j owns real columns 4j..4j+3. Equations follow
//! the same per-node order: (a) then (b) away from 0, (a-) then (a+) at 0,
//! then the normalization.

use num_complex::Complex64 as C64;

use super::grid::{Grid1D, GridField};
use super::linalg::BorderedSystem;
use crate::asymptotics::h_partials;
use crate::eigenfunctions::sample;
use crate::error::{Error, Result};
use crate::expfield::{Field, Side};
use crate::materials::{LayeredGeometry, MaterialLayer};

/// Half-bandwidth of the real Jacobian block.
pub const BAND: usize = 15;

/// C u3 = -(i/omega)(du2 - i k u1).
pub fn reconstruct_u3(omega: C64, u1: C64, du2: C64, k: f64) -> Result<C64> {
    if omega.norm() == 0.0 {
        return Err(Error::InvalidParameter("zero frequency in u3 reconstruction".into()));
    }
    Ok(-(C64::i() / omega) * (du2 - C64::new(0.0, k) * u1))
}

#[derive(Debug, Clone)]
pub struct FdContext {
    pub k: f64,
    pub left: MaterialLayer,
    pub right: MaterialLayer,
    pub grid: Grid1D,
    /// Adjoint eigenfunction samples used by the normalization row.
    pub adjoint: GridField,
}

impl FdContext {
    pub fn new(k: f64, geometry: &LayeredGeometry, grid: Grid1D, adjoint: &Field) -> Result<Self> {
        let (l, r) = geometry.as_two_layer()?;
        Self::from_samples(k, l.clone(), r.clone(), grid, GridField::from_field(grid, adjoint))
    }

    pub fn from_samples(
        k: f64,
        left: MaterialLayer,
        right: MaterialLayer,
        grid: Grid1D,
        adjoint: GridField,
    ) -> Result<Self> {
        grid.validate()?;
        left.validate()?;
        right.validate()?;
        if k == 0.0 || !k.is_finite() {
            return Err(Error::InvalidParameter(format!("wavenumber k = {k} must be nonzero")));
        }
        if adjoint.grid != grid {
            return Err(Error::InvalidParameter("adjoint samples live on another grid".into()));
        }
        Ok(Self {
            k,
            left,
            right,
            grid,
            adjoint,
        })
    }

    /// Same problem with the cubic coefficient switched off.
    pub fn linearized(&self) -> Self {
        let mut c = self.clone();
        c.left.chi3 = C64::new(0.0, 0.0);
        c.right.chi3 = C64::new(0.0, 0.0);
        c
    }

    pub fn dim(&self) -> usize {
        4 * self.grid.n + 2
    }
}

/// Real degrees of freedom (4N + 2) and the normalization level.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchState {
    pub dof: Vec<f64>,
    pub epsilon: f64,
}

impl BranchState {
    pub fn from_complex(z: &[C64], epsilon: f64) -> Self {
        Self {
            dof: z.iter().flat_map(|c| [c.re, c.im]).collect(),
            epsilon,
        }
    }

    pub fn from_field(u: &GridField, omega: C64, epsilon: f64) -> Self {
        let mut z = Vec::with_capacity(2 * u.grid.n + 1);
        for v in &u.values {
            z.push(v[0]);
            z.push(v[1]);
        }
        z.push(omega);
        Self::from_complex(&z, epsilon)
    }

    pub fn to_complex(&self) -> Vec<C64> {
        self.dof.chunks(2).map(|p| C64::new(p[0], p[1])).collect()
    }

    pub fn omega(&self) -> C64 {
        let m = self.dof.len();
        C64::new(self.dof[m - 2], self.dof[m - 1])
    }

    pub fn check(&self, ctx: &FdContext) -> Result<()> {
        if self.dof.len() != ctx.dim() {
            return Err(Error::InvalidParameter(format!(
                "state has {} dofs, grid needs {}",
                self.dof.len(),
                ctx.dim()
            )));
        }
        Ok(())
    }

    /// Max |U1|, |U2| over the grid.
    pub fn max_abs_u(&self) -> f64 {
        let z = self.to_complex();
        z[..z.len() - 1].iter().fold(0.0, |m, c| m.max(c.norm()))
    }
}

/// Source term r (with its first and third components entering the reduced
/// equations) sampled on the grid: [r1, r2, r3, r3'].
#[derive(Debug, Clone)]
pub struct Source {
    pub values: Vec<[C64; 4]>,
    pub right: [C64; 4],
}

impl Source {
    pub fn from_field(grid: Grid1D, f: &Field) -> Self {
        let d3 = f.map_pieces(|_, p| [p[2].derivative(), p[2].clone(), p[2].clone()]);
        let both = |x: f64, side: Side| {
            let v = f.eval_side(x, side);
            [v[0], v[1], v[2], d3.eval_side(x, side)[0]]
        };
        let js = grid.j_star();
        Self {
            values: (0..grid.n)
                .map(|j| {
                    if j == js {
                        both(0.0, Side::Left)
                    } else {
                        both(grid.x(j), Side::Left)
                    }
                })
                .collect(),
            right: both(0.0, Side::Right),
        }
    }

    fn at(&self, j: usize, js: usize, side: Side) -> [C64; 4] {
        if j == js && side == Side::Right {
            self.right
        } else {
            self.values[j]
        }
    }
}

#[derive(Clone, Copy)]
pub enum Mode<'a> {
    /// Extra unknown is omega; normalization <u, phi0*> = sqrt(eps).
    Nonlinear { sqrt_eps: f64 },
    /// L(omega) u = r - s phi0 with extra unknown s and <u, phi0*> = 0.
    Linear {
        omega: C64,
        source: &'a Source,
        border: &'a Source,
    },
}

#[derive(Clone, Copy)]
enum Var {
    U1(usize),
    U2(isize),
    U1Plus,
    Extra,
}

pub struct Assembly {
    pub values: Vec<C64>,
    pub partials: Vec<Vec<(usize, C64, C64)>>,
    pub fields: GridField,
    pub h1_jump: C64,
}

struct Builder {
    n: usize,
    jac: bool,
    values: Vec<C64>,
    partials: Vec<Vec<(usize, C64, C64)>>,
    plus: Vec<(usize, C64)>,
}

impl Builder {
    fn push(&mut self, e: usize, var: Var, a: C64, b: C64) {
        if !self.jac {
            return;
        }
        match var {
            Var::U1(j) => self.partials[e].push((2 * j, a, b)),
            Var::U2(m) => {
                if m >= 0 && (m as usize) < self.n {
                    self.partials[e].push((2 * m as usize + 1, a, b));
                }
            }
            Var::Extra => self.partials[e].push((2 * self.n, a, b)),
            Var::U1Plus => {
                for &(q, al) in &self.plus {
                    self.partials[e].push((q, a * al, b * al.conj()));
                }
            }
        }
    }
}

pub fn assemble(ctx: &FdContext, z: &[C64], mode: Mode, jac: bool) -> Result<Assembly> {
    let g = ctx.grid;
    let n = g.n;
    if z.len() != 2 * n + 1 {
        return Err(Error::InvalidParameter("state length does not match grid".into()));
    }
    let js = g.j_star();
    let dx = g.dx();
    let k = ctx.k;
    let kc = C64::new(k, 0.0);
    let ik = C64::new(0.0, k);
    let i = C64::i();
    let zero = C64::new(0.0, 0.0);
    let zx = z[2 * n];
    let (omega, sqrt_eps) = match mode {
        Mode::Nonlinear { sqrt_eps } => (zx, sqrt_eps),
        Mode::Linear { omega, .. } => (omega, 0.0),
    };
    let nonlinear = matches!(mode, Mode::Nonlinear { .. });
    if omega.norm() == 0.0 {
        return Err(Error::InvalidParameter("zero frequency".into()));
    }
    let layer = |side: Side| if side == Side::Left { &ctx.left } else { &ctx.right };
    let vl = ctx.left.potential(omega)?;
    let vr = ctx.right.potential(omega)?;
    let dvl = ctx.left.dpotential(omega)?;
    let dvr = ctx.right.dpotential(omega)?;
    let pot = |side: Side| if side == Side::Left { (vl, dvl) } else { (vr, dvr) };
    let zero4 = [zero; 4];
    let src = |j: usize, side: Side| -> [C64; 4] {
        match mode {
            Mode::Nonlinear { .. } => zero4,
            Mode::Linear { source, border, .. } => {
                let s = source.at(j, js, side);
                let b = border.at(j, js, side);
                [s[0] - zx * b[0], s[1] - zx * b[1], s[2] - zx * b[2], s[3] - zx * b[3]]
            }
        }
    };
    let bord = |j: usize, side: Side| -> [C64; 4] {
        match mode {
            Mode::Nonlinear { .. } => zero4,
            Mode::Linear { border, .. } => border.at(j, js, side),
        }
    };
    let u2 = |m: isize| -> C64 {
        if m < 0 || m as usize >= n {
            zero
        } else {
            z[2 * m as usize + 1]
        }
    };

    // U1(0+) from the jump condition [[i k u1 - u2' + r3]] = 0
    let jump_coef = [-1.0, 4.0, -6.0, 4.0, -1.0];
    let (sm, sp) = (src(js, Side::Left), src(js, Side::Right));
    let (bm, bp) = (bord(js, Side::Left), bord(js, Side::Right));
    let mut u1p = z[2 * js] - (sp[2] - sm[2]) / ik;
    let mut plus = vec![(2 * js, C64::new(1.0, 0.0))];
    for (o, c) in jump_coef.iter().enumerate() {
        let m = js as isize + o as isize - 2;
        let al = C64::new(c / (2.0 * dx), 0.0) / ik;
        u1p += al * u2(m);
        plus.push((2 * m as usize + 1, al));
    }
    if !nonlinear {
        plus.push((2 * n, (bp[2] - bm[2]) / ik));
    }

    let mut b = Builder {
        n,
        jac,
        values: vec![zero; 2 * n + 1],
        partials: if jac { vec![Vec::with_capacity(12); 2 * n + 1] } else { Vec::new() },
        plus,
    };
    let mut fields = GridField::zeros(g);
    let mut h1_side = [zero; 2];
    let norm_e = 2 * n;
    let h2dx = 1.0 / (2.0 * dx);
    let idx2 = 1.0 / (dx * dx);

    // equation (a) at one node/side: du2 - i(k + w V/k) u1 - (w/k)(h1 + r1) - r3
    // and the matching normalization contribution with weight w8.
    #[allow(clippy::too_many_arguments)]
    let eq_a = |b: &mut Builder,
                    fields: &mut GridField,
                    e: usize,
                    j: usize,
                    side: Side,
                    u1: C64,
                    u1var: Var,
                    stencil: &[(isize, f64)],
                    w8: f64|
     -> C64 {
        let (v, dv) = pot(side);
        let lay = layer(side);
        let e2 = z[2 * j + 1];
        let hp = h_partials(lay.chi3, omega, u1, e2);
        let s = src(j, side);
        let bd = bord(j, side);
        let du2: C64 = stencil.iter().map(|&(m, c)| c * u2(m)).sum();
        let coef1 = -i * (kc + omega * v / k);
        b.values[e] = du2 + coef1 * u1 - (omega / k) * (hp.h[0] + s[0]) - s[2];
        for &(m, c) in stencil {
            b.push(e, Var::U2(m), C64::new(c, 0.0), zero);
        }
        b.push(e, u1var, coef1 - (omega / k) * hp.a[0][0], -(omega / k) * hp.b[0][0]);
        b.push(e, Var::U2(j as isize), -(omega / k) * hp.a[0][1], -(omega / k) * hp.b[0][1]);
        let dx_extra = if nonlinear {
            -i * (v + omega * dv) * u1 / k - 2.0 * hp.h[0] / k
        } else {
            (omega / k) * bd[0] + bd[2]
        };
        b.push(e, Var::Extra, dx_extra, zero);

        // normalization
        let u3 = -(i / omega) * (du2 - ik * u1 - s[2]);
        let phi = ctx.adjoint.at(j, side);
        let (c1, c2, c3) = (phi[0].conj(), phi[1].conj(), phi[2].conj());
        b.values[norm_e] += w8 * (u1 * c1 + e2 * c2 + u3 * c3);
        b.push(norm_e, u1var, w8 * (c1 - kc / omega * c3), zero);
        b.push(norm_e, Var::U2(j as isize), w8 * c2, zero);
        for &(m, c) in stencil {
            b.push(norm_e, Var::U2(m), w8 * c3 * (-(i / omega) * c), zero);
        }
        let n_extra = if nonlinear {
            w8 * c3 * (-u3 / omega)
        } else {
            w8 * c3 * (-(i / omega) * bd[2])
        };
        b.push(norm_e, Var::Extra, n_extra, zero);
        let out = [u1, e2, u3];
        if j == js && side == Side::Right {
            fields.right = out;
        } else {
            fields.values[j] = out;
        }
        v * u1 - i * hp.h[0]
    };

    for j in 0..n {
        let ji = j as isize;
        if j == js {
            let dminus = [(ji, 3.0 * h2dx), (ji - 1, -4.0 * h2dx), (ji - 2, h2dx)];
            let dplus = [(ji, -3.0 * h2dx), (ji + 1, 4.0 * h2dx), (ji + 2, -h2dx)];
            let w8 = 0.5 * dx;
            h1_side[0] = eq_a(&mut b, &mut fields, 2 * j, j, Side::Left, z[2 * j], Var::U1(j), &dminus, w8);
            h1_side[1] = eq_a(&mut b, &mut fields, 2 * j + 1, j, Side::Right, u1p, Var::U1Plus, &dplus, w8);
            continue;
        }
        let side = if j < js { Side::Left } else { Side::Right };
        let centered = [(ji + 1, h2dx), (ji - 1, -h2dx)];
        eq_a(&mut b, &mut fields, 2 * j, j, side, z[2 * j], Var::U1(j), &centered, dx);

        // (b): u2'' - i k u1' - w V u2 + i w (h2 + r2) - r3'
        let e = 2 * j + 1;
        let (v, dv) = pot(side);
        let e1 = z[2 * j];
        let e2 = z[2 * j + 1];
        let hp = h_partials(layer(side).chi3, omega, e1, e2);
        let s = src(j, side);
        let bd = bord(j, side);
        let nb = |m: isize| -> (C64, Var) {
            if m < 0 || m as usize >= n {
                (zero, Var::U2(-1))
            } else if m as usize == js && j > js {
                (u1p, Var::U1Plus)
            } else {
                (z[2 * m as usize], Var::U1(m as usize))
            }
        };
        let (u1r, var_r) = nb(ji + 1);
        let (u1l, var_l) = nb(ji - 1);
        b.values[e] = (u2(ji + 1) - 2.0 * e2 + u2(ji - 1)) * idx2 - ik * (u1r - u1l) * h2dx - omega * v * e2
            + i * omega * (hp.h[1] + s[1])
            - s[3];
        b.push(e, Var::U2(ji + 1), C64::new(idx2, 0.0), zero);
        b.push(e, Var::U2(ji - 1), C64::new(idx2, 0.0), zero);
        b.push(
            e,
            Var::U2(ji),
            -2.0 * idx2 - omega * v + i * omega * hp.a[1][1],
            i * omega * hp.b[1][1],
        );
        b.push(e, Var::U1(j), i * omega * hp.a[1][0], i * omega * hp.b[1][0]);
        if ji + 1 < n as isize {
            b.push(e, var_r, -ik * h2dx, zero);
        }
        if ji > 0 {
            b.push(e, var_l, ik * h2dx, zero);
        }
        let dx_extra = if nonlinear {
            -(v + omega * dv) * e2 + 2.0 * i * hp.h[1]
        } else {
            -i * omega * bd[1] + bd[3]
        };
        b.push(e, Var::Extra, dx_extra, zero);
    }
    b.values[norm_e] -= sqrt_eps;
    Ok(Assembly {
        values: b.values,
        partials: b.partials,
        fields,
        h1_jump: h1_side[1] - h1_side[0],
    })
}

/// Real residual in the documented order.
pub fn residual_in(ctx: &FdContext, state: &BranchState, mode: Mode) -> Result<Vec<f64>> {
    state.check(ctx)?;
    let a = assemble(ctx, &state.to_complex(), mode, false)?;
    Ok(a.values.iter().flat_map(|c| [c.re, c.im]).collect())
}

pub fn residual(state: &BranchState, ctx: &FdContext) -> Result<Vec<f64>> {
    residual_in(ctx, state, nonlinear_mode(state))
}

pub fn nonlinear_mode(state: &BranchState) -> Mode<'static> {
    Mode::Nonlinear {
        sqrt_eps: state.epsilon.max(0.0).sqrt(),
    }
}

/// Real Wirtinger split of complex partials into the bordered banded form.
pub fn real_jacobian(ctx: &FdContext, a: &Assembly) -> Result<BorderedSystem> {
    let n = ctx.grid.n;
    let mut j = BorderedSystem::new(4 * n, BAND, BAND, 2);
    for (e, parts) in a.partials.iter().enumerate() {
        for &(q, pa, pb) in parts {
            let (s, d) = (pa + pb, pa - pb);
            let (r0, c0) = (2 * e, 2 * q);
            j.add(r0, c0, s.re)?;
            j.add(r0, c0 + 1, -d.im)?;
            j.add(r0 + 1, c0, s.im)?;
            j.add(r0 + 1, c0 + 1, d.re)?;
        }
    }
    Ok(j)
}

pub fn jacobian_in(ctx: &FdContext, state: &BranchState, mode: Mode) -> Result<BorderedSystem> {
    state.check(ctx)?;
    let a = assemble(ctx, &state.to_complex(), mode, true)?;
    real_jacobian(ctx, &a)
}

pub fn jacobian(state: &BranchState, ctx: &FdContext) -> Result<BorderedSystem> {
    jacobian_in(ctx, state, nonlinear_mode(state))
}

/// Grid field (u1, u2, u3) of a state, with u3 reconstructed exactly as in
/// the residual.
pub fn state_field(ctx: &FdContext, state: &BranchState) -> Result<GridField> {
    state.check(ctx)?;
    Ok(assemble(ctx, &state.to_complex(), nonlinear_mode(state), false)?.fields)
}

/// Samples of a closed-form field at the grid nodes (helper for tests and CSV).
pub fn sample_field(grid: &Grid1D, f: &Field) -> Vec<(f64, [C64; 3])> {
    sample(f, &grid.nodes())
}
