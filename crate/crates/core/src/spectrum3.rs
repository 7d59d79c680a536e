//! Eigenvalues of the three-layer (sandwich) problem with interfaces at 0 and d.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::materials::{decay_rate, Sandwich};
use crate::roots::{find_roots, Region};
use crate::spectrum2::EigsOptions;

/// Relative tolerance for O^(k) factor degeneracy.
pub const DEGENERACY_TOL: f64 = 1e-10;
/// An eigenvalue is reported isolated when |d - beta| exceeds this.
pub const ISOLATION_TOL: f64 = 1e-3;

/// A quantity that may be undefined on a measure-zero set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Evaluated {
    Value(C64),
    Indeterminate,
}

impl Evaluated {
    pub fn value(&self) -> Option<C64> {
        match self {
            Evaluated::Value(v) => Some(*v),
            Evaluated::Indeterminate => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SimplicityStatus {
    CertifiedSimple,
    Unknown,
}

/// mu* = sqrt(k^2 - W*). On the negative real axis the imaginary part is
/// taken as +0, giving mu* = +i sqrt|k^2 - W*|.
pub fn mu_star(k: f64, w_star: C64) -> Result<C64> {
    let mut z = C64::new(k * k, 0.0) - w_star;
    if z.norm() == 0.0 {
        return Err(Error::DegenerateFactor("mu* = 0 (W* = k^2)"));
    }
    if z.im == 0.0 {
        z.im = 0.0;
    }
    Ok(z.sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SandwichState {
    pub omega: C64,
    pub k: f64,
    pub vm: C64,
    pub vs: C64,
    pub vp: C64,
    pub mum: C64,
    pub mus: C64,
    pub mup: C64,
}

impl SandwichState {
    pub fn new(k: f64, s: &Sandwich, omega: C64) -> Result<Self> {
        let vm = s.left.potential(omega)?;
        let vs = s.core.potential(omega)?;
        let vp = s.right.potential(omega)?;
        Ok(Self {
            omega,
            k,
            vm,
            vs,
            vp,
            mum: decay_rate(k, -omega * vm)?,
            mus: mu_star(k, -omega * vs)?,
            mup: decay_rate(k, -omega * vp)?,
        })
    }

    /// (mu* V+ - mu+ V*), (mu* V+ + mu+ V*), (mu- V* - mu* V-), (mu- V* + mu* V-).
    fn factors(&self) -> [C64; 4] {
        let (ms, vs) = (self.mus, self.vs);
        [
            ms * self.vp - self.mup * vs,
            ms * self.vp + self.mup * vs,
            self.mum * vs - ms * self.vm,
            self.mum * vs + ms * self.vm,
        ]
    }

    fn factor_scale(&self) -> [f64; 2] {
        [
            (self.mus * self.vp).norm() + (self.mup * self.vs).norm(),
            (self.mum * self.vs).norm() + (self.mus * self.vm).norm(),
        ]
    }

    /// Membership in the degenerate set: both addends of the dispersion
    /// relation vanish whatever d is.
    pub fn in_o_k(&self) -> bool {
        let [pm, pp, mm, mp] = self.factors();
        let [sp, sm] = self.factor_scale();
        let z = |v: C64, s: f64| v.norm() <= DEGENERACY_TOL * s.max(f64::MIN_POSITIVE);
        (z(pm, sp) && z(mp, sm)) || (z(pp, sp) && z(mm, sm))
    }
}

/// d_m = (Log q + 2 pi i m) / (2 mu*).
pub fn layer_width_dm(k: f64, s: &Sandwich, omega: C64, m: i64) -> Result<C64> {
    let st = SandwichState::new(k, s, omega)?;
    width_from_state(&st, m)
}

pub fn width_from_state(st: &SandwichState, m: i64) -> Result<C64> {
    let [pm, pp, mm, mp] = st.factors();
    let [sp, sm] = st.factor_scale();
    let tiny = |v: C64, s: f64| v.norm() <= DEGENERACY_TOL * s.max(f64::MIN_POSITIVE);
    if tiny(pm, sp) || tiny(pp, sp) || tiny(mm, sm) || tiny(mp, sm) {
        return Err(Error::DegenerateFactor("width quotient"));
    }
    let q = (pm * (st.mus * st.vm - st.mum * st.vs)) / (pp * mp);
    Ok((q.ln() + C64::new(0.0, 2.0 * PI * m as f64)) / (2.0 * st.mus))
}

/// d_m is a real positive width.
pub fn is_real_width(d: C64) -> bool {
    d.re > 0.0 && d.im.abs() <= 1e-8 * (1.0 + d.re)
}

/// The dispersion relation as printed:
/// e^{mu* d}(mu* V+ + mu+ V*)(mu- V* + mu* V-) + e^{-mu* d}(mu* V+ - mu+ V*)(mu- V* - mu* V-).
pub fn dispersion3(k: f64, s: &Sandwich, d: f64, omega: C64) -> Result<C64> {
    let st = SandwichState::new(k, s, omega)?;
    Ok(dispersion3_terms(&st, d).0)
}

/// Value and magnitude scale (sum of addend moduli).
pub fn dispersion3_terms(st: &SandwichState, d: f64) -> (C64, f64) {
    let [pm, pp, mm, mp] = st.factors();
    let e = (st.mus * d).exp();
    let a = e * pp * mp;
    let b = pm * mm / e;
    (a + b, a.norm() + b.norm())
}

fn sinhc(z: C64) -> C64 {
    if z.norm() < 1e-4 {
        1.0 + z * z / 6.0
    } else {
        z.sinh() / z
    }
}

/// dispersion3 / (2 mu*), which is even in mu* and so free of the mu* cut:
/// (mu*^2 V+ V- + mu+ mu- V*^2) sinh(mu* d)/mu* + V*(V+ mu- + mu+ V-) cosh(mu* d).
pub fn dispersion3_even(st: &SandwichState, d: f64) -> C64 {
    let ms = st.mus;
    let sh = d * sinhc(ms * d);
    (ms * ms * st.vp * st.vm + st.mup * st.mum * st.vs * st.vs) * sh
        + st.vs * (st.vp * st.mum + st.mup * st.vm) * (ms * d).cosh()
}

/// The printed simplicity quantity alpha(omega) for width d.
pub fn alpha3(k: f64, s: &Sandwich, d: f64, omega: C64) -> Result<Evaluated> {
    let st = SandwichState::new(k, s, omega)?;
    Ok(alpha_from_state(&st, d))
}

pub fn alpha_from_state(st: &SandwichState, d: f64) -> Evaluated {
    let k2 = st.k * st.k;
    let (vm, vs, vp, mm, ms, mp) = (st.vm, st.vs, st.vp, st.mum, st.mus, st.mup);
    let den = ms * ms * vm * vm - mm * mm * vs * vs;
    let den_scale = (ms * ms * vm * vm).norm() + (mm * mm * vs * vs).norm();
    if den.norm() <= 1e-13 * den_scale || vs.norm() == 0.0 || mp.norm() == 0.0 {
        return Evaluated::Indeterminate;
    }
    let t1 = (ms * ms - vs * vs + k2) / (ms * ms * vs)
        * (vs * vs * mp * mm - ms * ms * vp * vm)
        * (mm * vp + mp * vm)
        / den;
    let t2 = (mp * mp - vp * vp + k2) / (2.0 * mp * mp * vs) * (3.0 * mp * vs - ms * vp);
    let t3 = (ms * ms * vp * vp - mp * mp * vs * vs)
        * ((mm * mm - vm * vm + k2) / (mm * den) - d * (ms * ms + vs * vs - k2) / (ms * ms * vs * vs));
    let v = t1 + t2 + t3;
    if v.re.is_finite() && v.im.is_finite() {
        Evaluated::Value(v)
    } else {
        Evaluated::Indeterminate
    }
}

/// The pairing of the eigenvector with the adjoint eigenvector, computed from
/// closed-form integrals of the sandwich eigenfunctions. A second route to
/// simplicity independent of the printed alpha.
pub fn pairing3(st: &SandwichState, d: f64) -> Evaluated {
    let k2 = st.k * st.k;
    let (vm, vs, vp, mm, ms, mp) = (st.vm, st.vs, st.vp, st.mum, st.mus, st.mup);
    let e = (ms * d).exp();
    let em = 1.0 / e;
    let a = e
        * (ms * vp + mp * vs)
        * (2.0 / mm * (mm * mm - vm * vm + k2)
            + d / (ms * ms * vs * vs)
                * (mm * mm * vs * vs - ms * ms * vm * vm)
                * (ms * ms + vs * vs - k2));
    let b = d * em / (ms * ms * vs * vs)
        * (mm * vs - ms * vm).powi(2)
        * (mp * vs - ms * vp)
        * (ms * ms + vs * vs - k2);
    let c = (ms * d).sinh() / (ms * ms * ms * vs * vs)
        * ((mm * vs - ms * vm).powi(2) * (ms * vp + mp * vs)
            + (ms * ms * vm * vm - mm * mm * vs * vs) * (ms * vp - mp * vs))
        * (ms * ms - vs * vs + k2);
    let dd = 2.0 / (mp * mp * vs)
        * (mm * vs * (ms * d).cosh() + ms * vm * (ms * d).sinh())
        * (mm * vs - ms * vm)
        * (mp * mp - vp * vp + k2);
    let den = (ms * vm - mm * vs).powi(2);
    if den.norm() == 0.0 {
        return Evaluated::Indeterminate;
    }
    let v = (a + b + c + dd) * e / 2.0 * (ms * vp + mp * vs) / den;
    if v.re.is_finite() && v.im.is_finite() {
        Evaluated::Value(v)
    } else {
        Evaluated::Indeterminate
    }
}

/// The printed isolation quantity beta(omega).
pub fn beta3(k: f64, s: &Sandwich, omega: C64) -> Result<Evaluated> {
    let st = SandwichState::new(k, s, omega)?;
    Ok(beta_from_state(&st))
}

pub fn beta_from_state(st: &SandwichState) -> Evaluated {
    let w = st.omega;
    let (vm, vs, vp, mm, ms, mp) = (st.vm, st.vs, st.vp, st.mum, st.mus, st.mup);
    let d1 = vs * vs * mm * mm - vm * vm * ms * ms;
    let d2 = vs * vs * mp * mp - vp * vp * ms * ms;
    let den = (w + vs) * d1 * d2;
    let scale = (w.norm() + vs.norm())
        * ((vs * vs * mm * mm).norm() + (vm * vm * ms * ms).norm())
        * ((vs * vs * mp * mp).norm() + (vp * vp * ms * ms).norm());
    if den.norm() <= 1e-13 * scale || mm.norm() == 0.0 || mp.norm() == 0.0 {
        return Evaluated::Indeterminate;
    }
    let a = (vs * (w + vs) - 2.0 * ms * ms) * (ms * ms * vp * vm - vs * vs * mp * mm) * (mp * vm + mm * vp);
    let b = -(ms * ms * vs) / (mp * mm)
        * (mm * vp * (w + vp) * (ms * ms * vm * vm - vs * vs * mm * mm)
            + mp * vm * (w + vm) * (ms * ms * vp * vp - vs * vs * mp * mp));
    let c = 2.0 * ms * ms * vs * (ms * ms * (mp * vm * vm + mm * vp * vp) - vs * vs * mp * mm * (mp + mm));
    let v = (a + b + c) / den;
    if v.re.is_finite() && v.im.is_finite() {
        Evaluated::Value(v)
    } else {
        Evaluated::Indeterminate
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SandwichSpectralPoint {
    pub omega: C64,
    pub k: f64,
    pub d: f64,
    pub mu_minus: C64,
    pub mu_star: C64,
    pub mu_plus: C64,
    pub branch_index_m: Option<i64>,
    pub alpha_value: Evaluated,
    pub beta_value: Evaluated,
    pub in_o_k: bool,
    pub residual: f64,
    pub simplicity: SimplicityStatus,
    pub isolated: Option<bool>,
}

/// Branch index m in -mmax..=mmax with d_m(omega) = d, if any.
pub fn branch_index(st: &SandwichState, d: f64, mmax: i64) -> Option<i64> {
    (-mmax..=mmax)
        .filter_map(|m| width_from_state(st, m).ok().map(|dm| (m, (dm - d).norm())))
        .filter(|&(_, e)| e <= 1e-6 * (1.0 + d))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(m, _)| m)
}

/// Labels an eigenvalue that sits on the real axis up to rounding by its
/// real part, so the sign of a 1e-16 imaginary part cannot flip mu* and swap
/// d_m with d_{-m}.
fn branch_label(k: f64, s: &Sandwich, d: f64, omega: C64, st: &SandwichState) -> Option<i64> {
    if omega.im != 0.0 && omega.im.abs() <= 1e-12 * (1.0 + omega.norm()) {
        if let Ok(real) = SandwichState::new(k, s, C64::new(omega.re, 0.0)) {
            return branch_index(&real, d, 8);
        }
    }
    branch_index(st, d, 8)
}

pub fn classify3(k: f64, s: &Sandwich, d: f64, omega: C64) -> Result<SandwichSpectralPoint> {
    let st = SandwichState::new(k, s, omega)?;
    let (val, scale) = dispersion3_terms(&st, d);
    let residual = if scale > 0.0 { val.norm() / scale } else { 0.0 };
    let alpha = alpha_from_state(&st, d);
    let beta = beta_from_state(&st);
    let simplicity = match alpha.value() {
        Some(a) if a.norm() > 1e-8 => SimplicityStatus::CertifiedSimple,
        _ => SimplicityStatus::Unknown,
    };
    Ok(SandwichSpectralPoint {
        omega,
        k,
        d,
        mu_minus: st.mum,
        mu_star: st.mus,
        mu_plus: st.mup,
        branch_index_m: branch_label(k, s, d, omega, &st),
        alpha_value: alpha,
        beta_value: beta,
        in_o_k: st.in_o_k(),
        residual,
        simplicity,
        isolated: beta.value().map(|b| (d - b).norm() > ISOLATION_TOL),
    })
}

/// Certified eigenvalues of the sandwich inside `region`.
pub fn find_eigenvalues3(
    k: f64,
    s: &Sandwich,
    d: f64,
    region: &Region,
    opts: &EigsOptions,
) -> Result<Vec<SandwichSpectralPoint>> {
    if !(d > 0.0 && d.is_finite()) {
        return Err(Error::InvalidParameter(format!("width d must be positive, got {d}")));
    }
    region.validate()?;
    let f = |w: C64| -> Result<C64> {
        let st = SandwichState::new(k, s, w)?;
        Ok(dispersion3_even(&st, d))
    };
    let mut out = Vec::new();
    for w in find_roots(&f, region, &opts.roots) {
        let Ok(p) = classify3(k, s, d, w) else { continue };
        // the even form is exact here; the printed form loses digits when
        // its two addends are large and cancel
        let st = SandwichState::new(k, s, w)?;
        let even_scale = {
            let ms = st.mus;
            ((ms * ms * st.vp * st.vm).norm() + (st.mup * st.mum * st.vs * st.vs).norm())
                * (d * sinhc(ms * d)).norm()
                + (st.vs * (st.vp * st.mum + st.mup * st.vm)).norm() * (ms * d).cosh().norm()
        };
        let even_res = dispersion3_even(&st, d).norm() / even_scale.max(f64::MIN_POSITIVE);
        if even_res <= opts.tol && p.mu_minus.re > 0.0 && p.mu_plus.re > 0.0 {
            out.push(p);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WidthPoint {
    pub omega: f64,
    pub m: i64,
    pub d: C64,
}

/// d_m(omega) for m in -mmax..=mmax on a real omega grid. Points where the
/// width is undefined are skipped.
pub fn width_scan(k: f64, s: &Sandwich, omegas: &[f64], mmax: i64) -> Vec<WidthPoint> {
    use rayon::prelude::*;
    omegas
        .par_iter()
        .map(|&w| {
            let st = SandwichState::new(k, s, C64::new(w, 0.0));
            (-mmax..=mmax)
                .filter_map(|m| {
                    let st = st.as_ref().ok()?;
                    let d = width_from_state(st, m).ok()?;
                    Some(WidthPoint { omega: w, m, d })
                })
                .collect::<Vec<_>>()
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlphaBetaPoint {
    pub omega: f64,
    pub d: f64,
    pub alpha: Evaluated,
    pub beta: Evaluated,
}

/// alpha and |d - beta| along the real-width part of branch m.
pub fn alpha_beta_scan(k: f64, s: &Sandwich, omegas: &[f64], m: i64) -> Vec<AlphaBetaPoint> {
    omegas
        .iter()
        .filter_map(|&w| {
            let st = SandwichState::new(k, s, C64::new(w, 0.0)).ok()?;
            let d = width_from_state(&st, m).ok()?;
            if !is_real_width(d) {
                return None;
            }
            Some(AlphaBetaPoint {
                omega: w,
                d: d.re,
                alpha: alpha_from_state(&st, d.re),
                beta: beta_from_state(&st),
            })
        })
        .collect()
}
