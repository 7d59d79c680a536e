//! Eigenvalues of the two-layer interface problem: dispersion relation,
//! closed form for PT-symmetric Drude pairs, simplicity and isolation.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::materials::{decay_rate, LayeredGeometry, MaterialLayer};
use crate::roots::{find_roots, Region, RootOptions};

/// Relative tolerance for accepting a root of the dispersion relation.
pub const CERTIFICATE_TOL: f64 = 1e-9;
/// Relative tolerance of the simplicity test.
pub const SIMPLICITY_TOL: f64 = 1e-8;

/// mu_+ V_- + mu_- V_+.
pub fn dispersion2(k: f64, vm: C64, vp: C64, wm: C64, wp: C64) -> Result<C64> {
    let mum = decay_rate(k, wm)?;
    let mup = decay_rate(k, wp)?;
    Ok(mup * vm + mum * vp)
}

/// Layer quantities V, W, mu on both sides at a given omega.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoLayerState {
    pub vm: C64,
    pub vp: C64,
    pub wm: C64,
    pub wp: C64,
    pub mum: C64,
    pub mup: C64,
}

impl TwoLayerState {
    pub fn new(k: f64, left: &MaterialLayer, right: &MaterialLayer, omega: C64) -> Result<Self> {
        let vm = left.potential(omega)?;
        let vp = right.potential(omega)?;
        let wm = -omega * vm;
        let wp = -omega * vp;
        Ok(Self {
            vm,
            vp,
            wm,
            wp,
            mum: decay_rate(k, wm)?,
            mup: decay_rate(k, wp)?,
        })
    }

    pub fn dispersion(&self) -> C64 {
        self.mup * self.vm + self.mum * self.vp
    }

    /// Size of the two addends; the natural scale for relative residuals.
    pub fn scale(&self) -> f64 {
        (self.mup * self.vm).norm() + (self.mum * self.vp).norm()
    }

    pub fn relative_residual(&self) -> f64 {
        let s = self.scale();
        if s == 0.0 {
            0.0
        } else {
            self.dispersion().norm() / s
        }
    }
}

pub fn dispersion2_at(k: f64, geometry: &LayeredGeometry, omega: C64) -> Result<C64> {
    let (l, r) = geometry.as_two_layer()?;
    Ok(TwoLayerState::new(k, l, r, omega)?.dispersion())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClosedFormPt {
    /// Roots of the quadratic for omega^2.
    pub mu: [C64; 2],
    /// Candidates +-sqrt(mu_i) that satisfy the dispersion relation with Re mu_+- > 0.
    pub omega0_candidates: Vec<C64>,
    pub rejected: Vec<C64>,
}

/// Closed-form omega^2 roots for the Drude pair (omega_p, gamma) | (omega_p, -gamma)
/// with prefactor 2 pi.
pub fn closed_form_pt_drude(k: f64, omega_p: f64, gamma: f64) -> Result<ClosedFormPt> {
    closed_form_pt_drude_scaled(k, omega_p, gamma, TAU)
}

pub fn closed_form_pt_drude_scaled(
    k: f64,
    omega_p: f64,
    gamma: f64,
    scale: f64,
) -> Result<ClosedFormPt> {
    if !(k.is_finite() && omega_p > 0.0 && gamma.is_finite() && scale.is_finite()) {
        return Err(Error::InvalidParameter(
            "closed form needs finite k, gamma and omega_p > 0".into(),
        ));
    }
    let a = scale * omega_p * omega_p;
    let k2 = k * k;
    let g2 = gamma * gamma;
    let disc = C64::new(g2 * (g2 - 4.0 * (a - k2)) + 4.0 * k2 * k2, 0.0).sqrt();
    let base = C64::new(k2 + a - 0.5 * g2, 0.0);
    let mu = [base + 0.5 * disc, base - 0.5 * disc];
    let left = MaterialLayer {
        chi1: crate::materials::Susceptibility::Drude {
            plasma_frequency: omega_p,
            damping: gamma,
            scale,
        },
        chi3: C64::new(0.0, 0.0),
    };
    let right = left.pt_partner();
    let mut omega0_candidates = Vec::new();
    let mut rejected = Vec::new();
    for m in mu {
        let r = m.sqrt();
        for w in [r, -r] {
            let ok = TwoLayerState::new(k, &left, &right, w)
                .map(|s| s.relative_residual() <= CERTIFICATE_TOL)
                .unwrap_or(false);
            if ok {
                omega0_candidates.push(w);
            } else {
                rejected.push(w);
            }
        }
    }
    Ok(ClosedFormPt {
        mu,
        omega0_candidates,
        rejected,
    })
}

/// (2k^2 - W_+)(2k^2 - W_-) - 2k^4 - (k^2 - W_+) V_-^2.
pub fn simplicity_expression2(k: f64, vm: C64, wm: C64, wp: C64) -> C64 {
    let k2 = k * k;
    (2.0 * k2 - wp) * (2.0 * k2 - wm) - 2.0 * k2 * k2 - (k2 - wp) * vm * vm
}

fn simplicity_scale(k: f64, vm: C64, wm: C64, wp: C64) -> f64 {
    let k2 = k * k;
    ((2.0 * k2 - wp) * (2.0 * k2 - wm)).norm() + 2.0 * k2 * k2 + ((k2 - wp) * vm * vm).norm()
}

pub fn is_algebraically_simple2(k: f64, vm: C64, wm: C64, wp: C64) -> bool {
    let e = simplicity_expression2(k, vm, wm, wp);
    e.norm() > SIMPLICITY_TOL * simplicity_scale(k, vm, wm, wp).max(k.powi(4))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IsolationRadius {
    pub radius: f64,
    /// |cubic(0)| relative to its coefficient scale.
    pub cubic_residual_at_zero: f64,
    pub degenerate: bool,
}

/// Radius of the largest disk |lambda| < r free of further roots of
/// k^2((V_- - i l) + (V_+ - i l)) + (omega - i l)(V_+ - i l)(V_- - i l).
pub fn isolation_radius2(k: f64, omega: C64, vm: C64, vp: C64) -> IsolationRadius {
    // z = -i lambda turns the cubic into a monic polynomial in z.
    let k2 = k * k;
    let c2 = omega + vp + vm;
    let c1 = omega * vp + omega * vm + vp * vm + 2.0 * k2;
    let c0 = omega * vp * vm + k2 * (vp + vm);
    let coef_scale = 1.0 + (omega * vp * vm).norm() + k2 * (vp.norm() + vm.norm());
    let disc = (c2 * c2 - 4.0 * c1).sqrt();
    let z1 = 0.5 * (-c2 + disc);
    let z2 = 0.5 * (-c2 - disc);
    let radius = z1.norm().min(z2.norm());
    IsolationRadius {
        radius,
        cubic_residual_at_zero: c0.norm() / coef_scale,
        degenerate: radius <= 1e-12 * (1.0 + c2.norm()),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenvalueCertificate {
    pub omega0: C64,
    pub k: f64,
    pub mu_minus: C64,
    pub mu_plus: C64,
    pub in_n_k: bool,
    pub algebraically_simple: bool,
    pub isolation_radius: Option<f64>,
    pub residual: f64,
}

pub fn certify2(k: f64, geometry: &LayeredGeometry, omega: C64) -> Result<EigenvalueCertificate> {
    let (l, r) = geometry.as_two_layer()?;
    let s = TwoLayerState::new(k, l, r, omega)?;
    let residual = s.relative_residual();
    let simple = is_algebraically_simple2(k, s.vm, s.wm, s.wp);
    let iso = isolation_radius2(k, omega, s.vm, s.vp);
    Ok(EigenvalueCertificate {
        omega0: omega,
        k,
        mu_minus: s.mum,
        mu_plus: s.mup,
        in_n_k: s.mum.re > 0.0 && s.mup.re > 0.0,
        algebraically_simple: simple,
        isolation_radius: (!iso.degenerate).then_some(iso.radius),
        residual,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigsOptions {
    pub roots: RootOptions,
    pub tol: f64,
}

impl Default for EigsOptions {
    fn default() -> Self {
        Self {
            roots: RootOptions::default(),
            tol: CERTIFICATE_TOL,
        }
    }
}

/// Certified eigenvalues of the two-layer problem inside `region`.
pub fn find_eigenvalues2(
    k: f64,
    geometry: &LayeredGeometry,
    region: &Region,
    opts: &EigsOptions,
) -> Result<Vec<EigenvalueCertificate>> {
    if !k.is_finite() {
        return Err(Error::InvalidParameter("k must be finite".into()));
    }
    region.validate()?;
    let (l, r) = geometry.as_two_layer()?;
    let f = |w: C64| -> Result<C64> {
        let s = TwoLayerState::new(k, l, r, w)?;
        let sc = s.scale();
        Ok(if sc > 0.0 { s.dispersion() / sc } else { s.dispersion() })
    };
    let mut out = Vec::new();
    for w in find_roots(&f, region, &opts.roots) {
        if let Ok(c) = certify2(k, geometry, w) {
            if c.residual <= opts.tol && c.in_n_k {
                out.push(c);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt() -> LayeredGeometry {
        let l = MaterialLayer::drude(0.5, 0.7);
        LayeredGeometry::two_layer(l.clone(), l.pt_partner())
    }

    fn non_pt() -> LayeredGeometry {
        LayeredGeometry::two_layer(
            MaterialLayer::drude(0.8, 1.0),
            MaterialLayer::constant(C64::new(1.0, 0.0)),
        )
    }

    // Frozen from a 30-digit evaluation of the quadratic formula.
    const MU1: f64 = 3.209_161_936_194_821_5;
    const MU2: f64 = 1.442_430_717_394_971_7;
    const OMEGA_PT: f64 = 1.791_413_390_648_518_5;

    #[test]
    fn closed_form_values() {
        let cf = closed_form_pt_drude(1.0, 0.5, 0.7).unwrap();
        assert!((cf.mu[0].re - MU1).abs() < 1e-13 && cf.mu[0].im == 0.0);
        assert!((cf.mu[1].re - MU2).abs() < 1e-13);
        assert!(cf
            .omega0_candidates
            .iter()
            .any(|w| (w - OMEGA_PT).norm() < 1e-13));
    }

    #[test]
    fn closed_form_agrees_with_root_finder() {
        let reg = Region::new(0.1, 3.0, -1.0, 1.0).unwrap();
        let found = find_eigenvalues2(1.0, &pt(), &reg, &EigsOptions::default()).unwrap();
        let w = found
            .iter()
            .find(|c| (c.omega0 - OMEGA_PT).norm() < 1e-3)
            .expect("root near 1.7914");
        assert!((w.omega0 - OMEGA_PT).norm() < 1e-10);
        assert!(w.algebraically_simple);
        assert!(w.isolation_radius.unwrap() > 0.0);
    }

    #[test]
    fn non_pt_k_one_root() {
        // 30-digit reference for k = 1.
        let reg = Region::new(0.1, 1.0, -0.5, 0.1).unwrap();
        let found = find_eigenvalues2(1.0, &non_pt(), &reg, &EigsOptions::default()).unwrap();
        assert_eq!(found.len(), 1);
        let expect = C64::new(0.627_082_250_534_121, -0.120_752_145_034_717);
        assert!((found[0].omega0 - expect).norm() < 1e-10);
    }

    #[test]
    fn non_pt_root_at_k_07() {
        let reg = Region::new(0.1, 1.0, -0.5, 0.1).unwrap();
        let found = find_eigenvalues2(0.7, &non_pt(), &reg, &EigsOptions::default()).unwrap();
        let expect = C64::new(0.467_811_796_902_713_1, -0.060_945_281_914_171_45);
        assert!(found.iter().any(|c| (c.omega0 - expect).norm() < 1e-10));
    }

    #[test]
    fn dispersion_small_at_pt_root() {
        let g = pt();
        let d = dispersion2_at(1.0, &g, C64::new(1.7914, 0.0)).unwrap();
        assert!(d.norm() < 1e-3);
    }

    #[test]
    fn isolation_cubic_vanishes_at_zero() {
        let g = pt();
        let (l, r) = g.as_two_layer().unwrap();
        let w = C64::new(OMEGA_PT, 0.0);
        let s = TwoLayerState::new(1.0, l, r, w).unwrap();
        let iso = isolation_radius2(1.0, w, s.vm, s.vp);
        assert!(iso.cubic_residual_at_zero < 1e-12);
        assert!(iso.radius > 0.0 && !iso.degenerate);
    }

    #[test]
    fn simplicity_degenerate_synthetic() {
        // Choose W_+ so the expression vanishes exactly.
        let k = 1.0;
        let vm = C64::new(0.3, 0.2);
        let wm = C64::new(-0.5, 0.1);
        // (2 - wp)(2 - wm) - 2 - (1 - wp) vm^2 = 0 is linear in wp.
        let a = 2.0 - wm;
        let wp = (2.0 * a - 2.0 - vm * vm) / (a - vm * vm);
        assert!(simplicity_expression2(k, vm, wm, wp).norm() < 1e-14);
        assert!(!is_algebraically_simple2(k, vm, wm, wp));
    }

    #[test]
    fn rejects_non_two_layer_geometry() {
        let l = MaterialLayer::constant(C64::new(1.0, 0.0));
        let g = LayeredGeometry::sandwich(l.clone(), l.clone(), l, 1.0);
        let reg = Region::new(0.1, 1.0, -0.5, 0.5).unwrap();
        assert!(find_eigenvalues2(1.0, &g, &reg, &EigsOptions::default()).is_err());
    }
}
