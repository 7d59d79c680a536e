//! Closed-form eigenfunctions of the linear pencil and its adjoint.
//!
//! The pencil acts as L(omega) u = A u + B(omega) u with
//! A u = (-i k u3, u3', i k u1 - u2') and B(omega) = diag(iV, iV, i omega).

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::expfield::{ExpSum, Field, Side};
use crate::materials::{decay_rate, LayeredGeometry};
use crate::spectrum3::mu_star;

fn rates(k: f64, geometry: &LayeredGeometry, omega: C64) -> Result<(Vec<C64>, Vec<C64>)> {
    let v: Vec<C64> = geometry
        .layers
        .iter()
        .map(|l| l.potential(omega))
        .collect::<Result<_>>()?;
    let m = v.len();
    let mu: Vec<C64> = v
        .iter()
        .enumerate()
        .map(|(j, &vj)| {
            let w = -omega * vj;
            if j == 0 || j == m - 1 {
                decay_rate(k, w)
            } else {
                mu_star(k, w)
            }
        })
        .collect::<Result<_>>()?;
    if v.iter().any(|x| x.norm() == 0.0) {
        return Err(Error::DegenerateFactor("V = 0 in a layer"));
    }
    Ok((v, mu))
}

fn piece(k: f64, v: C64, psi2: ExpSum, psi3: ExpSum) -> [ExpSum; 3] {
    [psi3.scale(C64::new(k, 0.0) / v), psi2, psi3]
}

/// Unnormalized eigenfunction with unit coefficient in the left layer.
pub fn eigenfunction_raw(k: f64, geometry: &LayeredGeometry, omega: C64) -> Result<Field> {
    geometry.validate()?;
    let (v, mu) = rates(k, geometry, omega)?;
    let i = C64::i();
    let pieces = match geometry.layers.len() {
        2 => {
            if geometry.interfaces != [0.0] {
                return Err(Error::Geometry("two-layer interface must be at 0".into()));
            }
            let (vm, vp, mm, mp) = (v[0], v[1], mu[0], mu[1]);
            vec![
                piece(k, vm, ExpSum::single(mm, mm), ExpSum::single(-i * vm, mm)),
                piece(k, vp, ExpSum::single(mm, -mp), ExpSum::single(-i * vm, -mp)),
            ]
        }
        3 => {
            if geometry.interfaces[0] != 0.0 {
                return Err(Error::Geometry("three-layer interfaces must be 0 and d".into()));
            }
            let d = geometry.interfaces[1];
            let (vm, vs, vp) = (v[0], v[1], v[2]);
            let (mm, ms, mp) = (mu[0], mu[1], mu[2]);
            let b = 0.5 * (mm / ms - vm / vs);
            let c = 0.5 * (mm / ms + vm / vs);
            let a = 0.5 * (mp * d).exp() * ms / mp
                * ((ms * d).exp() * (mm / ms + vm / vs) + (-ms * d).exp() * (mm / ms - vm / vs));
            vec![
                piece(k, vm, ExpSum::single(mm, mm), ExpSum::single(-i * vm, mm)),
                piece(
                    k,
                    vs,
                    ExpSum {
                        terms: vec![(b * ms, -ms), (c * ms, ms)],
                    },
                    ExpSum {
                        terms: vec![(i * vs * b, -ms), (-i * vs * c, ms)],
                    },
                ),
                piece(k, vp, ExpSum::single(a * mp, -mp), ExpSum::single(i * vp * a, -mp)),
            ]
        }
        _ => {
            return Err(Error::Geometry(
                "closed-form eigenfunctions exist for two or three layers".into(),
            ))
        }
    };
    Ok(Field {
        interfaces: geometry.interfaces.clone(),
        pieces,
    })
}

/// Unit-norm eigenfunction with phi_2(0-) real and positive.
pub fn eigenfunction(k: f64, omega: C64, geometry: &LayeredGeometry) -> Result<Field> {
    let psi = eigenfunction_raw(k, geometry, omega)?;
    let n = psi.norm()?;
    let v = psi.eval_side(0.0, Side::Left)[1];
    if n == 0.0 || v.norm() == 0.0 {
        return Err(Error::DegenerateFactor("eigenfunction vanishes"));
    }
    Ok(psi.scale(v.conj() / (v.norm() * n)))
}

/// Adjoint eigenfunction conj(phi(x; -k)), scaled so <phi0, phi0*> = 1.
pub fn adjoint_eigenfunction(
    k: f64,
    omega: C64,
    geometry: &LayeredGeometry,
    phi0: &Field,
) -> Result<Field> {
    let psi = eigenfunction(-k, omega, geometry)?;
    let adj = psi.map_pieces(|_, p| [p[0].conj(), p[1].conj(), p[2].conj()]);
    let pairing = phi0.inner(&adj)?;
    if pairing.norm() <= 1e-12 {
        return Err(Error::DegenerateFactor(
            "<phi0, phi0*> vanishes: eigenvalue is not algebraically simple",
        ));
    }
    Ok(adj.scale(C64::new(1.0, 0.0) / pairing.conj()))
}

/// L(omega) u applied piecewise.
pub fn apply_pencil(k: f64, omega: C64, geometry: &LayeredGeometry, u: &Field) -> Result<Field> {
    let v: Vec<C64> = geometry
        .layers
        .iter()
        .map(|l| l.potential(omega))
        .collect::<Result<_>>()?;
    let i = C64::i();
    let ik = C64::new(0.0, k);
    Ok(u.map_pieces(|j, p| {
        [
            p[0].scale(i * v[j]).add(&p[2].scale(-ik)),
            p[1].scale(i * v[j]).add(&p[2].derivative()),
            p[2].scale(i * omega)
                .add(&p[0].scale(ik))
                .add(&p[1].derivative().scale(C64::new(-1.0, 0.0))),
        ]
    }))
}

fn coef_size(f: &Field) -> f64 {
    f.pieces
        .iter()
        .flat_map(|p| p.iter())
        .flat_map(|e| e.terms.iter())
        .map(|t| t.0.norm())
        .fold(0.0, f64::max)
}

/// Largest coefficient of L(omega) u relative to the largest coefficient of u
/// times the operator scale.
pub fn pencil_residual(k: f64, omega: C64, geometry: &LayeredGeometry, u: &Field) -> Result<f64> {
    let r = apply_pencil(k, omega, geometry, u)?;
    let vmax = geometry
        .layers
        .iter()
        .map(|l| l.potential(omega).map(|v| v.norm()))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    let rate = u
        .pieces
        .iter()
        .flat_map(|p| p.iter())
        .flat_map(|e| e.terms.iter())
        .map(|t| t.1.norm())
        .fold(0.0, f64::max);
    let scale = coef_size(u) * (1.0 + k.abs() + vmax + omega.norm() + rate);
    Ok(coef_size(&r) / scale.max(f64::MIN_POSITIVE))
}

/// Samples of a field on x, with both one-sided values listed at interfaces.
pub fn sample(f: &Field, xs: &[f64]) -> Vec<(f64, [C64; 3])> {
    let mut out = Vec::with_capacity(xs.len() + 2);
    for &x in xs {
        if f.interfaces.contains(&x) {
            out.push((x, f.eval_side(x, Side::Left)));
            out.push((x, f.eval_side(x, Side::Right)));
        } else {
            out.push((x, f.eval(x)));
        }
    }
    out
}
