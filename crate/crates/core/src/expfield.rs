//! Piecewise sums of exponentials, closed under products, conjugation and
//! differentiation, with exact integrals over each layer.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// sum_j c_j exp(r_j x).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ExpSum {
    pub terms: Vec<(C64, C64)>,
}

fn same_rate(a: C64, b: C64) -> bool {
    (a - b).norm() <= 1e-13 * (1.0 + a.norm())
}

impl ExpSum {
    pub fn zero() -> Self {
        Self { terms: Vec::new() }
    }

    pub fn single(coef: C64, rate: C64) -> Self {
        Self {
            terms: vec![(coef, rate)],
        }
    }

    fn push(&mut self, c: C64, r: C64) {
        if c.norm() == 0.0 {
            return;
        }
        if let Some(t) = self.terms.iter_mut().find(|t| same_rate(t.1, r)) {
            t.0 += c;
        } else {
            self.terms.push((c, r));
        }
    }

    pub fn eval(&self, x: f64) -> C64 {
        self.terms.iter().map(|&(c, r)| c * (r * x).exp()).sum()
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            terms: self.terms.iter().map(|&(c, r)| (c * s, r)).collect(),
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for &(c, r) in &o.terms {
            out.push(c, r);
        }
        out
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut out = Self::zero();
        for &(c1, r1) in &self.terms {
            for &(c2, r2) in &o.terms {
                out.push(c1 * c2, r1 + r2);
            }
        }
        out
    }

    pub fn conj(&self) -> Self {
        Self {
            terms: self.terms.iter().map(|&(c, r)| (c.conj(), r.conj())).collect(),
        }
    }

    pub fn derivative(&self) -> Self {
        Self {
            terms: self.terms.iter().map(|&(c, r)| (c * r, r)).collect(),
        }
    }

    /// Exact integral over (a, b); either end may be infinite.
    pub fn integrate(&self, a: f64, b: f64) -> Result<C64> {
        let mut total = C64::new(0.0, 0.0);
        for &(c, r) in &self.terms {
            total += c * integrate_exp(r, a, b)?;
        }
        Ok(total)
    }

    /// Moduli of the tails over (-inf, a) or (b, inf) beyond a cutoff.
    pub fn tail_bound(&self, a: f64, b: f64) -> f64 {
        self.terms
            .iter()
            .map(|&(c, r)| {
                let mut t = 0.0;
                if a.is_finite() && a < 0.0 && r.re > 0.0 {
                    t += c.norm() * (r.re * a).exp() / r.re;
                }
                if b.is_finite() && b > 0.0 && r.re < 0.0 {
                    t += c.norm() * (r.re * b).exp() / -r.re;
                }
                t
            })
            .sum()
    }
}

fn integrate_exp(r: C64, a: f64, b: f64) -> Result<C64> {
    let diverge = || Error::InvalidParameter(format!("integral of exp({r} x) over ({a}, {b}) diverges"));
    if r.norm() == 0.0 {
        if a.is_finite() && b.is_finite() {
            return Ok(C64::new(b - a, 0.0));
        }
        return Err(diverge());
    }
    let upper = if b == f64::INFINITY {
        if r.re < 0.0 {
            C64::new(0.0, 0.0)
        } else {
            return Err(diverge());
        }
    } else {
        (r * b).exp()
    };
    let lower = if a == f64::NEG_INFINITY {
        if r.re > 0.0 {
            C64::new(0.0, 0.0)
        } else {
            return Err(diverge());
        }
    } else {
        (r * a).exp()
    };
    Ok((upper - lower) / r)
}

/// A three-component field that is an exponential sum on each layer.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    pub interfaces: Vec<f64>,
    pub pieces: Vec<[ExpSum; 3]>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

impl Field {
    pub fn bounds(&self, j: usize) -> (f64, f64) {
        let a = if j == 0 {
            f64::NEG_INFINITY
        } else {
            self.interfaces[j - 1]
        };
        let b = self.interfaces.get(j).copied().unwrap_or(f64::INFINITY);
        (a, b)
    }

    fn layer_index(&self, x: f64, side: Side) -> usize {
        self.interfaces
            .iter()
            .take_while(|&&xi| match side {
                Side::Left => x > xi,
                Side::Right => x >= xi,
            })
            .count()
    }

    pub fn eval(&self, x: f64) -> [C64; 3] {
        self.eval_side(x, Side::Left)
    }

    /// One-sided value; away from interfaces both sides agree.
    pub fn eval_side(&self, x: f64, side: Side) -> [C64; 3] {
        let p = &self.pieces[self.layer_index(x, side)];
        [p[0].eval(x), p[1].eval(x), p[2].eval(x)]
    }

    pub fn map_pieces<F>(&self, f: F) -> Self
    where
        F: Fn(usize, &[ExpSum; 3]) -> [ExpSum; 3],
    {
        Self {
            interfaces: self.interfaces.clone(),
            pieces: self.pieces.iter().enumerate().map(|(j, p)| f(j, p)).collect(),
        }
    }

    pub fn scale(&self, s: C64) -> Self {
        self.map_pieces(|_, p| [p[0].scale(s), p[1].scale(s), p[2].scale(s)])
    }

    pub fn add(&self, o: &Self) -> Self {
        self.map_pieces(|j, p| {
            let q = &o.pieces[j];
            [p[0].add(&q[0]), p[1].add(&q[1]), p[2].add(&q[2])]
        })
    }

    /// <f, g> = sum_c int f_c conj(g_c).
    pub fn inner(&self, g: &Self) -> Result<C64> {
        if self.interfaces != g.interfaces {
            return Err(Error::Geometry("fields live on different layerings".into()));
        }
        let mut total = C64::new(0.0, 0.0);
        for (j, (p, q)) in self.pieces.iter().zip(&g.pieces).enumerate() {
            let (a, b) = self.bounds(j);
            for c in 0..3 {
                total += p[c].mul(&q[c].conj()).integrate(a, b)?;
            }
        }
        Ok(total)
    }

    pub fn norm(&self) -> Result<f64> {
        Ok(self.inner(self)?.re.max(0.0).sqrt())
    }

    /// Bound on |int f conj(g)| outside [-l, l].
    pub fn inner_tail_bound(&self, g: &Self, l: f64) -> f64 {
        let mut t = 0.0;
        for (j, (p, q)) in self.pieces.iter().zip(&g.pieces).enumerate() {
            let (a, b) = self.bounds(j);
            for c in 0..3 {
                let prod = p[c].mul(&q[c].conj());
                let lo = if a == f64::NEG_INFINITY { -l } else { f64::NAN };
                let hi = if b == f64::INFINITY { l } else { f64::NAN };
                t += prod.tail_bound(lo, hi);
            }
        }
        t
    }

    /// Largest jump of components 2 and 3 across the interfaces.
    pub fn interface_jump(&self) -> f64 {
        self.interfaces
            .iter()
            .map(|&x| {
                let l = self.eval_side(x, Side::Left);
                let r = self.eval_side(x, Side::Right);
                (l[1] - r[1]).norm().max((l[2] - r[2]).norm())
            })
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn integral_of_decaying_exponential() {
        let e = ExpSum::single(c(2.0, 1.0), c(-0.5, 3.0));
        let v = e.integrate(0.0, f64::INFINITY).unwrap();
        assert!((v - c(2.0, 1.0) / c(0.5, -3.0)).norm() < 1e-15);
        assert!(e.integrate(f64::NEG_INFINITY, 0.0).is_err());
        let z = ExpSum::single(c(1.0, 0.0), c(0.0, 0.0));
        assert_eq!(z.integrate(1.0, 3.0).unwrap(), c(2.0, 0.0));
    }

    #[test]
    fn products_merge_rates() {
        let a = ExpSum {
            terms: vec![(c(1.0, 0.0), c(1.0, 0.0)), (c(1.0, 0.0), c(-1.0, 0.0))],
        };
        let p = a.mul(&a);
        assert_eq!(p.terms.len(), 3);
        assert!((p.eval(0.3) - a.eval(0.3).powi(2)).norm() < 1e-14);
    }

    proptest! {
        #[test]
        fn integral_matches_trapezoid(cr in -1.0f64..1.0, ci in -1.0f64..1.0, rr in -2.0f64..2.0, ri in -3.0f64..3.0) {
            let e = ExpSum::single(c(cr, ci), c(rr, ri));
            let n = 20000;
            let h = 1.0 / n as f64;
            let mut s = 0.5 * (e.eval(0.0) + e.eval(1.0));
            for j in 1..n {
                s += e.eval(j as f64 * h);
            }
            s *= h;
            let exact = e.integrate(0.0, 1.0).unwrap();
            prop_assert!((s - exact).norm() < 1e-7);
        }

        #[test]
        fn derivative_matches_fd(cr in -1.0f64..1.0, rr in -2.0f64..2.0, ri in -3.0f64..3.0, x in -1.0f64..1.0) {
            let e = ExpSum { terms: vec![(c(cr, 0.5), c(rr, ri)), (c(0.3, -cr), c(-rr, 1.0))] };
            let h = 1e-6;
            let fd = (e.eval(x + h) - e.eval(x - h)) / (2.0 * h);
            prop_assert!((fd - e.derivative().eval(x)).norm() < 1e-6 * (1.0 + fd.norm()));
        }
    }
}
