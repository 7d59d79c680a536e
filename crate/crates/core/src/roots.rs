//! Muller iteration from a grid of seeds over a rectangle of the complex plane.

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl Region {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Result<Self> {
        let r = Self {
            re_min,
            re_max,
            im_min,
            im_max,
        };
        r.validate()?;
        Ok(r)
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.re_min, self.re_max, self.im_min, self.im_max];
        if all.iter().any(|v| !v.is_finite()) || self.re_max < self.re_min || self.im_max < self.im_min
        {
            return Err(Error::InvalidParameter(format!("bad search region {self:?}")));
        }
        Ok(())
    }

    pub fn contains(&self, z: C64, slack: f64) -> bool {
        z.re >= self.re_min - slack
            && z.re <= self.re_max + slack
            && z.im >= self.im_min - slack
            && z.im <= self.im_max + slack
    }

    fn diameter(&self) -> f64 {
        ((self.re_max - self.re_min).powi(2) + (self.im_max - self.im_min).powi(2))
            .sqrt()
            .max(1e-3)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RootOptions {
    pub grid_re: usize,
    pub grid_im: usize,
    pub max_iters: usize,
    pub dedup_tol: f64,
}

impl Default for RootOptions {
    fn default() -> Self {
        Self {
            grid_re: 24,
            grid_im: 8,
            max_iters: 120,
            dedup_tol: 1e-6,
        }
    }
}

pub fn seeds(region: &Region, nre: usize, nim: usize) -> Vec<C64> {
    let axis = |a: f64, b: f64, n: usize| -> Vec<f64> {
        if n <= 1 {
            vec![0.5 * (a + b)]
        } else {
            (0..n).map(|i| a + (b - a) * (i as f64 + 0.5) / n as f64).collect()
        }
    };
    let xs = axis(region.re_min, region.re_max, nre);
    let ys = axis(region.im_min, region.im_max, nim);
    ys.iter()
        .flat_map(|&y| xs.iter().map(move |&x| C64::new(x, y)))
        .collect()
}

/// Muller iteration started at `seed` with initial spread `h`. Steps are
/// damped to at most `max_step`.
pub fn muller<F>(f: &F, seed: C64, h: f64, max_step: f64, max_iters: usize) -> Option<C64>
where
    F: Fn(C64) -> Result<C64>,
{
    let mut z0 = seed - h;
    let mut z1 = seed + h;
    let mut z2 = seed + C64::new(0.0, h);
    let mut f0 = f(z0).ok()?;
    let mut f1 = f(z1).ok()?;
    let mut f2 = f(z2).ok()?;
    for _ in 0..max_iters {
        if f2.norm() == 0.0 {
            return Some(z2);
        }
        let q = (z2 - z1) / (z1 - z0);
        let a = q * f2 - q * (1.0 + q) * f1 + q * q * f0;
        let b = (2.0 * q + 1.0) * f2 - (1.0 + q) * (1.0 + q) * f1 + q * q * f0;
        let c = (1.0 + q) * f2;
        let disc = (b * b - 4.0 * a * c).sqrt();
        let den = if (b + disc).norm() >= (b - disc).norm() {
            b + disc
        } else {
            b - disc
        };
        let mut step = if den.norm() == 0.0 {
            (z2 - z1) * 0.5
        } else {
            -(z2 - z1) * 2.0 * c / den
        };
        if !(step.re.is_finite() && step.im.is_finite()) {
            return None;
        }
        if step.norm() > max_step {
            step *= max_step / step.norm();
        }
        let z3 = z2 + step;
        let f3 = f(z3).ok()?;
        z0 = z1;
        f0 = f1;
        z1 = z2;
        f1 = f2;
        z2 = z3;
        f2 = f3;
        if step.norm() <= 1e-15 * (1.0 + z2.norm()) {
            return Some(z2);
        }
    }
    None
}

/// All distinct roots found from the seed grid that land inside `region`
/// (with a small slack). Output is sorted by real then imaginary part.
pub fn find_roots<F>(f: &F, region: &Region, opts: &RootOptions) -> Vec<C64>
where
    F: Fn(C64) -> Result<C64> + Sync,
{
    let diam = region.diameter();
    let spacing = diam / (opts.grid_re.max(opts.grid_im).max(1) as f64);
    let h = 0.05 * spacing;
    let found: Vec<Option<C64>> = seeds(region, opts.grid_re, opts.grid_im)
        .par_iter()
        .map(|&s| muller(f, s, h, 0.25 * diam, opts.max_iters))
        .collect();
    let slack = 1e-9 * (1.0 + diam);
    let mut out: Vec<C64> = Vec::new();
    for z in found.into_iter().flatten() {
        if !region.contains(z, slack) {
            continue;
        }
        if out
            .iter()
            .all(|w| (w - z).norm() > opts.dedup_tol * (1.0 + z.norm()))
        {
            out.push(z);
        }
    }
    out.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    out
}
