use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expfield::{Field, Side};

/// Uniform grid on (-L, L) with N interior nodes and the interface node at 0.
/// Boundary values at +-L are zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid1D {
    pub l: f64,
    pub n: usize,
}

impl Grid1D {
    pub fn new(l: f64, n: usize) -> Result<Self> {
        let g = Self { l, n };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.l > 0.0 && self.l.is_finite()) {
            return Err(Error::InvalidParameter(format!("L = {} must be positive", self.l)));
        }
        if self.n < 5 || self.n % 2 == 0 {
            return Err(Error::InvalidParameter(format!(
                "N = {} must be odd and at least 5",
                self.n
            )));
        }
        Ok(())
    }

    pub fn dx(&self) -> f64 {
        2.0 * self.l / (self.n + 1) as f64
    }

    /// Zero-based index of the node at x = 0.
    pub fn j_star(&self) -> usize {
        (self.n - 1) / 2
    }

    pub fn x(&self, j: usize) -> f64 {
        (j as f64 - self.j_star() as f64) * self.dx()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.x(j)).collect()
    }

    /// Trapezoid weight of node j; the interface node carries dx/2 on
    /// each one-sided value.
    pub fn weight(&self, j: usize) -> f64 {
        if j == self.j_star() {
            0.5 * self.dx()
        } else {
            self.dx()
        }
    }
}

/// Three-component field on grid nodes; `values[j_star]` is the left limit at
/// 0 and `right` the right limit.
#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    pub grid: Grid1D,
    pub values: Vec<[C64; 3]>,
    pub right: [C64; 3],
}

impl GridField {
    pub fn zeros(grid: Grid1D) -> Self {
        let z = [C64::new(0.0, 0.0); 3];
        Self {
            grid,
            values: vec![z; grid.n],
            right: z,
        }
    }

    pub fn from_field(grid: Grid1D, f: &Field) -> Self {
        let js = grid.j_star();
        let values = (0..grid.n)
            .map(|j| {
                if j == js {
                    f.eval_side(0.0, Side::Left)
                } else {
                    f.eval(grid.x(j))
                }
            })
            .collect();
        Self {
            grid,
            values,
            right: f.eval_side(0.0, Side::Right),
        }
    }

    /// Value at node j as seen from the given side of the interface.
    pub fn at(&self, j: usize, side: Side) -> [C64; 3] {
        if j == self.grid.j_star() && side == Side::Right {
            self.right
        } else {
            self.values[j]
        }
    }

    pub fn scale(&self, s: C64) -> Self {
        let m = |v: &[C64; 3]| [v[0] * s, v[1] * s, v[2] * s];
        Self {
            grid: self.grid,
            values: self.values.iter().map(m).collect(),
            right: m(&self.right),
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let a = |p: &[C64; 3], q: &[C64; 3]| [p[0] + q[0], p[1] + q[1], p[2] + q[2]];
        Self {
            grid: self.grid,
            values: self.values.iter().zip(&o.values).map(|(p, q)| a(p, q)).collect(),
            right: a(&self.right, &o.right),
        }
    }

    /// Split trapezoid approximation of sum_c int f_c conj(g_c).
    pub fn inner(&self, g: &Self) -> C64 {
        let js = self.grid.j_star();
        let dot = |p: &[C64; 3], q: &[C64; 3]| -> C64 { (0..3).map(|c| p[c] * q[c].conj()).sum() };
        let mut s = C64::new(0.0, 0.0);
        for j in 0..self.grid.n {
            s += self.grid.weight(j) * dot(&self.values[j], &g.values[j]);
        }
        s + self.grid.weight(js) * dot(&self.right, &g.right)
    }

    pub fn norm(&self) -> f64 {
        self.inner(self).re.max(0.0).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.values
            .iter()
            .chain(std::iter::once(&self.right))
            .flat_map(|v| v.iter())
            .fold(0.0, |m, z| m.max(z.norm()))
    }

    /// Largest componentwise difference, comparing both one-sided values at 0.
    pub fn max_diff(&self, o: &Self) -> f64 {
        self.values
            .iter()
            .zip(&o.values)
            .chain(std::iter::once((&self.right, &o.right)))
            .flat_map(|(p, q)| (0..3).map(move |c| (p[c] - q[c]).norm()))
            .fold(0.0, f64::max)
    }

    /// PT reflection conj(u(-x)); at 0 the one-sided values swap.
    pub fn pt_reflect(&self) -> Self {
        let n = self.grid.n;
        let js = self.grid.j_star();
        let cj = |v: &[C64; 3]| [v[0].conj(), v[1].conj(), v[2].conj()];
        let mut values: Vec<[C64; 3]> = (0..n).map(|j| cj(&self.values[n - 1 - j])).collect();
        values[js] = cj(&self.right);
        Self {
            grid: self.grid,
            values,
            right: cj(&self.values[js]),
        }
    }

    /// min over phases of max |v - conj(v(-x))| with v = e^{i theta} u.
    pub fn pt_defect(&self) -> f64 {
        let r = self.pt_reflect();
        // e^{2 i theta} u ~ P u in least squares
        let num = r.inner(self);
        let rot = if num.norm() > 0.0 {
            (num / num.norm()).sqrt()
        } else {
            C64::new(1.0, 0.0)
        };
        let v = self.scale(rot);
        v.max_diff(&v.pt_reflect())
    }
}
