//! Banded LU with partial pivoting and a bordered solver for
//! [[A, B], [C, D]] where A is banded and B, C have a few dense columns/rows.

use crate::error::{Error, Result};

/// General band matrix in LAPACK gbtrf layout: column-major with leading
/// dimension 2 kl + ku + 1, entry (i, j) at row kl + ku + i - j of column j.
#[derive(Debug, Clone)]
pub struct BandMatrix {
    pub n: usize,
    pub kl: usize,
    pub ku: usize,
    ab: Vec<f64>,
}

impl BandMatrix {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        Self {
            n,
            kl,
            ku,
            ab: vec![0.0; (2 * kl + ku + 1) * n],
        }
    }

    fn ld(&self) -> usize {
        2 * self.kl + self.ku + 1
    }

    fn idx(&self, i: usize, j: usize) -> usize {
        (self.kl + self.ku + i - j) + j * self.ld()
    }

    pub fn in_band(&self, i: usize, j: usize) -> bool {
        i < self.n && j < self.n && i <= j + self.kl && j <= i + self.ku
    }

    pub fn add(&mut self, i: usize, j: usize, v: f64) -> Result<()> {
        if !self.in_band(i, j) {
            return Err(Error::InvalidParameter(format!(
                "entry ({i}, {j}) outside band kl={} ku={}",
                self.kl, self.ku
            )));
        }
        let k = self.idx(i, j);
        self.ab[k] += v;
        Ok(())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if self.in_band(i, j) {
            self.ab[self.idx(i, j)]
        } else {
            0.0
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.ab.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        for j in 0..self.n {
            let xj = x[j];
            if xj == 0.0 {
                continue;
            }
            let lo = j.saturating_sub(self.ku);
            let hi = (j + self.kl).min(self.n - 1);
            for i in lo..=hi {
                y[i] += self.ab[self.idx(i, j)] * xj;
            }
        }
    }

    /// Factor in place (unblocked gbtf2).
    pub fn factor(mut self) -> Result<BandLu> {
        let (n, kl, ku) = (self.n, self.kl, self.ku);
        let kv = kl + ku;
        let ld = self.ld();
        let mut ipiv = vec![0usize; n];
        let at = |i: usize, j: usize| (kv + i - j) + j * ld;
        let mut ju = 0usize;
        let scale = self.max_abs().max(f64::MIN_POSITIVE);
        for j in 0..n {
            let km = kl.min(n - 1 - j);
            let mut jp = 0usize;
            let mut best = self.ab[at(j, j)].abs();
            for t in 1..=km {
                let v = self.ab[at(j + t, j)].abs();
                if v > best {
                    best = v;
                    jp = t;
                }
            }
            ipiv[j] = j + jp;
            if best <= 1e-300 * scale || best == 0.0 {
                return Err(Error::Singular(format!("zero pivot in banded LU at column {j}")));
            }
            ju = ju.max((j + ku + jp).min(n - 1));
            if jp != 0 {
                for c in j..=ju {
                    self.ab.swap(at(j, c), at(j + jp, c));
                }
            }
            if km > 0 {
                let piv = self.ab[at(j, j)];
                for t in 1..=km {
                    self.ab[at(j + t, j)] /= piv;
                }
                for c in (j + 1)..=ju {
                    let ujc = self.ab[at(j, c)];
                    if ujc != 0.0 {
                        for t in 1..=km {
                            let l = self.ab[at(j + t, j)];
                            self.ab[at(j + t, c)] -= l * ujc;
                        }
                    }
                }
            }
        }
        Ok(BandLu { m: self, ipiv })
    }
}

#[derive(Debug, Clone)]
pub struct BandLu {
    m: BandMatrix,
    ipiv: Vec<usize>,
}

impl BandLu {
    pub fn solve(&self, b: &mut [f64]) {
        let (n, kl, ku) = (self.m.n, self.m.kl, self.m.ku);
        let kv = kl + ku;
        let ld = self.m.ld();
        let ab = &self.m.ab;
        let at = |i: usize, j: usize| (kv + i - j) + j * ld;
        for j in 0..n {
            let l = self.ipiv[j];
            if l != j {
                b.swap(l, j);
            }
            let bj = b[j];
            if bj != 0.0 {
                for t in 1..=kl.min(n - 1 - j) {
                    b[j + t] -= ab[at(j + t, j)] * bj;
                }
            }
        }
        for j in (0..n).rev() {
            b[j] /= ab[at(j, j)];
            let bj = b[j];
            if bj != 0.0 {
                for i in j.saturating_sub(kv)..j {
                    b[i] -= ab[at(i, j)] * bj;
                }
            }
        }
    }
}

/// Dense LU with partial pivoting on a row-major square matrix.
#[derive(Debug, Clone)]
pub struct DenseLu {
    n: usize,
    a: Vec<f64>,
    piv: Vec<usize>,
}

impl DenseLu {
    pub fn new(n: usize, mut a: Vec<f64>) -> Result<Self> {
        assert_eq!(a.len(), n * n);
        let scale = a.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
        let mut piv = vec![0; n];
        for k in 0..n {
            let (mut p, mut best) = (k, a[k * n + k].abs());
            for i in (k + 1)..n {
                if a[i * n + k].abs() > best {
                    best = a[i * n + k].abs();
                    p = i;
                }
            }
            if best <= 1e-14 * scale {
                return Err(Error::Singular(format!("dense LU pivot {best:e} at {k}")));
            }
            piv[k] = p;
            if p != k {
                for c in 0..n {
                    a.swap(k * n + c, p * n + c);
                }
            }
            let d = a[k * n + k];
            for i in (k + 1)..n {
                let l = a[i * n + k] / d;
                a[i * n + k] = l;
                if l != 0.0 {
                    for c in (k + 1)..n {
                        a[i * n + c] -= l * a[k * n + c];
                    }
                }
            }
        }
        Ok(Self { n, a, piv })
    }

    pub fn solve(&self, b: &mut [f64]) {
        let n = self.n;
        for k in 0..n {
            b.swap(k, self.piv[k]);
        }
        for i in 0..n {
            let mut s = b[i];
            for c in 0..i {
                s -= self.a[i * n + c] * b[c];
            }
            b[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = b[i];
            for c in (i + 1)..n {
                s -= self.a[i * n + c] * b[c];
            }
            b[i] = s / self.a[i * n + i];
        }
    }
}

/// [[A, B], [C, D]] with A banded n x n, B n x p (columns), C p x n (rows), D p x p.
#[derive(Debug, Clone)]
pub struct BorderedSystem {
    pub a: BandMatrix,
    pub b_cols: Vec<Vec<f64>>,
    pub c_rows: Vec<Vec<f64>>,
    pub d: Vec<f64>,
}

impl BorderedSystem {
    pub fn new(n: usize, kl: usize, ku: usize, p: usize) -> Self {
        Self {
            a: BandMatrix::zeros(n, kl, ku),
            b_cols: vec![vec![0.0; n]; p],
            c_rows: vec![vec![0.0; n]; p],
            d: vec![0.0; p * p],
        }
    }

    pub fn n(&self) -> usize {
        self.a.n
    }

    pub fn p(&self) -> usize {
        self.b_cols.len()
    }

    pub fn dim(&self) -> usize {
        self.n() + self.p()
    }

    /// Adds to entry (i, j) of the full matrix.
    pub fn add(&mut self, i: usize, j: usize, v: f64) -> Result<()> {
        let n = self.n();
        match (i < n, j < n) {
            (true, true) => self.a.add(i, j, v),
            (true, false) => {
                self.b_cols[j - n][i] += v;
                Ok(())
            }
            (false, true) => {
                self.c_rows[i - n][j] += v;
                Ok(())
            }
            (false, false) => {
                let p = self.p();
                self.d[(i - n) * p + (j - n)] += v;
                Ok(())
            }
        }
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let (n, p) = (self.n(), self.p());
        let mut y = vec![0.0; n + p];
        self.a.matvec(&x[..n], &mut y[..n]);
        for (c, col) in self.b_cols.iter().enumerate() {
            let xc = x[n + c];
            for i in 0..n {
                y[i] += col[i] * xc;
            }
        }
        for (r, row) in self.c_rows.iter().enumerate() {
            let mut s = 0.0;
            for j in 0..n {
                s += row[j] * x[j];
            }
            for c in 0..p {
                s += self.d[r * p + c] * x[n + c];
            }
            y[n + r] = s;
        }
        y
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let m = self.dim();
        let mut out = vec![0.0; m * m];
        for j in 0..m {
            let mut e = vec![0.0; m];
            e[j] = 1.0;
            let col = self.matvec(&e);
            for i in 0..m {
                out[i * m + j] = col[i];
            }
        }
        out
    }

    /// Solves the full system. `deflate` lists band indices whose diagonal is
    /// shifted before factoring; the shift is undone exactly through extra
    /// border unknowns, so A itself may be singular.
    pub fn solve(&self, rhs: &[f64], deflate: &[usize]) -> Result<Vec<f64>> {
        let solver = self.factor(deflate)?;
        let mut x = solver.solve(rhs);
        for _ in 0..2 {
            let ax = self.matvec(&x);
            let r: Vec<f64> = rhs.iter().zip(&ax).map(|(b, a)| b - a).collect();
            let rn = r.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            if rn == 0.0 {
                break;
            }
            let dx = solver.solve(&r);
            for (xi, di) in x.iter_mut().zip(&dx) {
                *xi += di;
            }
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::Singular("non-finite solution".into()));
        }
        Ok(x)
    }

    pub fn factor(&self, deflate: &[usize]) -> Result<BorderedFactor> {
        let n = self.n();
        let p = self.p();
        let q = deflate.len();
        let shift = self.a.max_abs().max(1.0);
        let mut at = self.a.clone();
        for &s in deflate {
            at.add(s, s, shift)?;
        }
        let lu = at.factor()?;
        // columns of A~^{-1} [B, -shift E]
        let mut z: Vec<Vec<f64>> = Vec::with_capacity(p + q);
        for col in &self.b_cols {
            let mut v = col.clone();
            lu.solve(&mut v);
            z.push(v);
        }
        for &s in deflate {
            let mut v = vec![0.0; n];
            v[s] = -shift;
            lu.solve(&mut v);
            z.push(v);
        }
        // rows of C' = [C; E^T]
        let m = p + q;
        let crow = |r: usize, v: &[f64]| -> f64 {
            if r < p {
                self.c_rows[r].iter().zip(v).map(|(a, b)| a * b).sum()
            } else {
                v[deflate[r - p]]
            }
        };
        let mut s = vec![0.0; m * m];
        for r in 0..m {
            for c in 0..m {
                let dprime = if r < p && c < p {
                    self.d[r * p + c]
                } else if r >= p && c >= p && r == c {
                    -1.0
                } else {
                    0.0
                };
                s[r * m + c] = dprime - crow(r, &z[c]);
            }
        }
        let schur = DenseLu::new(m, s)?;
        Ok(BorderedFactor {
            lu,
            z,
            schur,
            n,
            p,
            c_rows: self.c_rows.clone(),
            deflate: deflate.to_vec(),
        })
    }
}

pub struct BorderedFactor {
    lu: BandLu,
    z: Vec<Vec<f64>>,
    schur: DenseLu,
    n: usize,
    p: usize,
    c_rows: Vec<Vec<f64>>,
    deflate: Vec<usize>,
}

impl BorderedFactor {
    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let (n, p) = (self.n, self.p);
        let m = p + self.deflate.len();
        let mut x0 = rhs[..n].to_vec();
        self.lu.solve(&mut x0);
        let mut g = vec![0.0; m];
        for r in 0..m {
            let cx = if r < p {
                self.c_rows[r].iter().zip(&x0).map(|(a, b)| a * b).sum::<f64>()
            } else {
                x0[self.deflate[r - p]]
            };
            g[r] = if r < p { rhs[n + r] } else { 0.0 } - cx;
        }
        self.schur.solve(&mut g);
        let mut out = x0;
        for (c, zc) in self.z.iter().enumerate() {
            let gc = g[c];
            for i in 0..n {
                out[i] -= zc[i] * gc;
            }
        }
        out.extend_from_slice(&g[..p]);
        out
    }
}
