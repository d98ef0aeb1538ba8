//! Chebyshev series on [-1, 1] built from values at the Clenshaw-Curtis nodes.

use super::rules::{cc_rule, CC_N};
use std::f64::consts::PI;
use std::sync::OnceLock;

pub const NCOEF: usize = CC_N + 1;

fn dct_matrix() -> &'static Vec<[f64; NCOEF]> {
    static M: OnceLock<Vec<[f64; NCOEF]>> = OnceLock::new();
    M.get_or_init(|| {
        let n = CC_N as f64;
        (0..NCOEF)
            .map(|k| {
                let mut row = [0.0; NCOEF];
                for (j, r) in row.iter_mut().enumerate() {
                    let end = if j == 0 || j == CC_N { 0.5 } else { 1.0 };
                    let kend = if k == 0 || k == CC_N { 0.5 } else { 1.0 };
                    *r = 2.0 / n * end * kend * (PI * (j * k) as f64 / n).cos();
                }
                row
            })
            .collect()
    })
}

/// Coefficients c with f(x) = Σ c_k T_k(x), from f at x_j = cos(jπ/N).
pub fn coefficients(values: &[f64; NCOEF]) -> [f64; NCOEF] {
    let m = dct_matrix();
    let mut c = [0.0; NCOEF];
    for (ck, row) in c.iter_mut().zip(m.iter()) {
        let mut s = 0.0;
        for (r, v) in row.iter().zip(values) {
            s += r * v;
        }
        *ck = s;
    }
    c
}

#[inline]
pub fn eval(c: &[f64], x: f64) -> f64 {
    let (mut b1, mut b2) = (0.0, 0.0);
    let x2 = 2.0 * x;
    for &ck in c.iter().skip(1).rev() {
        let b0 = ck + x2 * b1 - b2;
        b2 = b1;
        b1 = b0;
    }
    c[0] + x * b1 - b2
}

/// Antiderivative coefficients (one longer), normalised to vanish at x = −1.
pub fn antiderivative(c: &[f64]) -> Vec<f64> {
    let n = c.len();
    let at = |k: usize| if k < n { c[k] } else { 0.0 };
    let mut b = vec![0.0; n + 1];
    if n > 0 {
        b[1] = at(0) - 0.5 * at(2);
    }
    for k in 2..=n {
        b[k] = (at(k - 1) - at(k + 1)) / (2.0 * k as f64);
    }
    let mut s = 0.0;
    for (k, bk) in b.iter().enumerate().skip(1) {
        s += if k % 2 == 0 { *bk } else { -*bk };
    }
    b[0] = -s;
    b
}

/// Derivative coefficients (one shorter).
pub fn derivative(c: &[f64]) -> Vec<f64> {
    let n = c.len();
    if n <= 1 {
        return vec![0.0];
    }
    let mut d = vec![0.0; n + 1];
    for k in (1..n).rev() {
        d[k - 1] = d[k + 1] + 2.0 * k as f64 * c[k];
    }
    d[0] *= 0.5;
    d.truncate(n - 1);
    d
}

/// ∫_{-1}^{1} of the series.
pub fn integral(c: &[f64]) -> f64 {
    c.iter()
        .enumerate()
        .step_by(2)
        .map(|(k, ck)| 2.0 * ck / (1.0 - (k * k) as f64))
        .sum()
}

/// Samples f at the CC nodes mapped to [a, b] (node 0 at b).
pub fn sample(f: impl Fn(f64) -> f64, a: f64, b: f64) -> [f64; NCOEF] {
    let r = cc_rule();
    let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
    let mut v = [0.0; NCOEF];
    for (vj, xj) in v.iter_mut().zip(r.x.iter()) {
        *vj = f(c + h * xj);
    }
    v
}

/// Chebyshev interpolant of a smooth function on [a, b] of arbitrary degree.
#[derive(Clone, Debug)]
pub struct ChebFit {
    pub a: f64,
    pub b: f64,
    pub coef: Vec<f64>,
}

impl ChebFit {
    /// Interpolates at the n+1 Chebyshev extreme points.
    pub fn fit<E>(mut f: impl FnMut(f64) -> Result<f64, E>, a: f64, b: f64, n: usize) -> Result<Self, E> {
        let nf = n as f64;
        let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
        let mut vals = Vec::with_capacity(n + 1);
        for j in 0..=n {
            vals.push(f(c + h * (PI * j as f64 / nf).cos())?);
        }
        let mut coef = vec![0.0; n + 1];
        for (k, ck) in coef.iter_mut().enumerate() {
            let mut s = 0.0;
            for (j, v) in vals.iter().enumerate() {
                let end = if j == 0 || j == n { 0.5 } else { 1.0 };
                s += end * v * (PI * (j * k) as f64 / nf).cos();
            }
            let kend = if k == 0 || k == n { 0.5 } else { 1.0 };
            *ck = 2.0 / nf * kend * s;
        }
        Ok(ChebFit { a, b, coef })
    }

    #[inline]
    pub fn x_of(&self, t: f64) -> f64 {
        (2.0 * t - self.a - self.b) / (self.b - self.a)
    }

    pub fn eval(&self, t: f64) -> f64 {
        eval(&self.coef, self.x_of(t))
    }

    pub fn derivative(&self) -> ChebFit {
        let scale = 2.0 / (self.b - self.a);
        ChebFit {
            a: self.a,
            b: self.b,
            coef: derivative(&self.coef).into_iter().map(|c| c * scale).collect(),
        }
    }

    /// Size of the trailing coefficients relative to the largest one.
    pub fn tail_ratio(&self) -> f64 {
        let n = self.coef.len();
        let max = self.coef.iter().fold(0.0f64, |m, c| m.max(c.abs()));
        let tail = self.coef[n.saturating_sub(3)..].iter().fold(0.0f64, |m, c| m.max(c.abs()));
        tail / max
    }
}
