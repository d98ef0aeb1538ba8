use super::theta::theta;
use std::f64::consts::PI;
use std::sync::OnceLock;

include!("rs_coeffs.rs");

const TABLE_LEN: usize = 1 << 15;

/// (ln n, n^{-1/2}) for n < TABLE_LEN, index 0 unused.
pub(crate) fn log_table() -> &'static [(f64, f64)] {
    static TABLE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    TABLE.get_or_init(|| {
        (0..TABLE_LEN)
            .map(|n| {
                if n == 0 {
                    (0.0, 0.0)
                } else {
                    let x = n as f64;
                    (x.ln(), 1.0 / x.sqrt())
                }
            })
            .collect()
    })
}

#[inline]
pub(crate) fn log_entry(n: usize) -> (f64, f64) {
    if n < TABLE_LEN {
        log_table()[n]
    } else {
        let x = n as f64;
        (x.ln(), 1.0 / x.sqrt())
    }
}

#[inline]
fn horner(c: &[f64], z: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &v| acc * z + v)
}

/// Remainder (−1)^{N−1} a^{−1/2} Σ_k C_k(2p−1) a^{−k}, where a = √(t/2π), N = ⌊a⌋, p = a − N.
#[inline]
pub fn rs_remainder(a: f64, order: u32) -> f64 {
    let n = a.floor();
    let z = 2.0 * (a - n) - 1.0;
    let inv = 1.0 / a;
    let mut acc = 0.0;
    let tables: [&[f64]; 5] = [&C0, &C1, &C2, &C3, &C4];
    let mut pw = 1.0;
    for c in tables.iter().take(order as usize + 1) {
        acc += horner(c, z) * pw;
        pw *= inv;
    }
    let sign = if (n as i64 - 1) % 2 == 0 { 1.0 } else { -1.0 };
    sign * acc / a.sqrt()
}

/// Z(t) by the Riemann-Siegel formula with `order` correction terms.
pub fn hardy_z_rs(t: f64, order: u32) -> f64 {
    let a = (t / (2.0 * PI)).sqrt();
    let n = a.floor() as usize;
    let th = theta(t);
    let mut sum = 0.0;
    if n < TABLE_LEN {
        for &(ln, rs) in &log_table()[1..=n] {
            sum += rs * (th - t * ln).cos();
        }
    } else {
        for k in 1..=n {
            let (ln, rs) = log_entry(k);
            sum += rs * (th - t * ln).cos();
        }
    }
    2.0 * sum + rs_remainder(a, order)
}
