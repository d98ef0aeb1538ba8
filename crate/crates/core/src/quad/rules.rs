//! Fixed quadrature rules on [-1, 1].

use std::f64::consts::PI;
use std::sync::OnceLock;

// Gauss-Kronrod abscissae/weights, right half including the centre (last entry).
pub(crate) const GK15_X: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
pub(crate) const GK15_WK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
// 7-point Gauss weights on the odd-indexed Kronrod abscissae
pub(crate) const GK15_WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

pub(crate) const GK21_X: [f64; 11] = [
    0.995657163025808080735527280689003,
    0.973906528517171720077964012084452,
    0.930157491355708226001207180059508,
    0.865063366688984510732096688423493,
    0.780817726586416897063717578345042,
    0.679409568299024406234327365114874,
    0.562757134668604683339000099272694,
    0.433395394129247190799265943165784,
    0.294392862701460198131126603103866,
    0.148874338981631210884826001129720,
    0.000000000000000000000000000000000,
];
pub(crate) const GK21_WK: [f64; 11] = [
    0.011694638867371874278064396062192,
    0.032558162307964727478818972459390,
    0.054755896574351996031381300244580,
    0.075039674810919952767043140916190,
    0.093125454583697605535065465083366,
    0.109387158802297641899210590325805,
    0.123491976262065851077208067389650,
    0.134709217311473325928054001771707,
    0.142775938577060080797094273138717,
    0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
];
// 10-point Gauss weights on the odd-indexed Kronrod abscissae (no centre node)
pub(crate) const GK21_WG: [f64; 5] = [
    0.066671344308688137593568809893332,
    0.149451349150580593145776339657697,
    0.219086362515982043995534934228163,
    0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
];

/// Number of Clenshaw-Curtis intervals; the rule has CC_N + 1 nodes.
pub const CC_N: usize = 32;

pub struct CcRule {
    /// cos(jπ/N), j = 0..=N (descending from 1 to −1)
    pub x: [f64; CC_N + 1],
    pub w: [f64; CC_N + 1],
    /// weights of the embedded (N/2)-interval rule on the even-indexed nodes
    pub w_half: [f64; CC_N / 2 + 1],
}

fn cc_weights(n: usize) -> Vec<f64> {
    (0..=n)
        .map(|j| {
            let cj = if j == 0 || j == n { 1.0 } else { 2.0 };
            let mut s = 1.0;
            for k in 1..=n / 2 {
                let bk = if 2 * k == n { 1.0 } else { 2.0 };
                s -= bk / (4.0 * (k * k) as f64 - 1.0) * (2.0 * PI * (k * j) as f64 / n as f64).cos();
            }
            cj / n as f64 * s
        })
        .collect()
}

pub fn cc_rule() -> &'static CcRule {
    static RULE: OnceLock<CcRule> = OnceLock::new();
    RULE.get_or_init(|| {
        let mut x = [0.0; CC_N + 1];
        for (j, v) in x.iter_mut().enumerate() {
            *v = (PI * j as f64 / CC_N as f64).cos();
        }
        // exact symmetry and centre
        for j in 0..=CC_N / 2 {
            x[CC_N - j] = -x[j];
        }
        x[CC_N / 2] = 0.0;
        let w = cc_weights(CC_N);
        let wh = cc_weights(CC_N / 2);
        let mut rule = CcRule { x, w: [0.0; CC_N + 1], w_half: [0.0; CC_N / 2 + 1] };
        rule.w.copy_from_slice(&w);
        rule.w_half.copy_from_slice(&wh);
        rule
    })
}

/// n-point Gauss-Legendre nodes and weights on [-1, 1] (ascending nodes).
pub fn gl_rule(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, z);
        dp = if d != 0.0 { d } else { dp };
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    (x, w)
}

fn legendre_with_derivative(n: usize, z: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, z);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    (p1, n as f64 * (z * p1 - p0) / (z * z - 1.0))
}

/// Legendre values P_0(z)..P_{out.len()-1}(z).
#[inline]
pub fn legendre_values(z: f64, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    out[0] = 1.0;
    if out.len() > 1 {
        out[1] = z;
    }
    for k in 2..out.len() {
        out[k] = ((2 * k - 1) as f64 * z * out[k - 1] - (k - 1) as f64 * out[k - 2]) / k as f64;
    }
}

fn gl20() -> &'static (Vec<f64>, Vec<f64>) {
    static R: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    R.get_or_init(|| gl_rule(20))
}

/// 20-point Gauss-Legendre on [a, b], for smooth integrands.
pub fn gauss_legendre(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let (x, w) = gl20();
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut s = 0.0;
    for (xi, wi) in x.iter().zip(w) {
        s += wi * f(c + h * xi);
    }
    s * h
}

#[cfg(test)]
mod tests {
    use super::*;

    fn monomial_integral(k: u32) -> f64 {
        if k % 2 == 1 {
            0.0
        } else {
            2.0 / (k as f64 + 1.0)
        }
    }

    fn full_rule(xh: &[f64], wh: &[f64]) -> Vec<(f64, f64)> {
        let mut v = Vec::new();
        for (i, (&x, &w)) in xh.iter().zip(wh).enumerate() {
            v.push((x, w));
            if i + 1 < xh.len() || x != 0.0 {
                v.push((-x, w));
            }
        }
        v
    }

    #[test]
    fn kronrod_rules_are_exact_to_their_degree() {
        for (xh, wh, deg) in [(&GK15_X[..], &GK15_WK[..], 22u32), (&GK21_X[..], &GK21_WK[..], 31)] {
            let rule = full_rule(xh, wh);
            for k in 0..=deg {
                let q: f64 = rule.iter().map(|(x, w)| w * x.powi(k as i32)).sum();
                assert!((q - monomial_integral(k)).abs() < 1e-14, "deg {k}: {q}");
            }
        }
    }

    #[test]
    fn embedded_gauss_rules_are_exact() {
        let g7: Vec<(f64, f64)> = full_rule(
            &[GK15_X[1], GK15_X[3], GK15_X[5], GK15_X[7]],
            &GK15_WG,
        );
        assert_eq!(g7.len(), 7);
        let g10: Vec<(f64, f64)> = full_rule(
            &[GK21_X[1], GK21_X[3], GK21_X[5], GK21_X[7], GK21_X[9]],
            &GK21_WG,
        );
        assert_eq!(g10.len(), 10);
        for k in 0..=13 {
            let q: f64 = g7.iter().map(|(x, w)| w * x.powi(k)).sum();
            assert!((q - monomial_integral(k as u32)).abs() < 1e-14);
        }
        for k in 0..=19 {
            let q: f64 = g10.iter().map(|(x, w)| w * x.powi(k)).sum();
            assert!((q - monomial_integral(k as u32)).abs() < 1e-14);
        }
    }

    #[test]
    fn clenshaw_curtis_weights() {
        let r = cc_rule();
        let s: f64 = r.w.iter().sum();
        assert!((s - 2.0).abs() < 1e-14);
        for k in 0..=CC_N as i32 {
            let q: f64 = r.x.iter().zip(&r.w).map(|(x, w)| w * x.powi(k)).sum();
            assert!((q - monomial_integral(k as u32)).abs() < 1e-14, "k={k}");
        }
        for k in 0..=(CC_N / 2) as i32 {
            let q: f64 = (0..=CC_N / 2).map(|j| r.w_half[j] * r.x[2 * j].powi(k)).sum();
            assert!((q - monomial_integral(k as u32)).abs() < 1e-14);
        }
    }

    #[test]
    fn gauss_legendre_rules() {
        for n in [1, 2, 5, 20, 25] {
            let (x, w) = gl_rule(n);
            for k in 0..(2 * n) as i32 {
                let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(k)).sum();
                assert!((q - monomial_integral(k as u32)).abs() < 1e-13, "n={n} k={k}");
            }
        }
    }
}
