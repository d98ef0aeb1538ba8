use num_complex::Complex64;

// B_2k / (2k)!, k = 1..30
pub(crate) const BERNOULLI_OVER_FACT: [f64; 30] = [
    8.3333333333333333333e-2,
    -1.3888888888888888889e-3,
    3.3068783068783068783e-5,
    -8.2671957671957671958e-7,
    2.0876756987868098979e-8,
    -5.2841901386874931848e-10,
    1.3382536530684678833e-11,
    -3.3896802963225828668e-13,
    8.5860620562778445641e-15,
    -2.174868698558061873e-16,
    5.5090028283602295152e-18,
    -1.3954464685812523341e-19,
    3.5347070396294674717e-21,
    -8.9535174270375468504e-23,
    2.2679524523376830603e-24,
    -5.7447906688722024453e-26,
    1.4551724756148649019e-27,
    -3.6859949406653101782e-29,
    9.336734257095044672e-31,
    -2.3650224157006299346e-32,
    5.9906717624821343047e-34,
    -1.5174548844682902617e-35,
    3.8437581254541882322e-37,
    -9.7363530726466910353e-39,
    2.4662470442006809571e-40,
    -6.2470767418207436931e-42,
    1.5824030244644914298e-43,
    -4.0082736859489359685e-45,
    1.0153075855569556312e-46,
    -2.5718041582418717499e-48,
];

/// Cut-off N for Euler-Maclaurin at ordinate t; keeps |s|/(2πN) ≤ 1/2.
pub(crate) fn em_terms(t: f64) -> usize {
    (t.abs() / std::f64::consts::PI).ceil() as usize + 16
}

/// Euler-Maclaurin tail beyond the partial sum Σ_{n<N} n^{-s}.
pub(crate) fn em_tail(s: Complex64, n: usize) -> Complex64 {
    let nf = n as f64;
    let ln_n = nf.ln();
    let n_pow = (-s * ln_n).exp(); // N^{-s}
    let mut acc = n_pow * nf / (s - 1.0) + 0.5 * n_pow;
    // s(s+1)...(s+2k-2) N^{-s-2k+1}, updated as one product: the two factors
    // alone overflow for large |s|
    let mut coef = s * n_pow / nf;
    let scale = acc.norm().max(1e-300);
    for (k, b) in BERNOULLI_OVER_FACT.iter().enumerate() {
        let term = coef * *b;
        acc += term;
        if term.norm() < 1e-18 * scale {
            break;
        }
        let m = 2.0 * k as f64 + 1.0;
        coef *= (s + m) * (s + m + 1.0) / (nf * nf);
    }
    acc
}

/// ζ(s) by Euler-Maclaurin summation. Meant for 0 < Re s ≤ 3 and moderate |Im s|.
pub fn zeta(s: Complex64) -> Complex64 {
    let n = em_terms(s.im.abs().max(s.norm()));
    let mut sum = Complex64::new(0.0, 0.0);
    for k in 1..n {
        let ln_k = (k as f64).ln();
        sum += (-s * ln_k).exp();
    }
    sum + em_tail(s, n)
}

/// ζ(½ + it).
pub fn zeta_half_em(t: f64) -> Complex64 {
    zeta(Complex64::new(0.5, t))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_real_values() {
        let z2 = zeta(Complex64::new(2.0, 0.0));
        assert!((z2.re - std::f64::consts::PI.powi(2) / 6.0).abs() < 1e-14);
        assert!(z2.im.abs() < 1e-16);
        let zh = zeta(Complex64::new(0.5, 0.0));
        assert!((zh.re + 1.460_354_508_809_586_8).abs() < 1e-13, "{zh}");
    }

    #[test]
    fn large_ordinates_stay_finite() {
        let t = 845_200.0;
        let z = zeta(Complex64::new(0.5, t));
        let rs = crate::zeta::hardy_z_rs(t, 4);
        assert!((z.norm() - rs.abs()).abs() < 1e-8, "{z} vs {rs}");
    }

    #[test]
    fn conjugate_symmetry() {
        let a = zeta(Complex64::new(0.7, 33.0));
        let b = zeta(Complex64::new(0.7, -33.0));
        assert!((a - b.conj()).norm() < 1e-12);
    }
}
