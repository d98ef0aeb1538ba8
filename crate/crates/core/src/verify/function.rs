use super::VerifyError;
use crate::ladder::{LadderError, LadderWindow};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FunctionKind {
    /// F ≡ 0, the degenerate case
    Zero,
    ConstantOne,
    /// wᵖ
    Monomial { power: u32 },
    /// (w − center)²
    ShiftedSquare { center: f64 },
    /// |ζ(½+iw)|⁴
    AbsZeta4,
    /// (arg ζ(½+iw))ᵖ = (π S(w))ᵖ, p even
    ArgZetaPow { power: u32 },
    /// S₁(w)ᵖ, p even
    S1Pow { power: u32 },
    /// piecewise linear through (w, F) samples
    Tabulated { samples: Vec<(f64, f64)> },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignClass {
    Nonneg,
    Nonpos,
}

/// The weight F(w) of the product integral.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestFunction {
    #[serde(flatten)]
    pub kind: FunctionKind,
    pub sign_class: SignClass,
}

impl TestFunction {
    pub fn new(kind: FunctionKind) -> Self {
        TestFunction { kind, sign_class: SignClass::Nonneg }
    }
    pub fn zero() -> Self {
        Self::new(FunctionKind::Zero)
    }
    pub fn constant_one() -> Self {
        Self::new(FunctionKind::ConstantOne)
    }
    pub fn monomial(power: u32) -> Self {
        Self::new(FunctionKind::Monomial { power })
    }
    pub fn shifted_square(center: f64) -> Self {
        Self::new(FunctionKind::ShiftedSquare { center })
    }
    pub fn abs_zeta4() -> Self {
        Self::new(FunctionKind::AbsZeta4)
    }
    pub fn arg_zeta_pow(power: u32) -> Self {
        Self::new(FunctionKind::ArgZetaPow { power })
    }
    pub fn s1_pow(power: u32) -> Self {
        Self::new(FunctionKind::S1Pow { power })
    }

    /// Parses `constant_one`, `zero`, `monomial:P`, `shifted_square:C`,
    /// `abs_zeta4`, `arg_zeta_pow:P`, `s1_pow:P`. A center of `T` means `t`.
    pub fn parse(s: &str, t: f64) -> Result<Self, VerifyError> {
        let bad = || VerifyError::Params(format!("unknown test function {s:?}"));
        let (name, arg) = match s.split_once(':') {
            Some((a, b)) => (a.trim(), Some(b.trim())),
            None => (s.trim(), None),
        };
        let int = |a: Option<&str>| -> Result<u32, VerifyError> { a.ok_or_else(bad)?.parse().map_err(|_| bad()) };
        let f = match name {
            "zero" => Self::zero(),
            "constant_one" | "one" => Self::constant_one(),
            "monomial" => Self::monomial(int(arg)?),
            "shifted_square" => {
                let c = match arg {
                    None | Some("T") => t,
                    Some(v) => v.parse().map_err(|_| bad())?,
                };
                Self::shifted_square(c)
            }
            "abs_zeta4" => Self::abs_zeta4(),
            "arg_zeta_pow" => Self::arg_zeta_pow(int(arg)?),
            "s1_pow" => Self::s1_pow(int(arg)?),
            _ => return Err(bad()),
        };
        f.validate()?;
        Ok(f)
    }

    pub fn label(&self) -> String {
        match &self.kind {
            FunctionKind::Zero => "zero".into(),
            FunctionKind::ConstantOne => "constant_one".into(),
            FunctionKind::Monomial { power } => format!("monomial:{power}"),
            FunctionKind::ShiftedSquare { center } => format!("shifted_square:{center}"),
            FunctionKind::AbsZeta4 => "abs_zeta4".into(),
            FunctionKind::ArgZetaPow { power } => format!("arg_zeta_pow:{power}"),
            FunctionKind::S1Pow { power } => format!("s1_pow:{power}"),
            FunctionKind::Tabulated { samples } => format!("tabulated:{}", samples.len()),
        }
    }

    pub fn validate(&self) -> Result<(), VerifyError> {
        let bad = |m: String| Err(VerifyError::Params(m));
        let builtin_sign = |s: SignClass| -> Result<(), VerifyError> {
            if s != SignClass::Nonneg {
                return Err(VerifyError::Params(format!("{} is nonnegative, not nonpos", self.label())));
            }
            Ok(())
        };
        match &self.kind {
            FunctionKind::Zero => Ok(()),
            FunctionKind::ConstantOne | FunctionKind::AbsZeta4 => builtin_sign(self.sign_class),
            FunctionKind::Monomial { power } if *power > 8 => bad(format!("monomial power must be at most 8, got {power}")),
            FunctionKind::Monomial { .. } => builtin_sign(self.sign_class),
            FunctionKind::ShiftedSquare { center } if !center.is_finite() => bad("center must be finite".into()),
            FunctionKind::ShiftedSquare { .. } => builtin_sign(self.sign_class),
            FunctionKind::ArgZetaPow { power } | FunctionKind::S1Pow { power } => {
                if *power == 0 || power % 2 == 1 || *power > 16 {
                    return bad(format!("moment power must be even in 2..=16, got {power}"));
                }
                builtin_sign(self.sign_class)
            }
            FunctionKind::Tabulated { samples } => {
                if samples.len() < 2 {
                    return bad("a tabulated function needs at least two samples".into());
                }
                for w in samples.windows(2) {
                    if !(w[0].0 < w[1].0) {
                        return bad(format!("sample abscissae must increase: {} then {}", w[0].0, w[1].0));
                    }
                }
                for &(w, v) in samples {
                    let ok = match self.sign_class {
                        SignClass::Nonneg => v >= 0.0,
                        SignClass::Nonpos => v <= 0.0,
                    };
                    if !w.is_finite() || !v.is_finite() || !ok {
                        return bad(format!("sample ({w}, {v}) breaks the {:?} sign class", self.sign_class));
                    }
                }
                Ok(())
            }
        }
    }

    /// The moment index l for the even-power kinds.
    pub fn moment_index(&self) -> Option<u32> {
        match self.kind {
            FunctionKind::ArgZetaPow { power } | FunctionKind::S1Pow { power } => Some(power / 2),
            _ => None,
        }
    }

    /// Points in (a, b) where F is not smooth.
    pub(crate) fn breaks(&self, a: f64, b: f64, win: &LadderWindow) -> Result<Vec<f64>, LadderError> {
        match &self.kind {
            FunctionKind::ArgZetaPow { .. } | FunctionKind::S1Pow { .. } => win.zeros_in(a, b),
            FunctionKind::Tabulated { samples } => {
                Ok(samples.iter().map(|s| s.0).filter(|&w| w > a && w < b).collect())
            }
            _ => Ok(Vec::new()),
        }
    }

    pub fn eval(&self, w: f64, win: &LadderWindow) -> Result<f64, LadderError> {
        Ok(match &self.kind {
            FunctionKind::Zero => 0.0,
            FunctionKind::ConstantOne => 1.0,
            FunctionKind::Monomial { power } => w.powi(*power as i32),
            FunctionKind::ShiftedSquare { center } => (w - center) * (w - center),
            FunctionKind::AbsZeta4 => {
                let z2 = win.z2(w)?;
                z2 * z2
            }
            FunctionKind::ArgZetaPow { power } => (PI * win.s(w)?).powi(*power as i32),
            FunctionKind::S1Pow { power } => win.s1(w)?.powi(*power as i32),
            FunctionKind::Tabulated { samples } => tabulated(samples, w)?,
        })
    }

    /// ∫_a^b F in closed form, for the kinds that have one.
    pub(crate) fn closed_integral(&self, a: f64, b: f64) -> Option<f64> {
        match &self.kind {
            FunctionKind::Zero => Some(0.0),
            FunctionKind::ConstantOne => Some(b - a),
            FunctionKind::Monomial { power } => {
                let q = *power as i32 + 1;
                // b^q − a^q = a^q ((b/a)^q − 1), kept accurate for short windows
                let r = (b - a) / a;
                Some(a.powi(q) * ((q as f64) * r.ln_1p()).exp_m1() / q as f64)
            }
            FunctionKind::ShiftedSquare { center } => {
                let (x, y) = (a - center, b - center);
                Some((y * y * y - x * x * x) / 3.0)
            }
            FunctionKind::Tabulated { samples } => {
                let lo = samples[0].0;
                let hi = samples[samples.len() - 1].0;
                if a < lo || b > hi {
                    return None;
                }
                let mut pts = vec![a];
                pts.extend(samples.iter().map(|s| s.0).filter(|&w| w > a && w < b));
                pts.push(b);
                let mut acc = 0.0;
                for p in pts.windows(2) {
                    let fa = tabulated(samples, p[0]).ok()?;
                    let fb = tabulated(samples, p[1]).ok()?;
                    acc += 0.5 * (fa + fb) * (p[1] - p[0]);
                }
                Some(acc)
            }
            _ => None,
        }
    }
}

fn tabulated(samples: &[(f64, f64)], w: f64) -> Result<f64, LadderError> {
    let (lo, hi) = (samples[0].0, samples[samples.len() - 1].0);
    if !(w >= lo && w <= hi) {
        return Err(LadderError::OutOfRange { t: w, lo, hi });
    }
    let j = samples.partition_point(|s| s.0 <= w).clamp(1, samples.len() - 1);
    let (x0, y0) = samples[j - 1];
    let (x1, y1) = samples[j];
    Ok(y0 + (y1 - y0) * (w - x0) / (x1 - x0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_label_round_trip() {
        for s in ["zero", "constant_one", "monomial:2", "shifted_square:5000", "abs_zeta4", "arg_zeta_pow:4", "s1_pow:2"] {
            assert_eq!(TestFunction::parse(s, 1e4).unwrap().label(), s);
        }
        assert_eq!(TestFunction::parse("shifted_square:T", 3000.0).unwrap(), TestFunction::shifted_square(3000.0));
        assert!(TestFunction::parse("arg_zeta_pow:3", 1e4).is_err());
        assert!(TestFunction::parse("cosine", 1e4).is_err());
    }

    #[test]
    fn sign_class_is_checked() {
        let mut f = TestFunction::new(FunctionKind::Tabulated { samples: vec![(0.0, -1.0), (1.0, -2.0)] });
        assert!(f.validate().is_err());
        f.sign_class = SignClass::Nonpos;
        f.validate().unwrap();
        let mut g = TestFunction::constant_one();
        g.sign_class = SignClass::Nonpos;
        assert!(g.validate().is_err());
    }

    #[test]
    fn closed_forms() {
        let m = TestFunction::monomial(1);
        assert!((m.closed_integral(2.0, 4.0).unwrap() - 6.0).abs() < 1e-14);
        let q = TestFunction::shifted_square(1.0);
        assert!((q.closed_integral(1.0, 4.0).unwrap() - 9.0).abs() < 1e-14);
        let t = TestFunction::new(FunctionKind::Tabulated { samples: vec![(0.0, 0.0), (1.0, 1.0), (2.0, 0.0)] });
        assert!((t.closed_integral(0.0, 2.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((t.closed_integral(0.5, 1.5).unwrap() - 0.75).abs() < 1e-15);
        assert!(t.closed_integral(-1.0, 1.0).is_none());
    }

    #[test]
    fn serde_shape() {
        let f = TestFunction::monomial(1);
        let v = serde_json::to_string(&f).unwrap();
        assert_eq!(v, r#"{"kind":"monomial","power":1,"sign_class":"nonneg"}"#);
        assert_eq!(serde_json::from_str::<TestFunction>(&v).unwrap(), f);
    }
}
