//! Completed L-functions of weight-`k` CM newforms, `k = w + 1`:
//!
//! ```text
//! Lambda(s) = A^s Gamma(s) L(s),   A = sqrt(N) / (2 pi),   Lambda(s) = W Lambda(k - s)
//! ```
//!
//! evaluated by the incomplete-gamma approximate functional equation split
//! at `t = y0`:
//!
//! ```text
//! Lambda(s) = sum a_n [ A^s n^-s Gamma(s, 2 pi n y0 / sqrt N)
//!                     + W A^(k-s) n^(s-k) Gamma(k - s, 2 pi n / (y0 sqrt N)) ]
//! ```
//!
//! Any `y0` gives the same value, so comparing `y0` and `1/y0` tests the
//! functional equation.

pub mod special;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cm_curves::Family;
use crate::lseries::{self, CoefficientTable};
use crate::quad_fields::HeckeCharacter;
use crate::{Error, Result};
use special::{gamma, upper_gamma};

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;
/// Largest split parameter used anywhere (`y0` and `1/y0` stay in
/// `[1/Y_MAX, Y_MAX]`).
const Y_MAX: f64 = 1.25;
/// Offset used for the functional-equation residual.
pub const FE_SHIFT: f64 = 1.2;

/// Number of coefficients needed to evaluate at `s` to about `1e-14`.
pub fn required_terms(level: u64, k: u32, s: Complex64) -> usize {
    let cut = 42.0 + 2.0 * k as f64 + s.norm();
    (cut * Y_MAX * (level as f64).sqrt() / TWO_PI).ceil() as usize + 1
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CompletedLFunction {
    pub coefficients: Vec<f64>,
    /// Motivic weight `w`; the modular weight is `w + 1`.
    pub weight: u32,
    pub level: u64,
    /// `sqrt(N)`.
    pub scale: f64,
    pub root_number: i32,
    /// The numerically measured root number before rounding.
    pub root_number_numeric: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub value: Complex64,
    /// Bound on the omitted tail of the series.
    pub truncation_error: f64,
}

impl CompletedLFunction {
    pub fn new(table: &CoefficientTable) -> Result<CompletedLFunction> {
        let k = table.weight + 1;
        let needed = required_terms(table.level, k, Complex64::new(k as f64, 0.0));
        if table.len() < needed {
            return Err(Error::InsufficientCoefficients { needed, available: table.len() });
        }
        let coefficients: Vec<f64> = table.coefficients.iter().map(|&a| a as f64).collect();
        let mut l = CompletedLFunction {
            coefficients,
            weight: table.weight,
            level: table.level,
            scale: (table.level as f64).sqrt(),
            root_number: 1,
            root_number_numeric: 0.0,
        };
        let w = l.measure_root_number();
        if ((w.abs()) - 1.0).abs() > 1e-6 {
            return Err(Error::NonConvergence(format!(
                "theta relation gives root number {w}, not +-1 (level {})",
                table.level
            )));
        }
        l.root_number_numeric = w;
        l.root_number = if w > 0.0 { 1 } else { -1 };
        Ok(l)
    }

    pub fn k(&self) -> u32 {
        self.weight + 1
    }

    /// `theta(t) = sum a_n exp(-2 pi n t / sqrt N)`.
    pub fn theta(&self, t: f64) -> f64 {
        let c = TWO_PI * t / self.scale;
        self.coefficients.iter().enumerate().skip(1).map(|(n, a)| a * (-c * n as f64).exp()).sum()
    }

    /// `theta(1/t) = W t^k theta(t)`, measured at the `t` with the largest
    /// `|theta(t)|` among a few points near 1.
    fn measure_root_number(&self) -> f64 {
        let k = self.k() as i32;
        [1.05, 1.1, 1.15, 1.2]
            .iter()
            .map(|&t| (self.theta(1.0 / t), t.powi(k) * self.theta(t)))
            .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
            .map(|(num, den)| num / den)
            .unwrap_or(0.0)
    }

    /// `Lambda(s)` with the split at `y0`.
    pub fn lambda_split(&self, s: Complex64, y0: f64) -> Result<Evaluation> {
        let kf = self.k() as f64;
        let needed = required_terms(self.level, self.k(), s);
        if self.coefficients.len() <= needed {
            return Err(Error::InsufficientCoefficients { needed, available: self.coefficients.len() - 1 });
        }
        let a = self.scale / TWO_PI;
        let w = self.root_number as f64;
        let s2 = kf - s;
        let (mut sum, mut last) = (Complex64::new(0.0, 0.0), 0.0);
        for n in 1..=needed {
            let an = self.coefficients[n];
            let nf = n as f64;
            let x1 = TWO_PI * nf * y0 / self.scale;
            let x2 = TWO_PI * nf / (y0 * self.scale);
            if an == 0.0 {
                continue;
            }
            let t1 = (s * (a / nf).ln()).exp() * upper_gamma(s, x1)?;
            let t2 = (s2 * (a / nf).ln()).exp() * upper_gamma(s2, x2)?;
            let term = an * (t1 + w * t2);
            last = term.norm();
            sum += term;
        }
        // geometric tail after the last computed term
        let ratio = (-TWO_PI / (Y_MAX * self.scale)).exp();
        Ok(Evaluation { value: sum, truncation_error: last * ratio / (1.0 - ratio) })
    }

    pub fn completed_lambda(&self, s: Complex64) -> Result<Evaluation> {
        self.lambda_split(s, 1.0)
    }

    /// `|Lambda(s) - W Lambda(k - s)|`, both sides at split `FE_SHIFT`.
    pub fn fe_residual(&self, s: Complex64) -> Result<f64> {
        let lhs = self.lambda_split(s, FE_SHIFT)?.value;
        let rhs = self.lambda_split(self.k() as f64 - s, FE_SHIFT)?.value;
        Ok((lhs - self.root_number as f64 * rhs).norm())
    }

    /// `L(s) = Lambda(s) / (A^s Gamma(s))`.
    pub fn l_value(&self, s: Complex64) -> Result<Evaluation> {
        self.l_value_split(s, 1.0)
    }

    fn l_value_split(&self, s: Complex64, y0: f64) -> Result<Evaluation> {
        let ev = self.lambda_split(s, y0)?;
        let factor = (s * (self.scale / TWO_PI).ln()).exp() * gamma(s);
        Ok(Evaluation { value: ev.value / factor, truncation_error: ev.truncation_error / factor.norm() })
    }

    pub fn center(&self) -> f64 {
        self.k() as f64 / 2.0
    }

    /// `L` at the center `(w + 1) / 2`.
    pub fn central_value(&self) -> Result<CentralValue> {
        let s = Complex64::new(self.center(), 0.0);
        // the split at FE_SHIFT does not force cancellation, so the value
        // below is a genuine numerical check even when W = -1
        let numeric = self.l_value_split(s, FE_SHIFT)?;
        let kf = self.center();
        let gamma_c = special::gamma_real(kf);
        let natural_scale: f64 = self
            .coefficients
            .iter()
            .enumerate()
            .skip(1)
            .take(required_terms(self.level, self.k(), s))
            .map(|(n, a)| {
                let x = TWO_PI * n as f64 / self.scale;
                a.abs() * (n as f64).powf(-kf) * (upper_gamma(s, x).map(|g| g.re).unwrap_or(0.0) / gamma_c)
            })
            .sum();
        let vanishes = self.root_number == -1;
        Ok(CentralValue {
            s: kf,
            value: if vanishes { 0.0 } else { numeric.value.re },
            numeric: numeric.value.re,
            truncation_error: numeric.truncation_error,
            natural_scale,
            root_number: self.root_number,
            certificate: if vanishes {
                Some("root number -1 forces Lambda(center) = -Lambda(center) = 0".into())
            } else {
                None
            },
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CentralValue {
    pub s: f64,
    /// Returned value: exactly zero when the root number is -1.
    pub value: f64,
    /// Direct numerical evaluation, regardless of the root number.
    pub numeric: f64,
    pub truncation_error: f64,
    /// `sum |a_n| n^-c Gamma(c, x_n) / Gamma(c)`, a size reference.
    pub natural_scale: f64,
    pub root_number: i32,
    pub certificate: Option<String>,
}

/// L-function of a primitive character, with enough coefficients for
/// evaluation on `|s| <= s_max`.
pub fn l_function_of(chi: &HeckeCharacter, s_max: f64) -> Result<CompletedLFunction> {
    let k = chi.infinity_type + 1;
    let n = required_terms(chi.level(), k, Complex64::new(s_max.max(k as f64), 0.0));
    CompletedLFunction::new(&lseries::hecke_qexpansion(chi, n)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootNumber {
    pub theoretical: i32,
    pub numerical: i32,
    pub numeric_value: f64,
}

/// Root number of `chi^n` by the parity rule `(-1)^((n-1)/2) W(chi)` for
/// odd `n` (`1` for even `n`) and by the theta relation, without
/// requiring the two to agree.
pub fn root_number_paths(chi: &HeckeCharacter, n: u32) -> Result<RootNumber> {
    let base = l_function_of(chi, 0.0)?;
    let theoretical = if n % 2 == 1 {
        if (n - 1) / 2 % 2 == 0 {
            base.root_number
        } else {
            -base.root_number
        }
    } else {
        1
    };
    let power = l_function_of(&chi.power(n)?, 0.0)?;
    Ok(RootNumber { theoretical, numerical: power.root_number, numeric_value: power.root_number_numeric })
}

/// Root number of `chi^n`; both paths of [`root_number_paths`] must agree.
pub fn root_number(chi: &HeckeCharacter, n: u32) -> Result<RootNumber> {
    let r = root_number_paths(chi, n)?;
    if r.numerical != r.theoretical {
        return Err(Error::Consistency(format!(
            "root number of chi^{n} is {} numerically but {} by the parity rule",
            r.numerical, r.theoretical
        )));
    }
    Ok(r)
}

/// Coefficients of `f_1` (indices `1 mod 8`) and `f_2` (indices `3 mod 8`),
/// weight 5/2, level 128.
pub const F1: [(u64, i64); 13] = [
    (1, 1), (9, -3), (17, -4), (25, 25), (33, -4), (41, -48), (49, 1), (57, 20), (65, 48),
    (73, -4), (81, -27), (89, 68), (97, -76),
];
pub const F2: [(u64, i64); 12] = [
    (3, -1), (11, 5), (19, -7), (35, 2), (43, 1), (51, 14), (59, -13), (67, 1), (75, -27),
    (83, 7), (91, 26), (99, 15),
];

/// `D`-th coefficient of `f_1` or `f_2` (zero where the printed
/// expansion has no term).
pub fn half_integral_coefficient(d: u64) -> Result<i64> {
    let (table, bound): (&[(u64, i64)], u64) = match d % 8 {
        1 => (&F1, 105),
        3 => (&F2, 107),
        _ => return Err(Error::InvalidArgument(format!("D = {d} is not 1 or 3 mod 8"))),
    };
    if d >= bound {
        return Err(Error::InvalidArgument(format!("D = {d} is beyond the stored expansion")));
    }
    Ok(table.iter().find(|(n, _)| *n == d).map_or(0, |(_, c)| *c))
}

fn check_squarefree_odd(d: u64) -> Result<()> {
    if d == 0 || d % 2 == 0 || crate::arith::factorize(d).iter().any(|(_, e)| *e > 1) {
        return Err(Error::InvalidArgument(format!("D = {d} must be odd and square-free")));
    }
    Ok(())
}

/// Weight-4 L-function of the twisted threefold attached to `D`.
pub fn twisted_threefold_l(d: u64) -> Result<CompletedLFunction> {
    check_squarefree_odd(d)?;
    let twists = waldspurger_twists(d);
    let chi = lseries::nfold_character(Family::Four, 3, &twists)?;
    let n = required_terms(chi.level(), 4, Complex64::new(4.0, 0.0));
    CompletedLFunction::new(&lseries::threefold_coefficients(Family::Four, &twists, n)?)
}

/// Twist data used for the family indexed by `D`.
pub fn waldspurger_twists(d: u64) -> Vec<(i64, u32)> {
    vec![(d as i64, 2)]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaldspurgerRatio {
    pub d: u64,
    pub coefficient: i64,
    pub central: CentralValue,
    pub ratio: f64,
}

/// `L(2) D^(3/2) / c_D^2` with `c_D` from `f_1` or `f_2`.
pub fn waldspurger_ratio(d: u64) -> Result<WaldspurgerRatio> {
    check_squarefree_odd(d)?;
    let coefficient = half_integral_coefficient(d)?;
    if coefficient == 0 {
        return Err(Error::InvalidArgument(format!("coefficient of q^{d} is zero; ratio undefined")));
    }
    let central = twisted_threefold_l(d)?.central_value()?;
    let ratio = central.value * (d as f64).powf(1.5) / (coefficient * coefficient) as f64;
    Ok(WaldspurgerRatio { d, coefficient, central, ratio })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cm_curves::CurveSpec;
    use crate::quad_fields::hecke::hecke_character_of;

    #[test]
    fn e4_l_function() {
        let chi = hecke_character_of(&CurveSpec::new(Family::Four, 1).unwrap()).unwrap();
        let l = l_function_of(&chi, 3.0).unwrap();
        assert_eq!(l.root_number, 1);
        let v = l.l_value(Complex64::new(1.0, 0.0)).unwrap().value;
        assert!((v.re - 0.655_514_388_573_029_9).abs() < 1e-10, "{v}");
        assert!(v.im.abs() < 1e-10);
        assert!(l.fe_residual(Complex64::new(1.3, 0.0)).unwrap() < 1e-8);
        assert!(l.fe_residual(Complex64::new(1.7, 0.4)).unwrap() < 1e-8);
    }

    #[test]
    fn short_table_is_rejected() {
        let chi = hecke_character_of(&CurveSpec::new(Family::Four, 1).unwrap()).unwrap();
        let t = lseries::hecke_qexpansion(&chi, 10).unwrap();
        assert!(matches!(CompletedLFunction::new(&t), Err(Error::InsufficientCoefficients { .. })));
    }

    #[test]
    fn printed_coefficients() {
        assert_eq!(half_integral_coefficient(17).unwrap(), -4);
        assert_eq!(half_integral_coefficient(41).unwrap(), -48);
        assert_eq!(half_integral_coefficient(3).unwrap(), -1);
        assert_eq!(half_integral_coefficient(27).unwrap(), 0);
        assert!(half_integral_coefficient(5).is_err());
        assert!(waldspurger_ratio(9).is_err());
    }
}
