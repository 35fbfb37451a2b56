//! CM elliptic curves `y^2 = x^3 - T`, `y^2 = x^3 - T x` and the fixed
//! curve of conductor 49, with traces of Frobenius computed two ways.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::arith;
use crate::quad_fields::{hecke, PrimeDecomposition, QuadField, TwistClass};
use crate::{Error, Result};

/// Order of the CM automorphism used downstream; 7 is the fixed curve
/// `y^2 + xy = x^3 - x^2 - 2x - 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    Three,
    Four,
    Six,
    Seven,
}

impl Family {
    pub fn from_order(j: u32) -> Result<Family> {
        match j {
            3 => Ok(Family::Three),
            4 => Ok(Family::Four),
            6 => Ok(Family::Six),
            7 => Ok(Family::Seven),
            _ => Err(Error::InvalidArgument(format!("unknown family {j}"))),
        }
    }

    pub fn order(self) -> u32 {
        match self {
            Family::Three => 3,
            Family::Four => 4,
            Family::Six => 6,
            Family::Seven => 7,
        }
    }

    pub fn field(self) -> QuadField {
        match self {
            Family::Three | Family::Six => QuadField::Eisenstein,
            Family::Four => QuadField::Gauss,
            Family::Seven => QuadField::Kleinian7,
        }
    }

    /// Twists are taken modulo this power.
    pub fn twist_degree(self) -> u32 {
        self.field().unit_count()
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.order())
    }
}

/// A curve of one of the four families. Equality ignores the raw twist.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CurveSpec {
    pub family: Family,
    pub twist: Option<i64>,
    pub normalized_t: i64,
}

impl PartialEq for CurveSpec {
    fn eq(&self, other: &Self) -> bool {
        self.family == other.family && self.normalized_t == other.normalized_t
    }
}

impl Eq for CurveSpec {}

impl std::hash::Hash for CurveSpec {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.family.hash(state);
        self.normalized_t.hash(state);
    }
}

/// Reduces `t` modulo `k`-th powers, keeping the sign.
pub fn normalize_twist(t: i64, k: u32) -> Result<i64> {
    if t == 0 {
        return Err(Error::ZeroTwist);
    }
    let mut out: i64 = t.signum();
    for (p, e) in arith::factorize(t.unsigned_abs()) {
        out *= (p as i64).pow(e % k);
    }
    Ok(out)
}

impl CurveSpec {
    pub fn new(family: Family, t: i64) -> Result<CurveSpec> {
        if family == Family::Seven {
            return Ok(CurveSpec::roan());
        }
        let normalized_t = normalize_twist(t, family.twist_degree())?;
        Ok(CurveSpec { family, twist: Some(t), normalized_t })
    }

    /// The curve with total twist `prod D_i^k_i` (ignored for family 7).
    pub fn from_twists(family: Family, twists: &[(i64, u32)]) -> Result<CurveSpec> {
        if family == Family::Seven {
            return Ok(CurveSpec::roan());
        }
        let k = family.twist_degree();
        let mut class = TwistClass::one(k);
        for &(d, e) in twists {
            class = class.mul(&TwistClass::from_int(d as i128, k)?.pow(e));
        }
        let t = i64::try_from(class.value())
            .map_err(|_| Error::InvalidArgument("total twist does not fit in 64 bits".into()))?;
        CurveSpec::new(family, t)
    }

    /// The curve `y^2 + xy = x^3 - x^2 - 2x - 1` of conductor 49.
    pub fn roan() -> CurveSpec {
        CurveSpec { family: Family::Seven, twist: None, normalized_t: 1 }
    }

    pub fn twist_class(&self) -> TwistClass {
        TwistClass::from_int(self.normalized_t as i128, self.family.twist_degree()).expect("nonzero twist")
    }

    pub fn has_good_reduction(&self, p: u64) -> bool {
        let t = self.normalized_t.unsigned_abs();
        match self.family {
            Family::Seven => p != 7,
            Family::Four => p != 2 && t % p != 0,
            Family::Three | Family::Six => p != 2 && p != 3 && t % p != 0,
        }
    }

    fn check_prime(&self, p: u64) -> Result<()> {
        if !arith::is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if !self.has_good_reduction(p) {
            return Err(Error::BadReduction { p, curve: self.to_string() });
        }
        Ok(())
    }
}

impl fmt::Display for CurveSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.family {
            Family::Seven => write!(f, "y^2 + xy = x^3 - x^2 - 2x - 1"),
            Family::Four => write!(f, "y^2 = x^3 - ({})x", self.normalized_t),
            _ => write!(f, "y^2 = x^3 - ({})", self.normalized_t),
        }
    }
}

/// Reduction type of a prime for a curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Reduction {
    Split,
    Inert,
    Ramified,
    Bad,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrobeniusData {
    pub p: u64,
    /// Absent at primes of bad reduction.
    pub a_p: Option<i64>,
    pub splitting: Reduction,
    pub eigenvalues: Option<(Complex64, Complex64)>,
}

/// `a_p = p + 1 - #E(F_p)` by enumerating `x` and testing residues.
pub fn count_points_naive(curve: &CurveSpec, p: u64) -> Result<i64> {
    curve.check_prime(p)?;
    if p == 2 {
        // only the conductor-49 curve is good at 2
        let mut affine = 0i64;
        for x in 0..2i64 {
            for y in 0..2i64 {
                if (y * y + x * y - x * x * x + x * x + 2 * x + 1).rem_euclid(2) == 0 {
                    affine += 1;
                }
            }
        }
        return Ok(2 + 1 - (affine + 1));
    }
    let mut square = vec![false; p as usize];
    for y in 1..p {
        square[(y * y % p) as usize] = true;
    }
    let t = arith::reduce(curve.normalized_t as i128, p);
    let mut sum = 0i64;
    for x in 0..p {
        let x3 = arith::mul_mod(arith::mul_mod(x, x, p), x, p);
        let v = match curve.family {
            Family::Three | Family::Six => (x3 + p - t) % p,
            Family::Four => (x3 + p - arith::mul_mod(t, x, p)) % p,
            Family::Seven => {
                // (2y + x)^2 = 4x^3 - 3x^2 - 8x - 4
                let x = x as i128;
                arith::reduce(4 * x * x * x - 3 * x * x - 8 * x - 4, p)
            }
        };
        if v != 0 {
            sum += if square[v as usize] { 1 } else { -1 };
        }
    }
    Ok(-sum)
}

/// `a_p` from the Hecke character: zero at inert primes, otherwise the trace
/// of the calibrated character value at a prime above `p`.
pub fn ap_via_cm(curve: &CurveSpec, p: u64) -> Result<i64> {
    curve.check_prime(p)?;
    let field = curve.family.field();
    match field.factor_prime(p)? {
        PrimeDecomposition::Inert(_) => Ok(0),
        PrimeDecomposition::Split(a, _) => Ok(hecke::split_trace(curve, &a)? as i64),
        PrimeDecomposition::Ramified(_) => Err(Error::BadReduction { p, curve: curve.to_string() }),
    }
}

pub fn good_primes(curve: &CurveSpec, bound: u64) -> Vec<u64> {
    arith::primes_up_to(bound).into_iter().filter(|&p| curve.has_good_reduction(p)).collect()
}

fn eigenvalues(a: i64, p: u64) -> (Complex64, Complex64) {
    let re = a as f64 / 2.0;
    let im = (p as f64 - re * re).max(0.0).sqrt();
    (Complex64::new(re, im), Complex64::new(re, -im))
}

pub fn ap_table(curve: &CurveSpec, bound: u64) -> BTreeMap<u64, FrobeniusData> {
    let field = curve.family.field();
    let mut out = BTreeMap::new();
    for p in arith::primes_up_to(bound) {
        let data = if !curve.has_good_reduction(p) {
            FrobeniusData { p, a_p: None, splitting: Reduction::Bad, eigenvalues: None }
        } else {
            let splitting = match field.splitting(p) {
                crate::quad_fields::Splitting::Split => Reduction::Split,
                crate::quad_fields::Splitting::Inert => Reduction::Inert,
                crate::quad_fields::Splitting::Ramified => Reduction::Ramified,
            };
            let a = match splitting {
                Reduction::Ramified => count_points_naive(curve, p),
                _ => ap_via_cm(curve, p),
            }
            .expect("good prime");
            FrobeniusData { p, a_p: Some(a), splitting, eigenvalues: Some(eigenvalues(a, p)) }
        };
        out.insert(p, data);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(f: Family, t: i64) -> CurveSpec {
        CurveSpec::new(f, t).unwrap()
    }

    #[test]
    fn naive_examples() {
        assert_eq!(count_points_naive(&e(Family::Four, 1), 5).unwrap(), -2);
        assert_eq!(count_points_naive(&e(Family::Four, 1), 7).unwrap(), 0);
        assert_eq!(count_points_naive(&e(Family::Three, 1), 7).unwrap(), 4);
        assert!(matches!(count_points_naive(&e(Family::Four, 1), 2), Err(Error::BadReduction { .. })));
        assert!(matches!(count_points_naive(&e(Family::Four, 1), 9), Err(Error::NotPrime(9))));
        assert!(matches!(count_points_naive(&e(Family::Three, 5), 5), Err(Error::BadReduction { .. })));
    }

    #[test]
    fn roan_curve_small_primes() {
        let c = CurveSpec::roan();
        // 49a1: a_2 = 1, a_3 = 0, a_5 = 0, a_11 = 4
        assert_eq!(count_points_naive(&c, 2).unwrap(), 1);
        assert_eq!(count_points_naive(&c, 3).unwrap(), 0);
        assert_eq!(count_points_naive(&c, 5).unwrap(), 0);
        assert_eq!(count_points_naive(&c, 11).unwrap(), 4);
        assert!(count_points_naive(&c, 7).is_err());
    }

    #[test]
    fn cm_matches_naive_small() {
        for c in [e(Family::Four, 1), e(Family::Three, 2), e(Family::Six, -3), e(Family::Four, -2), CurveSpec::roan()] {
            for p in good_primes(&c, 400) {
                assert_eq!(ap_via_cm(&c, p).unwrap(), count_points_naive(&c, p).unwrap(), "{c} p={p}");
            }
        }
        assert_eq!(ap_via_cm(&e(Family::Four, 1), 11).unwrap(), 0);
    }

    #[test]
    fn good_prime_lists() {
        assert_eq!(good_primes(&e(Family::Four, 1), 10), vec![3, 5, 7]);
        assert_eq!(good_primes(&e(Family::Three, 1), 10), vec![5, 7]);
        assert_eq!(good_primes(&e(Family::Four, 6), 10), vec![5, 7]);
    }

    #[test]
    fn table_marks_bad_primes() {
        let t = ap_table(&e(Family::Four, 1), 7);
        assert_eq!(t.len(), 4);
        assert_eq!(t[&2].splitting, Reduction::Bad);
        assert_eq!(t[&2].a_p, None);
        assert_eq!((t[&3].splitting, t[&3].a_p), (Reduction::Inert, Some(0)));
        assert_eq!((t[&5].splitting, t[&5].a_p), (Reduction::Split, Some(-2)));
        assert!(ap_table(&e(Family::Four, 1), 1).is_empty());
    }

    #[test]
    fn normalization_is_canonical() {
        assert_eq!(normalize_twist(16 * 3, 4).unwrap(), 3);
        assert_eq!(normalize_twist(-64 * 5, 6).unwrap(), -5);
        assert_eq!(e(Family::Four, 3), e(Family::Four, 48));
        assert_ne!(e(Family::Three, 2), e(Family::Six, 2));
        assert!(CurveSpec::new(Family::Four, 0).is_err());
        let c = CurveSpec::from_twists(Family::Four, &[(3, 2), (1, 1), (1, 1)]).unwrap();
        assert_eq!(c.normalized_t, 9);
        let c = CurveSpec::from_twists(Family::Six, &[(2, 1), (2, 1), (2, 1)]).unwrap();
        assert_eq!(c.normalized_t, 8);
        let c = CurveSpec::from_twists(Family::Four, &[(-2, 3), (2, 1), (5, 4)]).unwrap();
        assert_eq!(c.normalized_t, -1);
        assert!(CurveSpec::from_twists(Family::Three, &[(0, 1)]).is_err());
    }
}
