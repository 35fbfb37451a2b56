//! Hecke characters of type `z -> z^c` on the three class-number-one fields.
//!
//! A character is stored as the rule
//!
//! ```text
//! chi(p) = primary(pi)^c * (A / p)_w^e
//! ```
//!
//! on primes away from a finite support, where `w` is the number of units,
//! `(A / p)_w` is the `w`-th power residue symbol of a rational `A` and `e` is
//! `+1` or `-1`. On the support the primitive value is recovered from the
//! conductor. The constant part of `A` and the sign `e` are not taken from
//! literature; they are fitted once per field against point counts.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use super::{PrimeIdeal, QuadField, QuadInt, Splitting};
use crate::arith::{self, pow_mod};
use crate::cm_curves::{self, CurveSpec, Family};
use crate::{Error, Result};

/// A nonzero rational integer modulo `k`-th powers: a sign and prime
/// exponents reduced into `[0, k)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TwistClass {
    pub degree: u32,
    pub negative: bool,
    pub factors: BTreeMap<u64, u32>,
}

impl TwistClass {
    pub fn one(degree: u32) -> Self {
        TwistClass { degree, negative: false, factors: BTreeMap::new() }
    }

    pub fn from_int(t: i128, degree: u32) -> Result<Self> {
        if t == 0 {
            return Err(Error::ZeroTwist);
        }
        let mut out = TwistClass::one(degree);
        out.negative = t < 0;
        for (p, e) in arith::factorize(t.unsigned_abs() as u64) {
            if e % degree != 0 {
                out.factors.insert(p, e % degree);
            }
        }
        // -1 is a k-th power for odd k
        if degree % 2 == 1 {
            out.negative = false;
        }
        Ok(out)
    }

    pub fn mul(&self, other: &TwistClass) -> TwistClass {
        debug_assert_eq!(self.degree, other.degree);
        let mut out = self.clone();
        out.negative ^= other.negative;
        for (&p, &e) in &other.factors {
            let slot = out.factors.entry(p).or_insert(0);
            *slot = (*slot + e) % self.degree;
        }
        out.factors.retain(|_, e| *e != 0);
        out
    }

    pub fn pow(&self, n: u32) -> TwistClass {
        let mut out = TwistClass::one(self.degree);
        out.negative = self.negative && n % 2 == 1;
        for (&p, &e) in &self.factors {
            let r = (e as u64 * n as u64 % self.degree as u64) as u32;
            if r != 0 {
                out.factors.insert(p, r);
            }
        }
        out
    }

    pub fn is_trivial(&self) -> bool {
        !self.negative && self.factors.is_empty()
    }

    /// The representative `sign * prod p^e` with reduced exponents.
    pub fn value(&self) -> i128 {
        let mag: i128 = self.factors.iter().map(|(&p, &e)| (p as i128).pow(e)).product();
        if self.negative {
            -mag
        } else {
            mag
        }
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.keys().copied()
    }

    /// The representative reduced modulo the prime `p`.
    pub fn residue(&self, p: u64) -> u64 {
        let mut acc = if self.negative { p - 1 } else { 1 % p };
        for (&q, &e) in &self.factors {
            acc = arith::mul_mod(acc, pow_mod(q % p, e as u64, p), p);
        }
        acc
    }

    /// Order of the class in `Q^x / (Q^x)^k`.
    pub fn order(&self) -> u32 {
        let mut ord: u64 = if self.negative { 2 } else { 1 };
        for &e in self.factors.values() {
            let k = self.degree as u64;
            ord = arith::lcm(ord, k / arith::gcd_u64(e as u64, k));
        }
        ord as u32
    }
}

/// Per-field constants fixing the unit normalization of curve characters:
/// the curve `E(T)` has character `primary(pi) * (kappa * T / p)^exponent`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Normalization {
    pub kappa: TwistClass,
    pub exponent: i32,
}

/// A Hecke character of infinity type `c` (values `chi(aO) = a^c` on the
/// principal ideals congruent to one modulo the conductor).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HeckeCharacter {
    pub field: QuadField,
    pub infinity_type: u32,
    pub numerator: TwistClass,
    pub exponent: i32,
    pub power_index: u32,
    /// Rational primes where the simple rule does not apply.
    pub support: Vec<u64>,
    pub conductor: Vec<(PrimeIdeal, u32)>,
}

fn family_field(family: Family) -> QuadField {
    family.field()
}

/// Power residue symbol `(A / p)_w` as a unit index, or `None` if `p | A`.
fn residue_symbol(numerator: &TwistClass, ideal: &PrimeIdeal) -> Option<u32> {
    let field = ideal.generator.field;
    let w = field.unit_count() as u64;
    let p = ideal.p;
    let a = numerator.residue(p);
    if a == 0 {
        return None;
    }
    match ideal.kind {
        Splitting::Inert => {
            // A lies in F_p, so A^((p^2 - 1)/w) can be evaluated in F_p.
            let e = ((p as u128 * p as u128 - 1) / w as u128) % (p as u128 - 1);
            let v = pow_mod(a, e as u64, p);
            if v == 1 {
                Some(0)
            } else if v == p - 1 {
                field.unit_index(&field.from_int(-1))
            } else {
                None
            }
        }
        _ => {
            if w == 2 && p == 2 {
                // every odd residue is a square modulo 2
                return Some(0);
            }
            if (p - 1) % w != 0 {
                return None;
            }
            let v = pow_mod(a, (p - 1) / w, p);
            (0..w as u32).find(|&k| ideal.residue(&field.unit(k as i64)) == Some(v))
        }
    }
}

fn support_primes(field: QuadField, numerator: &TwistClass) -> Vec<u64> {
    let mut s: Vec<u64> = match field {
        QuadField::Gauss => vec![2],
        QuadField::Eisenstein => vec![2, 3],
        QuadField::Kleinian7 => vec![7],
    };
    s.extend(numerator.primes());
    s.sort_unstable();
    s.dedup();
    s
}

/// Starting exponent for the conductor search at a prime ideal above `p`.
fn exponent_cap(field: QuadField, ideal: &PrimeIdeal) -> u32 {
    match (field, ideal.p, ideal.kind) {
        (QuadField::Gauss, 2, _) => 10,
        (QuadField::Eisenstein, 3, _) => 7,
        (_, 2, Splitting::Inert) => 4,
        (_, 2, _) => 6,
        (_, 3, Splitting::Inert) => 3,
        (_, 3, _) => 5,
        (_, 7, Splitting::Ramified) => 3,
        _ => 2,
    }
}

struct Lcg(u64);

impl Lcg {
    fn next(&mut self, lo: i128, hi: i128) -> i128 {
        self.0 = self.0.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        lo + ((self.0 >> 33) as i128).rem_euclid(hi - lo + 1)
    }
}

impl HeckeCharacter {
    /// Builds the character and computes its conductor.
    pub fn new(field: QuadField, infinity_type: u32, numerator: TwistClass, exponent: i32, power_index: u32) -> Result<Self> {
        let support = support_primes(field, &numerator);
        let mut chi = HeckeCharacter {
            field,
            infinity_type,
            numerator,
            exponent,
            power_index,
            support,
            conductor: Vec::new(),
        };
        chi.conductor = chi.compute_conductor()?;
        Ok(chi)
    }

    fn coprime_to_support(&self, x: &QuadInt) -> bool {
        let n = x.norm();
        n != 0 && self.support.iter().all(|&p| n % p as i128 != 0)
    }

    /// Value of the rule at a prime away from the support, as a unit index
    /// times `primary(pi)^c`.
    fn raw_value(&self, ideal: &PrimeIdeal) -> QuadInt {
        let sym = residue_symbol(&self.numerator, ideal).expect("prime away from support");
        let primary = ideal.generator.primary().expect("prime away from support");
        primary.pow(self.infinity_type) * self.field.unit(self.exponent as i64 * sym as i64)
    }

    /// `chi(xO) / x^c` as a unit index, for `x` coprime to the support.
    fn unit_part(&self, x: &QuadInt) -> u32 {
        let w = self.field.unit_count() as i64;
        let primary = x.primary().expect("coprime to support");
        let nu = self
            .field
            .unit_index(&primary.div_exact(x).expect("associates"))
            .expect("unit") as i64;
        let mut idx = nu * self.infinity_type as i64;
        for (ideal, e) in x.factor() {
            let sym = residue_symbol(&self.numerator, &ideal).expect("coprime to support") as i64;
            idx += self.exponent as i64 * sym * e as i64;
        }
        idx.rem_euclid(w) as u32
    }

    fn support_ideals(&self) -> Vec<PrimeIdeal> {
        self.support
            .iter()
            .flat_map(|&p| {
                self.field
                    .factor_prime(p)
                    .expect("support primes are prime")
                    .ideals()
                    .into_iter()
                    .cloned()
                    .collect::<Vec<_>>()
            })
            .collect()
    }

    /// Whether `x -> chi(xO)/x^c` only depends on `x` modulo `modulus`.
    fn defined_modulo(&self, modulus: &QuadInt, seed: u64) -> bool {
        let mut rng = Lcg(seed ^ 0x9e37_79b9_7f4a_7c15);
        let mut checked = 0;
        let mut attempts = 0;
        while checked < 96 && attempts < 5000 {
            attempts += 1;
            let x = QuadInt::new(self.field, rng.next(-40, 40), rng.next(-40, 40));
            let z = QuadInt::new(self.field, rng.next(-6, 6), rng.next(-6, 6));
            if z.is_zero() || !self.coprime_to_support(&x) {
                continue;
            }
            let y = x + *modulus * z;
            if !self.coprime_to_support(&y) {
                continue;
            }
            if self.unit_part(&x) != self.unit_part(&y) {
                return false;
            }
            checked += 1;
        }
        true
    }

    fn modulus_of(exps: &[(PrimeIdeal, u32)], field: QuadField) -> QuadInt {
        exps.iter().fold(field.one(), |acc, (p, e)| acc * p.generator.pow(*e))
    }

    /// Conductor by descent from a safe modulus supported on the support primes.
    fn compute_conductor(&self) -> Result<Vec<(PrimeIdeal, u32)>> {
        let mut exps: Vec<(PrimeIdeal, u32)> = self
            .support_ideals()
            .into_iter()
            .map(|p| {
                let cap = exponent_cap(self.field, &p);
                (p, cap)
            })
            .collect();
        if !self.defined_modulo(&Self::modulus_of(&exps, self.field), 1) {
            return Err(Error::Consistency(format!(
                "character on {} is not defined modulo the starting modulus",
                self.field
            )));
        }
        for i in 0..exps.len() {
            while exps[i].1 > 0 {
                exps[i].1 -= 1;
                let m = Self::modulus_of(&exps, self.field);
                if !self.defined_modulo(&m, 2 + i as u64 * 7919 + exps[i].1 as u64) {
                    exps[i].1 += 1;
                    break;
                }
            }
        }
        exps.retain(|(_, e)| *e > 0);
        Ok(exps)
    }

    pub fn conductor_generator(&self) -> QuadInt {
        Self::modulus_of(&self.conductor, self.field)
    }

    pub fn conductor_norm(&self) -> u64 {
        self.conductor.iter().map(|(p, e)| p.norm().pow(*e)).product()
    }

    /// Level `|disc| * N(f)` of the attached newform.
    pub fn level(&self) -> u64 {
        self.field.discriminant() * self.conductor_norm()
    }

    pub fn weight(&self) -> u32 {
        self.infinity_type + 1
    }

    /// Value on a prime ideal (zero on primes dividing the conductor).
    pub fn value_at_prime(&self, ideal: &PrimeIdeal) -> QuadInt {
        if !self.support.contains(&ideal.p) {
            return self.raw_value(ideal);
        }
        if self.conductor.iter().any(|(q, _)| q.generator == ideal.generator) {
            return self.field.from_int(0);
        }
        // Primitive value: pi^c times the unit part of any x = pi (mod f)
        // that avoids the support.
        let f = self.conductor_generator();
        let mut rng = Lcg(ideal.p);
        let pi = ideal.generator;
        let mut x = pi;
        while !self.coprime_to_support(&x) {
            let z = QuadInt::new(self.field, rng.next(-8, 8), rng.next(-8, 8));
            x = pi + f * z;
        }
        pi.pow(self.infinity_type) * self.field.unit(self.unit_part(&x) as i64)
    }

    /// `chi(xO)` for a nonzero integral ideal given by a generator.
    pub fn evaluate(&self, x: &QuadInt) -> QuadInt {
        let mut acc = self.field.one();
        for (ideal, e) in x.factor() {
            let v = self.value_at_prime(&ideal);
            if v.is_zero() {
                return v;
            }
            acc = acc * v.pow(e);
        }
        acc
    }

    /// The primitive character attached to `chi^n`.
    pub fn power(&self, n: u32) -> Result<HeckeCharacter> {
        if n == 0 {
            return Err(Error::InvalidArgument("power must be positive".into()));
        }
        if n == 1 {
            return Ok(self.clone());
        }
        let numerator = self.numerator.pow(n);
        let mut chi = HeckeCharacter {
            field: self.field,
            infinity_type: self.infinity_type * n,
            numerator,
            exponent: self.exponent,
            power_index: self.power_index * n,
            support: self.support.clone(),
            conductor: Vec::new(),
        };
        chi.conductor = chi.compute_conductor()?;
        Ok(chi)
    }

    /// Rational restriction `chi(mO) / m^c` as `+1` or `-1`; zero when `m`
    /// meets the conductor.
    pub fn rational_restriction(&self, m: u64) -> Result<i32> {
        if m == 0 || arith::gcd_u64(m, self.conductor_norm()) != 1 {
            return Ok(0);
        }
        let x = self.field.from_int(m as i128);
        let v = self.evaluate(&x);
        let u = v
            .div_exact(&x.pow(self.infinity_type))
            .ok_or_else(|| Error::Consistency(format!("chi({m}O) is not a multiple of {m}^c")))?;
        match (u.a, u.b) {
            (1, 0) => Ok(1),
            (-1, 0) => Ok(-1),
            _ => Err(Error::Consistency(format!("chi({m}O) / {m}^c = {u} is not rational"))),
        }
    }

    /// Nebentypus of the attached newform, `m -> (disc / m) chi(mO) / m^c`;
    /// zero when `m` meets the level.
    pub fn nebentypus(&self, m: u64) -> Result<i32> {
        if arith::gcd_u64(m, self.level()) != 1 {
            return Ok(0);
        }
        let disc = -(self.field.discriminant() as i128);
        Ok(arith::kronecker(disc, m) * self.rational_restriction(m)?)
    }
}

fn kappa_candidates(field: QuadField) -> Vec<TwistClass> {
    let w = field.unit_count();
    let mut out = Vec::new();
    let (a_max, b_max) = match field {
        QuadField::Gauss => (w, 1),
        QuadField::Eisenstein => (w, w),
        QuadField::Kleinian7 => (1, 1),
    };
    for b in 0..b_max {
        for a in 0..a_max {
            for neg in [false, true] {
                let v = 2i128.pow(a) * 3i128.pow(b) * if neg { -1 } else { 1 };
                out.push(TwistClass::from_int(v, w).expect("nonzero"));
            }
        }
    }
    out.dedup();
    out
}

fn calibration_curves(field: QuadField) -> Vec<CurveSpec> {
    match field {
        QuadField::Gauss => [1, -1, 2, -2, 3, 5, 6, 7]
            .iter()
            .map(|&t| CurveSpec::new(Family::Four, t).expect("nonzero"))
            .collect(),
        QuadField::Eisenstein => [1, -1, 2, 3, 4, -3, 5, 12]
            .iter()
            .map(|&t| CurveSpec::new(Family::Three, t).expect("nonzero"))
            .collect(),
        QuadField::Kleinian7 => vec![CurveSpec::roan()],
    }
}

/// First `count` good split primes of the curve, skipping `skip` of them.
fn split_primes(curve: &CurveSpec, skip: usize, count: usize) -> Vec<PrimeIdeal> {
    let field = curve.family.field();
    let mut out = Vec::new();
    let mut p = 2;
    while out.len() < skip + count {
        if arith::is_prime(p) && curve.has_good_reduction(p) && field.splitting(p) == Splitting::Split {
            if let Ok(super::PrimeDecomposition::Split(a, _)) = field.factor_prime(p) {
                out.push(a);
            }
        }
        p += 1;
    }
    out.split_off(skip)
}

fn trace_with(field: QuadField, norm: &Normalization, twist: &TwistClass, ideal: &PrimeIdeal) -> Option<i128> {
    let a = norm.kappa.mul(twist);
    let sym = residue_symbol(&a, ideal)?;
    let primary = ideal.generator.primary().ok()?;
    Some((primary * field.unit(norm.exponent as i64 * sym as i64)).trace())
}

fn calibrate(field: QuadField) -> Result<Normalization> {
    let curves = calibration_curves(field);
    let oracle = |c: &CurveSpec, ideal: &PrimeIdeal| cm_curves::count_points_naive(c, ideal.p).ok().map(|a| a as i128);
    let exponents: &[i32] = if field == QuadField::Kleinian7 { &[1] } else { &[1, -1] };
    let mut survivors = Vec::new();
    for kappa in kappa_candidates(field) {
        for &exponent in exponents {
            let norm = Normalization { kappa: kappa.clone(), exponent };
            let fits = curves.iter().all(|c| {
                let twist = c.twist_class();
                split_primes(c, 0, 3)
                    .iter()
                    .all(|ideal| trace_with(field, &norm, &twist, ideal) == oracle(c, ideal))
            });
            if fits {
                survivors.push(norm);
            }
        }
    }
    survivors
        .into_iter()
        .find(|norm| {
            curves.iter().all(|c| {
                let twist = c.twist_class();
                split_primes(c, 3, 20)
                    .iter()
                    .all(|ideal| trace_with(field, norm, &twist, ideal) == oracle(c, ideal))
            })
        })
        .ok_or_else(|| Error::Consistency(format!("no unit normalization on {field} reproduces point counts")))
}

/// Calibrated normalization for the field (computed once).
pub fn normalization(field: QuadField) -> Result<&'static Normalization> {
    static CELLS: [OnceLock<std::result::Result<Normalization, Error>>; 3] =
        [OnceLock::new(), OnceLock::new(), OnceLock::new()];
    let idx = match field {
        QuadField::Gauss => 0,
        QuadField::Eisenstein => 1,
        QuadField::Kleinian7 => 2,
    };
    CELLS[idx].get_or_init(|| calibrate(field)).as_ref().map_err(Clone::clone)
}

/// `Tr chi_E(p)` for a good split prime, from the calibrated rule alone.
pub(crate) fn split_trace(curve: &CurveSpec, ideal: &PrimeIdeal) -> Result<i128> {
    let field = curve.family.field();
    let norm = normalization(field)?;
    trace_with(field, norm, &curve.twist_class(), ideal)
        .ok_or_else(|| Error::Consistency(format!("prime above {} meets the twist", ideal.p)))
}

/// The Hecke character of the curve, checked against point counts at the
/// first 23 good split primes.
pub fn hecke_character_of(curve: &CurveSpec) -> Result<HeckeCharacter> {
    let field = family_field(curve.family);
    let norm = normalization(field)?;
    let numerator = norm.kappa.mul(&curve.twist_class());
    let chi = HeckeCharacter::new(field, 1, numerator, norm.exponent, 1)?;
    for ideal in split_primes(curve, 0, 23) {
        let expect = cm_curves::count_points_naive(curve, ideal.p)? as i128;
        let conj = QuadInt::conj(&ideal.generator);
        let got = chi.value_at_prime(&ideal).trace();
        if got != expect || chi.evaluate(&conj).trace() != expect {
            return Err(Error::Consistency(format!(
                "character trace {got} disagrees with a_{} = {expect}",
                ideal.p
            )));
        }
    }
    Ok(chi)
}

/// Character of the `n`-fold built from `E(1)^n` with total twist `T`:
/// `chi_1^(n-1) * chi_T`, of infinity type `n`.
pub fn nfold_character(family: Family, total_twist: &TwistClass, n: u32) -> Result<HeckeCharacter> {
    let field = family.field();
    let norm = normalization(field)?;
    let numerator = norm.kappa.pow(n).mul(total_twist);
    HeckeCharacter::new(field, n, numerator, norm.exponent, n)
}
