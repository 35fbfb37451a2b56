//! Rings of integers of Q(i), Q(sqrt(-3)) and Q(sqrt(-7)) and the Hecke
//! characters attached to the CM curves.
//!
//! All three rings are norm-Euclidean with class number one, so an ideal is
//! always handled through one of its generators.

pub mod hecke;

pub use hecke::{HeckeCharacter, Normalization, TwistClass};

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::arith::{self, reduce};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum QuadField {
    /// Z[i].
    Gauss,
    /// Z[zeta_3].
    Eisenstein,
    /// Z[(1 + sqrt(-7))/2].
    Kleinian7,
}

impl QuadField {
    /// `(t, n)` with `omega^2 = t*omega - n`.
    #[inline]
    pub const fn min_poly(self) -> (i128, i128) {
        match self {
            QuadField::Gauss => (0, 1),
            QuadField::Eisenstein => (-1, 1),
            QuadField::Kleinian7 => (1, 2),
        }
    }

    /// Absolute value of the field discriminant.
    pub const fn discriminant(self) -> u64 {
        match self {
            QuadField::Gauss => 4,
            QuadField::Eisenstein => 3,
            QuadField::Kleinian7 => 7,
        }
    }

    /// Size of the unit group; also the degree of the residue symbol used for twists.
    pub const fn unit_count(self) -> u32 {
        match self {
            QuadField::Gauss => 4,
            QuadField::Eisenstein => 6,
            QuadField::Kleinian7 => 2,
        }
    }

    pub fn omega(self) -> QuadInt {
        QuadInt::new(self, 0, 1)
    }

    pub fn one(self) -> QuadInt {
        QuadInt::new(self, 1, 0)
    }

    pub fn from_int(self, a: i128) -> QuadInt {
        QuadInt::new(self, a, 0)
    }

    /// Generator of the cyclic unit group.
    fn unit_generator(self) -> QuadInt {
        match self {
            QuadField::Gauss => QuadInt::new(self, 0, 1),
            QuadField::Eisenstein => QuadInt::new(self, 1, 1),
            QuadField::Kleinian7 => QuadInt::new(self, -1, 0),
        }
    }

    /// The unit `g^k` for the fixed generator `g`.
    pub fn unit(self, k: i64) -> QuadInt {
        let w = self.unit_count() as i64;
        self.unit_generator().pow(k.rem_euclid(w) as u32)
    }

    pub fn units(self) -> Vec<QuadInt> {
        (0..self.unit_count() as i64).map(|k| self.unit(k)).collect()
    }

    /// Index `k` with `x = g^k`, if `x` is a unit.
    pub fn unit_index(self, x: &QuadInt) -> Option<u32> {
        (0..self.unit_count()).find(|&k| self.unit(k as i64) == *x)
    }

    /// Generator of the prime above the discriminant.
    pub fn ramified_generator(self) -> QuadInt {
        match self {
            QuadField::Gauss => QuadInt::new(self, 1, 1),
            QuadField::Eisenstein => QuadInt::new(self, 1, 2),
            QuadField::Kleinian7 => QuadInt::new(self, -1, 2),
        }
    }

    /// Splitting behaviour of the rational prime `p`.
    pub fn splitting(self, p: u64) -> Splitting {
        if p == self.discriminant() || (self == QuadField::Gauss && p == 2) {
            return Splitting::Ramified;
        }
        match self {
            QuadField::Gauss => {
                if p % 4 == 1 {
                    Splitting::Split
                } else {
                    Splitting::Inert
                }
            }
            QuadField::Eisenstein => {
                if p % 3 == 1 {
                    Splitting::Split
                } else {
                    Splitting::Inert
                }
            }
            QuadField::Kleinian7 => {
                if p == 2 || arith::legendre(-7, p) == 1 {
                    Splitting::Split
                } else {
                    Splitting::Inert
                }
            }
        }
    }

    /// Roots of the minimal polynomial of omega modulo `p`.
    fn omega_roots_mod(self, p: u64) -> Vec<u64> {
        let (t, n) = self.min_poly();
        if p < 64 {
            return (0..p)
                .filter(|&r| {
                    let r = r as i128;
                    reduce(r * r - t * r + n, p) == 0
                })
                .collect();
        }
        let disc = reduce(t * t - 4 * n, p);
        let Some(s) = arith::sqrt_mod(disc, p) else {
            return Vec::new();
        };
        let inv2 = (p + 1) / 2;
        let r1 = arith::mul_mod(reduce(t + s as i128, p), inv2, p);
        let r2 = arith::mul_mod(reduce(t - s as i128, p), inv2, p);
        if r1 == r2 {
            vec![r1]
        } else {
            vec![r1, r2]
        }
    }

    /// Decomposes the rational prime `p` into prime ideals.
    pub fn factor_prime(self, p: u64) -> Result<PrimeDecomposition, crate::Error> {
        if !arith::is_prime(p) {
            return Err(crate::Error::NotPrime(p));
        }
        Ok(match self.splitting(p) {
            Splitting::Inert => PrimeDecomposition::Inert(PrimeIdeal {
                generator: self.from_int(p as i128),
                p,
                kind: Splitting::Inert,
                root: None,
            }),
            Splitting::Ramified => {
                let root = self.omega_roots_mod(p)[0];
                PrimeDecomposition::Ramified(PrimeIdeal {
                    generator: self.ramified_generator(),
                    p,
                    kind: Splitting::Ramified,
                    root: Some(root),
                })
            }
            Splitting::Split => {
                let roots = self.omega_roots_mod(p);
                let ideal = |r: u64| {
                    let g = QuadInt::gcd(&self.from_int(p as i128), &(self.omega() - self.from_int(r as i128)));
                    PrimeIdeal {
                        generator: g.canonical(),
                        p,
                        kind: Splitting::Split,
                        root: Some(r),
                    }
                };
                let (a, b) = (ideal(roots[0]), ideal(roots[1]));
                debug_assert_eq!(a.generator.norm(), p as i128);
                PrimeDecomposition::Split(a, b)
            }
        })
    }

    /// Every integral ideal of norm `<= bound`, one canonical generator per
    /// ideal, sorted by norm and then by generator.
    pub fn ideals_by_norm(self, bound: u64) -> Vec<(QuadInt, u64)> {
        let (t, n) = self.min_poly();
        let bound_i = bound as i128;
        // norm = (a + t b / 2)^2 + (n - t^2/4) b^2, so 4*norm >= (4n - t^2) b^2
        let bmax = ((4 * bound_i) as f64 / (4 * n - t * t) as f64).sqrt().ceil() as i128 + 1;
        let amax = (bound as f64).sqrt().ceil() as i128 + bmax + 1;
        let mut out = Vec::new();
        for b in -bmax..=bmax {
            for a in -amax..=amax {
                let x = QuadInt::new(self, a, b);
                let nm = x.norm();
                if nm == 0 || nm > bound_i {
                    continue;
                }
                if x.canonical() == x {
                    out.push((x, nm as u64));
                }
            }
        }
        out.sort_by(|(x, n1), (y, n2)| n1.cmp(n2).then((x.a, x.b).cmp(&(y.a, y.b))));
        out
    }
}

impl fmt::Display for QuadField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            QuadField::Gauss => "Q(i)",
            QuadField::Eisenstein => "Q(sqrt(-3))",
            QuadField::Kleinian7 => "Q(sqrt(-7))",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Splitting {
    Split,
    Inert,
    Ramified,
}

/// A prime ideal of one of the three rings.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PrimeIdeal {
    pub generator: QuadInt,
    /// Rational prime below.
    pub p: u64,
    pub kind: Splitting,
    /// Image of omega in the residue field when it is F_p.
    pub root: Option<u64>,
}

impl PrimeIdeal {
    pub fn norm(&self) -> u64 {
        match self.kind {
            Splitting::Inert => self.p * self.p,
            _ => self.p,
        }
    }

    /// Reduction of `x` into F_p; only for degree-one primes.
    pub fn residue(&self, x: &QuadInt) -> Option<u64> {
        self.root
            .map(|r| reduce(x.a + x.b * r as i128, self.p))
    }

    pub fn divides(&self, x: &QuadInt) -> bool {
        x.is_divisible_by(&self.generator)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PrimeDecomposition {
    Split(PrimeIdeal, PrimeIdeal),
    Inert(PrimeIdeal),
    Ramified(PrimeIdeal),
}

impl PrimeDecomposition {
    pub fn ideals(&self) -> Vec<&PrimeIdeal> {
        match self {
            PrimeDecomposition::Split(a, b) => vec![a, b],
            PrimeDecomposition::Inert(a) | PrimeDecomposition::Ramified(a) => vec![a],
        }
    }
}

/// `a + b*omega` in the ring of integers of `field`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct QuadInt {
    pub field: QuadField,
    pub a: i128,
    pub b: i128,
}

impl QuadInt {
    pub const fn new(field: QuadField, a: i128, b: i128) -> Self {
        QuadInt { field, a, b }
    }

    pub fn is_zero(&self) -> bool {
        self.a == 0 && self.b == 0
    }

    pub fn norm(&self) -> i128 {
        let (t, n) = self.field.min_poly();
        self.a * self.a + t * self.a * self.b + n * self.b * self.b
    }

    pub fn trace(&self) -> i128 {
        let (t, _) = self.field.min_poly();
        2 * self.a + t * self.b
    }

    pub fn conj(&self) -> Self {
        let (t, _) = self.field.min_poly();
        QuadInt::new(self.field, self.a + self.b * t, -self.b)
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut acc = self.field.one();
        let mut base = *self;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }

    pub fn to_complex(&self) -> num_complex::Complex64 {
        let w = match self.field {
            QuadField::Gauss => num_complex::Complex64::new(0.0, 1.0),
            QuadField::Eisenstein => num_complex::Complex64::new(-0.5, 3f64.sqrt() / 2.0),
            QuadField::Kleinian7 => num_complex::Complex64::new(0.5, 7f64.sqrt() / 2.0),
        };
        num_complex::Complex64::new(self.a as f64, 0.0) + w * self.b as f64
    }

    pub fn is_divisible_by(&self, d: &QuadInt) -> bool {
        let n = d.norm();
        if n == 0 {
            return self.is_zero();
        }
        let q = *self * d.conj();
        q.a % n == 0 && q.b % n == 0
    }

    /// `self / d`, when the division is exact.
    pub fn div_exact(&self, d: &QuadInt) -> Option<QuadInt> {
        let n = d.norm();
        if n == 0 {
            return None;
        }
        let q = *self * d.conj();
        (q.a % n == 0 && q.b % n == 0).then(|| QuadInt::new(self.field, q.a / n, q.b / n))
    }

    /// Euclidean division with remainder of minimal norm.
    pub fn div_rem(&self, d: &QuadInt) -> (QuadInt, QuadInt) {
        let n = d.norm();
        let q = *self * d.conj();
        let fl = |x: i128| x.div_euclid(n);
        let mut best: Option<(QuadInt, QuadInt)> = None;
        for da in 0..=1 {
            for db in 0..=1 {
                let cand = QuadInt::new(self.field, fl(q.a) + da, fl(q.b) + db);
                let r = *self - cand * *d;
                if best.as_ref().is_none_or(|(_, br)| r.norm() < br.norm()) {
                    best = Some((cand, r));
                }
            }
        }
        best.expect("nonempty candidate set")
    }

    pub fn gcd(x: &QuadInt, y: &QuadInt) -> QuadInt {
        let (mut a, mut b) = (*x, *y);
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        a
    }

    pub fn is_unit(&self) -> bool {
        self.norm() == 1
    }

    pub fn associates(&self) -> Vec<QuadInt> {
        self.field.units().into_iter().map(|u| u * *self).collect()
    }

    /// Deterministic representative of the associate class.
    pub fn canonical(&self) -> QuadInt {
        self.associates()
            .into_iter()
            .max_by_key(|x| (x.a, -x.b.abs(), x.b))
            .expect("unit group is nonempty")
    }

    /// The distinguished associate used to normalize Hecke characters:
    /// `x = 1 (mod (1+i)^3)` for Q(i), `x = 1 (mod 3)` for Q(sqrt(-3)) and a
    /// nonzero square modulo sqrt(-7) for Q(sqrt(-7)).
    pub fn primary(&self) -> Result<QuadInt, crate::Error> {
        let found = self.associates().into_iter().find(|u| match self.field {
            QuadField::Gauss => (*u - self.field.one()).is_divisible_by(&QuadInt::new(self.field, 2, 2)),
            QuadField::Eisenstein => {
                let d = *u - self.field.one();
                d.a % 3 == 0 && d.b % 3 == 0
            }
            QuadField::Kleinian7 => arith::legendre(u.a + 4 * u.b, 7) == 1,
        });
        found.ok_or_else(|| {
            crate::Error::InvalidArgument(format!(
                "{self} is not coprime to the normalization modulus of {}",
                self.field
            ))
        })
    }

    /// Prime ideal factorization `x = unit * prod pi^e`.
    pub fn factor(&self) -> Vec<(PrimeIdeal, u32)> {
        let n = self.norm();
        assert!(n > 0, "cannot factor zero");
        let mut out = Vec::new();
        let mut rest = *self;
        for (p, _) in arith::factorize(n as u64) {
            let dec = self.field.factor_prime(p).expect("factor of a norm is prime");
            for ideal in dec.ideals() {
                let mut e = 0;
                while let Some(q) = rest.div_exact(&ideal.generator) {
                    rest = q;
                    e += 1;
                }
                if e > 0 {
                    out.push((ideal.clone(), e));
                }
            }
        }
        debug_assert!(rest.is_unit());
        out
    }
}

impl Add for QuadInt {
    type Output = QuadInt;
    fn add(self, o: QuadInt) -> QuadInt {
        debug_assert_eq!(self.field, o.field);
        QuadInt::new(self.field, self.a + o.a, self.b + o.b)
    }
}

impl Sub for QuadInt {
    type Output = QuadInt;
    fn sub(self, o: QuadInt) -> QuadInt {
        debug_assert_eq!(self.field, o.field);
        QuadInt::new(self.field, self.a - o.a, self.b - o.b)
    }
}

impl Neg for QuadInt {
    type Output = QuadInt;
    fn neg(self) -> QuadInt {
        QuadInt::new(self.field, -self.a, -self.b)
    }
}

impl Mul for QuadInt {
    type Output = QuadInt;
    fn mul(self, o: QuadInt) -> QuadInt {
        debug_assert_eq!(self.field, o.field);
        let (t, n) = self.field.min_poly();
        let bd = self.b * o.b;
        QuadInt::new(
            self.field,
            self.a * o.a - n * bd,
            self.a * o.b + self.b * o.a + t * bd,
        )
    }
}

impl fmt::Display for QuadInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let w = match self.field {
            QuadField::Gauss => "i",
            QuadField::Eisenstein => "z",
            QuadField::Kleinian7 => "w",
        };
        match (self.a, self.b) {
            (a, 0) => write!(f, "{a}"),
            (0, b) => write!(f, "{b}{w}"),
            (a, b) if b < 0 => write!(f, "{a}{b}{w}"),
            (a, b) => write!(f, "{a}+{b}{w}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const FIELDS: [QuadField; 3] = [QuadField::Gauss, QuadField::Eisenstein, QuadField::Kleinian7];

    #[test]
    fn norm_forms() {
        let x = QuadInt::new(QuadField::Gauss, 3, -2);
        assert_eq!(x.norm(), 13);
        let y = QuadInt::new(QuadField::Eisenstein, 3, -2);
        assert_eq!(y.norm(), 9 + 6 + 4);
        let z = QuadInt::new(QuadField::Kleinian7, 3, -2);
        assert_eq!(z.norm(), 9 - 6 + 8);
    }

    #[test]
    fn factor_prime_examples() {
        match QuadField::Gauss.factor_prime(5).unwrap() {
            PrimeDecomposition::Split(a, b) => {
                let mut gens = vec![a.generator, b.generator];
                gens.sort_by_key(|g| (g.a, g.b));
                assert_eq!(gens, vec![QuadInt::new(QuadField::Gauss, 2, -1), QuadInt::new(QuadField::Gauss, 2, 1)]);
            }
            other => panic!("5 should split in Q(i): {other:?}"),
        }
        assert!(matches!(QuadField::Gauss.factor_prime(7).unwrap(), PrimeDecomposition::Inert(_)));
        match QuadField::Eisenstein.factor_prime(3).unwrap() {
            PrimeDecomposition::Ramified(a) => {
                assert_eq!(a.generator, QuadInt::new(QuadField::Eisenstein, 1, 2));
                assert_eq!(a.generator.norm(), 3);
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(QuadField::Kleinian7.factor_prime(2).unwrap(), PrimeDecomposition::Split(..)));
        assert!(QuadField::Gauss.factor_prime(9).is_err());
    }

    #[test]
    fn split_generators_have_prime_norm() {
        for f in FIELDS {
            for p in arith::primes_up_to(3000) {
                let dec = f.factor_prime(p).unwrap();
                for ideal in dec.ideals() {
                    assert_eq!(ideal.generator.norm() as u64, if ideal.kind == Splitting::Inert { p * p } else { p });
                    if let Some(r) = ideal.root {
                        assert_eq!(ideal.residue(&ideal.generator), Some(0));
                        assert_eq!(ideal.residue(&f.omega()), Some(r));
                    }
                }
            }
        }
    }

    #[test]
    fn primary_generator_examples() {
        let g = QuadField::Gauss;
        assert_eq!(QuadInt::new(g, 2, 1).primary().unwrap(), QuadInt::new(g, -1, 2));
        assert_eq!(g.from_int(3).primary().unwrap(), g.from_int(-3));
        for f in FIELDS {
            assert_eq!(f.one().primary().unwrap(), f.one());
        }
        assert!(QuadInt::new(g, 1, 1).primary().is_err());
    }

    #[test]
    fn ideals_by_norm_small() {
        let g = QuadField::Gauss;
        assert_eq!(
            g.ideals_by_norm(2),
            vec![(g.one(), 1), (QuadInt::new(g, 1, 1), 2)]
        );
        let five: Vec<_> = g.ideals_by_norm(5).into_iter().filter(|(_, n)| *n == 5).map(|(x, _)| x).collect();
        assert_eq!(five, vec![QuadInt::new(g, 2, -1), QuadInt::new(g, 2, 1)]);
    }

    #[test]
    fn ideal_count_matches_lattice_points() {
        // Brute force: lattice points of norm <= 100 divided by the unit count.
        for f in FIELDS {
            let mut points = 0;
            for a in -40i128..=40 {
                for b in -40i128..=40 {
                    let n = QuadInt::new(f, a, b).norm();
                    if n > 0 && n <= 100 {
                        points += 1;
                    }
                }
            }
            assert_eq!(points % f.unit_count() as usize, 0);
            assert_eq!(f.ideals_by_norm(100).len(), points / f.unit_count() as usize);
        }
    }

    fn quad(f: QuadField) -> impl Strategy<Value = QuadInt> {
        (-500i128..500, -500i128..500).prop_map(move |(a, b)| QuadInt::new(f, a, b))
    }

    proptest! {
        #[test]
        fn norm_is_multiplicative(x in quad(QuadField::Kleinian7), y in quad(QuadField::Kleinian7),
                                  u in quad(QuadField::Eisenstein), v in quad(QuadField::Eisenstein)) {
            prop_assert_eq!((x * y).norm(), x.norm() * y.norm());
            prop_assert_eq!((u * v).norm(), u.norm() * v.norm());
            prop_assert_eq!(x * y, y * x);
            prop_assert!(x.norm() >= 0);
        }

        #[test]
        fn factorization_recovers_element(x in quad(QuadField::Gauss), y in quad(QuadField::Kleinian7)) {
            for z in [x, y] {
                prop_assume!(!z.is_zero());
                let prod = z.factor().iter().fold(z.field.one(), |acc, (p, e)| acc * p.generator.pow(*e));
                prop_assert!(z.div_exact(&prod).is_some_and(|u| u.is_unit()));
            }
        }
    }
}
