//! Dirichlet coefficients of the curve, threefold and n-fold L-series.
//!
//! Two independent constructions are provided: the point-count path
//! (traces of Frobenius, power traces, Hecke recursion) and the ideal-sum
//! path (summing character values over ideals of each norm).

pub mod cache;

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::arith;
use crate::cm_curves::{self, CurveSpec, Family};
use crate::quad_fields::hecke::{self, HeckeCharacter};
use crate::quad_fields::{PrimeDecomposition, QuadInt, Splitting};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Origin {
    PointCount,
    IdealSum,
    Twisted,
    Cache,
}

/// Coefficients `a_1..a_N` of an L-series; `coefficients[0]` is unused.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientTable {
    pub weight: u32,
    pub level: u64,
    pub coefficients: Vec<i128>,
    pub origin: Origin,
}

impl CoefficientTable {
    /// Largest index stored.
    pub fn len(&self) -> usize {
        self.coefficients.len().saturating_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, n: usize) -> i128 {
        self.coefficients[n]
    }

    /// `(n, a_n)` for `n >= 1`.
    pub fn iter(&self) -> impl Iterator<Item = (usize, i128)> + '_ {
        self.coefficients.iter().copied().enumerate().skip(1)
    }

    pub fn truncated(&self, bound: usize) -> CoefficientTable {
        let mut t = self.clone();
        t.coefficients.truncate(bound + 1);
        t
    }
}

/// `b_p = a_p^3 - 3 p a_p`.
pub fn cube_trace(a_p: i128, p: u64) -> i128 {
    a_p * a_p * a_p - 3 * p as i128 * a_p
}

/// `alpha^n + beta^n` for the roots of `x^2 - a_p x + p`.
pub fn power_trace(a_p: i128, p: u64, n: u32) -> i128 {
    let (mut s0, mut s1) = (2i128, a_p);
    if n == 0 {
        return s0;
    }
    for _ in 1..n {
        let s2 = a_p * s1 - p as i128 * s0;
        s0 = s1;
        s1 = s2;
    }
    s1
}

/// Euler factor at `p` as `[1, c1, c2]`, meaning `1 + c1 X + c2 X^2` with
/// `X = p^-s`.
pub fn euler_factor(chi: &HeckeCharacter, p: u64) -> Result<[i128; 3]> {
    let field = chi.field;
    let dec = field.factor_prime(p)?;
    // polynomial in X with QuadInt coefficients
    let mut poly = [field.one(), field.from_int(0), field.from_int(0)];
    for ideal in dec.ideals() {
        let v = chi.value_at_prime(ideal);
        let deg = if ideal.kind == Splitting::Inert { 2 } else { 1 };
        let mut next = poly;
        for i in 0..3 {
            if i + deg < 3 {
                next[i + deg] = next[i + deg] - poly[i] * v;
            }
        }
        poly = next;
    }
    let mut out = [0i128; 3];
    for (o, c) in out.iter_mut().zip(poly) {
        if c.b != 0 {
            return Err(Error::Consistency(format!("Euler factor at {p} is not rational")));
        }
        *o = c.a;
    }
    Ok(out)
}

/// Extends prime data multiplicatively: `local(p)` returns the Euler factor
/// `[1, c1, c2]` and `a_{p^k}` follows `a_{p^k} = -c1 a_{p^(k-1)} - c2 a_{p^(k-2)}`.
fn extend<F>(bound: usize, mut local: F) -> Result<Vec<i128>>
where
    F: FnMut(u64) -> Result<[i128; 3]>,
{
    let mut a = vec![0i128; bound + 1];
    if bound == 0 {
        return Ok(a);
    }
    a[1] = 1;
    let spf = arith::smallest_prime_factors(bound);
    for p in arith::primes_up_to(bound as u64) {
        let [_, c1, c2] = local(p)?;
        let (mut prev, mut cur) = (0i128, 1i128);
        let mut q = p as usize;
        loop {
            let next = -c1 * cur - c2 * prev;
            a[q] = next;
            prev = cur;
            cur = next;
            match q.checked_mul(p as usize) {
                Some(nq) if nq <= bound => q = nq,
                _ => break,
            }
        }
    }
    for n in 2..=bound {
        let p = spf[n] as usize;
        let mut m = n;
        let mut pk = 1;
        while m % p == 0 {
            m /= p;
            pk *= p;
        }
        if m > 1 {
            a[n] = a[pk] * a[m];
        }
    }
    Ok(a)
}

/// `a_m = sum over ideals of norm m of chi(a)`.
pub fn hecke_qexpansion(chi: &HeckeCharacter, bound: usize) -> Result<CoefficientTable> {
    let field = chi.field;
    let mut sums = vec![field.from_int(0); bound + 1];
    let mut prime_values: HashMap<QuadInt, QuadInt> = HashMap::new();
    for (gen, norm) in field.ideals_by_norm(bound as u64) {
        let mut v = field.one();
        for (ideal, e) in gen.factor() {
            let pv = *prime_values
                .entry(ideal.generator)
                .or_insert_with(|| chi.value_at_prime(&ideal));
            v = v * pv.pow(e);
            if v.is_zero() {
                break;
            }
        }
        sums[norm as usize] = sums[norm as usize] + v;
    }
    let mut coefficients = vec![0i128; bound + 1];
    for (n, s) in sums.iter().enumerate().skip(1) {
        if s.b != 0 {
            return Err(Error::Consistency(format!("coefficient a_{n} = {s} is not rational")));
        }
        coefficients[n] = s.a;
    }
    Ok(CoefficientTable { weight: chi.infinity_type, level: chi.level(), coefficients, origin: Origin::IdealSum })
}

/// Where prime traces come from on the point-count path.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ApSource {
    Naive,
    Cm,
}

fn trace_of(curve: &CurveSpec, p: u64, source: ApSource) -> Result<i128> {
    Ok(match source {
        ApSource::Naive => cm_curves::count_points_naive(curve, p)?,
        ApSource::Cm => cm_curves::ap_via_cm(curve, p)?,
    } as i128)
}

/// The element `alpha` of norm `p` and trace `a` among the associates of the
/// primes above a split `p`.
fn frobenius_root(curve: &CurveSpec, p: u64, a: i128) -> Result<QuadInt> {
    let field = curve.family.field();
    let (pi, pibar) = match field.factor_prime(p)? {
        PrimeDecomposition::Split(x, y) => (x.generator, y.generator),
        _ => return Err(Error::InvalidArgument(format!("{p} does not split"))),
    };
    pi.associates()
        .into_iter()
        .chain(pibar.associates())
        .find(|x| x.trace() == a)
        .ok_or_else(|| Error::Consistency(format!("no element of norm {p} has trace {a}")))
}

/// Prime trace of `chi_1^(n-1) chi_T` at a good split prime, from the traces
/// of `E(1)` and `E(T)` alone.
fn twisted_power_trace(base: &CurveSpec, a1: i128, a_t: i128, p: u64, n: u32) -> Result<i128> {
    let alpha = frobenius_root(base, p, a1)?;
    // chi_T(p) is the associate of alpha with trace a_T
    let beta = alpha
        .associates()
        .into_iter()
        .find(|x| x.trace() == a_t)
        .ok_or_else(|| Error::Consistency(format!("twisted trace {a_t} at {p} is not an associate trace")))?;
    Ok((beta * alpha.pow(n - 1)).trace())
}

/// Character of the `n`-fold with the given twists.
pub fn nfold_character(family: Family, n: u32, twists: &[(i64, u32)]) -> Result<HeckeCharacter> {
    let twisted = CurveSpec::from_twists(family, twists)?;
    hecke::nfold_character(family, &twisted.twist_class(), n)
}

/// Point-count path for `L(s, chi_1^(n-1) chi_T)`, `T = prod D_i^k_i`.
pub fn nfold_table(
    family: Family,
    n: u32,
    twists: &[(i64, u32)],
    bound: usize,
    source: ApSource,
) -> Result<CoefficientTable> {
    if n == 0 || n % 2 == 0 {
        return Err(Error::EvenDimension(n));
    }
    let base = CurveSpec::new(family, 1)?;
    let twisted = CurveSpec::from_twists(family, twists)?;
    let chi = hecke::nfold_character(family, &twisted.twist_class(), n)?;
    let untwisted = twisted.twist_class().is_trivial();
    let field = family.field();
    let coefficients = extend(bound, |p| {
        if !(base.has_good_reduction(p) && twisted.has_good_reduction(p)) {
            return euler_factor(&chi, p);
        }
        let pw = (p as i128).pow(n);
        if field.splitting(p) == Splitting::Inert {
            return Ok([1, 0, pw]);
        }
        let b = if n == 1 {
            trace_of(&twisted, p, source)?
        } else {
            let a1 = trace_of(&base, p, source)?;
            if untwisted {
                power_trace(a1, p, n)
            } else {
                twisted_power_trace(&base, a1, trace_of(&twisted, p, source)?, p, n)?
            }
        };
        Ok([1, -b, pw])
    })?;
    Ok(CoefficientTable { weight: n, level: chi.level(), coefficients, origin: Origin::PointCount })
}

/// L-series coefficients of a single curve.
pub fn curve_coefficients(curve: &CurveSpec, bound: usize) -> Result<CoefficientTable> {
    let t = curve.normalized_t;
    nfold_table(curve.family, 1, &[(t, 1)], bound, ApSource::Cm)
}

/// Weight-3 threefold table for twists `[(D_1,k_1),(D_2,k_2),(D_3,k_3)]`.
pub fn threefold_coefficients(family: Family, twists: &[(i64, u32)], bound: usize) -> Result<CoefficientTable> {
    nfold_coefficients(family, 3, twists, bound)
}

pub fn nfold_coefficients(family: Family, n: u32, twists: &[(i64, u32)], bound: usize) -> Result<CoefficientTable> {
    nfold_table(family, n, twists, bound, ApSource::Cm)
}

/// A Dirichlet character given by its value table on residues.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DirichletCharacter {
    pub modulus: u64,
    pub values: Vec<i64>,
}

impl DirichletCharacter {
    pub fn trivial() -> Self {
        DirichletCharacter { modulus: 1, values: vec![1] }
    }

    /// The quadratic character `n -> (d / n)`.
    pub fn kronecker(d: i64) -> Self {
        let modulus = if d.rem_euclid(4) == 1 { d.unsigned_abs() } else { 4 * d.unsigned_abs() };
        let values = (0..modulus).map(|n| arith::kronecker(d as i128, n) as i64).collect();
        DirichletCharacter { modulus, values }
    }

    pub fn value(&self, n: u64) -> i64 {
        self.values[(n % self.modulus) as usize]
    }
}

/// `a_n -> psi(n) a_n`, with level multiplied by the square of the modulus.
pub fn twist_series(table: &CoefficientTable, psi: &DirichletCharacter) -> CoefficientTable {
    let coefficients = table
        .coefficients
        .iter()
        .enumerate()
        .map(|(n, &a)| if n == 0 { 0 } else { a * psi.value(n as u64) as i128 })
        .collect();
    CoefficientTable {
        weight: table.weight,
        level: table.level * psi.modulus * psi.modulus,
        coefficients,
        origin: Origin::Twisted,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad_fields::hecke::hecke_character_of;

    #[test]
    fn traces() {
        assert_eq!(cube_trace(-2, 5), 22);
        assert_eq!(cube_trace(0, 7), 0);
        assert_eq!(cube_trace(4, 7), -20);
        assert_eq!(power_trace(-2, 5, 1), -2);
        assert_eq!(power_trace(-2, 5, 3), 22);
        assert_eq!(power_trace(-2, 5, 5), -82);
    }

    #[test]
    fn gaussian_tables() {
        let chi = hecke_character_of(&CurveSpec::new(Family::Four, 1).unwrap()).unwrap();
        let q = hecke_qexpansion(&chi, 50).unwrap();
        assert_eq!(q.get(1), 1);
        assert_eq!(q.get(5), -2);
        assert_eq!(q.get(49), -7);
        let q3 = hecke_qexpansion(&chi.power(3).unwrap(), 5).unwrap();
        assert_eq!(q3.get(5), 22);
        let t = threefold_coefficients(Family::Four, &[(1, 1), (1, 1), (1, 1)], 5).unwrap();
        assert_eq!(t.get(5), 22);
        let t5 = nfold_coefficients(Family::Four, 5, &[(1, 1)], 5).unwrap();
        assert_eq!(t5.get(5), -82);
        assert!(nfold_coefficients(Family::Four, 4, &[(1, 1)], 5).is_err());
    }

    #[test]
    fn euler_factors() {
        let chi3 = hecke_character_of(&CurveSpec::new(Family::Four, 1).unwrap()).unwrap().power(3).unwrap();
        assert_eq!(euler_factor(&chi3, 5).unwrap(), [1, -22, 125]);
        assert_eq!(euler_factor(&chi3, 7).unwrap(), [1, 0, 343]);
        let f2 = euler_factor(&chi3, 2).unwrap();
        assert_eq!(f2[2], 0);
    }

    #[test]
    fn extension_is_multiplicative() {
        let t = nfold_coefficients(Family::Three, 3, &[(2, 1), (1, 1), (1, 1)], 600).unwrap();
        for m in 1..25usize {
            for n in 1..25usize {
                if arith::gcd_u64(m as u64, n as u64) == 1 {
                    assert_eq!(t.get(m * n), t.get(m) * t.get(n));
                }
            }
        }
    }

    #[test]
    fn twisting_twice_restores() {
        let t = curve_coefficients(&CurveSpec::new(Family::Four, 1).unwrap(), 300).unwrap();
        let psi = DirichletCharacter::kronecker(-3);
        let back = twist_series(&twist_series(&t, &psi), &psi);
        for (n, a) in t.iter() {
            if n % 3 != 0 {
                assert_eq!(back.get(n), a);
            }
        }
        assert_eq!(twist_series(&t, &DirichletCharacter::trivial()).coefficients, t.coefficients);
    }
}
