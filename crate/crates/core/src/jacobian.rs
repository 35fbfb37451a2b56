//! Period lattices of the CM curves, the transcendental scales of the
//! intermediate Jacobians, the Q-model and the Yui-conjecture verdicts.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::analytic::special::{agm, gamma_real};
use crate::arith;
use crate::cm_curves::{CurveSpec, Family};
use crate::orbifold_hodge::{self, GroupAction};
use crate::{Error, Result};

const PI: f64 = std::f64::consts::PI;

/// `Gamma(1/4)^2 / (2 sqrt(2 pi))` for family 4 and
/// `Gamma(1/3)^3 / (2^(4/3) sqrt(3) pi)` for families 3 and 6.
pub fn transcendental_scale(family: Family) -> Result<f64> {
    match family {
        Family::Four => Ok(gamma_real(0.25).powi(2) / (2.0 * (2.0 * PI).sqrt())),
        Family::Three | Family::Six => Ok(gamma_real(1.0 / 3.0).powi(3) / (2f64.powf(4.0 / 3.0) * 3f64.sqrt() * PI)),
        Family::Seven => Err(Error::InvalidArgument("no transcendental scale for family 7".into())),
    }
}

/// A lattice `omega1 Z + omega2 Z` with reduced basis (`tau = omega2 /
/// omega1` in the standard fundamental domain).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeriodLattice {
    pub omega1: Complex64,
    pub omega2: Complex64,
    pub tau: Complex64,
    /// `|omega1|`, the homothety factor to `<1, tau>`.
    pub scale: f64,
    pub j_invariant: Complex64,
}

/// `(E_4(tau), E_6(tau))`.
fn eisenstein(tau: Complex64) -> (Complex64, Complex64) {
    let q = (Complex64::new(0.0, 2.0 * PI) * tau).exp();
    let (mut e4, mut e6) = (Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0));
    let mut qn = q;
    for n in 1..200u64 {
        let (mut s3, mut s5) = (0.0, 0.0);
        for d in 1..=n {
            if n % d == 0 {
                s3 += (d as f64).powi(3);
                s5 += (d as f64).powi(5);
            }
        }
        e4 += 240.0 * s3 * qn;
        e6 -= 504.0 * s5 * qn;
        if qn.norm() * (n as f64).powi(6) < 1e-18 {
            break;
        }
        qn *= q;
    }
    (e4, e6)
}

/// `(g2, g3)` of the lattice `omega1 <1, tau>`.
pub fn lattice_invariants(omega1: Complex64, tau: Complex64) -> (Complex64, Complex64) {
    let (e4, e6) = eisenstein(tau);
    let g2 = 4.0 * PI.powi(4) / 3.0 * e4 / omega1.powi(4);
    let g3 = 8.0 * PI.powi(6) / 27.0 * e6 / omega1.powi(6);
    (g2, g3)
}

/// Coefficients `(a, b)` of `y^2 = x^3 + a x + b` with `g2 = -4a`,
/// `g3 = -4b` for the lattice `omega1 <1, tau>`.
pub fn weierstrass_model(omega1: Complex64, tau: Complex64) -> (Complex64, Complex64) {
    let (g2, g3) = lattice_invariants(omega1, tau);
    (-g2 / 4.0, -g3 / 4.0)
}

/// `j(tau) = 1728 E4^3 / (E4^3 - E6^2)`.
pub fn j_invariant(tau: Complex64) -> Complex64 {
    let (e4, e6) = eisenstein(tau);
    1728.0 * e4.powi(3) / (e4.powi(3) - e6.powi(2))
}

/// Reduces `(omega1, omega2)` so that `tau` lies in the fundamental domain.
fn reduce_basis(mut w1: Complex64, mut w2: Complex64) -> (Complex64, Complex64) {
    if (w2 / w1).im < 0.0 {
        w2 = -w2;
    }
    for _ in 0..1000 {
        let tau = w2 / w1;
        let shift = tau.re.round();
        w2 -= shift * w1;
        let tau = w2 / w1;
        if tau.norm_sqr() < 1.0 - 1e-12 {
            let old = w1;
            w1 = w2;
            w2 = -old;
        } else {
            break;
        }
    }
    if (w2 / w1).re < -0.5 + 1e-12 {
        w2 += w1;
    }
    (w1, w2)
}

/// Period lattice of `dx / (2y)` on the curve, i.e. the lattice with
/// `g2 = -4a`, `g3 = -4b` for `y^2 = x^3 + a x + b`.
pub fn numeric_periods(curve: &CurveSpec) -> Result<PeriodLattice> {
    let t = curve.normalized_t as f64;
    let (a, b, roots): (f64, f64, Vec<Complex64>) = match curve.family {
        Family::Four => {
            let r = Complex64::new(t, 0.0).sqrt();
            (-t, 0.0, vec![r, Complex64::new(0.0, 0.0), -r])
        }
        Family::Three | Family::Six => {
            let c = Complex64::new(t, 0.0).powf(1.0 / 3.0);
            let z = Complex64::from_polar(1.0, 2.0 * PI / 3.0);
            (0.0, -t, vec![c, c * z, c * z * z])
        }
        Family::Seven => return Err(Error::InvalidArgument("periods are only computed for families 3, 4, 6".into())),
    };
    let (g2, g3) = (Complex64::new(-4.0 * a, 0.0), Complex64::new(-4.0 * b, 0.0));
    let perms = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    let mut best: Option<(f64, Complex64, Complex64)> = None;
    for p in perms {
        let (e1, e2, e3) = (roots[p[0]], roots[p[1]], roots[p[2]]);
        for s in 0..4 {
            let r13 = (e1 - e3).sqrt() * if s & 1 == 0 { 1.0 } else { -1.0 };
            let r12 = (e1 - e2).sqrt();
            let r23 = (e2 - e3).sqrt() * if s & 2 == 0 { 1.0 } else { -1.0 };
            let (Ok(m1), Ok(m2)) = (agm(r13, r12), agm(r13, r23)) else { continue };
            let w1 = PI / m1;
            let w2 = Complex64::new(0.0, PI) / m2;
            if !(w2 / w1).im.is_finite() || (w2 / w1).im.abs() < 1e-6 {
                continue;
            }
            let (w1, w2) = reduce_basis(w1, w2);
            let (h2, h3) = lattice_invariants(w1, w2 / w1);
            let err = (h2 - g2).norm() + (h3 - g3).norm();
            if best.is_none_or(|(e, _, _)| err < e) {
                best = Some((err, w1, w2));
            }
        }
    }
    let (err, w1, w2) = best.ok_or_else(|| Error::NonConvergence("no AGM branch produced a lattice".into()))?;
    if err > 1e-8 * (1.0 + g2.norm() + g3.norm()) {
        return Err(Error::NonConvergence(format!("period lattice reproduces (g2, g3) only to {err:e}")));
    }
    let tau = w2 / w1;
    Ok(PeriodLattice { omega1: w1, omega2: w2, tau, scale: w1.norm(), j_invariant: j_invariant(tau) })
}

/// The curve `E(prod D_i^k_i)`.
pub fn q_model(family: Family, twists: &[(i64, u32)]) -> Result<CurveSpec> {
    CurveSpec::from_twists(family, twists)
}

/// Order of the total twist in `Q^x / (Q^x)^4` (family 4) or
/// `Q^x / (Q^x)^6` (families 3, 6).
pub fn character_order(family: Family, twists: &[(i64, u32)]) -> Result<u32> {
    if family == Family::Seven {
        return Err(Error::InvalidArgument("family 7 carries no twist".into()));
    }
    Ok(q_model(family, twists)?.twist_class().order())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct YuiVerdict {
    pub holds: bool,
    pub character_order: u32,
    pub total_twist: i64,
    pub dimension: u32,
    pub q_model: CurveSpec,
    pub reason: String,
}

/// The elementary form of the criterion: `|T|` a square (family 4) or `T`
/// a cube (families 3, 6), on the normalized twist.
fn power_criterion(family: Family, t: i64) -> bool {
    match family {
        Family::Four => arith::exact_root(t.unsigned_abs(), 2).is_some(),
        _ => arith::exact_root(t.unsigned_abs(), 3).is_some(),
    }
}

/// The standard rigid action `<(1, j-1, 0), (1, 0, j-1)>`.
pub fn standard_action(family: Family) -> Result<GroupAction> {
    let j = match family {
        Family::Three | Family::Four | Family::Six => family.order(),
        Family::Seven => return Err(Error::InvalidArgument("family 7 has no diagonal action".into())),
    };
    GroupAction::new(j, &[[1, j - 1, 0], [1, 0, j - 1]])
}

/// Verdict for the threefold on the standard action.
pub fn yui_verdict(family: Family, twists: &[(i64, u32)]) -> Result<YuiVerdict> {
    yui_verdict_for(&standard_action(family)?, family, twists)
}

/// Verdict for a given action, which must be rigid.
pub fn yui_verdict_for(action: &GroupAction, family: Family, twists: &[(i64, u32)]) -> Result<YuiVerdict> {
    let hodge = orbifold_hodge::chen_ruan_hodge(action)?;
    if hodge.h21 != 0 {
        return Err(Error::NotRigid(hodge.h21 as u32));
    }
    let v = verdict(family, 3, twists)?;
    if v.holds != power_criterion(family, v.total_twist) {
        return Err(Error::Consistency(format!(
            "order rule and power criterion disagree for total twist {}",
            v.total_twist
        )));
    }
    Ok(v)
}

fn verdict(family: Family, n: u32, twists: &[(i64, u32)]) -> Result<YuiVerdict> {
    let order = character_order(family, twists)?;
    let model = q_model(family, twists)?;
    let holds = (n - 1) % order == 0;
    let reason = if holds {
        format!("twist character of order {order} divides n-1 = {}, so chi_T^{n} = chi_1^{} chi_T", n - 1, n - 1)
    } else {
        format!("twist character of order {order} does not divide n-1 = {}", n - 1)
    };
    Ok(YuiVerdict { holds, character_order: order, total_twist: model.normalized_t, dimension: n, q_model: model, reason })
}

/// Verdict for the `n`-fold, `n` odd and at least 3.
pub fn nfold_verdict(family: Family, n: u32, twists: &[(i64, u32)]) -> Result<YuiVerdict> {
    if n % 2 == 0 {
        return Err(Error::EvenDimension(n));
    }
    if n < 3 {
        return Err(Error::InvalidArgument(format!("dimension {n} is below 3")));
    }
    verdict(family, n, twists)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntermediateJacobian {
    /// `(prod of curve scales) <1, tau>`.
    pub naive: PeriodLattice,
    pub q_model: CurveSpec,
    pub q_model_lattice: PeriodLattice,
    /// `naive.scale / q_model_lattice.scale`.
    pub homothety: f64,
}

pub fn intermediate_jacobian(family: Family, twists: &[(i64, u32)]) -> Result<IntermediateJacobian> {
    let action = standard_action(family)?;
    let h21 = orbifold_hodge::chen_ruan_hodge(&action)?.h21;
    if h21 != 0 {
        return Err(Error::NotRigid(h21 as u32));
    }
    let mut padded: Vec<(i64, u32)> = twists.to_vec();
    padded.resize(3, (1, 1));
    let mut scale = 1.0;
    let mut tau = Complex64::new(0.0, 1.0);
    for &(d, k) in &padded {
        let lattice = numeric_periods(&CurveSpec::from_twists(family, &[(d, k)])?)?;
        scale *= lattice.scale;
        tau = lattice.tau;
    }
    let naive = PeriodLattice {
        omega1: Complex64::new(scale, 0.0),
        omega2: tau * scale,
        tau,
        scale,
        j_invariant: j_invariant(tau),
    };
    let model = q_model(family, twists)?;
    let q_model_lattice = numeric_periods(&model)?;
    Ok(IntermediateJacobian { homothety: scale / q_model_lattice.scale, naive, q_model: model, q_model_lattice })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scales() {
        assert!((transcendental_scale(Family::Four).unwrap() - 2.622_057_554_292_119_8).abs() < 1e-12);
        assert!((transcendental_scale(Family::Six).unwrap() - 1.402_182_105_325_454_9).abs() < 1e-12);
    }

    #[test]
    fn e4_lattice() {
        let l = numeric_periods(&CurveSpec::new(Family::Four, 1).unwrap()).unwrap();
        assert!((l.scale - transcendental_scale(Family::Four).unwrap()).abs() < 1e-9);
        assert!((l.tau - Complex64::new(0.0, 1.0)).norm() < 1e-9);
        assert!((l.j_invariant.re - 1728.0).abs() < 1e-9);
        let l16 = numeric_periods(&CurveSpec::new(Family::Four, 16).unwrap()).unwrap();
        assert!((l16.scale - l.scale).abs() < 1e-12);
    }

    #[test]
    fn model_from_lattice() {
        let lam = transcendental_scale(Family::Four).unwrap();
        let (a, b) = weierstrass_model(Complex64::new(lam, 0.0), Complex64::new(0.0, 1.0));
        assert!((a + 1.0).norm() < 1e-9 && b.norm() < 1e-9);
        let mu = transcendental_scale(Family::Six).unwrap();
        let rho = Complex64::from_polar(1.0, PI / 3.0);
        let (a, b) = weierstrass_model(Complex64::new(3f64.sqrt() * mu, 0.0), rho);
        assert!(a.norm() < 1e-9 && (b + 1.0).norm() < 1e-9, "{a} {b}");
    }

    #[test]
    fn e3_scale_is_sqrt3_mu() {
        let l = numeric_periods(&CurveSpec::new(Family::Three, 1).unwrap()).unwrap();
        let mu = transcendental_scale(Family::Three).unwrap();
        assert!((l.scale / mu - 3f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn e3_lattice() {
        let l = numeric_periods(&CurveSpec::new(Family::Three, 1).unwrap()).unwrap();
        assert!(l.j_invariant.norm() < 1e-9);
        assert!((l.tau - Complex64::from_polar(1.0, 2.0 * PI / 3.0)).norm() < 1e-9 || (l.tau - Complex64::from_polar(1.0, PI / 3.0)).norm() < 1e-9);
    }

    #[test]
    fn twisted_lattices_exist() {
        for (f, t) in [(Family::Four, -1), (Family::Four, 2), (Family::Four, -3), (Family::Three, -1), (Family::Six, 2), (Family::Three, -12)] {
            let l = numeric_periods(&CurveSpec::new(f, t).unwrap()).unwrap();
            let j = if f == Family::Four { 1728.0 } else { 0.0 };
            assert!((l.j_invariant - j).norm() < 1e-7, "{f:?} {t}: {}", l.j_invariant);
        }
    }

    #[test]
    fn orders_and_verdicts() {
        assert_eq!(character_order(Family::Four, &[(1, 1)]).unwrap(), 1);
        assert_eq!(character_order(Family::Four, &[(2, 1)]).unwrap(), 4);
        assert_eq!(character_order(Family::Six, &[(4, 1)]).unwrap(), 3);
        assert!(yui_verdict(Family::Four, &[(3, 2), (1, 1), (1, 1)]).unwrap().holds);
        assert!(!yui_verdict(Family::Four, &[(2, 1)]).unwrap().holds);
        assert!(yui_verdict(Family::Six, &[(2, 1), (2, 1), (2, 1)]).unwrap().holds);
        assert!(nfold_verdict(Family::Four, 5, &[(2, 1)]).unwrap().holds);
        assert!(nfold_verdict(Family::Six, 7, &[(5, 1), (2, 1)]).unwrap().holds);
        assert!(!nfold_verdict(Family::Six, 3, &[(4, 1)]).unwrap().holds);
        assert!(nfold_verdict(Family::Six, 4, &[(4, 1)]).is_err());
        let o6 = GroupAction::new(6, &[[4, 1, 1]]).unwrap();
        assert!(matches!(yui_verdict_for(&o6, Family::Six, &[(1, 1)]), Err(Error::NotRigid(5))));
    }

    #[test]
    fn jacobian_of_x4() {
        let j = intermediate_jacobian(Family::Four, &[(1, 1), (1, 1), (1, 1)]).unwrap();
        let lam = transcendental_scale(Family::Four).unwrap();
        assert!((j.naive.scale - lam.powi(3)).abs() < 1e-9);
        assert_eq!(j.q_model, CurveSpec::new(Family::Four, 1).unwrap());
        let j = intermediate_jacobian(Family::Four, &[(5, 2), (5, 2), (5, 2)]).unwrap();
        assert_eq!(j.q_model.normalized_t, 25);
    }
}
