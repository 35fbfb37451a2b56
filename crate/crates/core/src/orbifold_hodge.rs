//! Hodge numbers of crepant resolutions of `E^3 / G` for finite abelian
//! groups `G` of diagonal automorphisms, computed as orbifold Hodge numbers:
//!
//! ```text
//! h^{p,q} = sum over g in G of dim H^{p-age(g), q-age(g)}(Fix g)^G
//! ```
//!
//! `Fix g` is a product of copies of `E` and of finite torsion sets, so its
//! invariant cohomology is an average of traces over `G`.

use std::collections::{BTreeMap, BTreeSet};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::quad_fields::{QuadField, QuadInt};
use crate::{Error, Result};

pub type Element = [u32; 3];

/// A subgroup of `(Z/j)^3` acting by `(z_1,z_2,z_3) -> (zeta^a_1 z_1, ...)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupAction {
    pub order: u32,
    pub generators: Vec<Element>,
    pub elements: Vec<Element>,
}

impl GroupAction {
    pub fn new(order: u32, generators: &[Element]) -> Result<GroupAction> {
        if ![3, 4, 6].contains(&order) {
            return Err(Error::InvalidArgument(format!("automorphism order must be 3, 4 or 6, got {order}")));
        }
        let generators: Vec<Element> = generators.iter().map(|g| g.map(|a| a % order)).collect();
        for g in &generators {
            if g.iter().sum::<u32>() % order != 0 {
                return Err(Error::Inadmissible(format!(
                    "generator {g:?} does not preserve the holomorphic 3-form (sum not 0 mod {order})"
                )));
            }
        }
        let elements = closure(order, &generators);
        Ok(GroupAction { order, generators, elements })
    }

    /// Every coordinate is moved by some element.
    pub fn is_admissible(&self) -> bool {
        (0..3).all(|i| self.elements.iter().any(|g| g[i] != 0))
    }

    fn check_admissible(&self) -> Result<()> {
        match (0..3).find(|&i| self.elements.iter().all(|g| g[i] == 0)) {
            Some(i) => Err(Error::Inadmissible(format!(
                "coordinate {} is fixed by every element, so the quotient is not Calabi-Yau",
                i + 1
            ))),
            None => Ok(()),
        }
    }
}

fn closure(j: u32, generators: &[Element]) -> Vec<Element> {
    let mut set = BTreeSet::from([[0u32; 3]]);
    let mut frontier = vec![[0u32; 3]];
    while let Some(x) = frontier.pop() {
        for g in generators {
            let y = [(x[0] + g[0]) % j, (x[1] + g[1]) % j, (x[2] + g[2]) % j];
            if set.insert(y) {
                frontier.push(y);
            }
        }
    }
    set.into_iter().collect()
}

pub fn enumerate_group(action: &GroupAction) -> Vec<Element> {
    action.elements.clone()
}

fn field_of(j: u32) -> QuadField {
    if j == 4 {
        QuadField::Gauss
    } else {
        QuadField::Eisenstein
    }
}

/// `zeta_j^a` in the CM order.
fn zeta_pow(j: u32, a: u32) -> QuadInt {
    let f = field_of(j);
    let zeta = match j {
        4 => f.omega(),
        3 => f.omega(),
        _ => f.one() + f.omega(),
    };
    zeta.pow(a % j)
}

/// Number of fixed points of `zeta_j^a` on `E`, i.e. `N(zeta^a - 1)`.
pub fn fixed_points_count(j: u32, a: u32) -> Result<u64> {
    if a % j == 0 {
        return Err(Error::InvalidArgument("the identity has no isolated fixed points".into()));
    }
    Ok((zeta_pow(j, a) - field_of(j).one()).norm() as u64)
}

/// Torsion points are `(u + v omega) / TORSION` with `u, v` mod `TORSION`;
/// every fixed set of a nontrivial automorphism lies in `E[12]`.
const TORSION: i128 = 12;

type Point = (i128, i128);

fn act(j: u32, a: u32, p: Point) -> Point {
    let x = QuadInt::new(field_of(j), p.0, p.1) * zeta_pow(j, a);
    (x.a.rem_euclid(TORSION), x.b.rem_euclid(TORSION))
}

fn fixed_set(j: u32, a: u32) -> Vec<Point> {
    let mut out = Vec::new();
    for u in 0..TORSION {
        for v in 0..TORSION {
            if act(j, a, (u, v)) == (u, v) {
                out.push((u, v));
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Locus {
    FullCurve,
    Points(u64),
}

/// The `(p,q)` diamond of a threefold (or of a fixed locus, padded).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Diamond(pub [[u64; 4]; 4]);

impl Diamond {
    pub fn get(&self, p: usize, q: usize) -> u64 {
        self.0[p][q]
    }

    pub fn h11(&self) -> u64 {
        self.0[1][1]
    }

    pub fn h21(&self) -> u64 {
        self.0[2][1]
    }

    pub fn is_symmetric(&self) -> bool {
        (0..4).all(|p| (0..4).all(|q| self.0[p][q] == self.0[q][p] && self.0[p][q] == self.0[3 - p][3 - q]))
    }
}

/// Contribution of one group element.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sector {
    pub element: Element,
    pub age: u32,
    pub loci: [Locus; 3],
    pub dimension: u32,
    /// Connected components of `Fix g`.
    pub components: u64,
    /// Orbits of the group on those components.
    pub component_orbits: u64,
    /// Invariant cohomology of `Fix g`, before the age shift.
    pub invariants: Diamond,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HodgePair {
    pub h11: u64,
    pub h21: u64,
    pub diamond: Diamond,
    pub sectors: Vec<Sector>,
}

/// Polynomial in `x` (holomorphic degree) and `y` (antiholomorphic).
type Poly = [[Complex64; 4]; 4];

fn poly_mul(a: &Poly, b: &Poly) -> Poly {
    let mut out = [[Complex64::new(0.0, 0.0); 4]; 4];
    for p in 0..4 {
        for q in 0..4 {
            if a[p][q] == Complex64::new(0.0, 0.0) {
                continue;
            }
            for r in 0..4 - p {
                for s in 0..4 - q {
                    out[p + r][q + s] += a[p][q] * b[r][s];
                }
            }
        }
    }
    out
}

fn sector(action: &GroupAction, g: &Element) -> Sector {
    let j = action.order;
    let fixed: Vec<Option<Vec<Point>>> =
        g.iter().map(|&a| if a == 0 { None } else { Some(fixed_set(j, a)) }).collect();
    let zero = Complex64::new(0.0, 0.0);
    let mut total = [[zero; 4]; 4];
    let mut orbit_sum = 0u64;
    for h in &action.elements {
        let mut poly = [[zero; 4]; 4];
        poly[0][0] = Complex64::new(1.0, 0.0);
        let mut point_trace = 1u64;
        for i in 0..3 {
            let mut factor = [[zero; 4]; 4];
            match &fixed[i] {
                None => {
                    let angle = 2.0 * std::f64::consts::PI * h[i] as f64 / j as f64;
                    factor[0][0] = Complex64::new(1.0, 0.0);
                    factor[1][0] = Complex64::from_polar(1.0, angle);
                    factor[0][1] = Complex64::from_polar(1.0, -angle);
                    factor[1][1] = Complex64::new(1.0, 0.0);
                }
                Some(points) => {
                    let c = points.iter().filter(|&&p| act(j, h[i], p) == p).count() as u64;
                    point_trace *= c;
                    factor[0][0] = Complex64::new(c as f64, 0.0);
                }
            }
            poly = poly_mul(&poly, &factor);
        }
        orbit_sum += point_trace;
        for p in 0..4 {
            for q in 0..4 {
                total[p][q] += poly[p][q];
            }
        }
    }
    let n = action.elements.len() as f64;
    let mut inv = Diamond::default();
    for p in 0..4 {
        for q in 0..4 {
            let v = total[p][q] / n;
            debug_assert!(v.im.abs() < 1e-9 && (v.re - v.re.round()).abs() < 1e-9);
            inv.0[p][q] = v.re.round() as u64;
        }
    }
    let loci = [0, 1, 2].map(|i| match &fixed[i] {
        None => Locus::FullCurve,
        Some(points) => Locus::Points(points.len() as u64),
    });
    let components = loci
        .iter()
        .map(|l| match l {
            Locus::FullCurve => 1,
            Locus::Points(n) => *n,
        })
        .product();
    Sector {
        element: *g,
        age: g.iter().sum::<u32>() / j,
        loci,
        dimension: g.iter().filter(|&&a| a == 0).count() as u32,
        components,
        component_orbits: orbit_sum / action.elements.len() as u64,
        invariants: inv,
    }
}

/// Invariant part of the cohomology of `E^3`.
pub fn untwisted_hodge(action: &GroupAction) -> Diamond {
    sector(action, &[0, 0, 0]).invariants
}

/// All nontrivial sectors with their invariant contributions.
pub fn twisted_sectors(action: &GroupAction) -> Vec<Sector> {
    action.elements.iter().filter(|g| **g != [0, 0, 0]).map(|g| sector(action, g)).collect()
}

pub fn chen_ruan_hodge(action: &GroupAction) -> Result<HodgePair> {
    action.check_admissible()?;
    let sectors: Vec<Sector> = action.elements.iter().map(|g| sector(action, g)).collect();
    let mut diamond = Diamond::default();
    for s in &sectors {
        let a = s.age as usize;
        for p in 0..4 - a {
            for q in 0..4 - a {
                diamond.0[p + a][q + a] += s.invariants.0[p][q];
            }
        }
    }
    Ok(HodgePair { h11: diamond.h11(), h21: diamond.h21(), diamond, sectors })
}

pub fn is_rigid(action: &GroupAction) -> Result<bool> {
    Ok(chen_ruan_hodge(action)?.h21 == 0)
}

/// One isomorphism class of admissible actions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActionClass {
    pub action: GroupAction,
    pub h11: u64,
    pub h21: u64,
    /// Number of subgroups in the class.
    pub members: usize,
}

fn canonical_form(j: u32, elements: &[Element]) -> Vec<Element> {
    const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    let units: Vec<u32> = (1..j).filter(|&u| crate::arith::gcd_u64(u as u64, j as u64) == 1).collect();
    let mut best: Option<Vec<Element>> = None;
    for perm in PERMS {
        for &u in &units {
            let mut image: Vec<Element> =
                elements.iter().map(|g| [0, 1, 2].map(|i| g[perm[i]] * u % j)).collect();
            image.sort_unstable();
            if best.as_ref().is_none_or(|b| image < *b) {
                best = Some(image);
            }
        }
    }
    best.unwrap_or_default()
}

/// All admissible subgroups of the sum-zero group up to coordinate
/// permutations and automorphisms of `Z/j`, with their Hodge pairs.
pub fn classify_subgroups(j: u32) -> Result<Vec<ActionClass>> {
    GroupAction::new(j, &[])?;
    let sum_zero: Vec<Element> =
        (0..j).flat_map(|a| (0..j).map(move |b| [a, b, (2 * j - a - b) % j])).collect();
    let mut subgroups: BTreeSet<Vec<Element>> = BTreeSet::new();
    for x in &sum_zero {
        for y in &sum_zero {
            subgroups.insert(closure(j, &[*x, *y]));
        }
    }
    let mut classes: BTreeMap<Vec<Element>, ActionClass> = BTreeMap::new();
    for elements in subgroups {
        let key = canonical_form(j, &elements);
        if let Some(c) = classes.get_mut(&key) {
            c.members += 1;
            continue;
        }
        let action = GroupAction { order: j, generators: minimal_generators(j, &elements), elements };
        if !action.is_admissible() {
            continue;
        }
        let hp = chen_ruan_hodge(&action)?;
        classes.insert(key, ActionClass { action, h11: hp.h11, h21: hp.h21, members: 1 });
    }
    let mut out: Vec<ActionClass> = classes.into_values().collect();
    out.sort_by(|a, b| (b.h11, b.h21, b.action.elements.len()).cmp(&(a.h11, a.h21, a.action.elements.len())));
    Ok(out)
}

fn minimal_generators(j: u32, elements: &[Element]) -> Vec<Element> {
    for x in elements {
        if closure(j, &[*x]).len() == elements.len() {
            return vec![*x];
        }
    }
    for x in elements {
        for y in elements {
            if closure(j, &[*x, *y]).len() == elements.len() {
                return vec![*x, *y];
            }
        }
    }
    elements.to_vec()
}
