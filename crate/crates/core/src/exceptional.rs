//! Exceptional maps (power maps, Chebyshev polynomials, Lattès maps) and
//! their recognition through the orbifold signature of the postcritical set.
//!
//! A map is exceptional exactly when it is postcritically finite with a
//! parabolic orbifold. The orbifold weights `nu` form the least function with
//! `deg_y(f) * nu(y) | nu(f(y))` on the portrait, with `inf` absorbing.
//!
//! Rational critical points are followed exactly and their fate is decided by
//! the height machinery. Irrational ones are followed numerically; a numeric
//! collision is accepted only when it closes onto a superattracting or a
//! repelling cycle, since a PCF map has no other cycles in its postcritical
//! set. This keeps convergence to an attracting cycle from passing as a
//! collision.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::config::Caps;
use crate::error::{Error, Result};
use crate::heights::{decide_preperiodic_with, PreperiodicityVerdict};
use crate::poly::BinaryForm;
use crate::proj::{ProjectivePoint, RationalMapLift};
use crate::sphere::CPoint;

/// Default bound on critical orbit length.
pub const DEFAULT_MAX_ORBIT: usize = 64;

/// Default chordal tolerance for numeric orbit collisions.
pub const DEFAULT_COLLISION_TOL: f64 = 1e-8;

/// Distances in `[tol, AMBIGUITY_FACTOR * tol)` are neither equal nor distinct.
const AMBIGUITY_FACTOR: f64 = 100.0;

/// Finite weights beyond this are treated as infinite.
const WEIGHT_CAP: u64 = 1 << 40;

/// The Chebyshev polynomial `T_d` as an ascending coefficient vector.
pub fn chebyshev_coeffs(d: usize) -> Vec<BigInt> {
    let mut prev: Vec<BigInt> = vec![BigInt::from(2)];
    let mut cur: Vec<BigInt> = vec![BigInt::zero(), BigInt::one()];
    if d == 0 {
        return prev;
    }
    for _ in 1..d {
        let mut next = vec![BigInt::zero(); cur.len() + 1];
        for (k, c) in cur.iter().enumerate() {
            next[k + 1] += c;
        }
        for (k, c) in prev.iter().enumerate() {
            next[k] -= c;
        }
        prev = std::mem::replace(&mut cur, next);
    }
    cur
}

/// Lift of `T_d`, the polynomial with `T_d(z + 1/z) = z^d + 1/z^d`.
pub fn chebyshev(d: usize) -> Result<RationalMapLift> {
    if d == 0 {
        return Err(Error::InvalidInput(
            "Chebyshev degree must be at least 1".into(),
        ));
    }
    let c = chebyshev_coeffs(d);
    RationalMapLift::new(
        BinaryForm::new(c),
        BinaryForm::monomial(BigInt::one(), 0, d),
    )
}

/// Checks `T_d(z + 1/z) = z^d + z^-d` as a Laurent identity, after
/// multiplying through by `z^d`: `sum_k t_k (z^2 + 1)^k z^(d-k) = z^(2d) + 1`.
pub fn chebyshev_identity_holds(d: usize) -> bool {
    let t = chebyshev_coeffs(d);
    let mut lhs = vec![BigInt::zero(); 2 * d + 1];
    // (z^2 + 1)^k, ascending in z
    let mut power = vec![BigInt::one()];
    for (k, tk) in t.iter().enumerate() {
        if k > d {
            break;
        }
        for (j, c) in power.iter().enumerate() {
            lhs[j + d - k] += tk * c;
        }
        let mut next = vec![BigInt::zero(); power.len() + 2];
        for (j, c) in power.iter().enumerate() {
            next[j] += c;
            next[j + 2] += c;
        }
        power = next;
    }
    let mut rhs = vec![BigInt::zero(); 2 * d + 1];
    rhs[0] += 1;
    rhs[2 * d] += 1;
    t.len() == d + 1 && lhs == rhs
}

/// Lift of `z^d`; negative `d` gives `z^d = 1 / z^|d|`.
pub fn power_map(d: i64) -> Result<RationalMapLift> {
    if d.unsigned_abs() < 2 {
        return Err(Error::InvalidInput(format!(
            "power map needs |d| >= 2, got {d}"
        )));
    }
    let n = d.unsigned_abs() as usize;
    let xd = BinaryForm::monomial(BigInt::one(), n, n);
    let yd = BinaryForm::monomial(BigInt::one(), 0, n);
    if d > 0 {
        RationalMapLift::new(xd, yd)
    } else {
        RationalMapLift::new(yd, xd)
    }
}

/// The x-coordinate of doubling on `y^2 = x^3 + a x + b`:
/// `(x^4 - 2a x^2 - 8b x + a^2) / (4(x^3 + a x + b))`.
pub fn lattes_doubling(a: &BigRational, b: &BigRational) -> Result<RationalMapLift> {
    let four = BigRational::from_integer(BigInt::from(4));
    let disc = &four * a * a * a + BigRational::from_integer(BigInt::from(27)) * b * b;
    if disc.is_zero() {
        return Err(Error::SingularCurve);
    }
    let num = vec![
        a * a,
        -BigRational::from_integer(BigInt::from(8)) * b,
        -BigRational::from_integer(BigInt::from(2)) * a,
        BigRational::zero(),
        BigRational::one(),
    ];
    let den = vec![
        &four * b,
        &four * a,
        BigRational::zero(),
        four.clone(),
        BigRational::zero(),
    ];
    RationalMapLift::from_affine(&num, &den)
}

/// An orbifold weight.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Weight {
    Finite(u64),
    Infinite,
}

impl Weight {
    fn times(self, k: u64) -> Weight {
        match self {
            Weight::Finite(n) => match n.checked_mul(k) {
                Some(m) if m <= WEIGHT_CAP => Weight::Finite(m),
                _ => Weight::Infinite,
            },
            Weight::Infinite => Weight::Infinite,
        }
    }

    fn lcm(self, other: Weight) -> Weight {
        match (self, other) {
            (Weight::Finite(a), Weight::Finite(b)) => Weight::Finite(1).times(a.lcm(&b)),
            _ => Weight::Infinite,
        }
    }

    pub fn divides(self, other: Weight) -> bool {
        match (self, other) {
            (_, Weight::Infinite) => true,
            (Weight::Infinite, Weight::Finite(_)) => false,
            (Weight::Finite(a), Weight::Finite(b)) => b % a == 0,
        }
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Weight::Finite(n) => write!(f, "{n}"),
            Weight::Infinite => write!(f, "inf"),
        }
    }
}

impl Serialize for Weight {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Weight::Finite(n) => s.serialize_u64(*n),
            Weight::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Weight {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            N(u64),
            S(String),
        }
        match Raw::deserialize(d)? {
            Raw::N(n) => Ok(Weight::Finite(n)),
            Raw::S(s) if s == "inf" || s == "∞" => Ok(Weight::Infinite),
            Raw::S(s) => Err(serde::de::Error::custom(format!("bad weight {s:?}"))),
        }
    }
}

/// A sorted multiset of weights greater than one.
pub type Signature = Vec<Weight>;

pub fn format_signature(sig: &[Weight]) -> String {
    let parts: Vec<String> = sig.iter().map(|w| w.to_string()).collect();
    format!("({})", parts.join(","))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PortraitNode {
    pub point: CPoint,
    pub exact: Option<ProjectivePoint>,
    /// Local degree of `f` at this point.
    pub local_degree: usize,
    /// Index of the image node.
    pub image: usize,
    pub weight: Weight,
    pub critical: bool,
    pub postcritical: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RamificationPortrait {
    pub nodes: Vec<PortraitNode>,
    /// False when some orbit collision was accepted numerically.
    pub exact: bool,
}

impl RamificationPortrait {
    pub fn postcritical(&self) -> impl Iterator<Item = &PortraitNode> {
        self.nodes.iter().filter(|n| n.postcritical)
    }

    pub fn signature(&self) -> Signature {
        let mut sig: Vec<Weight> = self
            .nodes
            .iter()
            .map(|n| n.weight)
            .filter(|w| *w != Weight::Finite(1))
            .collect();
        sig.sort();
        sig
    }

    /// `deg_y(f) nu(y) | nu(f(y))` at every node.
    pub fn weights_consistent(&self) -> bool {
        self.nodes.iter().all(|n| {
            n.weight
                .times(n.local_degree as u64)
                .divides(self.nodes[n.image].weight)
        })
    }
}

/// Evidence that some critical orbit is infinite.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NonPcfWitness {
    pub critical_point: CPoint,
    /// Certified lower bound on the canonical height, for rational critical points.
    pub height_lower_bound: Option<f64>,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum PortraitOutcome {
    Pcf(RamificationPortrait),
    NotPcf(NonPcfWitness),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    PowerConjugate,
    ChebyshevConjugate,
    Lattes,
    NonExceptional,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Verdict::PowerConjugate => "PowerConjugate",
            Verdict::ChebyshevConjugate => "ChebyshevConjugate",
            Verdict::Lattes => "Lattes",
            Verdict::NonExceptional => "NonExceptional",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub verdict: Verdict,
    pub pcf: bool,
    pub signature: Option<Signature>,
    pub exact: bool,
    pub witness: Option<NonPcfWitness>,
}

const LATTES_SIGNATURES: [&[u64]; 4] = [&[2, 2, 2, 2], &[2, 4, 4], &[2, 3, 6], &[3, 3, 3]];

pub fn verdict_for_signature(sig: &[Weight]) -> Verdict {
    use Weight::{Finite, Infinite};
    match sig {
        [Infinite, Infinite] => Verdict::PowerConjugate,
        [Finite(2), Finite(2), Infinite] => Verdict::ChebyshevConjugate,
        _ => {
            let finite: Option<Vec<u64>> = sig
                .iter()
                .map(|w| match w {
                    Finite(n) => Some(*n),
                    Infinite => None,
                })
                .collect();
            match finite {
                Some(v) if LATTES_SIGNATURES.contains(&v.as_slice()) => Verdict::Lattes,
                _ => Verdict::NonExceptional,
            }
        }
    }
}

struct Builder<'a> {
    f: &'a RationalMapLift,
    tol: f64,
    nodes: Vec<PortraitNode>,
    exact_index: HashMap<ProjectivePoint, usize>,
    exact: bool,
}

const UNSET: usize = usize::MAX;

impl<'a> Builder<'a> {
    fn push(&mut self, point: CPoint, exact: Option<ProjectivePoint>, postcritical: bool) -> usize {
        let idx = self.nodes.len();
        if let Some(p) = &exact {
            self.exact_index.insert(p.clone(), idx);
        }
        self.nodes.push(PortraitNode {
            point,
            exact,
            local_degree: 1,
            image: UNSET,
            weight: Weight::Finite(1),
            critical: false,
            postcritical,
        });
        idx
    }

    /// Nearest existing node within `tol`; errors inside the ambiguity band.
    fn find_numeric(&self, p: &CPoint) -> Result<Option<usize>> {
        let mut best: Option<(f64, usize)> = None;
        for (i, n) in self.nodes.iter().enumerate() {
            let dist = n.point.distance(p);
            if best.is_none_or(|(b, _)| dist < b) {
                best = Some((dist, i));
            }
        }
        match best {
            Some((dist, i)) if dist < self.tol => Ok(Some(i)),
            Some((dist, _)) if dist < AMBIGUITY_FACTOR * self.tol => {
                Err(Error::AmbiguousCollision { distance: dist })
            }
            _ => Ok(None),
        }
    }

    fn follow_exact(
        &mut self,
        start: usize,
        p: &ProjectivePoint,
        caps: &Caps,
        max_orbit: usize,
    ) -> Result<Option<NonPcfWitness>> {
        let verdict = decide_preperiodic_with(self.f, p, caps)?;
        if let PreperiodicityVerdict::NotPreperiodic { lower_bound, .. } = verdict {
            return Ok(Some(NonPcfWitness {
                critical_point: p.to_cpoint(),
                height_lower_bound: Some(lower_bound),
                reason: format!("critical point {p} has canonical height >= {lower_bound:.6}"),
            }));
        }
        let mut cur_idx = start;
        let mut cur = p.clone();
        for _ in 0..=max_orbit {
            if self.nodes[cur_idx].image != UNSET {
                return Ok(None);
            }
            let next = self.f.evaluate(&cur);
            let next_idx = match self.exact_index.get(&next) {
                Some(&i) => i,
                None => self.push(next.to_cpoint(), Some(next.clone()), true),
            };
            self.nodes[next_idx].postcritical = true;
            self.nodes[cur_idx].image = next_idx;
            cur_idx = next_idx;
            cur = next;
        }
        Ok(Some(NonPcfWitness {
            critical_point: p.to_cpoint(),
            height_lower_bound: None,
            reason: format!("orbit of {p} is preperiodic but longer than {max_orbit}"),
        }))
    }

    fn follow_numeric(&mut self, start: usize, max_orbit: usize) -> Result<Option<NonPcfWitness>> {
        let lift = self.f.numeric();
        let origin = self.nodes[start].point;
        let mut cur_idx = start;
        let mut path = vec![start];
        for _ in 0..max_orbit {
            if self.nodes[cur_idx].image != UNSET {
                return Ok(None);
            }
            let next = lift.apply(&self.nodes[cur_idx].point);
            if let Some(reason) = self.attracted(&path, &next) {
                return Ok(Some(NonPcfWitness {
                    critical_point: origin,
                    height_lower_bound: None,
                    reason,
                }));
            }
            match self.find_numeric(&next)? {
                Some(i) => {
                    self.nodes[cur_idx].image = i;
                    self.nodes[i].postcritical = true;
                    if let Some(reason) = self.reject_loop(i) {
                        return Ok(Some(NonPcfWitness {
                            critical_point: origin,
                            height_lower_bound: None,
                            reason,
                        }));
                    }
                    self.exact = false;
                    return Ok(None);
                }
                None => {
                    let i = self.push(next, None, true);
                    self.nodes[cur_idx].image = i;
                    cur_idx = i;
                    path.push(i);
                }
            }
        }
        Ok(Some(NonPcfWitness {
            critical_point: origin,
            height_lower_bound: None,
            reason: format!("no orbit collision within {max_orbit} steps (numeric)"),
        }))
    }

    /// Detects an orbit contracting onto a non-superattracting cycle, which
    /// no PCF map has: `next` is close to `path[p]`, closer than `path[p]`
    /// was to `path[p - k]`, and the would-be cycle `path[p..]` attracts.
    fn attracted(&self, path: &[usize], next: &CPoint) -> Option<String> {
        const NEAR: f64 = 1e-3;
        for p in (0..path.len()).rev() {
            let k = path.len() - p;
            if p < k {
                break;
            }
            let here = self.nodes[path[p]].point;
            let gap = next.distance(&here);
            if gap >= NEAR || gap >= here.distance(&self.nodes[path[p - k]].point) {
                continue;
            }
            if path[p..].iter().any(|&j| self.nodes[j].critical) {
                continue;
            }
            let points: Vec<CPoint> = path[p..].iter().map(|&j| self.nodes[j].point).collect();
            let m = crate::orbits::multiplier(self.f, &points, f64::INFINITY).ok()?;
            if m.norm() < 1.0 - 1e-6 {
                return Some(format!(
                    "critical orbit converges to an attracting cycle of period {k} with |multiplier| = {:.3e}",
                    m.norm()
                ));
            }
        }
        None
    }

    /// The loop through node `i`, if it closed; `None` for a tail into a known loop.
    fn loop_through(&self, i: usize) -> Option<Vec<usize>> {
        let mut seq = vec![i];
        let mut j = self.nodes[i].image;
        while j != UNSET && seq.len() <= self.nodes.len() {
            if j == i {
                return Some(seq);
            }
            seq.push(j);
            j = self.nodes[j].image;
        }
        None
    }

    fn reject_loop(&self, i: usize) -> Option<String> {
        let cycle = self.loop_through(i)?;
        if cycle.iter().any(|&k| self.nodes[k].critical) {
            return None;
        }
        let points: Vec<CPoint> = cycle.iter().map(|&k| self.nodes[k].point).collect();
        let m = crate::orbits::multiplier(self.f, &points, f64::INFINITY).ok()?;
        if m.norm() > 1.0 + 1e-6 {
            None
        } else {
            Some(format!(
                "critical orbit accumulates on a cycle of period {} with |multiplier| = {:.3e}",
                points.len(),
                m.norm()
            ))
        }
    }

    fn solve_weights(&mut self) {
        loop {
            let mut changed = false;
            for k in 0..self.nodes.len() {
                let n = &self.nodes[k];
                let img = n.image;
                let need = n.weight.times(n.local_degree as u64);
                let new = self.nodes[img].weight.lcm(need);
                if new != self.nodes[img].weight {
                    self.nodes[img].weight = new;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
    }
}

pub fn ramification_portrait(
    f: &RationalMapLift,
    max_orbit: usize,
    tol: f64,
) -> Result<PortraitOutcome> {
    ramification_portrait_with(f, max_orbit, tol, &Caps::default())
}

pub fn ramification_portrait_with(
    f: &RationalMapLift,
    max_orbit: usize,
    tol: f64,
    caps: &Caps,
) -> Result<PortraitOutcome> {
    if f.degree() < 2 {
        return Err(Error::InvalidInput("portraits need degree >= 2".into()));
    }
    let mut crit = f.critical_points(crate::proj::CRITICAL_TOL)?;
    // exact points first, so numeric orbits can land on exact nodes
    crit.sort_by_key(|c| c.exact.is_none());
    let mut b = Builder {
        f,
        tol,
        nodes: Vec::new(),
        exact_index: HashMap::new(),
        exact: true,
    };
    let mut starts = Vec::new();
    for c in &crit {
        let idx = match &c.exact {
            Some(p) => match b.exact_index.get(p) {
                Some(&i) => i,
                None => b.push(c.point, Some(p.clone()), false),
            },
            None => match b.find_numeric(&c.point)? {
                Some(i) => i,
                None => b.push(c.point, None, false),
            },
        };
        b.nodes[idx].critical = true;
        b.nodes[idx].local_degree = c.multiplicity + 1;
        starts.push((idx, c.exact.clone()));
    }
    for (idx, exact) in starts {
        let witness = match exact {
            Some(p) => b.follow_exact(idx, &p, caps, max_orbit)?,
            None => b.follow_numeric(idx, max_orbit)?,
        };
        if let Some(w) = witness {
            return Ok(PortraitOutcome::NotPcf(w));
        }
    }
    b.solve_weights();
    Ok(PortraitOutcome::Pcf(RamificationPortrait {
        nodes: b.nodes,
        exact: b.exact,
    }))
}

pub fn classify(f: &RationalMapLift, max_orbit: usize, tol: f64) -> Result<Classification> {
    classify_with(f, max_orbit, tol, &Caps::default())
}

pub fn classify_with(
    f: &RationalMapLift,
    max_orbit: usize,
    tol: f64,
    caps: &Caps,
) -> Result<Classification> {
    let outcome = match ramification_portrait_with(f, max_orbit, tol, caps) {
        Ok(o) => o,
        Err(Error::AmbiguousCollision { distance }) => {
            return Err(Error::Inconclusive(format!(
                "critical orbit points at chordal distance {distance:.3e} are neither equal nor distinct at tol {tol:.1e}"
            )))
        }
        Err(e) => return Err(e),
    };
    Ok(match outcome {
        PortraitOutcome::NotPcf(w) => Classification {
            verdict: Verdict::NonExceptional,
            pcf: false,
            signature: None,
            exact: w.height_lower_bound.is_some(),
            witness: Some(w),
        },
        PortraitOutcome::Pcf(p) => {
            let sig = p.signature();
            Classification {
                verdict: verdict_for_signature(&sig),
                pcf: true,
                signature: Some(sig),
                exact: p.exact,
                witness: None,
            }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use Weight::{Finite, Infinite};

    fn quad(c: i64) -> RationalMapLift {
        RationalMapLift::from_i64(&[c, 0, 1], &[1, 0, 0]).unwrap()
    }

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    fn sig_of(f: &RationalMapLift) -> Signature {
        match ramification_portrait(f, DEFAULT_MAX_ORBIT, DEFAULT_COLLISION_TOL).unwrap() {
            PortraitOutcome::Pcf(p) => {
                assert!(p.weights_consistent());
                p.signature()
            }
            PortraitOutcome::NotPcf(w) => panic!("unexpected witness {w:?}"),
        }
    }

    #[test]
    fn chebyshev_examples() {
        assert_eq!(chebyshev(2).unwrap(), quad(-2));
        assert_eq!(
            chebyshev(3).unwrap(),
            RationalMapLift::from_i64(&[0, -3, 0, 1], &[1, 0, 0, 0]).unwrap()
        );
        for d in 1..=12 {
            assert!(chebyshev_identity_holds(d), "d = {d}");
            assert_eq!(chebyshev(d).unwrap().degree(), d);
        }
    }

    #[test]
    fn power_map_examples() {
        assert_eq!(power_map(2).unwrap(), quad(0));
        let inv = power_map(-2).unwrap();
        assert_eq!(inv.f0(), &BinaryForm::from_i64(&[1, 0, 0]));
        assert_eq!(inv.f1(), &BinaryForm::from_i64(&[0, 0, 1]));
        assert_eq!(power_map(5).unwrap().degree(), 5);
        assert!(power_map(1).is_err());
    }

    #[test]
    fn lattes_examples() {
        let f = lattes_doubling(&q(0), &q(1)).unwrap();
        assert_eq!(
            f,
            RationalMapLift::from_i64(&[0, -8, 0, 0, 1], &[4, 0, 0, 4, 0]).unwrap()
        );
        let two = ProjectivePoint::new(2, 1).unwrap();
        assert_eq!(f.evaluate(&two), ProjectivePoint::new(0, 1).unwrap());
        assert!(matches!(
            lattes_doubling(&q(0), &q(0)),
            Err(Error::SingularCurve)
        ));
        assert!(matches!(
            lattes_doubling(&q(-3), &q(2)),
            Err(Error::SingularCurve)
        ));
    }

    #[test]
    fn portrait_examples() {
        assert_eq!(sig_of(&quad(0)), vec![Infinite, Infinite]);
        assert_eq!(sig_of(&quad(-2)), vec![Finite(2), Finite(2), Infinite]);
        assert_eq!(sig_of(&quad(-1)), vec![Infinite, Infinite, Infinite]);
        let PortraitOutcome::Pcf(p) = ramification_portrait(&quad(-2), 64, 1e-8).unwrap() else {
            panic!()
        };
        let post: Vec<_> = p.postcritical().filter_map(|n| n.exact.clone()).collect();
        assert_eq!(post.len(), 3);
        assert!(p.exact);
    }

    #[test]
    fn classify_examples() {
        let c =
            |f: &RationalMapLift| classify(f, DEFAULT_MAX_ORBIT, DEFAULT_COLLISION_TOL).unwrap();
        assert_eq!(c(&quad(0)).verdict, Verdict::PowerConjugate);
        assert_eq!(c(&quad(-2)).verdict, Verdict::ChebyshevConjugate);
        let l = c(&lattes_doubling(&q(0), &q(1)).unwrap());
        assert_eq!(l.verdict, Verdict::Lattes);
        assert_eq!(l.signature.unwrap(), vec![Finite(2); 4]);
        assert_eq!(c(&quad(-1)).verdict, Verdict::NonExceptional);
        let free = c(&quad(1));
        assert_eq!(free.verdict, Verdict::NonExceptional);
        assert!(!free.pcf && free.witness.unwrap().height_lower_bound.unwrap() > 0.0);
    }

    #[test]
    fn higher_degree_families() {
        let c = |f: &RationalMapLift| {
            classify(f, DEFAULT_MAX_ORBIT, DEFAULT_COLLISION_TOL)
                .unwrap()
                .verdict
        };
        for d in 2..=6 {
            assert_eq!(c(&power_map(d).unwrap()), Verdict::PowerConjugate, "z^{d}");
            assert_eq!(
                c(&power_map(-d).unwrap()),
                Verdict::PowerConjugate,
                "z^-{d}"
            );
            assert_eq!(
                c(&chebyshev(d as usize).unwrap()),
                Verdict::ChebyshevConjugate,
                "T_{d}"
            );
        }
        assert_eq!(c(&lattes_doubling(&q(-1), &q(0)).unwrap()), Verdict::Lattes);
    }

    #[test]
    fn attracting_cycle_is_not_a_collision() {
        // (z^3 - 2z)/10: irrational critical points +-sqrt(2/3) drift into the attracting fixed point 0
        let f = RationalMapLift::from_i64(&[0, -2, 0, 1], &[10, 0, 0, 0]).unwrap();
        let r = classify(&f, 64, 1e-8).unwrap();
        assert_eq!(r.verdict, Verdict::NonExceptional);
        assert!(!r.pcf);
        assert!(r.witness.unwrap().reason.contains("multiplier"));
    }

    #[test]
    fn conjugation_stable() {
        let maps = [
            quad(0),
            quad(-2),
            lattes_doubling(&q(0), &q(1)).unwrap(),
            quad(-1),
        ];
        let expected = [
            Verdict::PowerConjugate,
            Verdict::ChebyshevConjugate,
            Verdict::Lattes,
            Verdict::NonExceptional,
        ];
        let caps = Caps::default();
        for (f, v) in maps.iter().zip(expected) {
            for (a, b, c, d) in [(1, 1, 0, 1), (2, 1, 1, 1), (0, 1, 1, 0), (1, -2, 3, 1)] {
                let m = RationalMapLift::mobius(a, b, c, d).unwrap();
                let g = f.conjugate(&m, &caps).unwrap();
                assert_eq!(
                    classify(&g, 64, 1e-8).unwrap().verdict,
                    v,
                    "{f} by {:?}",
                    (a, b, c, d)
                );
            }
        }
    }

    #[test]
    fn weight_serde() {
        let s = serde_json::to_string(&vec![Finite(2), Infinite]).unwrap();
        assert_eq!(s, r#"[2,"inf"]"#);
        let back: Vec<Weight> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, vec![Finite(2), Infinite]);
        assert_eq!(format_signature(&back), "(2,inf)");
    }
}
