//! Periodic cycles, multipliers and exact orbit records.
//!
//! Points of period dividing `n` are the zeros of the fixed-point form
//! `X G1 - Y G0` of `G = F^n`, a binary form of degree `d^n + 1`. The form is
//! never expanded: the root finder evaluates it by iterating `F` on a vector
//! together with its derivative, renormalizing as it goes.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::config::Caps;
use crate::error::{Error, Result};
use crate::heights::{decide_preperiodic_with, PreperiodicityVerdict};
use crate::proj::{uses_inverse_chart, NumericLift, ProjectivePoint, RationalMapLift};
use crate::roots::{aberth, initial_guesses, DEFAULT_ROOT_TOL};
use crate::sphere::CPoint;

/// Default chordal tolerance for cycle grouping and residual checks.
pub const DEFAULT_CYCLE_TOL: f64 = 1e-9;

/// Roots closer than this are treated as a multiple (parabolic) root.
const COLLISION_DISTANCE: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cycle {
    /// `points[i + 1] = f(points[i])`, cyclically.
    pub points: Vec<CPoint>,
    pub period: usize,
    pub multiplier: Complex64,
    /// Largest chordal distance between `f(points[i])` and `points[i + 1]`.
    pub residual: f64,
    /// Set when a cycle point coincides numerically with another root, as
    /// happens for multipliers that are roots of unity.
    pub parabolic: bool,
}

impl Cycle {
    pub fn is_repelling(&self, tol: f64) -> bool {
        self.multiplier.norm() > 1.0 + tol
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitRecord {
    pub tail: usize,
    pub period: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum OrbitOutcome {
    Preperiodic(OrbitRecord),
    /// Infinite orbit, with a certified positive lower bound on the canonical height.
    Divergent {
        lower_bound: f64,
        iterations: usize,
    },
}

pub fn orbit_record(f: &RationalMapLift, p: &ProjectivePoint) -> Result<OrbitOutcome> {
    orbit_record_with(f, p, &Caps::default())
}

pub fn orbit_record_with(
    f: &RationalMapLift,
    p: &ProjectivePoint,
    caps: &Caps,
) -> Result<OrbitOutcome> {
    Ok(match decide_preperiodic_with(f, p, caps)? {
        PreperiodicityVerdict::Preperiodic { tail, period } => {
            OrbitOutcome::Preperiodic(OrbitRecord { tail, period })
        }
        PreperiodicityVerdict::NotPreperiodic {
            lower_bound,
            iterations,
        } => OrbitOutcome::Divergent {
            lower_bound,
            iterations,
        },
    })
}

/// Chain-rule product of `f'` along `points`, each step taken between the
/// standard charts of consecutive points.
pub fn multiplier(f: &RationalMapLift, points: &[CPoint], tol: f64) -> Result<Complex64> {
    if points.is_empty() {
        return Err(Error::InvalidInput("empty cycle".into()));
    }
    let residual = cycle_residual(f.numeric(), points);
    if !(residual <= tol) {
        return Err(Error::NotACycle { residual });
    }
    Ok(chain_multiplier(f.numeric(), points))
}

fn chain_multiplier(lift: &NumericLift, points: &[CPoint]) -> Complex64 {
    let k = points.len();
    let mut m = Complex64::new(1.0, 0.0);
    for i in 0..k {
        let src = uses_inverse_chart(&points[i]);
        let dst = uses_inverse_chart(&points[(i + 1) % k]);
        m *= lift.chart_derivative(&points[i], src, dst);
    }
    m
}

fn cycle_residual(lift: &NumericLift, points: &[CPoint]) -> f64 {
    let k = points.len();
    (0..k)
        .map(|i| lift.apply(&points[i]).distance(&points[(i + 1) % k]))
        .fold(0.0, f64::max)
}

/// All cycles of exact period dividing `n`, using the default caps.
pub fn periodic_points(f: &RationalMapLift, n: usize, tol: f64) -> Result<Vec<Cycle>> {
    periodic_points_with(f, n, tol, &Caps::default())
}

pub fn periodic_points_with(
    f: &RationalMapLift,
    n: usize,
    tol: f64,
    caps: &Caps,
) -> Result<Vec<Cycle>> {
    if n == 0 {
        return Err(Error::InvalidInput("period must be at least 1".into()));
    }
    let d = f.degree() as u64;
    if d < 2 {
        return Err(Error::InvalidInput(
            "periodic points need degree >= 2".into(),
        ));
    }
    let count = (d as u128)
        .checked_pow(n as u32)
        .filter(|&c| c <= caps.periodic_degree as u128)
        .ok_or_else(|| {
            Error::CapExceeded(format!(
                "{}^{} exceeds the periodic-degree cap {}",
                d, n, caps.periodic_degree
            ))
        })? as usize;

    let a = chart_center(f, n, caps)?;
    let lift = f.numeric();
    let quotient = |w: Complex64| fixed_form_quotient(lift, n, a, w);
    let mut ws = aberth(quotient, initial_guesses(count + 1, 1.0), DEFAULT_ROOT_TOL)?;
    for w in ws.iter_mut() {
        // one Newton step squares the error of a converged simple root
        let step = fixed_form_quotient(lift, n, a, *w);
        if step.re.is_finite() && step.im.is_finite() && step.norm() < 1e-6 * w.norm().max(1.0) {
            *w -= step;
        }
    }
    let roots: Vec<CPoint> = ws
        .iter()
        .map(|w| {
            if *w == Complex64::zero() {
                CPoint::Infinity
            } else {
                CPoint::Finite(Complex64::new(a, 0.0) + w.inv())
            }
        })
        .collect();
    group_cycles(lift, &roots, n, tol)
}

pub fn repelling_cycles(f: &RationalMapLift, n: usize, tol: f64) -> Result<Vec<Cycle>> {
    Ok(periodic_points(f, n, tol)?
        .into_iter()
        .filter(|c| c.is_repelling(tol))
        .collect())
}

/// A rational `a` with `f^n(a) != a`, so that `w = 1/(z - a)` puts every
/// root of the fixed-point form at a finite nonzero place except `inf -> 0`.
fn chart_center(f: &RationalMapLift, n: usize, caps: &Caps) -> Result<f64> {
    const CANDIDATES: [(i64, i64); 8] = [
        (1, 3),
        (-2, 7),
        (3, 5),
        (-5, 11),
        (7, 13),
        (2, 9),
        (-4, 13),
        (5, 17),
    ];
    for (p, q) in CANDIDATES {
        let start = ProjectivePoint::new(p, q)?;
        let mut x = start.clone();
        for _ in 0..n {
            x = f.evaluate(&x);
            caps.check_bits(x.bits())?;
        }
        if x != start {
            return Ok(p as f64 / q as f64);
        }
    }
    Err(Error::RootFindingFailure(
        "no admissible chart centre".into(),
    ))
}

/// `p(w) / p'(w)` for `p(w) = Phi(a w + 1, w)`, `Phi = X G1 - Y G0`, `G = F^n`.
fn fixed_form_quotient(lift: &NumericLift, n: usize, a: f64, w: Complex64) -> Complex64 {
    let x = Complex64::new(a, 0.0) * w + 1.0;
    let y = w;
    let (dx, dy) = (Complex64::new(a, 0.0), Complex64::new(1.0, 0.0));
    // G and dG only need to be right up to a common factor, which cancels
    let s = x.norm().max(y.norm());
    let (mut v0, mut v1, mut d0, mut d1) = (x / s, y / s, dx / s, dy / s);
    for _ in 0..n {
        let ((u0, u1), j) = lift.eval_jacobian(v0, v1);
        let e0 = j[0][0] * d0 + j[0][1] * d1;
        let e1 = j[1][0] * d0 + j[1][1] * d1;
        let s = u0.norm().max(u1.norm());
        if s == 0.0 || !s.is_finite() {
            return Complex64::new(f64::NAN, f64::NAN);
        }
        v0 = u0 / s;
        v1 = u1 / s;
        d0 = e0 / s;
        d1 = e1 / s;
    }
    let p = x * v1 - y * v0;
    let dp = dx * v1 + x * d1 - dy * v0 - y * d0;
    p / dp
}

fn order_key(p: &CPoint) -> (u8, f64, f64) {
    match p {
        CPoint::Finite(z) => (0, z.re, z.im),
        CPoint::Infinity => (1, 0.0, 0.0),
    }
}

fn cmp_points(a: &CPoint, b: &CPoint) -> Ordering {
    let (ka, kb) = (order_key(a), order_key(b));
    ka.0.cmp(&kb.0)
        .then(ka.1.total_cmp(&kb.1))
        .then(ka.2.total_cmp(&kb.2))
}

/// Matches each root to the root nearest its image, then reads off cycles.
fn group_cycles(lift: &NumericLift, roots: &[CPoint], n: usize, tol: f64) -> Result<Vec<Cycle>> {
    let m = roots.len();
    let images: Vec<CPoint> = roots.iter().map(|r| lift.apply(r)).collect();
    let spheres: Vec<[f64; 3]> = roots.iter().map(|r| r.to_sphere()).collect();
    let dist = |a: &[f64; 3], b: &[f64; 3]| {
        ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
    };

    let mut collided = vec![false; m];
    for i in 0..m {
        for j in i + 1..m {
            if dist(&spheres[i], &spheres[j]) < COLLISION_DISTANCE {
                collided[i] = true;
                collided[j] = true;
            }
        }
    }

    // greedy injective matching over the few nearest candidates of each image
    const CANDIDATES: usize = 4;
    let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(m * CANDIDATES);
    for (i, img) in images.iter().enumerate() {
        let s = img.to_sphere();
        let mut near: Vec<(f64, usize)> = spheres
            .iter()
            .enumerate()
            .map(|(j, t)| (dist(&s, t), j))
            .collect();
        let k = CANDIDATES.min(m);
        near.select_nth_unstable_by(k - 1, |a, b| a.0.total_cmp(&b.0));
        pairs.extend(near[..k].iter().map(|&(dd, j)| (dd, i, j)));
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut next = vec![usize::MAX; m];
    let mut taken = vec![false; m];
    for (_, i, j) in pairs {
        if next[i] == usize::MAX && !taken[j] {
            next[i] = j;
            taken[j] = true;
        }
    }
    if next.contains(&usize::MAX) {
        return Err(Error::RootFindingFailure(
            "could not match roots into cycles".into(),
        ));
    }

    let mut visited = vec![false; m];
    let mut cycles = Vec::new();
    for start in 0..m {
        if visited[start] {
            continue;
        }
        let mut idx = vec![start];
        visited[start] = true;
        let mut j = next[start];
        while j != start {
            if visited[j] || idx.len() > n {
                return Err(Error::RootFindingFailure(
                    "root matching is not a permutation".into(),
                ));
            }
            visited[j] = true;
            idx.push(j);
            j = next[j];
        }
        let period = idx.len();
        if n % period != 0 {
            return Err(Error::RootFindingFailure(format!(
                "found a cycle of length {period}, which does not divide {n}"
            )));
        }
        let parabolic = idx.iter().any(|&i| collided[i]);
        let mut points: Vec<CPoint> = idx.iter().map(|&i| roots[i]).collect();
        let first = (0..period)
            .min_by(|&a, &b| cmp_points(&points[a], &points[b]))
            .unwrap_or(0);
        points.rotate_left(first);
        let residual = cycle_residual(lift, &points);
        if !parabolic && !(residual <= tol) {
            return Err(Error::NotACycle { residual });
        }
        cycles.push(Cycle {
            multiplier: chain_multiplier(lift, &points),
            points,
            period,
            residual,
            parabolic,
        });
    }
    cycles.sort_by(|a, b| {
        a.period
            .cmp(&b.period)
            .then(cmp_points(&a.points[0], &b.points[0]))
    });
    Ok(cycles)
}

/// Exact rational periodic points among small-height candidates; used to
/// cross-check the numeric solver.
pub fn rational_cycle_points(f: &RationalMapLift, n: usize, bound: i64) -> Vec<ProjectivePoint> {
    let mut out = Vec::new();
    let mut cands = vec![ProjectivePoint::infinity()];
    for q in 1..=bound {
        for p in -bound..=bound {
            if num_integer::gcd(p, q) == 1 {
                cands.push(ProjectivePoint::new(BigInt::from(p), BigInt::from(q)).unwrap());
            }
        }
    }
    for c in cands {
        let mut x = c.clone();
        for _ in 0..n {
            x = f.evaluate(&x);
        }
        if x == c {
            out.push(c);
        }
    }
    out
}
