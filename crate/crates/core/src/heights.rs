//! Certified canonical heights over `Q` and the preperiodicity decision.
//!
//! For a lift `F` of degree `d` the Weil height changes by a bounded amount
//! under one application of the map: `|h(f(x)) - d h(x)| <= C` for every
//! `x in P^1(Q)`. The constant comes from two explicit estimates:
//!
//! * upper: `|F_i(z)| <= ||F_i||_1 ||z||^d`, so `log max_i ||F_i||_1` works;
//! * lower: the Bezout cofactors give `|Res| ||z||^(2d-1) <= B ||z||^(d-1) ||F(z)||`,
//!   and the gcd of `F0(z), F1(z)` divides `Res` on coprime `z`, so `log B` works.
//!
//! Telescoping then gives `|h(f^N(x))/d^N - h^(x)| <= C / (d^N (d - 1))`.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{factorize, valuation};
use crate::config::Caps;
use crate::error::{Error, Result};
use crate::poly::log_abs;
use crate::proj::{ProjectivePoint, RationalMapLift};

/// A place of `Q`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Place {
    Archimedean,
    Prime(#[serde(with = "crate::poly::big_string")] BigInt),
}

/// Local contribution of one place to a canonical height.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlaceContribution {
    pub place: Place,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CanonicalHeightResult {
    pub value: f64,
    pub error_radius: f64,
    pub iterations: usize,
    /// The constant `C` with `|h(f(x)) - d h(x)| <= C`.
    pub height_step_bound: f64,
    /// Set when an exact orbit collision proved the point preperiodic.
    pub preperiodic: bool,
    /// Diagnostic split of `value`; entries sum to `value` up to rounding.
    pub places: Vec<PlaceContribution>,
}

impl CanonicalHeightResult {
    pub fn lower(&self) -> f64 {
        self.value - self.error_radius
    }

    pub fn upper(&self) -> f64 {
        self.value + self.error_radius
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lower() <= x && x <= self.upper()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum PreperiodicityVerdict {
    Preperiodic { tail: usize, period: usize },
    NotPreperiodic { lower_bound: f64, iterations: usize },
}

impl PreperiodicityVerdict {
    pub fn is_preperiodic(&self) -> bool {
        matches!(self, PreperiodicityVerdict::Preperiodic { .. })
    }
}

/// `log max(|x|, |y|)` on the coprime representative.
pub fn weil_height(p: &ProjectivePoint) -> f64 {
    let m = if p.x().abs() >= p.y().abs() {
        p.x().abs()
    } else {
        p.y().abs()
    };
    log_abs(&m)
}

/// The two one-sided constants behind [`height_step_bound`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepBounds {
    /// `log max_i ||F_i||_1`: bounds `h(f(x)) - d h(x)` from above.
    pub upper: f64,
    /// `log B` from the Bezout cofactors: bounds `d h(x) - h(f(x))` from above.
    pub lower: f64,
    /// `log |Res(F0, F1)|`.
    pub log_res: f64,
}

impl StepBounds {
    /// Global constant `C` for heights of rational points.
    pub fn global(&self) -> f64 {
        self.upper.max(self.lower).max(0.0)
    }

    /// Constant for `|log ||F(v)|| - d log ||v|||` at a complex vector `v`.
    pub fn archimedean(&self) -> f64 {
        self.upper.max(self.lower - self.log_res).max(0.0)
    }
}

pub fn step_bounds(f: &RationalMapLift) -> Result<StepBounds> {
    let (res, cert) = f.resultant_with_certificate()?;
    let upper = log_abs(&f.f0().l1_norm().max(f.f1().l1_norm()));
    let bx = cert.g0x.l1_norm() + cert.g1x.l1_norm();
    let by = cert.g0y.l1_norm() + cert.g1y.l1_norm();
    let lower = log_abs(&bx.max(by));
    Ok(StepBounds {
        upper,
        lower,
        log_res: log_abs(&res),
    })
}

/// `C >= sup_x |h(f(x)) - d h(x)|` over `P^1(Q)`.
pub fn height_step_bound(f: &RationalMapLift) -> Result<f64> {
    Ok(step_bounds(f)?.global())
}

fn require_degree(f: &RationalMapLift) -> Result<u32> {
    if f.degree() < 2 {
        return Err(Error::InvalidInput(format!(
            "canonical heights need degree >= 2, got {}",
            f.degree()
        )));
    }
    Ok(f.degree() as u32)
}

/// One exact orbit step that only pays for a gcd with the resultant.
struct OrbitStepper<'a> {
    f: &'a RationalMapLift,
    res_abs: BigInt,
    caps: Caps,
}

impl<'a> OrbitStepper<'a> {
    fn new(f: &'a RationalMapLift, caps: Caps) -> Self {
        OrbitStepper {
            f,
            res_abs: f.res().abs(),
            caps,
        }
    }

    /// Returns `f(p)` and the gcd that was divided out.
    fn step(&self, p: &ProjectivePoint) -> Result<(ProjectivePoint, BigInt)> {
        let (a, b) = self.f.evaluate_raw(p);
        self.caps.check_bits(a.bits().max(b.bits()))?;
        let g = if self.res_abs.is_one() {
            BigInt::one()
        } else {
            let ga = (&a % &self.res_abs).gcd(&self.res_abs);
            (&b % &ga).gcd(&ga)
        };
        let (x, y) = if g.is_one() { (a, b) } else { (a / &g, b / &g) };
        let (x, y) = if y.is_negative() || (y.is_zero() && x.is_negative()) {
            (-x, -y)
        } else {
            (x, y)
        };
        // gcd(x, y) = 1 here: any common prime would divide Res and hence g
        Ok((ProjectivePoint::from_coprime(x, y), g))
    }
}

/// Smallest `N` with `C / (d^N (d - 1)) <= target`.
pub fn iterations_for(c: f64, d: u32, target: f64) -> usize {
    if c <= 0.0 {
        return 0;
    }
    let mut n = 0;
    let mut radius = c / (d as f64 - 1.0);
    while radius > target {
        radius /= d as f64;
        n += 1;
    }
    n
}

/// Canonical height to within `target_error`, using the default caps.
pub fn canonical_height(
    f: &RationalMapLift,
    p: &ProjectivePoint,
    target_error: f64,
) -> Result<CanonicalHeightResult> {
    canonical_height_with(f, p, target_error, &Caps::default())
}

pub fn canonical_height_with(
    f: &RationalMapLift,
    p: &ProjectivePoint,
    target_error: f64,
    caps: &Caps,
) -> Result<CanonicalHeightResult> {
    if !(target_error > 0.0) {
        return Err(Error::InvalidInput("target error must be positive".into()));
    }
    let d = require_degree(f)?;
    let c = height_step_bound(f)?;
    canonical_height_iterations(f, p, iterations_for(c, d, target_error), caps)
}

/// `h(f^N(x)) / d^N` with its certified radius, for a fixed `N`.
pub fn canonical_height_iterations(
    f: &RationalMapLift,
    p: &ProjectivePoint,
    iterations: usize,
    caps: &Caps,
) -> Result<CanonicalHeightResult> {
    let d = require_degree(f)? as f64;
    let c = height_step_bound(f)?;
    let stepper = OrbitStepper::new(f, *caps);
    let (primes, _) = factorize(f.res());

    let mut seen: HashMap<ProjectivePoint, usize> = HashMap::new();
    let mut current = p.clone();
    // sum over steps of log(g_k) / d^(k+1), split by prime
    let mut local: Vec<f64> = vec![0.0; primes.len()];
    let mut gcd_total = 0.0;
    let mut scale = 1.0;
    for k in 0..iterations {
        if seen.insert(current.clone(), k).is_some() {
            return Ok(CanonicalHeightResult {
                value: 0.0,
                error_radius: 0.0,
                iterations: k,
                height_step_bound: c,
                preperiodic: true,
                places: vec![],
            });
        }
        let (next, g) = stepper.step(&current)?;
        scale /= d;
        if !g.is_one() {
            gcd_total += log_abs(&g) * scale;
            for (slot, (prime, _)) in local.iter_mut().zip(&primes) {
                let v = valuation(&g, prime);
                if v > 0 {
                    *slot += v as f64 * log_abs(prime) * scale;
                }
            }
        }
        current = next;
    }
    if seen.contains_key(&current) {
        return Ok(CanonicalHeightResult {
            value: 0.0,
            error_radius: 0.0,
            iterations,
            height_step_bound: c,
            preperiodic: true,
            places: vec![],
        });
    }
    let value = weil_height(&current) * scale;
    let error_radius = c * scale / (d - 1.0);
    let mut places = vec![PlaceContribution {
        place: Place::Archimedean,
        value: value + gcd_total,
    }];
    for ((prime, _), v) in primes.into_iter().zip(local) {
        places.push(PlaceContribution {
            place: Place::Prime(prime),
            value: -v,
        });
    }
    Ok(CanonicalHeightResult {
        value,
        error_radius,
        iterations,
        height_step_bound: c,
        preperiodic: false,
        places,
    })
}

/// Default target used by [`canonical_height_functoriality_check`].
pub const FUNCTORIALITY_TARGET: f64 = 1e-4;

/// Checks `|h^(f(x)) - d h^(x)|` against the combined certified radii.
pub fn canonical_height_functoriality_check(
    f: &RationalMapLift,
    p: &ProjectivePoint,
) -> Result<bool> {
    canonical_height_functoriality_check_with(f, p, FUNCTORIALITY_TARGET, &Caps::default())
}

pub fn canonical_height_functoriality_check_with(
    f: &RationalMapLift,
    p: &ProjectivePoint,
    target_error: f64,
    caps: &Caps,
) -> Result<bool> {
    let d = require_degree(f)? as f64;
    let here = canonical_height_with(f, p, target_error, caps)?;
    let there = canonical_height_with(f, &f.evaluate(p), target_error, caps)?;
    // slack for the floating point logs of exact integers
    let slack = 1e-12 * (1.0 + there.value.abs());
    Ok((there.value - d * here.value).abs() <= there.error_radius + d * here.error_radius + slack)
}

/// Local factors `|q|_v` of a nonzero rational, with their exact product.
#[derive(Clone, Debug, PartialEq)]
pub struct ProductFormula {
    /// `(place, log |q|_v)`.
    pub terms: Vec<(Place, f64)>,
    /// `prod_v |q|_v`, computed exactly.
    pub product: BigRational,
}

pub fn product_formula(q: &BigRational) -> Result<ProductFormula> {
    if q.is_zero() {
        return Err(Error::InvalidInput("product formula needs q != 0".into()));
    }
    let num = q.numer().abs();
    let den = q.denom().abs();
    let mut product = BigRational::new(num.clone(), den.clone());
    let mut terms = vec![(Place::Archimedean, log_abs(&num) - log_abs(&den))];
    let (fn_, _) = factorize(&num);
    let (fd, _) = factorize(&den);
    for (p, e) in fn_ {
        // |q|_p = p^(-e)
        product /= BigRational::from_integer(p.pow(e));
        terms.push((Place::Prime(p.clone()), -(e as f64) * log_abs(&p)));
    }
    for (p, e) in fd {
        product *= BigRational::from_integer(p.pow(e));
        terms.push((Place::Prime(p.clone()), e as f64 * log_abs(&p)));
    }
    Ok(ProductFormula { terms, product })
}

/// `sum_v log |q|_v`, evaluated as the log of the exact product: `0` exactly
/// whenever the product formula holds.
pub fn product_formula_check(q: &BigRational) -> Result<f64> {
    let pf = product_formula(q)?;
    if pf.product.is_one() {
        Ok(0.0)
    } else {
        Ok(log_abs(pf.product.numer()) - log_abs(pf.product.denom()))
    }
}

/// Extra orbit steps spent sharpening a certified lower bound.
const REFINE_STEPS: usize = 6;

pub fn decide_preperiodic(
    f: &RationalMapLift,
    p: &ProjectivePoint,
) -> Result<PreperiodicityVerdict> {
    decide_preperiodic_with(f, p, &Caps::default())
}

/// Exact orbit with cycle detection. Points of height above `C/(d-1)` have
/// positive canonical height, and there are finitely many below it, so the
/// loop always ends.
pub fn decide_preperiodic_with(
    f: &RationalMapLift,
    p: &ProjectivePoint,
    caps: &Caps,
) -> Result<PreperiodicityVerdict> {
    let d = require_degree(f)? as f64;
    let threshold = height_step_bound(f)? / (d - 1.0);
    let stepper = OrbitStepper::new(f, *caps);
    let mut seen: HashMap<ProjectivePoint, usize> = HashMap::new();
    let mut current = p.clone();
    let mut n = 0usize;
    loop {
        if let Some(&j) = seen.get(&current) {
            return Ok(PreperiodicityVerdict::Preperiodic {
                tail: j,
                period: n - j,
            });
        }
        let h = weil_height(&current);
        let margin = 1e-9 * (1.0 + h);
        if h - threshold > margin {
            // h^(x) = h^(f^n x) / d^n >= (h(f^n x) - C/(d-1)) / d^n
            let mut best = (h - threshold - margin) / d.powi(n as i32);
            let mut last = n;
            let mut y = current;
            for m in n + 1..=n + REFINE_STEPS {
                match stepper.step(&y) {
                    Ok((next, _)) => {
                        y = next;
                        let hy = weil_height(&y);
                        let bound = (hy - threshold - 1e-9 * (1.0 + hy)) / d.powi(m as i32);
                        if bound > best {
                            best = bound;
                            last = m;
                        }
                    }
                    Err(_) => break,
                }
            }
            return Ok(PreperiodicityVerdict::NotPreperiodic {
                lower_bound: best,
                iterations: last,
            });
        }
        seen.insert(current.clone(), n);
        current = stepper.step(&current)?.0;
        n += 1;
    }
}
