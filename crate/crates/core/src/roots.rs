//! Complex polynomial roots by Aberth–Ehrlich iteration.
//!
//! The solver works on any polynomial that can report its Newton quotient
//! `p(z) / p'(z)`, which lets the dynamics code feed it iterates of a map
//! without ever expanding their coefficients.

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::poly::{BinaryForm, QPoly};
use crate::sphere::CPoint;

const MAX_ITERATIONS: usize = 800;

/// Default convergence tolerance for root finding.
pub const DEFAULT_ROOT_TOL: f64 = 1e-12;

/// Roots of `sum coeffs[k] z^k`. The leading coefficient must be nonzero.
pub fn polynomial_roots(coeffs: &[Complex64], tol: f64) -> Result<Vec<Complex64>> {
    let n = coeffs.len() - 1;
    if coeffs[n] == Complex64::zero() {
        return Err(Error::RootFindingFailure("zero leading coefficient".into()));
    }
    match n {
        0 => Ok(vec![]),
        1 => Ok(vec![-coeffs[0] / coeffs[1]]),
        2 => Ok(quadratic(coeffs[2], coeffs[1], coeffs[0]).to_vec()),
        _ => {
            let radius = root_radius(coeffs);
            let init = initial_guesses(n, radius);
            aberth(|z| newton_quotient(coeffs, z), init, tol)
        }
    }
}

/// Numerically stable roots of `a z^2 + b z + c`.
pub fn quadratic(a: Complex64, b: Complex64, c: Complex64) -> [Complex64; 2] {
    let disc = (b * b - 4.0 * a * c).sqrt();
    // pick the sign that avoids cancellation
    let q = if (b.conj() * disc).re >= 0.0 {
        -0.5 * (b + disc)
    } else {
        -0.5 * (b - disc)
    };
    if q == Complex64::zero() {
        return [Complex64::zero(), Complex64::zero()];
    }
    [q / a, c / q]
}

/// `p(z)/p'(z)`, evaluated through the reversed polynomial when `|z| > 1`.
pub fn newton_quotient(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    let n = coeffs.len() - 1;
    if z.norm() <= 1.0 {
        let mut p = coeffs[n];
        let mut dp = Complex64::zero();
        for k in (0..n).rev() {
            dp = dp * z + p;
            p = p * z + coeffs[k];
        }
        p / dp
    } else {
        // p(z) = z^n q(w), w = 1/z, q(w) = sum coeffs[k] w^(n-k)
        let w = z.inv();
        let mut q = coeffs[0];
        let mut dq = Complex64::zero();
        for k in 1..=n {
            dq = dq * w + q;
            q = q * w + coeffs[k];
        }
        // p'/p = n/z - w^2 q'/(q) / ... ; p/p' = z q / (n q - w q')
        z * q / (n as f64 * q - w * dq)
    }
}

fn root_radius(coeffs: &[Complex64]) -> f64 {
    // geometric mean of the root moduli, clamped to something sane
    let n = coeffs.len() - 1;
    let r = (coeffs[0].norm() / coeffs[n].norm()).powf(1.0 / n as f64);
    if r.is_finite() && r > 1e-100 {
        r
    } else {
        1.0
    }
}

/// Points on a circle, rotated off the real axis to break symmetry.
pub fn initial_guesses(n: usize, radius: f64) -> Vec<Complex64> {
    (0..n)
        .map(|k| {
            let theta = 2.0 * PI * k as f64 / n as f64 + 0.4;
            Complex64::from_polar(radius, theta)
        })
        .collect()
}

/// Simultaneous Aberth–Ehrlich iteration.
///
/// `quotient(z)` must return `p(z)/p'(z)`. Iteration stops once every
/// correction is below `tol * max(1, |z|)`.
pub fn aberth<Q>(quotient: Q, mut z: Vec<Complex64>, tol: f64) -> Result<Vec<Complex64>>
where
    Q: Fn(Complex64) -> Complex64,
{
    let n = z.len();
    let mut done = vec![false; n];
    for _ in 0..MAX_ITERATIONS {
        let mut all_done = true;
        for k in 0..n {
            if done[k] {
                continue;
            }
            let ratio = quotient(z[k]);
            if !ratio.re.is_finite() || !ratio.im.is_finite() {
                // exact hit of a root or an overflow; treat a zero quotient as converged
                if ratio.norm().is_nan() {
                    let nudge = Complex64::new(1e-8, 1e-8) * z[k].norm().max(1.0);
                    z[k] += nudge;
                    all_done = false;
                    continue;
                }
            }
            let mut sum = Complex64::zero();
            for j in 0..n {
                if j != k {
                    let diff = z[k] - z[j];
                    if diff != Complex64::zero() {
                        sum += diff.inv();
                    }
                }
            }
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * sum);
            if step.re.is_finite() && step.im.is_finite() {
                z[k] -= step;
            }
            if step.norm() <= tol * z[k].norm().max(1.0) {
                done[k] = true;
            } else {
                all_done = false;
            }
        }
        if all_done {
            return Ok(z);
        }
    }
    Err(Error::RootFindingFailure(format!(
        "{} of {} roots unconverged after {} iterations",
        done.iter().filter(|d| !**d).count(),
        n,
        MAX_ITERATIONS
    )))
}

/// All roots of a binary form with complex coefficients, as sphere points.
///
/// Exact zero coefficients at either end give roots at `0` and `inf`.
/// Returns `None` for the zero form.
pub fn binary_form_roots(coeffs: &[Complex64], tol: f64) -> Result<Option<Vec<CPoint>>> {
    let Some(hi) = coeffs.iter().rposition(|c| *c != Complex64::zero()) else {
        return Ok(None);
    };
    let lo = coeffs.iter().position(|c| *c != Complex64::zero()).unwrap();
    let d = coeffs.len() - 1;
    let mut out = Vec::with_capacity(d);
    out.extend(std::iter::repeat_n(CPoint::Finite(Complex64::zero()), lo));
    out.extend(std::iter::repeat_n(CPoint::Infinity, d - hi));
    let core = &coeffs[lo..=hi];
    if core.len() > 1 {
        if core[core.len() - 1].norm() >= core[0].norm() {
            for z in polynomial_roots(core, tol)? {
                out.push(CPoint::Finite(z));
            }
        } else {
            let rev: Vec<Complex64> = core.iter().rev().copied().collect();
            for u in polynomial_roots(&rev, tol)? {
                out.push(CPoint::from_inverse(u));
            }
        }
    }
    Ok(Some(out))
}

/// A root of an integer binary form, exact when rational.
#[derive(Clone, Debug, PartialEq)]
pub struct FormRoot {
    pub point: CPoint,
    /// `Some((p, q))` for an exact rational root `[p : q]`.
    pub exact: Option<(BigInt, BigInt)>,
    pub multiplicity: usize,
}

/// Roots of an integer binary form with multiplicities, rational roots exact.
///
/// Repeated factors are split off with a square-free decomposition over `Q`
/// before any floating point work, so numeric roots are always simple.
pub fn integer_form_roots(form: &BinaryForm, tol: f64) -> Result<Vec<FormRoot>> {
    if form.is_zero() {
        return Err(Error::InvalidInput(
            "zero form has no isolated roots".into(),
        ));
    }
    let c = form.coeffs();
    let d = form.degree();
    let lo = c.iter().position(|x| !x.is_zero()).unwrap();
    let hi = c.iter().rposition(|x| !x.is_zero()).unwrap();
    let mut out = Vec::new();
    if lo > 0 {
        out.push(FormRoot {
            point: CPoint::Finite(Complex64::zero()),
            exact: Some((BigInt::zero(), BigInt::from(1))),
            multiplicity: lo,
        });
    }
    if hi < d {
        out.push(FormRoot {
            point: CPoint::Infinity,
            exact: Some((BigInt::from(1), BigInt::zero())),
            multiplicity: d - hi,
        });
    }
    if hi == lo {
        return Ok(out);
    }
    let affine = QPoly::from_ints(&c[lo..=hi]);
    for (factor, mult) in affine.squarefree_decomposition() {
        let mut ints = factor.to_primitive_ints();
        let numeric = polynomial_roots(&to_complex(&ints), tol)?;
        let mut remaining = Vec::new();
        for z in numeric {
            let mut found = None;
            if z.im.abs() <= 1e-6 * z.norm().max(1.0) {
                if let Some((p, q)) = rational_candidate(z.re, ints.last().unwrap()) {
                    let bf = BinaryForm::new(ints.clone());
                    if let Some(quot) = bf.div_linear(&p, &q) {
                        ints = quot.coeffs().to_vec();
                        found = Some((p, q));
                    }
                }
            }
            match found {
                Some((p, q)) => out.push(FormRoot {
                    point: CPoint::Finite(Complex64::new(
                        p.to_f64().unwrap_or(f64::NAN) / q.to_f64().unwrap_or(f64::NAN),
                        0.0,
                    )),
                    exact: Some((p, q)),
                    multiplicity: mult,
                }),
                None => remaining.push(z),
            }
        }
        for z in remaining {
            out.push(FormRoot {
                point: CPoint::Finite(z),
                exact: None,
                multiplicity: mult,
            });
        }
    }
    Ok(out)
}

fn to_complex(ints: &[BigInt]) -> Vec<Complex64> {
    ints.iter()
        .map(|c| Complex64::new(crate::poly::big_to_f64(c), 0.0))
        .collect()
}

/// Best rational approximation of `x` by continued fractions with denominator
/// dividing-compatible with `lead` (any root `p/q` of a primitive integer
/// polynomial has `q | lead`).
fn rational_candidate(x: f64, lead: &BigInt) -> Option<(BigInt, BigInt)> {
    if !x.is_finite() || x.abs() > 1e15 {
        return None;
    }
    let max_den = lead.abs().to_f64().unwrap_or(f64::INFINITY).min(1e12);
    let (mut h0, mut h1) = (0f64, 1f64);
    let (mut k0, mut k1) = (1f64, 0f64);
    let mut r = x;
    for _ in 0..64 {
        let a = r.floor();
        let h2 = a * h1 + h0;
        let k2 = a * k1 + k0;
        if k2 > max_den {
            break;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        if ((h1 / k1) - x).abs() <= 1e-9 * x.abs().max(1.0) {
            return Some((BigInt::from(h1 as i64), BigInt::from(k1 as i64)));
        }
        let frac = r - a;
        if frac.abs() < 1e-15 {
            break;
        }
        r = 1.0 / frac;
    }
    if k1 >= 1.0 && ((h1 / k1) - x).abs() <= 1e-9 * x.abs().max(1.0) {
        Some((BigInt::from(h1 as i64), BigInt::from(k1 as i64)))
    } else {
        None
    }
}
