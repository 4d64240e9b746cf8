//! Curves in `P^1 x P^1` and their images under split maps `(f, g)`.
//!
//! For `C = {P = 0}` of bidegree `(a, b)` and maps of degrees `d` and `e`, the
//! eliminant
//!
//! `Q(u, v) = Res_y(Res_x(P, F_0 - u F_1), G_0 - v G_1)`
//!
//! has bidegree `(a e, d b)` and equals the image curve raised to the degree
//! of `C -> (f, g)(C)`. Both resultants are recovered exactly by evaluation on
//! an integer grid followed by interpolation, and the image is the largest
//! exact power root of `Q`. Every image is checked numerically by pushing
//! sample points of `C` forward.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::config::Caps;
use crate::error::{Error, Result};
use crate::hypersurface::Hypersurface;
use crate::poly::{big_to_f64, resultant_reduced, BinaryForm};
use crate::proj::{ProjectivePoint, RationalMapLift};
use crate::roots::{binary_form_roots, DEFAULT_ROOT_TOL};
use crate::sphere::CPoint;

/// Number of sample points used to check each pushforward.
pub const VERIFY_SAMPLES: usize = 20;
/// Largest accepted relative residual of an image at a pushed-forward sample.
pub const VERIFY_TOL: f64 = 1e-8;

/// A curve `{P = 0}` in `P^1 x P^1`, normalized to a primitive integer form
/// whose first nonzero coefficient (in `(i, j)` order) is positive.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Curve2 {
    bidegree: (usize, usize),
    /// `coeffs[i][j]` multiplies `x^i y^j`, i.e. `X^i W^(a-i) Y^j Z^(b-j)`.
    coeffs: Vec<Vec<BigInt>>,
}

impl Curve2 {
    pub fn new(coeffs: Vec<Vec<BigInt>>) -> Result<Self> {
        let a = coeffs
            .len()
            .checked_sub(1)
            .ok_or_else(|| Error::InvalidInput("empty coefficient matrix".into()))?;
        let b = coeffs[0].len().saturating_sub(1);
        if coeffs.iter().any(|row| row.len() != b + 1) || coeffs[0].is_empty() {
            return Err(Error::InvalidInput("ragged coefficient matrix".into()));
        }
        let g = coeffs
            .iter()
            .flatten()
            .fold(BigInt::zero(), |g, c| g.gcd(c));
        if g.is_zero() {
            return Err(Error::InvalidInput(
                "the zero form does not define a curve".into(),
            ));
        }
        let first = coeffs.iter().flatten().find(|c| !c.is_zero()).unwrap();
        let g = if first.is_negative() { -g } else { g };
        let coeffs = coeffs
            .into_iter()
            .map(|row| row.into_iter().map(|c| c / &g).collect())
            .collect();
        Ok(Curve2 {
            bidegree: (a, b),
            coeffs,
        })
    }

    /// From `(i, j, c)` triples meaning `c x^i y^j`, in bidegree `(a, b)`.
    pub fn from_terms(bidegree: (usize, usize), terms: &[(usize, usize, i64)]) -> Result<Self> {
        let (a, b) = bidegree;
        let mut coeffs = vec![vec![BigInt::zero(); b + 1]; a + 1];
        for &(i, j, c) in terms {
            if i > a || j > b {
                return Err(Error::InvalidInput(format!(
                    "term x^{i} y^{j} exceeds bidegree ({a}, {b})"
                )));
            }
            coeffs[i][j] += c;
        }
        Curve2::new(coeffs)
    }

    /// The diagonal `x = y`.
    pub fn diagonal() -> Self {
        Curve2::from_terms((1, 1), &[(1, 0, 1), (0, 1, -1)]).unwrap()
    }

    /// The curve cut out by `h` when it only involves blocks `i` and `j`.
    pub fn from_hypersurface(h: &Hypersurface, i: usize, j: usize) -> Result<Self> {
        if i == j || i >= h.n() || j >= h.n() {
            return Err(Error::InvalidInput(format!(
                "invalid block pair ({i}, {j})"
            )));
        }
        if let Some(k) = h.blocks().into_iter().find(|&k| k != i && k != j) {
            return Err(Error::InvalidInput(format!(
                "hypersurface also depends on block {k}"
            )));
        }
        let (a, b) = (h.multidegree()[i], h.multidegree()[j]);
        let mut coeffs = vec![vec![BigInt::zero(); b + 1]; a + 1];
        for (e, c) in h.terms() {
            coeffs[e[i]][e[j]] += c;
        }
        Curve2::new(coeffs)
    }

    /// The same form as a hypersurface of `(P^1)^2`.
    pub fn to_hypersurface(&self) -> Hypersurface {
        let (a, b) = self.bidegree;
        let terms = self
            .terms()
            .map(|(i, j, c)| {
                (
                    vec![i, j],
                    num_rational::BigRational::from_integer(c.clone()),
                )
            })
            .collect();
        Hypersurface::new(vec![a, b], terms).expect("a normalized curve is a valid hypersurface")
    }

    pub fn bidegree(&self) -> (usize, usize) {
        self.bidegree
    }

    pub fn coeffs(&self) -> &[Vec<BigInt>] {
        &self.coeffs
    }

    /// Nonzero terms `(i, j, c)`.
    pub fn terms(&self) -> impl Iterator<Item = (usize, usize, &BigInt)> {
        self.coeffs.iter().enumerate().flat_map(|(i, row)| {
            row.iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(move |(j, c)| (i, j, c))
        })
    }

    pub fn max_bits(&self) -> u64 {
        self.coeffs
            .iter()
            .flatten()
            .map(|c| c.bits())
            .max()
            .unwrap_or(0)
    }

    /// Exact value of the form at a pair of projective points.
    pub fn eval(&self, p: &ProjectivePoint, q: &ProjectivePoint) -> BigInt {
        let (a, b) = self.bidegree;
        self.terms()
            .map(|(i, j, c)| {
                c * p.x().pow(i as u32)
                    * p.y().pow((a - i) as u32)
                    * q.x().pow(j as u32)
                    * q.y().pow((b - j) as u32)
            })
            .sum()
    }

    pub fn contains(&self, p: &ProjectivePoint, q: &ProjectivePoint) -> bool {
        self.eval(p, q).is_zero()
    }

    /// Coefficients scaled by a common power of two so that they fit in `f64`.
    fn scaled_f64(&self) -> Vec<Vec<f64>> {
        let shift = self.max_bits().saturating_sub(960);
        self.coeffs
            .iter()
            .map(|row| row.iter().map(|c| big_to_f64(&(c >> shift))).collect())
            .collect()
    }

    /// `|P(p, q)| / sum |terms(p, q)|` in the standard chart of each factor.
    pub fn relative_residual(&self, p: &CPoint, q: &CPoint) -> f64 {
        let (a, b) = self.bidegree;
        let (px, py) = p.chart_vector();
        let (qx, qy) = q.chart_vector();
        let mut sum = Complex64::zero();
        let mut scale = 0.0;
        for (i, row) in self.scaled_f64().iter().enumerate() {
            for (j, &c) in row.iter().enumerate() {
                if c == 0.0 {
                    continue;
                }
                let t = c
                    * px.powu(i as u32)
                    * py.powu((a - i) as u32)
                    * qx.powu(j as u32)
                    * qy.powu((b - j) as u32);
                sum += t;
                scale += t.norm();
            }
        }
        if scale == 0.0 {
            0.0
        } else {
            sum.norm() / scale
        }
    }

    /// Samples of the curve: a random coordinate in one factor and a root of
    /// the fiber in the other. Deterministic for a fixed `seed`.
    pub fn sample_points(&self, count: usize, seed: u64) -> Result<Vec<(CPoint, CPoint)>> {
        let (a, b) = self.bidegree;
        let c = self.scaled_f64();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = Vec::with_capacity(count);
        let mut attempts = 0;
        while out.len() < count {
            attempts += 1;
            if attempts > 10 * count + 10 {
                return Err(Error::RootFindingFailure(
                    "could not sample points on the curve".into(),
                ));
            }
            let z = Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            let solve_second = b > 0;
            let fiber: Vec<Complex64> = if solve_second {
                (0..=b)
                    .map(|j| (0..=a).map(|i| c[i][j] * z.powu(i as u32)).sum())
                    .collect()
            } else {
                (0..=a)
                    .map(|i| (0..=b).map(|j| c[i][j] * z.powu(j as u32)).sum())
                    .collect()
            };
            let Some(roots) = binary_form_roots(&fiber, DEFAULT_ROOT_TOL)? else {
                continue;
            };
            if roots.is_empty() {
                continue;
            }
            let r = roots[rng.gen_range(0..roots.len())];
            out.push(if solve_second {
                (CPoint::Finite(z), r)
            } else {
                (r, CPoint::Finite(z))
            });
        }
        Ok(out)
    }
}

impl std::fmt::Display for Curve2 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.to_hypersurface())
    }
}

impl Serialize for Curve2 {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_hypersurface().to_json().serialize(s)
    }
}

/// The image of a curve together with its certificate data.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Pushforward {
    pub image: Curve2,
    /// Degree of `C -> (f, g)(C)`: the power of the image in the eliminant.
    pub multiplicity: usize,
    /// Largest relative residual of the image at pushed-forward samples.
    pub max_residual: f64,
}

/// `(f, g)(C)` with multiplicity, verified at `VERIFY_SAMPLES` points.
pub fn curve_pushforward(
    c: &Curve2,
    f: &RationalMapLift,
    g: &RationalMapLift,
    caps: &Caps,
) -> Result<Pushforward> {
    let (a, b) = c.bidegree;
    let (d, e) = (f.degree(), g.degree());
    let (na, nb) = (a * e, d * b);
    if na.max(nb) > caps.curve_degree {
        return Err(Error::CapExceeded(format!(
            "image bidegree ({na}, {nb}) exceeds the curve degree cap {}",
            caps.curve_degree
        )));
    }

    // Q1(u, y) = Res_x(P(x, y), F_0 - u F_1), bidegree (a, d b)
    let q1 = interpolate_grid(a, d * b, |s, t| {
        let t = BigInt::from(t);
        let fiber: Vec<BigInt> = (0..=a).map(|i| horner(c.coeffs[i].iter(), &t)).collect();
        resultant_reduced(&BinaryForm::new(fiber), &pencil(f, s))
    })
    .ok_or_else(|| elimination("first eliminant is not integral"))?;
    caps.check_bits(max_bits(&q1))?;

    // Q2(u, v) = Res_y(Q1(u, y), G_0 - v G_1), bidegree (a e, d b)
    let q2 = interpolate_grid(na, nb, |s, r| {
        let s = BigInt::from(s);
        let fiber: Vec<BigInt> = (0..=nb)
            .map(|j| horner(q1.iter().map(|row| &row[j]), &s))
            .collect();
        resultant_reduced(&BinaryForm::new(fiber), &pencil(g, r))
    })
    .ok_or_else(|| elimination("second eliminant is not integral"))?;
    caps.check_bits(max_bits(&q2))?;
    if q2.iter().flatten().all(Zero::is_zero) {
        return Err(elimination("eliminant vanishes identically"));
    }

    let (root, m) = largest_power_root(&q2);
    let image = Curve2::new(root)?;

    let mut max_residual: f64 = 0.0;
    for (p, q) in c.sample_points(VERIFY_SAMPLES, 0x5eed_c0de)? {
        let r = image.relative_residual(&f.evaluate_numeric(&p), &g.evaluate_numeric(&q));
        max_residual = max_residual.max(if r.is_nan() { f64::INFINITY } else { r });
    }
    if max_residual >= VERIFY_TOL {
        return Err(Error::EliminationFailure {
            reason: "pushed-forward samples do not lie on the image".into(),
            max_residual,
        });
    }
    Ok(Pushforward {
        image,
        multiplicity: m,
        max_residual,
    })
}

fn elimination(reason: &str) -> Error {
    Error::EliminationFailure {
        reason: reason.into(),
        max_residual: f64::NAN,
    }
}

fn max_bits(m: &[Vec<BigInt>]) -> u64 {
    m.iter().flatten().map(|c| c.bits()).max().unwrap_or(0)
}

/// `sum c_k t^k` for coefficients in ascending order.
fn horner<'a>(c: impl DoubleEndedIterator<Item = &'a BigInt>, t: &BigInt) -> BigInt {
    c.rev().fold(BigInt::zero(), |acc, x| acc * t + x)
}

/// `F_0 - s F_1`.
fn pencil(f: &RationalMapLift, s: usize) -> BinaryForm {
    f.f0().sub(&f.f1().scale(&BigInt::from(s)))
}

/// Exact integer coefficients `c[i][j]` of the polynomial of degree `<= (n, m)`
/// taking the values `value(s, t)` at `(s, t) in [0, n] x [0, m]`; `None` when
/// the interpolant is not integral.
fn interpolate_grid<F>(n: usize, m: usize, value: F) -> Option<Vec<Vec<BigInt>>>
where
    F: Fn(usize, usize) -> BigInt + Sync,
{
    // rows scaled by m!, then columns by n!
    let rows: Vec<Vec<BigInt>> = (0..=n)
        .into_par_iter()
        .map(|s| {
            let vals: Vec<BigInt> = (0..=m).map(|t| value(s, t)).collect();
            scaled_interpolant(&vals)
        })
        .collect();
    let cols: Vec<Vec<BigInt>> = (0..=m)
        .into_par_iter()
        .map(|j| {
            let vals: Vec<BigInt> = rows.iter().map(|r| r[j].clone()).collect();
            scaled_interpolant(&vals)
        })
        .collect();
    let den = factorial(n) * factorial(m);
    let mut out = vec![vec![BigInt::zero(); m + 1]; n + 1];
    for (j, col) in cols.into_iter().enumerate() {
        for (i, x) in col.into_iter().enumerate() {
            let (q, r) = x.div_rem(&den);
            if !r.is_zero() {
                return None;
            }
            out[i][j] = q;
        }
    }
    Some(out)
}

fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * k)
}

/// `n!` times the monomial coefficients of the interpolant of `vals` at
/// `0, 1, ..., n`, from the forward-difference (Newton) form
/// `p(x) = sum_k D^k p(0) x(x-1)...(x-k+1) / k!`.
fn scaled_interpolant(vals: &[BigInt]) -> Vec<BigInt> {
    let n = vals.len() - 1;
    let mut diffs = vals.to_vec();
    let mut lead = Vec::with_capacity(n + 1);
    for k in 0..=n {
        lead.push(diffs[0].clone());
        for i in 0..n - k {
            diffs[i] = &diffs[i + 1] - &diffs[i];
        }
    }
    let nfact = factorial(n);
    let mut out = vec![BigInt::zero(); n + 1];
    let mut falling = vec![BigInt::one()];
    let mut weight = nfact.clone();
    for (k, dk) in lead.iter().enumerate() {
        if k > 0 {
            // falling *= (x - (k - 1)), weight = n! / k!
            let shift = BigInt::from(k - 1);
            let mut next = vec![BigInt::zero(); falling.len() + 1];
            for (i, c) in falling.iter().enumerate() {
                next[i + 1] += c;
                next[i] -= c * &shift;
            }
            falling = next;
            weight /= k;
        }
        if dk.is_zero() {
            continue;
        }
        let w = dk * &weight;
        for (i, c) in falling.iter().enumerate() {
            out[i] += &w * c;
        }
    }
    out
}

/// The root `R` of the largest `m` dividing both degrees with `Q = +-R^m`.
fn largest_power_root(q: &[Vec<BigInt>]) -> (Vec<Vec<BigInt>>, usize) {
    let (n, k) = (q.len() - 1, q[0].len() - 1);
    let g = n.gcd(&k);
    for m in (2..=g).rev().filter(|m| g % m == 0) {
        if let Some(r) = exact_root(q, m) {
            return (r, m);
        }
        let neg: Vec<Vec<BigInt>> = q
            .iter()
            .map(|row| row.iter().map(|c| -c).collect())
            .collect();
        if let Some(r) = exact_root(&neg, m) {
            return (r, m);
        }
    }
    (q.to_vec(), 1)
}

/// Exact `m`-th root of a bivariate integer polynomial, if one exists.
///
/// Uses the Kronecker substitution `y -> t^K` with `K = deg_y Q + 1` and the
/// power series recurrence for `p^(1/m)`; a root whose `y`-degree is at most
/// `deg_y Q / m` has an `m`-th power that Kronecker substitution keeps intact,
/// so the univariate check is exact.
fn exact_root(q: &[Vec<BigInt>], m: usize) -> Option<Vec<Vec<BigInt>>> {
    let (na, nb) = (q.len() - 1, q[0].len() - 1);
    let kk = nb + 1;
    let mut p = vec![BigInt::zero(); (na + 1) * kk];
    for (i, row) in q.iter().enumerate() {
        for (j, c) in row.iter().enumerate() {
            p[i * kk + j] = c.clone();
        }
    }
    let lo = p.iter().position(|c| !c.is_zero())?;
    let hi = p.iter().rposition(|c| !c.is_zero())?;
    if lo % m != 0 || (hi - lo) % m != 0 {
        return None;
    }
    let p = &p[lo..=hi];
    let p0 = &p[0];
    if p0.is_negative() && m % 2 == 0 {
        return None;
    }
    let r0 = p0.nth_root(m as u32);
    if r0.pow(m as u32) != *p0 {
        return None;
    }
    let deg = (hi - lo) / m;
    let nonzero: Vec<(usize, &BigInt)> = p
        .iter()
        .enumerate()
        .skip(1)
        .filter(|(_, c)| !c.is_zero())
        .collect();
    let mm = BigInt::from(m);
    let mut r = vec![r0];
    for k in 1..=deg {
        // k m p0 r_k = sum_j ((m+1) j - k m) p_j r_(k-j)
        let mut acc = BigInt::zero();
        for &(j, pj) in nonzero.iter().take_while(|(j, _)| *j <= k) {
            let w = BigInt::from((m + 1) * j) - BigInt::from(k * m);
            if !w.is_zero() {
                acc += w * pj * &r[k - j];
            }
        }
        let den = BigInt::from(k) * &mm * p0;
        let (quot, rem) = acc.div_rem(&den);
        if !rem.is_zero() {
            return None;
        }
        r.push(quot);
    }
    // r^m == p, checked exactly
    let mut pow = r.clone();
    for _ in 1..m {
        pow = mul_univariate(&pow, &r);
    }
    if pow.len() != p.len() || pow.iter().zip(p).any(|(x, y)| x != y) {
        return None;
    }
    let shift = lo / m;
    let (ra, rb) = (na / m, nb / m);
    let mut out = vec![vec![BigInt::zero(); rb + 1]; ra + 1];
    for (idx, c) in r.into_iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let t = idx + shift;
        let (i, j) = (t / kk, t % kk);
        if i > ra || j > rb {
            return None;
        }
        out[i][j] = c;
    }
    Some(out)
}

fn mul_univariate(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if !y.is_zero() {
                out[i + j] += x * y;
            }
        }
    }
    out
}

/// How a curve orbit ended.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum CurveOrbitOutcome {
    /// `C_(tail + period) = C_tail`.
    Preperiodic {
        tail: usize,
        period: usize,
    },
    NotDetected {
        reason: String,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CurveOrbit {
    pub outcome: CurveOrbitOutcome,
    /// `C_0 = C, C_1, ...` as computed.
    pub curves: Vec<Curve2>,
    /// Pushforward data for `C_(k+1)`.
    pub steps: Vec<Pushforward>,
}

impl CurveOrbit {
    pub fn bidegrees(&self) -> Vec<(usize, usize)> {
        self.curves.iter().map(Curve2::bidegree).collect()
    }
}

/// Iterates `C -> (f, g)(C)` until a curve repeats or `max_iter` steps pass.
pub fn curve_orbit(
    c: &Curve2,
    f: &RationalMapLift,
    g: &RationalMapLift,
    max_iter: usize,
    caps: &Caps,
) -> Result<CurveOrbit> {
    let mut curves = vec![c.clone()];
    let mut steps = Vec::new();
    for it in 1..=max_iter {
        let push = match curve_pushforward(curves.last().unwrap(), f, g, caps) {
            Ok(p) => p,
            Err(Error::CapExceeded(reason)) => {
                return Ok(CurveOrbit {
                    outcome: CurveOrbitOutcome::NotDetected { reason },
                    curves,
                    steps,
                })
            }
            Err(e) => return Err(e),
        };
        let image = push.image.clone();
        steps.push(push);
        let repeat = curves.iter().position(|k| *k == image);
        curves.push(image);
        if let Some(tail) = repeat {
            return Ok(CurveOrbit {
                outcome: CurveOrbitOutcome::Preperiodic {
                    tail,
                    period: it - tail,
                },
                curves,
                steps,
            });
        }
    }
    Ok(CurveOrbit {
        outcome: CurveOrbitOutcome::NotDetected {
            reason: format!("no repetition within {max_iter} iterations"),
        },
        curves,
        steps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sq() -> RationalMapLift {
        RationalMapLift::from_i64(&[0, 0, 1], &[1, 0, 0]).unwrap()
    }

    fn basilica() -> RationalMapLift {
        RationalMapLift::from_i64(&[-1, 0, 1], &[1, 0, 0]).unwrap()
    }

    #[test]
    fn interpolation_recovers_polynomial() {
        // 3 - 2 s t + 5 s^2 t^3
        let p = |s: usize, t: usize| {
            let (s, t) = (BigInt::from(s), BigInt::from(t));
            BigInt::from(3) - BigInt::from(2) * &s * &t + BigInt::from(5) * &s * &s * t.pow(3)
        };
        let c = interpolate_grid(2, 3, p).unwrap();
        assert_eq!(c[0][0], BigInt::from(3));
        assert_eq!(c[1][1], BigInt::from(-2));
        assert_eq!(c[2][3], BigInt::from(5));
        assert_eq!(c.iter().flatten().filter(|x| !x.is_zero()).count(), 3);
    }

    #[test]
    fn power_roots() {
        // (1 + x - 2 y)^2 and a non-square
        let r = Curve2::from_terms((1, 1), &[(0, 0, 1), (1, 0, 1), (0, 1, -2), (1, 1, 3)]).unwrap();
        let sq_coeffs = {
            let mut out = vec![vec![BigInt::zero(); 3]; 3];
            for (i, j, c) in r.terms() {
                for (k, l, d) in r.terms() {
                    out[i + k][j + l] += c * d;
                }
            }
            out
        };
        let (root, m) = largest_power_root(&sq_coeffs);
        assert_eq!(m, 2);
        assert_eq!(Curve2::new(root).unwrap(), r);
        let mut bumped = sq_coeffs.clone();
        bumped[2][2] += 1;
        assert_eq!(largest_power_root(&bumped).1, 1);
    }

    #[test]
    fn diagonal_is_invariant() {
        let p = curve_pushforward(&Curve2::diagonal(), &sq(), &sq(), &Caps::default()).unwrap();
        assert_eq!(p.image, Curve2::diagonal());
        assert_eq!(p.multiplicity, 2);
        assert!(p.max_residual < VERIFY_TOL);
    }

    #[test]
    fn fibers_map_to_fibers() {
        // x = 2 maps to x = 3 under z^2 - 1
        let c = Curve2::from_terms((1, 0), &[(1, 0, 1), (0, 0, -2)]).unwrap();
        let p = curve_pushforward(&c, &basilica(), &sq(), &Caps::default()).unwrap();
        assert_eq!(
            p.image,
            Curve2::from_terms((1, 0), &[(1, 0, 1), (0, 0, -3)]).unwrap()
        );
    }

    #[test]
    fn graph_of_square_is_fixed() {
        // y = x^2 under (z^2, z^2)
        let c = Curve2::from_terms((2, 1), &[(2, 0, 1), (0, 1, -1)]).unwrap();
        let orbit = curve_orbit(&c, &sq(), &sq(), 3, &Caps::default()).unwrap();
        assert_eq!(
            orbit.outcome,
            CurveOrbitOutcome::Preperiodic { tail: 0, period: 1 }
        );
    }

    #[test]
    fn image_contains_pushed_points() {
        // y = x + 1 under (z^2 - 1, z^2): exact check at rational points
        let c = Curve2::from_terms((1, 1), &[(1, 0, 1), (0, 0, 1), (0, 1, -1)]).unwrap();
        let p = curve_pushforward(&c, &basilica(), &sq(), &Caps::default()).unwrap();
        assert_eq!(p.image.bidegree(), (2, 2));
        for x in -4..5 {
            let px = ProjectivePoint::from_integer(x);
            let py = ProjectivePoint::from_integer(x + 1);
            assert!(p
                .image
                .contains(&basilica().evaluate(&px), &sq().evaluate(&py)));
        }
    }

    #[test]
    fn cap_stops_orbit() {
        let c = Curve2::from_terms((1, 1), &[(1, 0, 1), (0, 0, 1), (0, 1, -1)]).unwrap();
        let caps = Caps {
            curve_degree: 4,
            ..Caps::default()
        };
        let orbit = curve_orbit(&c, &sq(), &sq(), 10, &caps).unwrap();
        assert!(matches!(
            orbit.outcome,
            CurveOrbitOutcome::NotDetected { .. }
        ));
        assert_eq!(orbit.bidegrees(), vec![(1, 1), (2, 2), (4, 4)]);
    }
}
