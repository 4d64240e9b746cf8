//! Green functions and Monte Carlo samples of equilibrium measures.
//!
//! `mu_f` is sampled by random backward orbits: the `d^n` preimages of a
//! non-exceptional point, weighted equally, converge to `mu_f`. The start is a
//! repelling fixed point when one exists, so every sample already lies on the
//! Julia set. Each orbit draws from its own ChaCha stream keyed by
//! `(seed, coordinate, orbit index)`, which makes results independent of
//! thread scheduling.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::heights::step_bounds;
use crate::hypersurface::Hypersurface;
use crate::orbits::{periodic_points, DEFAULT_CYCLE_TOL};
use crate::proj::RationalMapLift;
use crate::roots::{binary_form_roots, DEFAULT_ROOT_TOL};
use crate::sphere::CPoint;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GreenValue {
    pub value: f64,
    pub iterations: usize,
    /// Bound on `|value - G(z, 1)|` from the archimedean step constant.
    pub error_bound: f64,
}

/// `log ||F^n(z, 1)|| / d^n`, renormalizing after every step.
pub fn green(f: &RationalMapLift, z: Complex64, n: usize) -> Result<GreenValue> {
    green_lift(f, (z, Complex64::new(1.0, 0.0)), n)
}

/// `log ||F^n(v)|| / d^n` for an arbitrary nonzero lift `v`.
pub fn green_lift(f: &RationalMapLift, v: (Complex64, Complex64), n: usize) -> Result<GreenValue> {
    if n == 0 {
        return Err(Error::InvalidInput("green needs n >= 1".into()));
    }
    let d = f.degree() as f64;
    if d < 2.0 {
        return Err(Error::InvalidInput("green needs degree >= 2".into()));
    }
    let lift = f.numeric();
    let (mut a, mut b) = v;
    let norm0 = a.norm().max(b.norm());
    if norm0 == 0.0 || !norm0.is_finite() {
        return Err(Error::ZeroPoint);
    }
    a /= norm0;
    b /= norm0;
    // log ||F^n v|| / d^n = log ||v|| + sum_k log ||F(v_k)|| / d^(k+1)
    let mut value = 0.0;
    let mut scale = 1.0;
    for _ in 0..n {
        let (u0, u1) = lift.eval(a, b);
        let s = u0.norm().max(u1.norm());
        if s == 0.0 || !s.is_finite() {
            return Err(Error::RootFindingFailure(
                "lift vanished numerically".into(),
            ));
        }
        scale /= d;
        value += (s.ln() + lift.log_scale()) * scale;
        a = u0 / s;
        b = u1 / s;
    }
    value += norm0.ln();
    let c = step_bounds(f)?.archimedean();
    Ok(GreenValue {
        value,
        iterations: n,
        error_bound: c * scale / (d - 1.0),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalMeasure {
    pub points: Vec<CPoint>,
    pub seed: u64,
    pub depth: usize,
}

impl EmpiricalMeasure {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Every point carries weight `1/N`.
    pub fn weight(&self) -> f64 {
        1.0 / self.points.len() as f64
    }
}

/// Samples on a product of spheres; `coords[k]` says which factor entry `k` is.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProductSample {
    pub coords: Vec<usize>,
    pub points: Vec<Vec<CPoint>>,
    pub seed: u64,
    pub depth: usize,
}

impl ProductSample {
    /// The marginal sample in entry `k`.
    pub fn marginal(&self, k: usize) -> Vec<CPoint> {
        self.points.iter().map(|p| p[k]).collect()
    }
}

/// Samples of a pulled-back measure on a hypersurface; each point has all `n` coordinates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PullbackSample {
    pub free: usize,
    pub points: Vec<Vec<CPoint>>,
    /// Draws whose fiber form vanished identically.
    pub discarded: usize,
    pub seed: u64,
    pub depth: usize,
}

impl PullbackSample {
    pub fn marginal(&self, k: usize) -> Vec<CPoint> {
        self.points.iter().map(|p| p[k]).collect()
    }

    pub fn discarded_fraction(&self) -> f64 {
        let total = self.points.len() + self.discarded;
        if total == 0 {
            0.0
        } else {
            self.discarded as f64 / total as f64
        }
    }
}

/// The random stream for one orbit.
pub fn substream(seed: u64, coordinate: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ coordinate.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    rng.set_stream(index);
    rng
}

/// All `d` preimages of `w`, with multiplicity: roots of `w1 F0 - w0 F1`.
pub fn preimages(f: &RationalMapLift, w: &CPoint) -> Result<Vec<CPoint>> {
    let (c0, c1) = f.numeric().coeffs();
    let (w0, w1) = w.chart_vector();
    let form: Vec<Complex64> = c0.iter().zip(c1).map(|(a, b)| w1 * a - w0 * b).collect();
    binary_form_roots(&form, DEFAULT_ROOT_TOL)?
        .ok_or_else(|| Error::RootFindingFailure("preimage equation vanished".into()))
}

/// Start point for backward orbits: the most repelling fixed point, or a
/// generic point whose second preimage set has several distinct elements.
pub fn backward_start(f: &RationalMapLift) -> Result<CPoint> {
    if let Ok(cycles) = periodic_points(f, 1, DEFAULT_CYCLE_TOL) {
        if let Some(c) = cycles
            .iter()
            .filter(|c| c.is_repelling(1e-6) && !c.parabolic)
            .max_by(|a, b| a.multiplier.norm().total_cmp(&b.multiplier.norm()))
        {
            return Ok(c.points[0]);
        }
    }
    for z in [
        Complex64::new(0.31, 0.17),
        Complex64::new(-0.73, 0.41),
        Complex64::new(1.9, -0.6),
    ] {
        let p = CPoint::Finite(z);
        let mut second = Vec::new();
        for q in preimages(f, &p)? {
            second.extend(preimages(f, &q)?);
        }
        let distinct = second
            .iter()
            .enumerate()
            .filter(|(i, a)| second[..*i].iter().all(|b| a.distance(b) > 1e-6))
            .count();
        if distinct >= 2 {
            return Ok(p);
        }
    }
    Err(Error::RootFindingFailure(
        "no admissible start point for backward orbits".into(),
    ))
}

fn backward_orbit(
    f: &RationalMapLift,
    start: CPoint,
    depth: usize,
    rng: &mut ChaCha8Rng,
) -> Result<CPoint> {
    let mut p = start;
    for _ in 0..depth {
        let pre = preimages(f, &p)?;
        p = pre[rng.gen_range(0..pre.len())];
    }
    Ok(p)
}

fn check_sizes(n: usize, depth: usize) -> Result<()> {
    if n == 0 || depth == 0 {
        return Err(Error::InvalidInput(
            "sample size and depth must be at least 1".into(),
        ));
    }
    Ok(())
}

pub fn sample_invariant_measure(
    f: &RationalMapLift,
    n: usize,
    depth: usize,
    seed: u64,
) -> Result<EmpiricalMeasure> {
    Ok(EmpiricalMeasure {
        points: sample_coordinate(f, 0, n, depth, seed)?,
        seed,
        depth,
    })
}

fn sample_coordinate(
    f: &RationalMapLift,
    coordinate: usize,
    n: usize,
    depth: usize,
    seed: u64,
) -> Result<Vec<CPoint>> {
    check_sizes(n, depth)?;
    if f.degree() < 2 {
        return Err(Error::InvalidInput("sampling needs degree >= 2".into()));
    }
    let start = backward_start(f)?;
    (0..n)
        .into_par_iter()
        .map(|k| {
            let mut rng = substream(seed, coordinate as u64, k as u64);
            backward_orbit(f, start, depth, &mut rng)
        })
        .collect()
}

/// Independent samples of `mu_{f_j}` for every `j != skip`.
pub fn sample_product_measure(
    maps: &[RationalMapLift],
    skip: usize,
    n: usize,
    depth: usize,
    seed: u64,
) -> Result<ProductSample> {
    if skip >= maps.len() {
        return Err(Error::InvalidInput(format!(
            "skip index {skip} out of range for {} maps",
            maps.len()
        )));
    }
    let coords: Vec<usize> = (0..maps.len()).filter(|&j| j != skip).collect();
    let columns: Vec<Vec<CPoint>> = coords
        .iter()
        .map(|&j| sample_coordinate(&maps[j], j, n, depth, seed))
        .collect::<Result<_>>()?;
    let points = (0..n)
        .map(|k| columns.iter().map(|c| c[k]).collect())
        .collect();
    Ok(ProductSample {
        coords,
        points,
        seed,
        depth,
    })
}

/// Relative size below which a fiber form counts as identically zero.
const DEGENERATE_FIBER: f64 = 1e-12;

/// Stream index used for fiber root choices, kept apart from orbit streams.
const FIBER_STREAM: u64 = 1 << 32;

/// Samples of the normalized pullback of `prod_{j != free} mu_{f_j}` to `H`:
/// draw the other coordinates, then one root of the fiber uniformly.
pub fn pullback_to_hypersurface(
    h: &Hypersurface,
    maps: &[RationalMapLift],
    free: usize,
    n: usize,
    depth: usize,
    seed: u64,
) -> Result<PullbackSample> {
    if maps.len() != h.n() {
        return Err(Error::InvalidInput(format!(
            "{} maps given for a hypersurface in {} coordinates",
            maps.len(),
            h.n()
        )));
    }
    if free >= h.n() {
        return Err(Error::InvalidInput(format!(
            "coordinate {free} out of range"
        )));
    }
    if !h.depends_on(free) {
        return Err(Error::NotDominant { axis: free });
    }
    let base = sample_product_measure(maps, free, n, depth, seed)?;
    let drawn: Vec<Option<Vec<CPoint>>> = base
        .points
        .par_iter()
        .enumerate()
        .map(|(k, others)| {
            let mut full = vec![CPoint::Infinity; h.n()];
            for (slot, &j) in base.coords.iter().enumerate() {
                full[j] = others[slot];
            }
            let (coeffs, scale) = h.fiber_coeffs_complex(free, &full)?;
            let size = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
            if !(size > DEGENERATE_FIBER * scale) {
                return Ok(None);
            }
            let roots = binary_form_roots(&coeffs, DEFAULT_ROOT_TOL)?
                .ok_or_else(|| Error::RootFindingFailure("fiber form vanished".into()))?;
            let mut rng = substream(seed, free as u64, FIBER_STREAM + k as u64);
            full[free] = roots[rng.gen_range(0..roots.len())];
            Ok(Some(full))
        })
        .collect::<Result<_>>()?;
    let discarded = drawn.iter().filter(|p| p.is_none()).count();
    Ok(PullbackSample {
        free,
        points: drawn.into_iter().flatten().collect(),
        discarded,
        seed,
        depth,
    })
}
