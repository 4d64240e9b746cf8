//! Necessary conditions for a hypersurface `H` of `(P^1)^n` to be preperiodic
//! under a split map `(f_1, ..., f_n)`, gathered into one report.
//!
//! * Dominance: `H` projects dominantly away from axis `i` iff its form has
//!   positive degree in block `i`.
//! * Fibers: if `H` has a dense set of preperiodic points, a fiber of `H` over
//!   preperiodic values of the other coordinates consists of preperiodic
//!   points. A rational fiber root with positive canonical height is a
//!   certified counterexample.
//! * Measures: the pullbacks to `H` of the products of equilibrium measures
//!   agree for every free axis. This is compared statistically on caps.
//! * Shape: for non-exceptional maps a preperiodic `H` is the preimage of a
//!   preperiodic curve in two coordinates `(i, j)` whose maps have a common
//!   iterate degree. Such curves are certified by an exact curve orbit.

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::Caps;
use crate::curve::{curve_orbit, Curve2, CurveOrbitOutcome};
use crate::error::{Error, Result};
use crate::exceptional::{
    classify_with, Classification, Verdict, DEFAULT_COLLISION_TOL, DEFAULT_MAX_ORBIT,
};
use crate::heights::{decide_preperiodic_with, height_step_bound, PreperiodicityVerdict};
use crate::hypersurface::Hypersurface;
use crate::measure::{green, pullback_to_hypersurface, substream, PullbackSample};
use crate::proj::{ProjectivePoint, RationalMapLift};
use crate::roots::{integer_form_roots, FormRoot, DEFAULT_ROOT_TOL};
use crate::sphere::{cap_masses, discrepancy_threshold, max_difference, standard_caps, CPoint};

/// Largest numerator and denominator searched for rational preperiodic points.
pub const SUPPLY_BOX: i64 = 100;

/// Stream offset separating fiber-test draws from measure sampling streams.
const TRIAL_STREAM: u64 = 1 << 40;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DominanceReport {
    /// `dominant[i]`: the projection forgetting axis `i` is dominant.
    pub dominant: Vec<bool>,
    /// Blocks the form actually involves.
    pub blocks: Vec<usize>,
    /// The pair of blocks when `H` involves exactly two.
    pub two_blocks: Option<(usize, usize)>,
}

pub fn dominance_check(h: &Hypersurface) -> DominanceReport {
    let blocks = h.blocks();
    let two_blocks = match blocks[..] {
        [i, j] => Some((i, j)),
        _ => None,
    };
    DominanceReport {
        dominant: (0..h.n()).map(|i| h.depends_on(i)).collect(),
        blocks,
        two_blocks,
    }
}

/// Roots of the fiber of `H` in coordinate `free` over exact values of the
/// others (the entry at `free` is ignored). Rational roots are exact.
pub fn fiber_solve(
    h: &Hypersurface,
    free: usize,
    values: &[ProjectivePoint],
) -> Result<Vec<FormRoot>> {
    let form = h.fiber_form(free, values)?;
    if form.is_zero() {
        return Err(Error::DegenerateFiber);
    }
    integer_form_roots(&form, DEFAULT_ROOT_TOL)
}

/// Rational preperiodic points of `f` with numerator and denominator at most
/// `SUPPLY_BOX`, including `inf` when it is preperiodic.
///
/// A preperiodic point has canonical height 0, hence naive height at most
/// `C/(d-1)`, so only the box `max(|p|, |q|) <= exp(C/(d-1))` can contain any.
pub fn preperiodic_supply(f: &RationalMapLift, caps: &Caps) -> Result<Vec<ProjectivePoint>> {
    let d = f.degree() as f64;
    let reach = (height_step_bound(f)? / (d - 1.0)).exp().floor();
    let bound = if reach >= SUPPLY_BOX as f64 {
        SUPPLY_BOX
    } else {
        reach as i64 + 1
    };
    let mut candidates = vec![ProjectivePoint::infinity()];
    for q in 1..=bound {
        for p in -bound..=bound {
            if num_integer::gcd(p, q) == 1 {
                candidates.push(ProjectivePoint::new(p, q)?);
            }
        }
    }
    let keep: Vec<Option<ProjectivePoint>> = candidates
        .into_par_iter()
        .map(|p| {
            Ok(decide_preperiodic_with(f, &p, caps)?
                .is_preperiodic()
                .then_some(p))
        })
        .collect::<Result<_>>()?;
    Ok(keep.into_iter().flatten().collect())
}

/// A trial whose fiber contains a rational root, with the verdict on it.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FiberWitness {
    /// The full point: the chosen values with the root in the free slot.
    pub point: Vec<ProjectivePoint>,
    pub verdict: PreperiodicityVerdict,
}

/// A non-rational fiber root with its Green function value for the free map.
/// Not a certificate: the other places are not examined.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UncertifiedRoot {
    pub values: Vec<ProjectivePoint>,
    pub root: String,
    pub green_estimate: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FiberTestReport {
    pub free: usize,
    pub trials: usize,
    /// At least one rational root and all rational roots preperiodic.
    pub passes: usize,
    /// Some rational root is certified not preperiodic.
    pub fails: usize,
    /// No rational root in the fiber.
    pub inconclusive: usize,
    /// The fiber form vanished identically.
    pub degenerate: usize,
    /// Every failing point, and a few passing ones.
    pub witnesses: Vec<FiberWitness>,
    pub uncertified: Vec<UncertifiedRoot>,
    /// Coordinates whose map has no rational preperiodic point in the box.
    pub insufficient_supply: Vec<usize>,
}

const KEPT_PASSES: usize = 5;
const KEPT_UNCERTIFIED: usize = 10;

enum Trial {
    Pass(FiberWitness),
    Fail(FiberWitness),
    Inconclusive(Vec<UncertifiedRoot>),
    Degenerate,
}

/// Runs `trials` fiber tests in coordinate `free` over random rational
/// preperiodic values of the other coordinates.
pub fn fiber_preperiodicity_test(
    h: &Hypersurface,
    maps: &[RationalMapLift],
    free: usize,
    trials: usize,
    seed: u64,
    caps: &Caps,
) -> Result<FiberTestReport> {
    check_maps(h, maps)?;
    if free >= h.n() {
        return Err(Error::InvalidInput(format!(
            "coordinate {free} out of range"
        )));
    }
    if !h.depends_on(free) {
        return Err(Error::NotDominant { axis: free });
    }
    let supplies: Vec<Vec<ProjectivePoint>> = (0..h.n())
        .map(|k| {
            if k == free {
                Ok(Vec::new())
            } else {
                preperiodic_supply(&maps[k], caps)
            }
        })
        .collect::<Result<_>>()?;
    let insufficient: Vec<usize> = (0..h.n())
        .filter(|&k| k != free && supplies[k].is_empty())
        .collect();
    let mut report = FiberTestReport {
        free,
        trials,
        passes: 0,
        fails: 0,
        inconclusive: 0,
        degenerate: 0,
        witnesses: Vec::new(),
        uncertified: Vec::new(),
        insufficient_supply: insufficient.clone(),
    };
    if !insufficient.is_empty() {
        return Ok(report);
    }
    let outcomes: Vec<Trial> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = substream(seed, free as u64, TRIAL_STREAM + t as u64);
            let values: Vec<ProjectivePoint> = (0..h.n())
                .map(|k| {
                    if k == free {
                        ProjectivePoint::infinity()
                    } else {
                        supplies[k][rng.gen_range(0..supplies[k].len())].clone()
                    }
                })
                .collect();
            run_trial(h, &maps[free], free, values, caps)
        })
        .collect::<Result<_>>()?;
    for o in outcomes {
        match o {
            Trial::Pass(w) => {
                report.passes += 1;
                if report
                    .witnesses
                    .iter()
                    .filter(|w| w.verdict.is_preperiodic())
                    .count()
                    < KEPT_PASSES
                {
                    report.witnesses.push(w);
                }
            }
            Trial::Fail(w) => {
                report.fails += 1;
                report.witnesses.push(w);
            }
            Trial::Inconclusive(u) => {
                report.inconclusive += 1;
                let room = KEPT_UNCERTIFIED.saturating_sub(report.uncertified.len());
                report.uncertified.extend(u.into_iter().take(room));
            }
            Trial::Degenerate => report.degenerate += 1,
        }
    }
    Ok(report)
}

fn run_trial(
    h: &Hypersurface,
    f: &RationalMapLift,
    free: usize,
    values: Vec<ProjectivePoint>,
    caps: &Caps,
) -> Result<Trial> {
    let roots = match fiber_solve(h, free, &values) {
        Ok(r) => r,
        Err(Error::DegenerateFiber) => return Ok(Trial::Degenerate),
        Err(e) => return Err(e),
    };
    let mut pass = None;
    let mut uncertified = Vec::new();
    for r in roots {
        match r.exact {
            Some((x, y)) => {
                let root = ProjectivePoint::new(x, y)?;
                let verdict = decide_preperiodic_with(f, &root, caps)?;
                let mut point = values.clone();
                point[free] = root;
                let w = FiberWitness { point, verdict };
                if !w.verdict.is_preperiodic() {
                    return Ok(Trial::Fail(w));
                }
                pass.get_or_insert(w);
            }
            None => {
                let green_estimate = match r.point {
                    CPoint::Finite(z) => green(f, z, 40)?.value,
                    CPoint::Infinity => f64::NAN,
                };
                uncertified.push(UncertifiedRoot {
                    values: values.clone(),
                    root: r.point.affine_csv(),
                    green_estimate,
                });
            }
        }
    }
    Ok(match pass {
        Some(w) => Trial::Pass(w),
        None => Trial::Inconclusive(uncertified),
    })
}

fn check_maps(h: &Hypersurface, maps: &[RationalMapLift]) -> Result<()> {
    if maps.len() != h.n() {
        return Err(Error::InvalidInput(format!(
            "{} maps given for a hypersurface in {} coordinates",
            maps.len(),
            h.n()
        )));
    }
    Ok(())
}

/// Restricts a comparison to sample points whose `coordinate` lies within
/// chordal distance `radius` of `center`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Slice {
    pub coordinate: usize,
    pub center: CPoint,
    pub radius: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MeasureComparison {
    pub i: usize,
    pub j: usize,
    /// Largest cap discrepancy over all compared coordinates.
    pub statistic: f64,
    /// Heuristic CLT threshold for the smaller of the two sample sizes.
    pub threshold: f64,
    pub per_coordinate: Vec<Option<f64>>,
    /// Sample sizes after discarding degenerate fibers and slicing.
    pub sizes: (usize, usize),
    pub slice: Option<Slice>,
}

impl MeasureComparison {
    /// `statistic < threshold`. Evidence only, never a proof.
    pub fn consistent(&self) -> bool {
        self.statistic < self.threshold
    }
}

/// Cap discrepancy between the pullbacks of the product measures for free
/// axes `i` and `j`. Symmetric in `(i, j)`: both samples use the same seed.
#[allow(clippy::too_many_arguments)]
pub fn measure_compare(
    h: &Hypersurface,
    maps: &[RationalMapLift],
    i: usize,
    j: usize,
    n: usize,
    depth: usize,
    seed: u64,
    slice: Option<Slice>,
) -> Result<MeasureComparison> {
    check_maps(h, maps)?;
    if let Some(s) = &slice {
        if s.coordinate >= h.n() {
            return Err(Error::InvalidInput(format!(
                "slice coordinate {} out of range",
                s.coordinate
            )));
        }
    }
    let si = pullback_to_hypersurface(h, maps, i, n, depth, seed)?;
    let sj = pullback_to_hypersurface(h, maps, j, n, depth, seed)?;
    let keep = |s: &PullbackSample| -> Vec<Vec<CPoint>> {
        s.points
            .iter()
            .filter(|p| {
                slice
                    .as_ref()
                    .is_none_or(|sl| p[sl.coordinate].distance(&sl.center) <= sl.radius)
            })
            .cloned()
            .collect()
    };
    let (pi, pj) = (keep(&si), keep(&sj));
    let caps = standard_caps();
    let per_coordinate: Vec<Option<f64>> = (0..h.n())
        .map(|k| {
            if slice.as_ref().is_some_and(|s| s.coordinate == k) || pi.is_empty() || pj.is_empty() {
                return None;
            }
            let a = cap_masses(&caps, pi.iter().map(|p| &p[k]));
            let b = cap_masses(&caps, pj.iter().map(|p| &p[k]));
            Some(max_difference(&a, &b))
        })
        .collect();
    let statistic = per_coordinate
        .iter()
        .flatten()
        .fold(0.0, |m: f64, &x| m.max(x));
    let smaller = pi.len().min(pj.len());
    Ok(MeasureComparison {
        i,
        j,
        statistic: if smaller == 0 { f64::NAN } else { statistic },
        threshold: if smaller == 0 {
            f64::NAN
        } else {
            discrepancy_threshold(smaller)
        },
        per_coordinate,
        sizes: (pi.len(), pj.len()),
        slice,
    })
}

/// Smallest `(l_i, l_j)` in lexicographic order with `1 <= l <= bound` and
/// `d_i^l_i = d_j^l_j`.
pub fn common_iterate_exponents(di: usize, dj: usize, bound: u32) -> Option<(u32, u32)> {
    (1..=bound)
        .flat_map(|a| (1..=bound).map(move |b| (a, b)))
        .find(|&(a, b)| {
            let (x, y) = (BigInt::from(di).pow(a), BigInt::from(dj).pow(b));
            x == y
        })
}

/// Exact certificate that `H = pi_{ij}^{-1}(C)` is preperiodic.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MsCertificate {
    pub pair: (usize, usize),
    pub exponents: (u32, u32),
    pub curve: Curve2,
    pub tail: usize,
    pub period: usize,
    /// Bidegrees of the curve orbit up to the repetition.
    pub bidegrees: Vec<(usize, usize)>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MsFormResult {
    pub certificate: Option<MsCertificate>,
    /// Why no certificate was produced.
    pub reason: Option<String>,
}

impl MsFormResult {
    fn none(reason: String) -> Self {
        MsFormResult {
            certificate: None,
            reason: Some(reason),
        }
    }
}

/// Looks for the two-block shape and certifies it by an exact curve orbit
/// under `(f_i^l_i, f_j^l_j)`.
pub fn ms_form_check(
    h: &Hypersurface,
    maps: &[RationalMapLift],
    bound: u32,
    max_iter: usize,
    caps: &Caps,
) -> Result<MsFormResult> {
    check_maps(h, maps)?;
    let Some((i, j)) = dominance_check(h).two_blocks else {
        return Ok(MsFormResult::none(format!(
            "depends on {} blocks",
            h.blocks().len()
        )));
    };
    let (di, dj) = (maps[i].degree(), maps[j].degree());
    let Some((li, lj)) = common_iterate_exponents(di, dj, bound) else {
        return Ok(MsFormResult::none(format!(
            "no iterates of degrees {di} and {dj} with equal degree within exponent bound {bound}"
        )));
    };
    let curve = Curve2::from_hypersurface(h, i, j)?;
    let fi = maps[i].iterate(li as usize, caps)?;
    let fj = maps[j].iterate(lj as usize, caps)?;
    let orbit = curve_orbit(&curve, &fi, &fj, max_iter, caps)?;
    let bidegrees = orbit.bidegrees();
    Ok(match orbit.outcome {
        CurveOrbitOutcome::Preperiodic { tail, period } => MsFormResult {
            certificate: Some(MsCertificate {
                pair: (i, j),
                exponents: (li, lj),
                curve,
                tail,
                period,
                bidegrees,
            }),
            reason: None,
        },
        CurveOrbitOutcome::NotDetected { reason } => {
            MsFormResult::none(format!("curve orbit: {reason}; bidegrees {bidegrees:?}"))
        }
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MmConfig {
    /// Fiber test trials per free axis.
    pub trials: usize,
    /// Measure samples per pullback.
    pub samples: usize,
    pub depth: usize,
    pub seed: u64,
    pub max_orbit: usize,
    pub tol: f64,
    /// Exponent bound for the common-iterate search.
    pub exponent_bound: u32,
    pub curve_max_iter: usize,
    pub caps: Caps,
}

impl Default for MmConfig {
    fn default() -> Self {
        MmConfig {
            trials: 100,
            samples: 10_000,
            depth: 30,
            seed: 7,
            max_orbit: DEFAULT_MAX_ORBIT,
            tol: DEFAULT_COLLISION_TOL,
            exponent_bound: 6,
            curve_max_iter: 5,
            caps: Caps::default(),
        }
    }
}

/// Classification of one map, or the reason it could not be decided.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum MapClassification {
    Decided(Classification),
    Inconclusive { reason: String },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MMReport {
    pub dominance: DominanceReport,
    pub classifications: Vec<MapClassification>,
    pub fiber_tests: Vec<FiberTestReport>,
    pub measure_tests: Vec<MeasureComparison>,
    /// `discrepancy[i][j]`, `None` off the dominant axes and on the diagonal.
    pub discrepancy: Vec<Vec<Option<f64>>>,
    pub ms_form: MsFormResult,
    /// Each failed necessary condition with its witness or statistic.
    pub failed_conditions: Vec<String>,
    pub verdict: String,
}

/// Runs every check on `H` and assembles the report.
pub fn mm_verify(
    h: &Hypersurface,
    maps: &[RationalMapLift],
    config: &MmConfig,
) -> Result<MMReport> {
    check_maps(h, maps)?;
    let dominance = dominance_check(h);
    let axes: Vec<usize> = (0..h.n()).filter(|&i| dominance.dominant[i]).collect();

    let classifications: Vec<MapClassification> = maps
        .iter()
        .map(
            |f| match classify_with(f, config.max_orbit, config.tol, &config.caps) {
                Ok(c) => Ok(MapClassification::Decided(c)),
                Err(Error::Inconclusive(reason)) => Ok(MapClassification::Inconclusive { reason }),
                Err(e) => Err(e),
            },
        )
        .collect::<Result<_>>()?;

    let mut failed = Vec::new();
    let mut fiber_tests = Vec::new();
    for &i in &axes {
        let t = fiber_preperiodicity_test(h, maps, i, config.trials, config.seed, &config.caps)?;
        if let Some(w) = t.witnesses.iter().find(|w| !w.verdict.is_preperiodic()) {
            let pt: Vec<String> = w.point.iter().map(ToString::to_string).collect();
            failed.push(format!(
                "fiber preperiodicity (free axis {i}): {} of {} trials failed, e.g. ({}) has a coordinate that is not preperiodic",
                t.fails,
                t.trials,
                pt.join(", ")
            ));
        }
        fiber_tests.push(t);
    }

    let mut measure_tests = Vec::new();
    let mut discrepancy = vec![vec![None; h.n()]; h.n()];
    for (a, &i) in axes.iter().enumerate() {
        for &j in &axes[a + 1..] {
            let m = measure_compare(
                h,
                maps,
                i,
                j,
                config.samples,
                config.depth,
                config.seed,
                None,
            )?;
            discrepancy[i][j] = Some(m.statistic);
            discrepancy[j][i] = Some(m.statistic);
            if !m.consistent() {
                failed.push(format!(
                    "equal pullback measures (axes {i}, {j}): D = {:.4} >= tau = {:.4}",
                    m.statistic, m.threshold
                ));
            }
            measure_tests.push(m);
        }
    }

    let ms_form = ms_form_check(
        h,
        maps,
        config.exponent_bound,
        config.curve_max_iter,
        &config.caps,
    )?;
    let all_non_exceptional = classifications.iter().all(
        |c| matches!(c, MapClassification::Decided(c) if c.verdict == Verdict::NonExceptional),
    );
    if all_non_exceptional && ms_form.certificate.is_none() {
        failed.push(format!(
            "two-coordinate shape required for non-exceptional maps: {}",
            ms_form.reason.as_deref().unwrap_or("no certificate")
        ));
    }

    let verdict = if let Some(c) = &ms_form.certificate {
        if failed.is_empty() {
            format!(
                "preperiodic: H is the preimage of a curve in coordinates {:?} with curve orbit tail {} and period {}",
                c.pair, c.tail, c.period
            )
        } else {
            format!(
                "certificate found for coordinates {:?} but {} statistical check(s) disagree",
                c.pair,
                failed.len()
            )
        }
    } else if failed.is_empty() {
        "all necessary conditions hold; no certificate of preperiodicity".to_string()
    } else if fiber_tests.iter().any(|t| t.fails > 0) {
        format!(
            "not preperiodic: a certified fiber witness rules out a dense set of preperiodic points ({} failed condition(s))",
            failed.len()
        )
    } else {
        format!(
            "evidence against preperiodicity: {} failed necessary condition(s)",
            failed.len()
        )
    };

    Ok(MMReport {
        dominance,
        classifications,
        fiber_tests,
        measure_tests,
        discrepancy,
        ms_form,
        failed_conditions: failed,
        verdict,
    })
}

/// Integer `(exponents, coefficient)` pairs as input for `Hypersurface::new`.
pub fn rational_terms(terms: &[(Vec<usize>, i64)]) -> Vec<(Vec<usize>, BigRational)> {
    terms
        .iter()
        .map(|(e, c)| (e.clone(), BigRational::from_integer(BigInt::from(*c))))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quad(c: i64) -> RationalMapLift {
        RationalMapLift::from_i64(&[c, 0, 1], &[1, 0, 0]).unwrap()
    }

    fn hyp(md: Vec<usize>, terms: &[(Vec<usize>, i64)]) -> Hypersurface {
        Hypersurface::new(md, rational_terms(terms)).unwrap()
    }

    fn plane() -> Hypersurface {
        hyp(
            vec![1, 1, 1],
            &[(vec![1, 0, 0], 1), (vec![0, 1, 0], 1), (vec![0, 0, 1], 1)],
        )
    }

    fn graph_sq() -> Hypersurface {
        hyp(vec![2, 1], &[(vec![0, 1], 1), (vec![2, 0], -1)])
    }

    fn shifted() -> Hypersurface {
        hyp(
            vec![1, 1],
            &[(vec![0, 1], 1), (vec![1, 0], -1), (vec![0, 0], -1)],
        )
    }

    fn q(n: i64) -> ProjectivePoint {
        ProjectivePoint::from_integer(n)
    }

    #[test]
    fn dominance_examples() {
        let d = dominance_check(&Hypersurface::diagonal(2, 0, 1).unwrap());
        assert_eq!(d.dominant, vec![true, true]);
        assert_eq!(d.two_blocks, Some((0, 1)));
        let cyl = hyp(vec![0, 1, 1], &[(vec![0, 1, 0], 1), (vec![0, 0, 1], -1)]);
        assert_eq!(dominance_check(&cyl).dominant, vec![false, true, true]);
        let p = dominance_check(&plane());
        assert_eq!(p.dominant, vec![true, true, true]);
        assert_eq!(p.two_blocks, None);
    }

    #[test]
    fn fiber_solve_examples() {
        let r = fiber_solve(&plane(), 2, &[q(1), q(2), q(0)]).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].exact, Some((BigInt::from(-3), BigInt::from(1))));
        let r = fiber_solve(&graph_sq(), 1, &[q(3), q(0)]).unwrap();
        assert_eq!(r[0].exact, Some((BigInt::from(9), BigInt::from(1))));
        let r = fiber_solve(&graph_sq(), 0, &[q(0), q(2)]).unwrap();
        assert_eq!(r.len(), 2);
        assert!(r.iter().all(|x| x.exact.is_none()));
        let mut xs: Vec<f64> = r.iter().map(|x| x.point.finite().unwrap().re).collect();
        xs.sort_by(f64::total_cmp);
        assert!((xs[0] + 2f64.sqrt()).abs() < 1e-12 && (xs[1] - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn supply_of_basic_maps() {
        let mut s: Vec<String> = preperiodic_supply(&quad(0), &Caps::default())
            .unwrap()
            .iter()
            .map(ToString::to_string)
            .collect();
        s.sort();
        assert_eq!(s, vec!["-1", "0", "1", "inf"]);
        assert_eq!(
            preperiodic_supply(&quad(-1), &Caps::default())
                .unwrap()
                .len(),
            4
        );
    }

    #[test]
    fn fiber_test_examples() {
        let caps = Caps::default();
        let diag = Hypersurface::diagonal(2, 0, 1).unwrap();
        let t = fiber_preperiodicity_test(&diag, &[quad(-1), quad(-1)], 1, 30, 3, &caps).unwrap();
        assert_eq!((t.passes, t.fails), (30, 0));
        let t =
            fiber_preperiodicity_test(&graph_sq(), &[quad(0), quad(0)], 1, 100, 3, &caps).unwrap();
        assert_eq!(t.passes, 100);
        let t =
            fiber_preperiodicity_test(&shifted(), &[quad(0), quad(0)], 1, 100, 3, &caps).unwrap();
        assert!(t.fails > 0);
        let w = t
            .witnesses
            .iter()
            .find(|w| !w.verdict.is_preperiodic())
            .unwrap();
        assert!(shifted()
            .fiber_form(1, &w.point)
            .unwrap()
            .coeffs()
            .iter()
            .any(|c| *c != BigInt::from(0)));
    }

    #[test]
    fn measure_compare_is_symmetric() {
        let diag = Hypersurface::diagonal(2, 0, 1).unwrap();
        let maps = [quad(0), quad(-1)];
        let a = measure_compare(&diag, &maps, 0, 1, 2000, 20, 5, None).unwrap();
        let b = measure_compare(&diag, &maps, 1, 0, 2000, 20, 5, None).unwrap();
        assert_eq!(a.statistic, b.statistic);
        assert!(!a.consistent());
        let same = measure_compare(&diag, &[quad(0), quad(0)], 0, 1, 2000, 20, 5, None).unwrap();
        assert!(same.consistent());
    }

    #[test]
    fn sliced_comparison_keeps_nearby_points() {
        let m = measure_compare(
            &plane(),
            &[quad(0), quad(0), quad(0)],
            0,
            1,
            4000,
            20,
            1,
            Some(Slice {
                coordinate: 2,
                center: CPoint::real(-1.0),
                radius: 0.5,
            }),
        )
        .unwrap();
        assert!(m.sizes.0 > 0 && m.sizes.1 > 0);
        assert_eq!(m.per_coordinate[2], None);
    }

    #[test]
    fn exponent_search() {
        assert_eq!(common_iterate_exponents(2, 4, 6), Some((2, 1)));
        assert_eq!(common_iterate_exponents(4, 8, 6), Some((3, 2)));
        assert_eq!(common_iterate_exponents(2, 3, 6), None);
        assert_eq!(common_iterate_exponents(3, 3, 6), Some((1, 1)));
    }

    #[test]
    fn ms_form_examples() {
        let caps = Caps::default();
        let h = Hypersurface::diagonal(3, 0, 1).unwrap();
        let r = ms_form_check(&h, &[quad(0), quad(0), quad(-1)], 6, 5, &caps).unwrap();
        let c = r.certificate.unwrap();
        assert_eq!(
            (c.pair, c.exponents, c.tail, c.period),
            ((0, 1), (1, 1), 0, 1)
        );
        assert_eq!(c.curve, Curve2::diagonal());
        let r = ms_form_check(&plane(), &[quad(0), quad(0), quad(-1)], 6, 5, &caps).unwrap();
        assert_eq!(r.reason.as_deref(), Some("depends on 3 blocks"));
    }

    #[test]
    fn mm_verify_examples() {
        let config = MmConfig {
            samples: 3000,
            ..MmConfig::default()
        };
        let diag = Hypersurface::diagonal(2, 0, 1).unwrap();
        let r = mm_verify(&diag, &[quad(0), quad(0)], &config).unwrap();
        assert!(r.failed_conditions.is_empty(), "{:?}", r.failed_conditions);
        assert!(r.ms_form.certificate.is_some());
        let r = mm_verify(&diag, &[quad(0), quad(-1)], &config).unwrap();
        assert!(r
            .failed_conditions
            .iter()
            .any(|f| f.starts_with("equal pullback")));
        let r = mm_verify(&shifted(), &[quad(0), quad(0)], &config).unwrap();
        assert!(r.fiber_tests.iter().any(|t| t.fails > 0));
        assert!(r.verdict.starts_with("not preperiodic"));
    }
}
