//! `dynamo`: command-line access to the dynamo-core routines.

mod output;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dynamo_core::curve::curve_orbit;
use dynamo_core::exceptional::{
    chebyshev, chebyshev_identity_holds, classify_with, format_signature, power_map,
};
use dynamo_core::harness::{measure_compare, ms_form_check, Slice};
use dynamo_core::heights::{
    canonical_height_functoriality_check, canonical_height_with, decide_preperiodic_with,
    product_formula, weil_height, CanonicalHeightResult,
};
use dynamo_core::measure::sample_invariant_measure;
use dynamo_core::orbits::{orbit_record_with, periodic_points_with, OrbitOutcome};
use dynamo_core::proj::parse_rational;
use dynamo_core::{
    mm_verify, Caps, Curve2, CurveOrbitOutcome, Error, Hypersurface, MmConfig,
    PreperiodicityVerdict, ProjectivePoint, RationalMapLift,
};
use num_traits::One;
use serde::Serialize;
use serde_json::json;

use output::{to_value, Output};

#[derive(Parser, Debug)]
#[command(
    name = "dynamo",
    version,
    about = "Arithmetic dynamics of split maps on (P^1)^n over Q"
)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// Seed for every random stream.
    #[arg(long, global = true, default_value_t = 7)]
    seed: u64,
    /// Sample size for measure sampling.
    #[arg(long, global = true, default_value_t = 10_000)]
    samples: usize,
    /// Backward-orbit depth for measure sampling.
    #[arg(long, global = true, default_value_t = 30)]
    depth: usize,
    /// Target error radius for canonical heights.
    #[arg(long, global = true, default_value_t = 1e-9)]
    err: f64,
    /// Numerical tolerance for root collisions and cycle classification.
    #[arg(long, global = true, default_value_t = 1e-8)]
    tol: f64,
    /// Iteration limit; the default depends on the command.
    #[arg(long, global = true)]
    max_iter: Option<usize>,
    /// Largest admissible integer, in decimal digits.
    #[arg(long, global = true, default_value_t = Caps::default().coefficient_digits)]
    max_digits: usize,
    /// Largest admissible d^n for periodic points.
    #[arg(long, global = true, default_value_t = Caps::default().periodic_degree)]
    max_periodic_degree: u64,
    /// Largest admissible block degree of a pushed-forward curve.
    #[arg(long, global = true, default_value_t = Caps::default().curve_degree)]
    max_curve_degree: usize,
    /// Emit JSON instead of CSV.
    #[arg(long, global = true)]
    json: bool,
}

#[derive(Args, Debug)]
struct MapPoint {
    /// Map JSON file: {"num": [...], "den": [...]}.
    #[arg(long)]
    map: PathBuf,
    /// Point as "p/q", an integer, or "inf".
    #[arg(long, allow_hyphen_values = true)]
    point: String,
}

#[derive(Args, Debug)]
struct HypMaps {
    /// Hypersurface JSON file.
    #[arg(long)]
    hyp: PathBuf,
    /// One map JSON file per coordinate, in order.
    #[arg(long = "map", alias = "maps", num_args = 1.., required = true)]
    maps: Vec<PathBuf>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
enum Chart {
    Plane,
    Sphere,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Certified canonical height of a rational point.
    Height(MapPoint),
    /// Decide whether a rational point is preperiodic.
    Preper(MapPoint),
    /// Exact forward orbit of a rational point.
    Orbit(MapPoint),
    /// Numerical cycles of exact period dividing n.
    Periodic {
        #[arg(long)]
        map: PathBuf,
        #[arg(long)]
        period: usize,
        /// Keep only cycles with multiplier of modulus above 1 + tol.
        #[arg(long)]
        repelling_only: bool,
    },
    /// Power, Chebyshev, Lattes or non-exceptional.
    Classify {
        #[arg(long)]
        map: PathBuf,
    },
    /// Sample the measure of maximal entropy by backward iteration.
    SampleMeasure {
        #[arg(long)]
        map: PathBuf,
        /// Sample size; overrides --samples.
        #[arg(long = "n")]
        n: Option<usize>,
        #[arg(long, value_enum, default_value_t = Chart::Plane)]
        chart: Chart,
    },
    /// Cap discrepancy between two pulled-back product measures on a hypersurface.
    CompareMeasures {
        #[command(flatten)]
        input: HypMaps,
        #[arg(long)]
        i: usize,
        #[arg(long)]
        j: usize,
        /// Restrict to samples whose coordinate k is near --slice-center.
        #[arg(long, requires_all = ["slice_center", "slice_radius"])]
        slice_coordinate: Option<usize>,
        #[arg(long, allow_hyphen_values = true)]
        slice_center: Option<String>,
        #[arg(long)]
        slice_radius: Option<f64>,
    },
    /// Exact orbit of a curve in P^1 x P^1 under (f, g).
    CurveOrbit {
        /// Curve as a hypersurface JSON file with n = 2.
        #[arg(long)]
        curve: PathBuf,
        /// Exactly two map files, for the two factors.
        #[arg(long = "map", alias = "maps", num_args = 1.., required = true)]
        maps: Vec<PathBuf>,
    },
    /// Look for a preperiodic-curve certificate of two-block shape.
    MsCheck {
        #[command(flatten)]
        input: HypMaps,
        #[arg(long, default_value_t = 6)]
        exponent_bound: u32,
    },
    /// Run every necessary-condition check on a hypersurface.
    MmVerify {
        #[command(flatten)]
        input: HypMaps,
        /// Fiber trials per free axis.
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 6)]
        exponent_bound: u32,
    },
    /// Product formula, functoriality and Chebyshev identity suites.
    SelfTest,
}

/// Every setting that can influence the output, recorded in each header.
#[derive(Debug, Clone, Serialize)]
struct RunConfig {
    seed: u64,
    samples: usize,
    depth: usize,
    err: f64,
    tol: f64,
    max_iter: Option<usize>,
    caps: Caps,
    output: &'static str,
}

impl RunConfig {
    fn from_common(c: &Common) -> Self {
        RunConfig {
            seed: c.seed,
            samples: c.samples,
            depth: c.depth,
            err: c.err,
            tol: c.tol,
            max_iter: c.max_iter,
            caps: Caps {
                coefficient_digits: c.max_digits,
                periodic_degree: c.max_periodic_degree,
                curve_degree: c.max_curve_degree,
            },
            output: if c.json { "json" } else { "csv" },
        }
    }
}

#[derive(Debug)]
enum CliError {
    User(String),
    Computation(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Overflow { .. } => {
                CliError::Computation(format!("{e}; raise --max-digits or loosen --err"))
            }
            e if e.is_user_error() => CliError::User(e.to_string()),
            e => CliError::Computation(e.to_string()),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(text) => {
            let mut out = std::io::stdout().lock();
            if out
                .write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .is_err()
            {
                return ExitCode::from(2);
            }
            ExitCode::SUCCESS
        }
        Err(CliError::User(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Computation(msg)) => {
            eprintln!("computation failed: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> CliResult<String> {
    configure_threads()?;
    validate(&cli.common)?;
    let config = RunConfig::from_common(&cli.common);
    let out = dispatch(&cli.command, &config)?;
    Ok(if cli.common.json {
        out.render_json(&config)
    } else {
        out.render_csv(&config)
    })
}

fn configure_threads() -> CliResult<()> {
    let Ok(value) = std::env::var("DYNAMO_THREADS") else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| {
            CliError::User(format!(
                "DYNAMO_THREADS must be a positive integer, got {value:?}"
            ))
        })?;
    // a pool may already exist when called twice in one process; keep it
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global();
    Ok(())
}

fn validate(c: &Common) -> CliResult<()> {
    if !(c.err > 0.0 && c.err.is_finite()) {
        return Err(CliError::User(format!(
            "--err must be positive, got {}",
            c.err
        )));
    }
    if !(c.tol > 0.0 && c.tol.is_finite()) {
        return Err(CliError::User(format!(
            "--tol must be positive, got {}",
            c.tol
        )));
    }
    if c.samples == 0 || c.depth == 0 {
        return Err(CliError::User(
            "--samples and --depth must be at least 1".into(),
        ));
    }
    Ok(())
}

fn read_file(path: &Path) -> CliResult<String> {
    fs::read_to_string(path)
        .map_err(|e| CliError::User(format!("cannot read {}: {e}", path.display())))
}

fn load_map(path: &Path) -> CliResult<RationalMapLift> {
    RationalMapLift::from_json_str(&read_file(path)?)
        .map_err(|e| CliError::User(format!("{}: {e}", path.display())))
}

fn load_maps(paths: &[PathBuf]) -> CliResult<Vec<RationalMapLift>> {
    paths.iter().map(|p| load_map(p)).collect()
}

fn load_hypersurface(path: &Path) -> CliResult<Hypersurface> {
    Hypersurface::from_json_str(&read_file(path)?)
        .map_err(|e| CliError::User(format!("{}: {e}", path.display())))
}

fn parse_point(s: &str) -> CliResult<ProjectivePoint> {
    s.parse::<ProjectivePoint>().map_err(|e| {
        CliError::User(format!(
            "bad point {s:?} (expected \"p/q\", an integer or \"inf\"): {e}"
        ))
    })
}

fn dispatch(cmd: &Command, cfg: &RunConfig) -> CliResult<Output> {
    match cmd {
        Command::Height(a) => height(a, cfg),
        Command::Preper(a) => preper(a, cfg),
        Command::Orbit(a) => orbit(a, cfg),
        Command::Periodic {
            map,
            period,
            repelling_only,
        } => periodic(map, *period, *repelling_only, cfg),
        Command::Classify { map } => classify_cmd(map, cfg),
        Command::SampleMeasure { map, n, chart } => {
            sample_measure(map, n.unwrap_or(cfg.samples), *chart, cfg)
        }
        Command::CompareMeasures {
            input,
            i,
            j,
            slice_coordinate,
            slice_center,
            slice_radius,
        } => {
            let slice = match (slice_coordinate, slice_center, slice_radius) {
                (Some(k), Some(c), Some(r)) => Some(Slice {
                    coordinate: *k,
                    center: parse_point(c)?.to_cpoint(),
                    radius: *r,
                }),
                (None, None, None) => None,
                _ => {
                    return Err(CliError::User(
                        "--slice-coordinate, --slice-center and --slice-radius go together".into(),
                    ))
                }
            };
            compare_measures(input, *i, *j, slice, cfg)
        }
        Command::CurveOrbit { curve, maps } => curve_orbit_cmd(curve, maps, cfg),
        Command::MsCheck {
            input,
            exponent_bound,
        } => ms_check(input, *exponent_bound, cfg),
        Command::MmVerify {
            input,
            trials,
            exponent_bound,
        } => mm_verify_cmd(input, *trials, *exponent_bound, cfg),
        Command::SelfTest => self_test(),
    }
}

fn height(a: &MapPoint, cfg: &RunConfig) -> CliResult<Output> {
    let f = load_map(&a.map)?;
    let p = parse_point(&a.point)?;
    let h: CanonicalHeightResult = canonical_height_with(&f, &p, cfg.err, &cfg.caps)?;
    let mut out = Output::new(
        "height",
        json!({
            "point": p.to_string(),
            "value": h.value,
            "error_radius": h.error_radius,
            "iterations": h.iterations,
            "height_step_bound": h.height_step_bound,
            "preperiodic": h.preperiodic,
            "places": to_value(&h.places),
        }),
        vec![
            "point",
            "value",
            "error_radius",
            "iterations",
            "height_step_bound",
            "preperiodic",
        ],
    );
    out.row(vec![
        p.to_string(),
        h.value.to_string(),
        h.error_radius.to_string(),
        h.iterations.to_string(),
        h.height_step_bound.to_string(),
        h.preperiodic.to_string(),
    ]);
    Ok(out)
}

fn preper(a: &MapPoint, cfg: &RunConfig) -> CliResult<Output> {
    let f = load_map(&a.map)?;
    let p = parse_point(&a.point)?;
    let v = decide_preperiodic_with(&f, &p, &cfg.caps)?;
    let mut out = Output::new(
        "preper",
        to_value(&v),
        vec![
            "point",
            "status",
            "tail",
            "period",
            "lower_bound",
            "iterations",
        ],
    );
    let row = match v {
        PreperiodicityVerdict::Preperiodic { tail, period } => [
            p.to_string(),
            "preperiodic".into(),
            tail.to_string(),
            period.to_string(),
            String::new(),
            String::new(),
        ],
        PreperiodicityVerdict::NotPreperiodic {
            lower_bound,
            iterations,
        } => [
            p.to_string(),
            "not_preperiodic".into(),
            String::new(),
            String::new(),
            lower_bound.to_string(),
            iterations.to_string(),
        ],
    };
    out.row(row.to_vec());
    Ok(out)
}

const ORBIT_STEPS: usize = 10;

fn orbit(a: &MapPoint, cfg: &RunConfig) -> CliResult<Output> {
    let f = load_map(&a.map)?;
    let p = parse_point(&a.point)?;
    let steps = cfg.max_iter.unwrap_or(ORBIT_STEPS);
    let mut points = vec![p.clone()];
    let mut truncated = None;
    for _ in 0..steps {
        let next = f.evaluate(points.last().expect("orbit starts non-empty"));
        if let Err(e) = cfg.caps.check_bits(next.bits()) {
            truncated = Some(e.to_string());
            break;
        }
        points.push(next);
    }
    let outcome = orbit_record_with(&f, &p, &cfg.caps)?;
    let mut out = Output::new(
        "orbit",
        json!({
            "points": points.iter().map(|q| q.to_string()).collect::<Vec<_>>(),
            "truncated": truncated,
            "outcome": to_value(&outcome),
        }),
        vec!["step", "point", "weil_height"],
    );
    for (k, q) in points.iter().enumerate() {
        out.row(vec![
            k.to_string(),
            q.to_string(),
            weil_height(q).to_string(),
        ]);
    }
    let summary = match outcome {
        OrbitOutcome::Preperiodic(r) => format!("preperiodic tail={} period={}", r.tail, r.period),
        OrbitOutcome::Divergent { lower_bound, .. } => {
            format!("infinite orbit; height >= {lower_bound}")
        }
    };
    out.row(vec!["outcome".into(), summary, String::new()]);
    Ok(out)
}

fn periodic(map: &Path, period: usize, repelling_only: bool, cfg: &RunConfig) -> CliResult<Output> {
    if period == 0 {
        return Err(CliError::User("--period must be at least 1".into()));
    }
    let f = load_map(map)?;
    let cycles: Vec<_> = periodic_points_with(&f, period, cfg.tol, &cfg.caps)?
        .into_iter()
        .filter(|c| !repelling_only || c.is_repelling(cfg.tol))
        .collect();
    let mut out = Output::new(
        "periodic",
        to_value(&cycles),
        vec![
            "period",
            "re",
            "im",
            "multiplier_re",
            "multiplier_im",
            "multiplier_abs",
        ],
    );
    for c in &cycles {
        for p in &c.points {
            let (re, im) = p
                .affine_csv()
                .split_once(',')
                .map(|(a, b)| (a.to_string(), b.to_string()))
                .unwrap();
            out.row(vec![
                c.period.to_string(),
                re,
                im,
                format!("{:.12}", c.multiplier.re),
                format!("{:.12}", c.multiplier.im),
                format!("{:.12}", c.multiplier.norm()),
            ]);
        }
    }
    Ok(out)
}

fn classify_cmd(map: &Path, cfg: &RunConfig) -> CliResult<Output> {
    let f = load_map(map)?;
    let max_orbit = cfg
        .max_iter
        .unwrap_or(dynamo_core::exceptional::DEFAULT_MAX_ORBIT);
    let c = classify_with(&f, max_orbit, cfg.tol, &cfg.caps)?;
    let signature = c
        .signature
        .as_deref()
        .map(format_signature)
        .unwrap_or_default();
    let mut out = Output::new(
        "classify",
        json!({
            "verdict": c.verdict.to_string(),
            "signature": c.signature.as_ref().map(to_value),
            "pcf": c.pcf,
            "exact": c.exact,
            "witness": c.witness.as_ref().map(to_value),
        }),
        vec!["verdict", "signature", "pcf", "exact"],
    );
    out.row(vec![
        c.verdict.to_string(),
        signature,
        c.pcf.to_string(),
        c.exact.to_string(),
    ]);
    Ok(out)
}

fn sample_measure(map: &Path, n: usize, chart: Chart, cfg: &RunConfig) -> CliResult<Output> {
    let f = load_map(map)?;
    let m = sample_invariant_measure(&f, n, cfg.depth, cfg.seed)?;
    let header = match chart {
        Chart::Plane => vec!["re", "im"],
        Chart::Sphere => vec!["x", "y", "z"],
    };
    let json = match chart {
        Chart::Plane => to_value(&m.points),
        Chart::Sphere => to_value(&m.points.iter().map(|p| p.to_sphere()).collect::<Vec<_>>()),
    };
    let mut out = Output::new(
        "sample-measure",
        json!({ "chart": chart, "points": json }),
        header,
    );
    for p in &m.points {
        let line = match chart {
            Chart::Plane => p.affine_csv(),
            Chart::Sphere => p.sphere_csv(),
        };
        out.row(line.split(',').map(str::to_string).collect());
    }
    Ok(out)
}

fn compare_measures(
    input: &HypMaps,
    i: usize,
    j: usize,
    slice: Option<Slice>,
    cfg: &RunConfig,
) -> CliResult<Output> {
    let h = load_hypersurface(&input.hyp)?;
    let maps = load_maps(&input.maps)?;
    let r = measure_compare(&h, &maps, i, j, cfg.samples, cfg.depth, cfg.seed, slice)?;
    let mut out = Output::new(
        "compare-measures",
        json!({
            "i": r.i,
            "j": r.j,
            "statistic": r.statistic,
            "threshold": r.threshold,
            "consistent": r.consistent(),
            "per_coordinate": r.per_coordinate,
            "sizes": r.sizes,
            "slice": r.slice.as_ref().map(to_value),
        }),
        vec![
            "i",
            "j",
            "statistic",
            "threshold",
            "consistent",
            "size_i",
            "size_j",
        ],
    );
    out.row(vec![
        r.i.to_string(),
        r.j.to_string(),
        r.statistic.to_string(),
        r.threshold.to_string(),
        r.consistent().to_string(),
        r.sizes.0.to_string(),
        r.sizes.1.to_string(),
    ]);
    Ok(out)
}

const CURVE_STEPS: usize = 5;

fn curve_orbit_cmd(curve: &Path, maps: &[PathBuf], cfg: &RunConfig) -> CliResult<Output> {
    if maps.len() != 2 {
        return Err(CliError::User(format!(
            "curve-orbit takes exactly two maps, got {}",
            maps.len()
        )));
    }
    let h = load_hypersurface(curve)?;
    if h.n() != 2 {
        return Err(CliError::User(format!(
            "the curve must live in 2 coordinates, got {}",
            h.n()
        )));
    }
    let c = Curve2::from_hypersurface(&h, 0, 1)?;
    let maps = load_maps(maps)?;
    let orbit = curve_orbit(
        &c,
        &maps[0],
        &maps[1],
        cfg.max_iter.unwrap_or(CURVE_STEPS),
        &cfg.caps,
    )?;
    let mut out = Output::new(
        "curve-orbit",
        json!({
            "outcome": to_value(&orbit.outcome),
            "curves": orbit.curves.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
            "bidegrees": orbit.bidegrees(),
            "steps": to_value(&orbit.steps),
        }),
        vec![
            "step",
            "deg_x",
            "deg_y",
            "multiplicity",
            "max_residual",
            "curve",
        ],
    );
    for (k, curve) in orbit.curves.iter().enumerate() {
        let (a, b) = curve.bidegree();
        let (mult, resid) = match k.checked_sub(1).and_then(|s| orbit.steps.get(s)) {
            Some(s) => (s.multiplicity.to_string(), s.max_residual.to_string()),
            None => (String::new(), String::new()),
        };
        out.row(vec![
            k.to_string(),
            a.to_string(),
            b.to_string(),
            mult,
            resid,
            curve.to_string(),
        ]);
    }
    let summary = match &orbit.outcome {
        CurveOrbitOutcome::Preperiodic { tail, period } => {
            format!("preperiodic tail={tail} period={period}")
        }
        CurveOrbitOutcome::NotDetected { reason } => format!("not detected: {reason}"),
    };
    out.row(vec![
        "outcome".into(),
        String::new(),
        String::new(),
        String::new(),
        String::new(),
        summary,
    ]);
    Ok(out)
}

fn ms_check(input: &HypMaps, bound: u32, cfg: &RunConfig) -> CliResult<Output> {
    let h = load_hypersurface(&input.hyp)?;
    let maps = load_maps(&input.maps)?;
    let r = ms_form_check(
        &h,
        &maps,
        bound,
        cfg.max_iter.unwrap_or(CURVE_STEPS),
        &cfg.caps,
    )?;
    let mut out = Output::new(
        "ms-check",
        to_value(&r),
        vec!["certified", "pair", "exponents", "tail", "period", "detail"],
    );
    match &r.certificate {
        Some(c) => out.row(vec![
            "true".into(),
            format!("{} {}", c.pair.0, c.pair.1),
            format!("{} {}", c.exponents.0, c.exponents.1),
            c.tail.to_string(),
            c.period.to_string(),
            c.curve.to_string(),
        ]),
        None => out.row(vec![
            "false".into(),
            String::new(),
            String::new(),
            String::new(),
            String::new(),
            r.reason.clone().unwrap_or_default(),
        ]),
    }
    Ok(out)
}

fn mm_verify_cmd(input: &HypMaps, trials: usize, bound: u32, cfg: &RunConfig) -> CliResult<Output> {
    let h = load_hypersurface(&input.hyp)?;
    let maps = load_maps(&input.maps)?;
    let config = MmConfig {
        trials,
        samples: cfg.samples,
        depth: cfg.depth,
        seed: cfg.seed,
        max_orbit: cfg
            .max_iter
            .unwrap_or(dynamo_core::exceptional::DEFAULT_MAX_ORBIT),
        tol: cfg.tol,
        exponent_bound: bound,
        curve_max_iter: CURVE_STEPS,
        caps: cfg.caps,
    };
    let r = mm_verify(&h, &maps, &config)?;
    let mut out = Output::new(
        "mm-verify",
        to_value(&r),
        vec!["check", "subject", "detail"],
    );
    let dominant: Vec<String> = (0..h.n())
        .filter(|&k| r.dominance.dominant[k])
        .map(|k| k.to_string())
        .collect();
    out.row(vec!["dominance".into(), "axes".into(), dominant.join(" ")]);
    for (k, c) in r.classifications.iter().enumerate() {
        let detail = match c {
            dynamo_core::harness::MapClassification::Decided(c) => c.verdict.to_string(),
            dynamo_core::harness::MapClassification::Inconclusive { reason } => {
                format!("inconclusive: {reason}")
            }
        };
        out.row(vec!["classification".into(), format!("map {k}"), detail]);
    }
    for t in &r.fiber_tests {
        out.row(vec![
            "fiber".into(),
            format!("axis {}", t.free),
            format!(
                "passes={} fails={} inconclusive={} degenerate={}",
                t.passes, t.fails, t.inconclusive, t.degenerate
            ),
        ]);
    }
    for m in &r.measure_tests {
        out.row(vec![
            "measure".into(),
            format!("axes {} {}", m.i, m.j),
            format!("statistic={} threshold={}", m.statistic, m.threshold),
        ]);
    }
    let ms = match (&r.ms_form.certificate, &r.ms_form.reason) {
        (Some(c), _) => format!("certificate tail={} period={}", c.tail, c.period),
        (None, Some(reason)) => reason.clone(),
        (None, None) => String::new(),
    };
    out.row(vec!["ms_form".into(), String::new(), ms]);
    for f in &r.failed_conditions {
        out.row(vec!["failed".into(), String::new(), f.clone()]);
    }
    out.row(vec!["verdict".into(), String::new(), r.verdict.clone()]);
    Ok(out)
}

#[derive(Serialize)]
struct Suite {
    suite: &'static str,
    checks: usize,
    passed: usize,
}

fn self_test() -> CliResult<Output> {
    let mut suites = Vec::new();

    let mut checks = 0;
    let mut passed = 0;
    for p in -30i64..=30 {
        for q in 1i64..=12 {
            if p == 0 {
                continue;
            }
            let x = parse_rational(&format!("{p}/{q}"))?;
            checks += 1;
            if product_formula(&x)?.product.is_one() {
                passed += 1;
            }
        }
    }
    suites.push(Suite {
        suite: "product_formula",
        checks,
        passed,
    });

    let maps = [
        RationalMapLift::from_i64(&[-1, 0, 1], &[1, 0, 0])?,
        RationalMapLift::from_i64(&[1, 0, 1], &[1, 0, 0])?,
        RationalMapLift::from_i64(&[1, 0, 1], &[0, 2, 0])?,
        power_map(3)?,
        chebyshev(3)?,
    ];
    let points = ["0", "1", "-1", "2", "1/2", "-3/2", "5/3", "inf"];
    let (mut checks, mut passed) = (0, 0);
    for f in &maps {
        for s in points {
            checks += 1;
            if canonical_height_functoriality_check(f, &parse_point(s)?)? {
                passed += 1;
            }
        }
    }
    suites.push(Suite {
        suite: "functoriality",
        checks,
        passed,
    });

    let degrees = 1..=12usize;
    let checks = degrees.clone().count();
    let passed = degrees.filter(|&d| chebyshev_identity_holds(d)).count();
    suites.push(Suite {
        suite: "chebyshev_identity",
        checks,
        passed,
    });

    let failed: Vec<&str> = suites
        .iter()
        .filter(|s| s.passed != s.checks)
        .map(|s| s.suite)
        .collect();
    if !failed.is_empty() {
        return Err(CliError::Computation(format!(
            "self-test failed: {}",
            failed.join(", ")
        )));
    }
    let mut out = Output::new(
        "self-test",
        to_value(&suites),
        vec!["suite", "checks", "passed"],
    );
    for s in &suites {
        out.row(vec![
            s.suite.into(),
            s.checks.to_string(),
            s.passed.to_string(),
        ]);
    }
    Ok(out)
}
