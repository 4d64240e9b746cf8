//! Exact points of `P^1(Q)` and rational maps given by homogeneous lifts.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::config::Caps;
use crate::error::{Error, Result};
use crate::poly::{resultant, solve_rational, BinaryForm};
use crate::roots::{integer_form_roots, DEFAULT_ROOT_TOL};
use crate::sphere::CPoint;

/// A point `[x : y]` of `P^1(Q)` with coprime integer coordinates.
///
/// Normalized so that `y > 0`, or `y = 0` and `x = 1`; two points are equal
/// exactly when their fields are.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct ProjectivePoint {
    x: BigInt,
    y: BigInt,
}

/// Normalizes a raw coordinate pair.
pub fn normalize(x: BigInt, y: BigInt) -> Result<ProjectivePoint> {
    if x.is_zero() && y.is_zero() {
        return Err(Error::ZeroPoint);
    }
    let g = x.gcd(&y);
    let (mut x, mut y) = (x / &g, y / &g);
    if y.is_negative() || (y.is_zero() && x.is_negative()) {
        x = -x;
        y = -y;
    }
    Ok(ProjectivePoint { x, y })
}

impl ProjectivePoint {
    pub fn new(x: impl Into<BigInt>, y: impl Into<BigInt>) -> Result<Self> {
        normalize(x.into(), y.into())
    }

    /// Trusts the caller that `gcd(x, y) = 1` and the sign is normalized.
    pub(crate) fn from_coprime(x: BigInt, y: BigInt) -> Self {
        debug_assert!(!(x.is_zero() && y.is_zero()));
        ProjectivePoint { x, y }
    }

    pub fn infinity() -> Self {
        ProjectivePoint {
            x: BigInt::one(),
            y: BigInt::zero(),
        }
    }

    pub fn from_integer(n: impl Into<BigInt>) -> Self {
        ProjectivePoint {
            x: n.into(),
            y: BigInt::one(),
        }
    }

    pub fn from_rational(q: &BigRational) -> Self {
        // BigRational keeps a positive reduced denominator
        ProjectivePoint {
            x: q.numer().clone(),
            y: q.denom().clone(),
        }
    }

    pub fn x(&self) -> &BigInt {
        &self.x
    }

    pub fn y(&self) -> &BigInt {
        &self.y
    }

    pub fn is_infinity(&self) -> bool {
        self.y.is_zero()
    }

    pub fn to_rational(&self) -> Option<BigRational> {
        if self.is_infinity() {
            None
        } else {
            Some(BigRational::new(self.x.clone(), self.y.clone()))
        }
    }

    /// Bit length of the larger coordinate.
    pub fn bits(&self) -> u64 {
        self.x.bits().max(self.y.bits())
    }

    pub fn to_cpoint(&self) -> CPoint {
        if self.is_infinity() {
            return CPoint::Infinity;
        }
        let q = BigRational::new(self.x.clone(), self.y.clone());
        CPoint::real(rational_to_f64(&q))
    }
}

/// Lossy but overflow-safe conversion of a rational.
pub fn rational_to_f64(q: &BigRational) -> f64 {
    let nb = q.numer().bits() as i64;
    let db = q.denom().bits() as i64;
    if nb < 1000 && db < 1000 {
        let n = crate::poly::big_to_f64(q.numer());
        let d = crate::poly::big_to_f64(q.denom());
        if n.is_finite() && d.is_finite() {
            return n / d;
        }
    }
    // shift both to ~64 significant bits
    let sn = (nb - 64).max(0) as u64;
    let sd = (db - 64).max(0) as u64;
    let n = crate::poly::big_to_f64(&(q.numer() >> sn));
    let d = crate::poly::big_to_f64(&(q.denom() >> sd));
    n / d * 2f64.powi((sn as i64 - sd as i64).clamp(-5000, 5000) as i32)
}

impl fmt::Display for ProjectivePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinity() {
            write!(f, "inf")
        } else if self.y.is_one() {
            write!(f, "{}", self.x)
        } else {
            write!(f, "{}/{}", self.x, self.y)
        }
    }
}

impl From<ProjectivePoint> for String {
    fn from(p: ProjectivePoint) -> String {
        p.to_string()
    }
}

impl TryFrom<String> for ProjectivePoint {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl FromStr for ProjectivePoint {
    type Err = Error;

    /// Accepts `"p/q"`, `"p"`, or `"inf"`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("inf") || s == "∞" {
            return Ok(ProjectivePoint::infinity());
        }
        let q = parse_rational(s)?;
        Ok(ProjectivePoint::from_rational(&q))
    }
}

/// Parses `"p/q"` or `"p"` into a reduced rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n = BigInt::from_str(n).map_err(|_| Error::Parse(format!("bad rational `{s}`")))?;
    let d = BigInt::from_str(d).map_err(|_| Error::Parse(format!("bad rational `{s}`")))?;
    if d.is_zero() {
        return Err(Error::Parse(format!("zero denominator in `{s}`")));
    }
    Ok(BigRational::new(n, d))
}

/// Floating point copy of a lift, scaled so the largest coefficient is ~1.
#[derive(Clone, Debug)]
pub struct NumericLift {
    c0: Vec<Complex64>,
    c1: Vec<Complex64>,
    dx0: Vec<Complex64>,
    dy0: Vec<Complex64>,
    dx1: Vec<Complex64>,
    dy1: Vec<Complex64>,
    shift: u64,
}

fn scaled_complex(f: &BinaryForm, shift: u64) -> Vec<Complex64> {
    // shifting a negative BigInt rounds toward -inf; keep the sign symmetric
    f.coeffs()
        .iter()
        .map(|c| {
            let m = crate::poly::big_to_f64(&(c.abs() >> shift));
            Complex64::new(if c.is_negative() { -m } else { m }, 0.0)
        })
        .collect()
}

impl NumericLift {
    fn new(f0: &BinaryForm, f1: &BinaryForm) -> Self {
        let bits = f0.max_bits().max(f1.max_bits());
        let shift = bits.saturating_sub(60);
        let conv = |f: &BinaryForm| scaled_complex(f, shift);
        let (dx0, dy0) = (f0.partial_x(), f0.partial_y());
        let (dx1, dy1) = (f1.partial_x(), f1.partial_y());
        NumericLift {
            c0: conv(f0),
            c1: conv(f1),
            dx0: conv(&dx0),
            dy0: conv(&dy0),
            dx1: conv(&dx1),
            dy1: conv(&dy1),
            shift,
        }
    }

    /// The numeric copy is `F / 2^shift`; this returns `shift * ln 2`.
    pub fn log_scale(&self) -> f64 {
        self.shift as f64 * std::f64::consts::LN_2
    }

    /// Scaled coefficients of `F0` and `F1`, ascending in `X`.
    pub fn coeffs(&self) -> (&[Complex64], &[Complex64]) {
        (&self.c0, &self.c1)
    }

    /// `F(a, b)` up to the fixed positive scale of the numeric copy.
    pub fn eval(&self, a: Complex64, b: Complex64) -> (Complex64, Complex64) {
        (
            crate::poly::eval_complex_coeffs(&self.c0, a, b),
            crate::poly::eval_complex_coeffs(&self.c1, a, b),
        )
    }

    /// `F(a, b)` together with its Jacobian `[[dF0/dX, dF0/dY], [dF1/dX, dF1/dY]]`.
    pub fn eval_jacobian(
        &self,
        a: Complex64,
        b: Complex64,
    ) -> ((Complex64, Complex64), [[Complex64; 2]; 2]) {
        use crate::poly::eval_complex_coeffs as ev;
        let (v0, v1) = self.eval(a, b);
        let jac = if self.dx0.len() == 1 && self.c0.len() == 1 {
            [[Complex64::zero(); 2]; 2]
        } else {
            [
                [ev(&self.dx0, a, b), ev(&self.dy0, a, b)],
                [ev(&self.dx1, a, b), ev(&self.dy1, a, b)],
            ]
        };
        ((v0, v1), jac)
    }

    pub fn apply(&self, p: &CPoint) -> CPoint {
        let (a, b) = p.chart_vector();
        let (u, v) = self.eval(a, b);
        CPoint::from_homogeneous(u, v)
    }

    /// Derivative of `f` between affine charts: the source chart is `z`
    /// (or `1/z` when `source_inverse`), likewise for the target.
    pub fn chart_derivative(
        &self,
        p: &CPoint,
        source_inverse: bool,
        target_inverse: bool,
    ) -> Complex64 {
        let one = Complex64::new(1.0, 0.0);
        let (a, b) = match (p, source_inverse) {
            (CPoint::Finite(z), false) => (*z, one),
            (CPoint::Finite(z), true) => (one, z.inv()),
            (CPoint::Infinity, true) => (one, Complex64::zero()),
            (CPoint::Infinity, false) => return Complex64::new(f64::NAN, f64::NAN),
        };
        let ((v0, v1), j) = self.eval_jacobian(a, b);
        // ds/dt is (1, 0) in the z chart and (0, 1) in the 1/z chart
        let col = if source_inverse { 1 } else { 0 };
        let (num, den, dnum, dden) = if target_inverse {
            (v1, v0, j[1][col], j[0][col])
        } else {
            (v0, v1, j[0][col], j[1][col])
        };
        (dnum * den - num * dden) / (den * den)
    }
}

/// Whether the standard chart at `p` is the `1/z` chart.
pub fn uses_inverse_chart(p: &CPoint) -> bool {
    match p {
        CPoint::Infinity => true,
        CPoint::Finite(z) => z.norm() > 1.0,
    }
}

/// Cofactors certifying `Res(F0, F1) != 0`:
/// `g0x F0 + g1x F1 = Res X^(2d-1)` and `g0y F0 + g1y F1 = Res Y^(2d-1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BezoutCertificate {
    pub g0x: BinaryForm,
    pub g1x: BinaryForm,
    pub g0y: BinaryForm,
    pub g1y: BinaryForm,
}

impl BezoutCertificate {
    /// Re-expands both identities exactly.
    pub fn verify(&self, lift: &RationalMapLift) -> bool {
        let d = lift.degree();
        let e = 2 * d - 1;
        let lhs_x = self.g0x.mul(&lift.f0).add(&self.g1x.mul(&lift.f1));
        let lhs_y = self.g0y.mul(&lift.f0).add(&self.g1y.mul(&lift.f1));
        lhs_x == BinaryForm::monomial(lift.res.clone(), e, e)
            && lhs_y == BinaryForm::monomial(lift.res.clone(), 0, e)
    }
}

/// A rational self-map of `P^1` of degree `d >= 1`, as a lift `(F0, F1)` with
/// jointly primitive integer coefficients and nonzero resultant.
#[derive(Clone)]
pub struct RationalMapLift {
    f0: BinaryForm,
    f1: BinaryForm,
    res: BigInt,
    numeric: NumericLift,
}

impl fmt::Debug for RationalMapLift {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RationalMapLift")
            .field("f0", &self.f0.to_string())
            .field("f1", &self.f1.to_string())
            .field("res", &self.res)
            .finish()
    }
}

impl PartialEq for RationalMapLift {
    fn eq(&self, other: &Self) -> bool {
        self.f0 == other.f0 && self.f1 == other.f1
    }
}

impl Eq for RationalMapLift {}

impl fmt::Display for RationalMapLift {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{} : {}]", self.f0, self.f1)
    }
}

impl RationalMapLift {
    /// Normalizes `(f0, f1)` jointly and checks the resultant.
    pub fn new(f0: BinaryForm, f1: BinaryForm) -> Result<Self> {
        if f0.degree() != f1.degree() {
            return Err(Error::InvalidInput(format!(
                "lift components have degrees {} and {}",
                f0.degree(),
                f1.degree()
            )));
        }
        if f0.degree() == 0 {
            return Err(Error::InvalidInput(
                "constant maps are not morphisms".into(),
            ));
        }
        let g = f0.content().gcd(&f1.content());
        if g.is_zero() {
            return Err(Error::DegenerateMap);
        }
        let (mut f0, mut f1) = (f0.div_exact(&g), f1.div_exact(&g));
        // sign: top nonzero coefficient of f1 positive
        let top = f1
            .coeffs()
            .iter()
            .rev()
            .find(|c| !c.is_zero())
            .or_else(|| f0.coeffs().iter().rev().find(|c| !c.is_zero()));
        if top.is_some_and(|c| c.is_negative()) {
            f0 = f0.neg();
            f1 = f1.neg();
        }
        let res = resultant(&f0, &f1);
        if res.is_zero() {
            return Err(Error::DegenerateMap);
        }
        let numeric = NumericLift::new(&f0, &f1);
        Ok(RationalMapLift {
            f0,
            f1,
            res,
            numeric,
        })
    }

    pub fn from_i64(f0: &[i64], f1: &[i64]) -> Result<Self> {
        Self::new(BinaryForm::from_i64(f0), BinaryForm::from_i64(f1))
    }

    /// The lift of `num(z) / den(z)`, coefficients in ascending powers.
    pub fn from_affine(num: &[BigRational], den: &[BigRational]) -> Result<Self> {
        let deg = |c: &[BigRational]| c.iter().rposition(|x| !x.is_zero());
        let d = match (deg(num), deg(den)) {
            (_, None) => return Err(Error::InvalidInput("zero denominator polynomial".into())),
            (None, Some(b)) => b,
            (Some(a), Some(b)) => a.max(b),
        };
        if d == 0 {
            return Err(Error::InvalidInput(
                "constant maps are not morphisms".into(),
            ));
        }
        let lcm = num
            .iter()
            .chain(den)
            .fold(BigInt::one(), |l, c| l.lcm(c.denom()));
        let clear = |c: &[BigRational]| {
            BinaryForm::new(
                (0..=d)
                    .map(|k| {
                        c.get(k)
                            .map(|x| (x * BigRational::from_integer(lcm.clone())).to_integer())
                            .unwrap_or_else(BigInt::zero)
                    })
                    .collect(),
            )
        };
        Self::new(clear(num), clear(den))
    }

    /// The identity lift `(X, Y)`.
    pub fn identity() -> Self {
        Self::from_i64(&[0, 1], &[1, 0]).expect("identity is a morphism")
    }

    /// The Möbius map `z -> (a z + b) / (c z + d)`.
    pub fn mobius(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        Self::from_i64(&[b, a], &[d, c])
    }

    /// Inverse of a degree-one lift.
    pub fn mobius_inverse(&self) -> Result<Self> {
        if self.degree() != 1 {
            return Err(Error::InvalidInput(
                "only degree-one lifts are invertible".into(),
            ));
        }
        // (aX + bY, cX + dY) -> (dX - bY, -cX + aY)
        let (b, a) = (&self.f0.coeffs()[0], &self.f0.coeffs()[1]);
        let (d, c) = (&self.f1.coeffs()[0], &self.f1.coeffs()[1]);
        Self::new(
            BinaryForm::new(vec![-b, d.clone()]),
            BinaryForm::new(vec![a.clone(), -c]),
        )
    }

    /// `m^-1 o self o m` for a degree-one `m`.
    pub fn conjugate(&self, m: &RationalMapLift, caps: &Caps) -> Result<Self> {
        m.mobius_inverse()?.compose(&self.compose(m, caps)?, caps)
    }

    pub fn degree(&self) -> usize {
        self.f0.degree()
    }

    pub fn f0(&self) -> &BinaryForm {
        &self.f0
    }

    pub fn f1(&self) -> &BinaryForm {
        &self.f1
    }

    /// The cached resultant `Res(F0, F1)`.
    pub fn res(&self) -> &BigInt {
        &self.res
    }

    pub fn numeric(&self) -> &NumericLift {
        &self.numeric
    }

    /// `(F0(x, y), F1(x, y))` before normalization.
    pub fn evaluate_raw(&self, p: &ProjectivePoint) -> (BigInt, BigInt) {
        (self.f0.eval(&p.x, &p.y), self.f1.eval(&p.x, &p.y))
    }

    pub fn evaluate(&self, p: &ProjectivePoint) -> ProjectivePoint {
        let (a, b) = self.evaluate_raw(p);
        normalize(a, b).expect("nonzero resultant rules out a zero image")
    }

    /// Floating point image of a sphere point.
    pub fn evaluate_numeric(&self, p: &CPoint) -> CPoint {
        self.numeric.apply(p)
    }

    /// `self o g`, content-normalized.
    pub fn compose(&self, g: &RationalMapLift, caps: &Caps) -> Result<Self> {
        let h0 = self.f0.substitute(&g.f0, &g.f1);
        let h1 = self.f1.substitute(&g.f0, &g.f1);
        caps.check_bits(h0.max_bits().max(h1.max_bits()))?;
        Self::new(h0, h1)
    }

    /// The `n`-th iterate (`n >= 1`).
    pub fn iterate(&self, n: usize, caps: &Caps) -> Result<Self> {
        if n == 0 {
            return Ok(Self::identity());
        }
        let mut out = self.clone();
        for _ in 1..n {
            out = self.compose(&out, caps)?;
        }
        Ok(out)
    }

    /// Resultant with its Bezout cofactors.
    pub fn resultant_with_certificate(&self) -> Result<(BigInt, BezoutCertificate)> {
        if self.res.is_zero() {
            return Err(Error::DegenerateMap);
        }
        let d = self.degree();
        let e = 2 * d - 1;
        // unknowns: coefficients of g0 (degree d-1) then g1; equations: coefficients
        // of X^k Y^(e-k) in g0 F0 + g1 F1, which is the transposed Sylvester system
        let n = 2 * d;
        let mut m = vec![vec![BigInt::zero(); n]; n];
        for j in 0..d {
            for (k, c) in self.f0.coeffs().iter().enumerate() {
                m[j + k][j] = c.clone();
            }
            for (k, c) in self.f1.coeffs().iter().enumerate() {
                m[j + k][d + j] = c.clone();
            }
        }
        let solve = |k: usize| -> Result<(BinaryForm, BinaryForm)> {
            let mut rhs = vec![BigInt::zero(); n];
            rhs[k] = self.res.clone();
            let sol = solve_rational(&m, &rhs).ok_or(Error::DegenerateMap)?;
            let ints: Vec<BigInt> = sol
                .into_iter()
                .map(|q| {
                    debug_assert!(q.is_integer());
                    q.to_integer()
                })
                .collect();
            Ok((
                BinaryForm::new(ints[..d].to_vec()),
                BinaryForm::new(ints[d..].to_vec()),
            ))
        };
        let (g0x, g1x) = solve(e)?;
        let (g0y, g1y) = solve(0)?;
        Ok((self.res.clone(), BezoutCertificate { g0x, g1x, g0y, g1y }))
    }

    /// The Wronskian `dF0/dX dF1/dY - dF0/dY dF1/dX`, of degree `2d - 2`.
    pub fn wronskian(&self) -> BinaryForm {
        self.f0
            .partial_x()
            .mul(&self.f1.partial_y())
            .sub(&self.f0.partial_y().mul(&self.f1.partial_x()))
    }

    /// Critical points with multiplicity (`2d - 2` in total); rational ones exact.
    pub fn critical_points(&self, tol: f64) -> Result<Vec<CriticalPoint>> {
        if self.degree() < 2 {
            return Ok(vec![]);
        }
        let w = self.wronskian();
        let roots = integer_form_roots(&w, tol)?;
        Ok(roots
            .into_iter()
            .map(|r| CriticalPoint {
                point: r.point,
                exact: r
                    .exact
                    .map(|(p, q)| normalize(p, q).expect("root is not the zero vector")),
                multiplicity: r.multiplicity,
            })
            .collect())
    }

    /// Affine numerator and denominator as `"p/q"` strings.
    pub fn to_json(&self) -> MapJson {
        let strs = |f: &BinaryForm| {
            f.coeffs()
                .iter()
                .map(|c| CoeffJson::Text(c.to_string()))
                .collect()
        };
        MapJson {
            num: strs(&self.f0),
            den: strs(&self.f1),
        }
    }

    pub fn from_json(m: &MapJson) -> Result<Self> {
        let num: Vec<BigRational> = m
            .num
            .iter()
            .map(CoeffJson::to_rational)
            .collect::<Result<_>>()?;
        let den: Vec<BigRational> = m
            .den
            .iter()
            .map(CoeffJson::to_rational)
            .collect::<Result<_>>()?;
        Self::from_affine(&num, &den)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let m: MapJson = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_json(&m)
    }
}

/// A critical point of a map with its multiplicity as a Wronskian root
/// (local degree minus one).
#[derive(Clone, Debug, PartialEq)]
pub struct CriticalPoint {
    pub point: CPoint,
    pub exact: Option<ProjectivePoint>,
    pub multiplicity: usize,
}

/// `{"num": [...], "den": [...]}`, ascending affine coefficients.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MapJson {
    pub num: Vec<CoeffJson>,
    pub den: Vec<CoeffJson>,
}

/// A rational coefficient, written as `"p/q"` (integers are also accepted).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CoeffJson {
    Text(String),
    Int(i64),
}

impl CoeffJson {
    pub fn to_rational(&self) -> Result<BigRational> {
        match self {
            CoeffJson::Text(s) => parse_rational(s),
            CoeffJson::Int(n) => Ok(BigRational::from_integer(BigInt::from(*n))),
        }
    }
}

/// Default tolerance for critical point computations.
pub const CRITICAL_TOL: f64 = DEFAULT_ROOT_TOL;
