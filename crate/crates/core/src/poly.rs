//! Integer binary forms and the exact linear algebra built on them.
//!
//! A [`BinaryForm`] of degree `d` stores `coeffs[k]` as the coefficient of
//! `X^k Y^(d-k)`, so the affine polynomial `F(z, 1)` reads its coefficients in
//! ascending powers of `z`.

use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BinaryForm {
    coeffs: Vec<BigInt>,
}

impl BinaryForm {
    /// Builds a form from coefficients of `X^k Y^(d-k)`, `k = 0..=d`.
    pub fn new(coeffs: Vec<BigInt>) -> Self {
        assert!(
            !coeffs.is_empty(),
            "a binary form needs at least one coefficient"
        );
        BinaryForm { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero(degree: usize) -> Self {
        BinaryForm {
            coeffs: vec![BigInt::zero(); degree + 1],
        }
    }

    /// `c * X^k Y^(degree - k)`.
    pub fn monomial(c: BigInt, k: usize, degree: usize) -> Self {
        let mut f = Self::zero(degree);
        f.coeffs[k] = c;
        f
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> &BigInt {
        &self.coeffs[k]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// Gcd of all coefficients (non-negative, zero for the zero form).
    pub fn content(&self) -> BigInt {
        self.coeffs.iter().fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    pub fn max_abs_coeff(&self) -> BigInt {
        self.coeffs
            .iter()
            .map(|c| c.abs())
            .max()
            .unwrap_or_else(BigInt::zero)
    }

    /// Sum of absolute values of the coefficients.
    pub fn l1_norm(&self) -> BigInt {
        self.coeffs.iter().map(|c| c.abs()).sum()
    }

    pub fn max_bits(&self) -> u64 {
        self.coeffs.iter().map(|c| c.bits()).max().unwrap_or(0)
    }

    pub fn scale(&self, s: &BigInt) -> Self {
        BinaryForm {
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    pub fn div_exact(&self, s: &BigInt) -> Self {
        BinaryForm {
            coeffs: self
                .coeffs
                .iter()
                .map(|c| {
                    debug_assert!((c % s).is_zero());
                    c / s
                })
                .collect(),
        }
    }

    pub fn neg(&self) -> Self {
        BinaryForm {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.degree(), other.degree(), "forms of different degree");
        BinaryForm {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = vec![BigInt::zero(); self.degree() + other.degree() + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    out[i + j] += a * b;
                }
            }
        }
        BinaryForm { coeffs: out }
    }

    pub fn pow(&self, e: usize) -> Self {
        let mut result = BinaryForm::from_i64(&[1]);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    /// `F(G0, G1)` for forms `G0`, `G1` of a common degree.
    pub fn substitute(&self, g0: &Self, g1: &Self) -> Self {
        assert_eq!(g0.degree(), g1.degree());
        let d = self.degree();
        let mut p0 = Vec::with_capacity(d + 1);
        let mut p1 = Vec::with_capacity(d + 1);
        p0.push(BinaryForm::from_i64(&[1]));
        p1.push(BinaryForm::from_i64(&[1]));
        for k in 1..=d {
            p0.push(p0[k - 1].mul(g0));
            p1.push(p1[k - 1].mul(g1));
        }
        let mut out = BinaryForm::zero(d * g0.degree());
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            out = out.add(&p0[k].mul(&p1[d - k]).scale(c));
        }
        out
    }

    /// Partial derivative in `X`, a form of degree `d - 1`.
    pub fn partial_x(&self) -> Self {
        let d = self.degree();
        if d == 0 {
            return BinaryForm::zero(0);
        }
        BinaryForm {
            coeffs: (0..d)
                .map(|k| &self.coeffs[k + 1] * BigInt::from(k + 1))
                .collect(),
        }
    }

    /// Partial derivative in `Y`, a form of degree `d - 1`.
    pub fn partial_y(&self) -> Self {
        let d = self.degree();
        if d == 0 {
            return BinaryForm::zero(0);
        }
        BinaryForm {
            coeffs: (0..d)
                .map(|k| &self.coeffs[k] * BigInt::from(d - k))
                .collect(),
        }
    }

    /// Exact value at the integer vector `(x, y)`.
    pub fn eval(&self, x: &BigInt, y: &BigInt) -> BigInt {
        let d = self.degree();
        let mut acc = self.coeffs[d].clone();
        let mut ypow = BigInt::one();
        for k in (0..d).rev() {
            ypow *= y;
            acc = acc * x + &self.coeffs[k] * &ypow;
        }
        acc
    }

    pub fn eval_complex(&self, x: Complex64, y: Complex64) -> Complex64 {
        eval_complex_coeffs(&self.to_complex(), x, y)
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.coeffs.iter().map(big_to_f64).collect()
    }

    pub fn to_complex(&self) -> Vec<Complex64> {
        self.coeffs
            .iter()
            .map(|c| Complex64::new(big_to_f64(c), 0.0))
            .collect()
    }

    /// Exact division by the linear form `q X - p Y`, if it divides.
    pub fn div_linear(&self, p: &BigInt, q: &BigInt) -> Option<Self> {
        // F = (qX - pY) * G with deg G = d - 1; solve from the top coefficient down.
        let d = self.degree();
        if d == 0 {
            return None;
        }
        let mut g = vec![BigInt::zero(); d];
        if q.is_zero() {
            // divisor is -pY: F has no X^d term and G = F / (-pY)
            if !self.coeffs[d].is_zero() {
                return None;
            }
            let mp = -p;
            for k in 0..d {
                let (quo, rem) = self.coeffs[k].div_rem(&mp);
                if !rem.is_zero() {
                    return None;
                }
                g[k] = quo;
            }
            return Some(BinaryForm { coeffs: g });
        }
        // coefficient of X^(k+1) Y^(d-1-k) in (qX - pY)G: q g[k] - p g[k+1]
        let mut upper = BigInt::zero();
        for k in (0..d).rev() {
            let target = &self.coeffs[k + 1] + p * &upper;
            let (quo, rem) = target.div_rem(q);
            if !rem.is_zero() {
                return None;
            }
            g[k] = quo;
            upper = g[k].clone();
        }
        // constant term: -p g[0] must equal coeffs[0]
        if -(p * &g[0]) != self.coeffs[0] {
            return None;
        }
        Some(BinaryForm { coeffs: g })
    }
}

impl fmt::Display for BinaryForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = self.degree();
        let mut first = true;
        for k in (0..=d).rev() {
            let c = &self.coeffs[k];
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let a = c.abs();
            let mono = match (k, d - k) {
                (0, 0) => String::new(),
                (x, 0) => pow_str("X", x),
                (0, y) => pow_str("Y", y),
                (x, y) => format!("{}*{}", pow_str("X", x), pow_str("Y", y)),
            };
            if mono.is_empty() {
                write!(f, "{a}")?;
            } else if a.is_one() {
                write!(f, "{mono}")?;
            } else {
                write!(f, "{a}*{mono}")?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

fn pow_str(v: &str, e: usize) -> String {
    if e == 1 {
        v.to_string()
    } else {
        format!("{v}^{e}")
    }
}

/// Homogeneous Horner evaluation of `sum c_k x^k y^(d-k)`.
pub fn eval_complex_coeffs(coeffs: &[Complex64], x: Complex64, y: Complex64) -> Complex64 {
    let d = coeffs.len() - 1;
    let mut acc = coeffs[d];
    let mut ypow = Complex64::new(1.0, 0.0);
    for k in (0..d).rev() {
        ypow *= y;
        acc = acc * x + coeffs[k] * ypow;
    }
    acc
}

/// Lossy conversion that saturates to +-inf instead of failing.
pub fn big_to_f64(x: &BigInt) -> f64 {
    x.to_f64().unwrap_or_else(|| {
        if x.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

/// Natural log of `|x|` for arbitrarily large integers; `-inf` at zero.
pub fn log_abs(x: &BigInt) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = x.bits();
    if bits < 1000 {
        return big_to_f64(x).abs().ln();
    }
    let shift = bits - 64;
    let top: BigInt = x.abs() >> shift;
    big_to_f64(&top).ln() + shift as f64 * std::f64::consts::LN_2
}

/// Determinant by fraction-free (Bareiss) elimination.
pub fn bareiss_det(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = false;
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&r| !m[r][k].is_zero()) {
                Some(r) => {
                    m.swap(k, r);
                    sign = !sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = v / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    let d = m[n - 1][n - 1].clone();
    if sign {
        -d
    } else {
        d
    }
}

/// Sylvester matrix of forms of degrees `a` and `b`, rows of `f` first.
///
/// Columns index `X^(a+b-1-c) Y^c`, i.e. coefficients in descending `X` powers.
pub fn sylvester(f: &BinaryForm, g: &BinaryForm) -> Vec<Vec<BigInt>> {
    let a = f.degree();
    let b = g.degree();
    let n = a + b;
    let mut m = vec![vec![BigInt::zero(); n]; n];
    for r in 0..b {
        for k in 0..=a {
            m[r][r + k] = f.coeffs[a - k].clone();
        }
    }
    for r in 0..a {
        for k in 0..=b {
            m[b + r][r + k] = g.coeffs[b - k].clone();
        }
    }
    m
}

/// Homogeneous resultant `Res(f, g)`; `Res(X^a, Y^b) = 1`.
pub fn resultant(f: &BinaryForm, g: &BinaryForm) -> BigInt {
    if f.degree() + g.degree() == 0 {
        return BigInt::one();
    }
    bareiss_det(sylvester(f, g))
}

/// `Res(f, g)`, reducing the higher degree form modulo the lower one first.
///
/// With `g` of degree `k <= n = deg f` and nonzero top coefficient `b`,
/// `Res(f, g) = (-1)^(nk) b^(n-k+1) Res(r, g)` where `r = f mod g` taken with
/// formal degree `k - 1`. This keeps the determinant small when one of the
/// forms has low degree.
pub fn resultant_reduced(f: &BinaryForm, g: &BinaryForm) -> BigInt {
    let (n, k) = (f.degree(), g.degree());
    if n < k {
        let r = resultant_reduced(g, f);
        return if (n * k) % 2 == 1 { -r } else { r };
    }
    if k == 0 {
        return g.coeff(0).pow(n as u32);
    }
    let b = g.coeff(k);
    if b.is_zero() || n + k <= 4 {
        return resultant(f, g);
    }
    let (_, r) = QPoly::from_ints(f.coeffs()).div_rem(&QPoly::from_ints(g.coeffs()));
    if r.is_zero() {
        return BigInt::zero();
    }
    let den = r.0.iter().fold(BigInt::one(), |l, c| l.lcm(c.denom()));
    let mut ints: Vec<BigInt> =
        r.0.iter()
            .map(|c| (c * BigRational::from_integer(den.clone())).to_integer())
            .collect();
    ints.resize(k, BigInt::zero());
    let out = b.pow((n - k + 1) as u32) * resultant(&BinaryForm::new(ints), g) / den.pow(k as u32);
    if (n * k) % 2 == 1 {
        -out
    } else {
        out
    }
}

/// Solves `m x = rhs` over `Q`; `None` when `m` is singular.
pub fn solve_rational(m: &[Vec<BigInt>], rhs: &[BigInt]) -> Option<Vec<BigRational>> {
    let n = m.len();
    let mut a: Vec<Vec<BigRational>> = m
        .iter()
        .zip(rhs)
        .map(|(row, r)| {
            row.iter()
                .cloned()
                .chain(std::iter::once(r.clone()))
                .map(BigRational::from_integer)
                .collect()
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, piv);
        let inv = a[col][col].recip();
        for j in col..=n {
            a[col][j] = &a[col][j] * &inv;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let factor = a[r][col].clone();
                for j in col..=n {
                    let v = &a[col][j] * &factor;
                    a[r][j] -= v;
                }
            }
        }
    }
    Some(a.into_iter().map(|row| row[n].clone()).collect())
}

/// Univariate polynomial over `Q`, ascending coefficients, no trailing zeros.
#[derive(Clone, Debug, PartialEq)]
pub struct QPoly(pub Vec<BigRational>);

impl QPoly {
    pub fn from_ints(c: &[BigInt]) -> Self {
        let mut p = QPoly(c.iter().cloned().map(BigRational::from_integer).collect());
        p.trim();
        p
    }

    fn trim(&mut self) {
        while self.0.last().is_some_and(Zero::is_zero) {
            self.0.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Degree, with `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn derivative(&self) -> Self {
        let mut p = QPoly(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * BigRational::from_integer(BigInt::from(k)))
                .collect(),
        );
        p.trim();
        p
    }

    pub fn div_rem(&self, d: &Self) -> (Self, Self) {
        let dd = d.degree().expect("division by zero polynomial");
        let mut r = self.0.clone();
        let n = r.len();
        if n <= dd {
            return (QPoly(vec![]), self.clone());
        }
        let lead = d.0[dd].recip();
        let mut q = vec![BigRational::zero(); n - dd];
        for i in (0..n - dd).rev() {
            let c = &r[i + dd] * &lead;
            if !c.is_zero() {
                for j in 0..=dd {
                    let v = &c * &d.0[j];
                    r[i + j] -= v;
                }
            }
            q[i] = c;
        }
        let mut q = QPoly(q);
        q.trim();
        r.truncate(dd);
        let mut r = QPoly(r);
        r.trim();
        (q, r)
    }

    pub fn monic(&self) -> Self {
        match self.0.last() {
            None => self.clone(),
            Some(l) => {
                let inv = l.recip();
                QPoly(self.0.iter().map(|c| c * &inv).collect())
            }
        }
    }

    pub fn gcd(&self, other: &Self) -> Self {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Yun's square-free decomposition: `(factor, multiplicity)` pairs of monic factors.
    pub fn squarefree_decomposition(&self) -> Vec<(QPoly, usize)> {
        let mut out = Vec::new();
        if self.degree().unwrap_or(0) == 0 {
            return out;
        }
        let f = self.monic();
        let df = f.derivative();
        let a0 = f.gcd(&df);
        let mut b = f.div_rem(&a0).0;
        let mut c = df.div_rem(&a0).0;
        let mut d = c.sub(&b.derivative());
        let mut i = 1;
        while b.degree().unwrap_or(0) > 0 {
            let a = b.gcd(&d);
            if a.degree().unwrap_or(0) > 0 {
                out.push((a.clone(), i));
            }
            b = b.div_rem(&a).0;
            c = d.div_rem(&a).0;
            d = c.sub(&b.derivative());
            i += 1;
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.0.len().max(other.0.len());
        let z = BigRational::zero();
        let mut p = QPoly(
            (0..n)
                .map(|k| self.0.get(k).unwrap_or(&z) - other.0.get(k).unwrap_or(&z))
                .collect(),
        );
        p.trim();
        p
    }

    /// Integer primitive multiple with positive leading coefficient.
    pub fn to_primitive_ints(&self) -> Vec<BigInt> {
        let den = self.0.iter().fold(BigInt::one(), |l, c| l.lcm(c.denom()));
        let ints: Vec<BigInt> = self
            .0
            .iter()
            .map(|c| (c * BigRational::from_integer(den.clone())).to_integer())
            .collect();
        let g = ints.iter().fold(BigInt::zero(), |g, c| g.gcd(c));
        let mut ints: Vec<BigInt> = if g.is_zero() {
            ints
        } else {
            ints.into_iter().map(|c| c / &g).collect()
        };
        if ints.last().is_some_and(|l| l.is_negative()) {
            for c in ints.iter_mut() {
                *c = -&*c;
            }
        }
        ints
    }
}

/// Serde adapter writing big integers as decimal strings.
pub mod big_string {
    use num_bigint::BigInt;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&x.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        let s = String::deserialize(d)?;
        s.trim().parse().map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bf(c: &[i64]) -> BinaryForm {
        BinaryForm::from_i64(c)
    }

    #[test]
    fn resultant_of_simple_forms() {
        // X^2, Y^2
        assert_eq!(resultant(&bf(&[0, 0, 1]), &bf(&[1, 0, 0])), BigInt::from(1));
        // X^2 - Y^2, Y^2
        assert_eq!(
            resultant(&bf(&[-1, 0, 1]), &bf(&[1, 0, 0])),
            BigInt::from(1)
        );
        // XY, Y^2 share Y
        assert!(resultant(&bf(&[0, 1, 0]), &bf(&[1, 0, 0])).is_zero());
    }

    #[test]
    fn resultant_matches_root_product() {
        // (X - 2Y)(X - 3Y) and (X - 5Y): Res = lc^1 * prod (roots of f evaluated in g) up to sign
        let f = bf(&[6, -5, 1]);
        let g = bf(&[-5, 1]);
        // Res(f, g) = prod over roots r of f of g(r) = (2-5)(3-5) = 6
        assert_eq!(resultant(&f, &g), BigInt::from(6));
    }

    #[test]
    fn reduced_resultant_agrees_with_sylvester() {
        let mut seed = 7u64;
        let mut next = || {
            seed = seed
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            ((seed >> 33) % 19) as i64 - 9
        };
        for n in 0..7 {
            for k in 0..5 {
                for _ in 0..4 {
                    let f = BinaryForm::from_i64(&(0..=n).map(|_| next()).collect::<Vec<_>>());
                    let g = BinaryForm::from_i64(&(0..=k).map(|_| next()).collect::<Vec<_>>());
                    assert_eq!(resultant_reduced(&f, &g), resultant(&f, &g), "{f} / {g}");
                }
            }
        }
    }

    #[test]
    fn substitute_matches_expansion() {
        // F = X^2 - Y^2 composed with itself: X^4 - 2X^2Y^2
        let f0 = bf(&[-1, 0, 1]);
        let f1 = bf(&[1, 0, 0]);
        let h0 = f0.substitute(&f0, &f1);
        assert_eq!(h0, bf(&[0, 0, -2, 0, 1]));
        let h1 = f1.substitute(&f0, &f1);
        assert_eq!(h1, bf(&[1, 0, 0, 0, 0]));
    }

    #[test]
    fn div_linear_roundtrip() {
        let f = bf(&[6, -5, 1]);
        let q = f.div_linear(&BigInt::from(2), &BigInt::from(1)).unwrap();
        assert_eq!(q, bf(&[-3, 1]));
        assert!(f.div_linear(&BigInt::from(7), &BigInt::from(1)).is_none());
        // XY / Y
        let g = bf(&[0, 1, 0]);
        assert_eq!(
            g.div_linear(&BigInt::from(-1), &BigInt::zero()).unwrap(),
            bf(&[0, 1])
        );
    }

    #[test]
    fn yun_decomposition() {
        // (z-1)^2 (z+2)
        let p = QPoly::from_ints(&[2, -3, 0, 1].map(BigInt::from));
        let sq = p.squarefree_decomposition();
        assert_eq!(sq.len(), 2);
        assert_eq!(sq[0].1, 1);
        assert_eq!(
            sq[0].0.to_primitive_ints(),
            vec![BigInt::from(2), BigInt::from(1)]
        );
        assert_eq!(sq[1].1, 2);
        assert_eq!(
            sq[1].0.to_primitive_ints(),
            vec![BigInt::from(-1), BigInt::from(1)]
        );
    }

    #[test]
    fn log_abs_large() {
        let x = BigInt::from(10).pow(500);
        assert!((log_abs(&x) - 500.0 * 10f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn display_form() {
        assert_eq!(bf(&[-1, 0, 1]).to_string(), "X^2 - Y^2");
    }
}
