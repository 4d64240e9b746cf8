//! Multihomogeneous hypersurfaces in `(P^1)^n`.
//!
//! A form is stored by affine exponents: the term `c * prod x_k^(e_k)` stands
//! for `c * prod X_k^(e_k) Y_k^(m_k - e_k)` with `m` the multidegree.
//! Coordinates are indexed from 0.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{big_to_f64, BinaryForm};
use crate::proj::{CoeffJson, ProjectivePoint};
use crate::sphere::CPoint;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hypersurface {
    n: usize,
    multidegree: Vec<usize>,
    terms: BTreeMap<Vec<usize>, BigInt>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermJson {
    pub exps: Vec<usize>,
    pub coeff: CoeffJson,
}

/// `{"n": 3, "multidegree": [1,1,1], "terms": [{"exps": [1,0,0], "coeff": "1"}, ...]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HypersurfaceJson {
    pub n: usize,
    pub multidegree: Vec<usize>,
    pub terms: Vec<TermJson>,
}

impl Hypersurface {
    /// Builds a form from rational terms, clearing denominators and content.
    /// The sign is fixed by making the first term (in exponent order) positive.
    pub fn new(multidegree: Vec<usize>, terms: Vec<(Vec<usize>, BigRational)>) -> Result<Self> {
        let n = multidegree.len();
        if n < 2 {
            return Err(Error::InvalidInput(
                "a hypersurface needs n >= 2 blocks".into(),
            ));
        }
        let mut acc: BTreeMap<Vec<usize>, BigRational> = BTreeMap::new();
        for (e, c) in terms {
            if e.len() != n {
                return Err(Error::InvalidInput(format!(
                    "exponent vector {e:?} has length {}, expected {n}",
                    e.len()
                )));
            }
            if let Some(k) = (0..n).find(|&k| e[k] > multidegree[k]) {
                return Err(Error::InvalidInput(format!(
                    "exponent {} in block {k} exceeds multidegree {}",
                    e[k], multidegree[k]
                )));
            }
            *acc.entry(e).or_insert_with(BigRational::zero) += c;
        }
        acc.retain(|_, c| !c.is_zero());
        if acc.is_empty() {
            return Err(Error::InvalidInput(
                "the zero form defines no hypersurface".into(),
            ));
        }
        for k in 0..n {
            let top = acc.keys().map(|e| e[k]).max().unwrap_or(0);
            if top != multidegree[k] {
                return Err(Error::InvalidInput(format!(
                    "block {k}: multidegree {} but the largest exponent is {top}",
                    multidegree[k]
                )));
            }
        }
        let lcm = acc.values().fold(BigInt::one(), |l, c| l.lcm(c.denom()));
        let ints: Vec<(Vec<usize>, BigInt)> = acc
            .into_iter()
            .map(|(e, c)| (e, (c * BigRational::from_integer(lcm.clone())).to_integer()))
            .collect();
        let content = ints.iter().fold(BigInt::zero(), |g, (_, c)| g.gcd(c));
        let sign = if ints[0].1.is_negative() {
            -BigInt::one()
        } else {
            BigInt::one()
        };
        let terms = ints
            .into_iter()
            .map(|(e, c)| (e, c / &content * &sign))
            .collect();
        Ok(Hypersurface {
            n,
            multidegree,
            terms,
        })
    }

    pub fn from_json(j: &HypersurfaceJson) -> Result<Self> {
        if j.multidegree.len() != j.n {
            return Err(Error::InvalidInput(format!(
                "n = {} but multidegree has {} entries",
                j.n,
                j.multidegree.len()
            )));
        }
        let terms = j
            .terms
            .iter()
            .map(|t| Ok((t.exps.clone(), t.coeff.to_rational()?)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(j.multidegree.clone(), terms)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let j: HypersurfaceJson =
            serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_json(&j)
    }

    pub fn to_json(&self) -> HypersurfaceJson {
        HypersurfaceJson {
            n: self.n,
            multidegree: self.multidegree.clone(),
            terms: self
                .terms
                .iter()
                .map(|(e, c)| TermJson {
                    exps: e.clone(),
                    coeff: CoeffJson::Text(c.to_string()),
                })
                .collect(),
        }
    }

    /// The diagonal `x_i = x_j` in `(P^1)^n`.
    pub fn diagonal(n: usize, i: usize, j: usize) -> Result<Self> {
        let mut md = vec![0; n];
        md[i] = 1;
        md[j] = 1;
        let mut a = vec![0; n];
        a[i] = 1;
        let mut b = vec![0; n];
        b[j] = 1;
        Self::new(md, vec![(a, BigRational::one()), (b, -BigRational::one())])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn multidegree(&self) -> &[usize] {
        &self.multidegree
    }

    pub fn terms(&self) -> &BTreeMap<Vec<usize>, BigInt> {
        &self.terms
    }

    pub fn depends_on(&self, k: usize) -> bool {
        self.multidegree[k] > 0
    }

    /// Blocks in which the form has positive degree.
    pub fn blocks(&self) -> Vec<usize> {
        (0..self.n).filter(|&k| self.depends_on(k)).collect()
    }

    /// The form restricted to block `free`, with exact values in every other block.
    pub fn fiber_form(&self, free: usize, values: &[ProjectivePoint]) -> Result<BinaryForm> {
        self.check_values(free, values.len())?;
        let m = self.multidegree[free];
        let mut coeffs = vec![BigInt::zero(); m + 1];
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for k in (0..self.n).filter(|&k| k != free) {
                let p = &values[k];
                t *= p.x().pow(e[k] as u32) * p.y().pow((self.multidegree[k] - e[k]) as u32);
            }
            coeffs[e[free]] += t;
        }
        Ok(BinaryForm::new(coeffs))
    }

    /// Complex coefficients of the fiber form in block `free`, together with
    /// the sum of absolute values of all contributions (a scale for zero tests).
    pub fn fiber_coeffs_complex(
        &self,
        free: usize,
        values: &[CPoint],
    ) -> Result<(Vec<Complex64>, f64)> {
        self.check_values(free, values.len())?;
        let m = self.multidegree[free];
        let charts: Vec<(Complex64, Complex64)> = values.iter().map(|p| p.chart_vector()).collect();
        let mut coeffs = vec![Complex64::zero(); m + 1];
        let mut scale = 0.0;
        for (e, c) in &self.terms {
            let mut t = Complex64::new(big_to_f64(c), 0.0);
            for k in (0..self.n).filter(|&k| k != free) {
                let (x, y) = charts[k];
                t *= x.powu(e[k] as u32) * y.powu((self.multidegree[k] - e[k]) as u32);
            }
            scale += t.norm();
            coeffs[e[free]] += t;
        }
        Ok((coeffs, scale))
    }

    /// `|H(p)| / sum |terms(p)|` in the standard chart of each coordinate.
    pub fn relative_residual(&self, point: &[CPoint]) -> f64 {
        let charts: Vec<(Complex64, Complex64)> = point.iter().map(|p| p.chart_vector()).collect();
        let mut sum = Complex64::zero();
        let mut scale = 0.0;
        for (e, c) in &self.terms {
            let mut t = Complex64::new(big_to_f64(c), 0.0);
            for k in 0..self.n {
                let (x, y) = charts[k];
                t *= x.powu(e[k] as u32) * y.powu((self.multidegree[k] - e[k]) as u32);
            }
            scale += t.norm();
            sum += t;
        }
        if scale == 0.0 {
            0.0
        } else {
            sum.norm() / scale
        }
    }

    /// Obvious reducibility: a monomial factor `X_k` or `Y_k`, or a form that
    /// is a polynomial in `x_k^r` for some `r > 1` in a block of degree `> 1`.
    pub fn irreducibility_warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        for k in self.blocks() {
            let lo = self.terms.keys().map(|e| e[k]).min().unwrap_or(0);
            if lo > 0 {
                out.push(format!("X_{k} divides the form"));
            }
            if self.terms.keys().all(|e| e[k] < self.multidegree[k]) {
                out.push(format!("Y_{k} divides the form"));
            }
        }
        out
    }

    fn check_values(&self, free: usize, len: usize) -> Result<()> {
        if free >= self.n {
            return Err(Error::InvalidInput(format!(
                "coordinate {free} out of range for n = {}",
                self.n
            )));
        }
        if len != self.n {
            return Err(Error::InvalidInput(format!(
                "expected {} coordinate values (the free one is ignored), got {len}",
                self.n
            )));
        }
        Ok(())
    }
}

impl std::fmt::Display for Hypersurface {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut first = true;
        for (e, c) in &self.terms {
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &k)| k > 0)
                .map(|(i, &k)| {
                    if k == 1 {
                        format!("x{i}")
                    } else {
                        format!("x{i}^{k}")
                    }
                })
                .collect();
            let mag = c.abs();
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            match (mono.is_empty(), mag.is_one()) {
                (true, _) => write!(f, "{mag}")?,
                (false, true) => write!(f, "{}", mono.join("*"))?,
                (false, false) => write!(f, "{mag}*{}", mono.join("*"))?,
            }
        }
        write!(f, " (multidegree {:?})", self.multidegree)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    fn pt(x: i64, y: i64) -> ProjectivePoint {
        ProjectivePoint::new(x, y).unwrap()
    }

    #[test]
    fn json_round_trip() {
        let s = r#"{"n":3,"multidegree":[1,1,1],"terms":[{"exps":[1,0,0],"coeff":"1"},{"exps":[0,1,0],"coeff":"1"},{"exps":[0,0,1],"coeff":"1"}]}"#;
        let h = Hypersurface::from_json_str(s).unwrap();
        assert_eq!(h.blocks(), vec![0, 1, 2]);
        let back = Hypersurface::from_json(&h.to_json()).unwrap();
        assert_eq!(back, h);
    }

    #[test]
    fn multidegree_must_match() {
        let bad = Hypersurface::new(vec![2, 1], vec![(vec![1, 0], r(1)), (vec![0, 1], r(1))]);
        assert!(bad.is_err());
        let over = Hypersurface::new(vec![1, 1], vec![(vec![2, 0], r(1)), (vec![0, 1], r(1))]);
        assert!(over.is_err());
    }

    #[test]
    fn normalization() {
        let h = Hypersurface::new(
            vec![1, 1],
            vec![
                (
                    vec![0, 1],
                    BigRational::new(BigInt::from(-2), BigInt::from(3)),
                ),
                (vec![1, 0], r(4)),
            ],
        )
        .unwrap();
        let coeffs: Vec<_> = h.terms().values().cloned().collect();
        assert_eq!(coeffs, vec![BigInt::from(1), BigInt::from(-6)]);
    }

    #[test]
    fn fiber_solve_examples() {
        // x0 + x1 + x2 = 0 at (1, 2) gives x2 = -3
        let h = Hypersurface::new(
            vec![1, 1, 1],
            vec![
                (vec![1, 0, 0], r(1)),
                (vec![0, 1, 0], r(1)),
                (vec![0, 0, 1], r(1)),
            ],
        )
        .unwrap();
        let form = h.fiber_form(2, &[pt(1, 1), pt(2, 1), pt(0, 1)]).unwrap();
        let roots = crate::roots::integer_form_roots(&form, 1e-12).unwrap();
        assert_eq!(roots.len(), 1);
        assert_eq!(roots[0].exact, Some((BigInt::from(-3), BigInt::from(1))));
        // at infinity in block 0 the fiber is x2 = inf
        let form = h
            .fiber_form(2, &[ProjectivePoint::infinity(), pt(2, 1), pt(0, 1)])
            .unwrap();
        assert_eq!(form, BinaryForm::from_i64(&[1, 0]));
    }

    #[test]
    fn residual_on_diagonal() {
        let h = Hypersurface::diagonal(2, 0, 1).unwrap();
        let z = CPoint::Finite(Complex64::new(0.3, 0.8));
        assert!(h.relative_residual(&[z, z]) < 1e-15);
        assert!(h.relative_residual(&[CPoint::Infinity, CPoint::Infinity]) < 1e-15);
        assert!(h.relative_residual(&[z, CPoint::real(2.0)]) > 0.1);
    }
}
