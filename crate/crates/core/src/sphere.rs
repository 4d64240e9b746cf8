//! Numeric points of the Riemann sphere and the fixed cap family used for
//! discrepancy statistics.

use std::f64::consts::PI;

use num_complex::Complex64;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

/// A numeric point of `P^1(C)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum CPoint {
    Finite(Complex64),
    Infinity,
}

impl CPoint {
    pub fn real(x: f64) -> Self {
        CPoint::Finite(Complex64::new(x, 0.0))
    }

    /// The point `1/u`.
    pub fn from_inverse(u: Complex64) -> Self {
        if u == Complex64::zero() {
            CPoint::Infinity
        } else {
            CPoint::Finite(u.inv())
        }
    }

    /// The point `[a : b]`.
    pub fn from_homogeneous(a: Complex64, b: Complex64) -> Self {
        if b == Complex64::zero() {
            CPoint::Infinity
        } else if a.norm() <= b.norm() {
            CPoint::Finite(a / b)
        } else {
            CPoint::from_inverse(b / a)
        }
    }

    pub fn finite(&self) -> Option<Complex64> {
        match self {
            CPoint::Finite(z) => Some(*z),
            CPoint::Infinity => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, CPoint::Finite(_))
    }

    /// Homogeneous coordinates with max-norm at most one: `(z, 1)` when
    /// `|z| <= 1`, otherwise `(1, 1/z)`.
    pub fn chart_vector(&self) -> (Complex64, Complex64) {
        let one = Complex64::new(1.0, 0.0);
        match self {
            CPoint::Infinity => (one, Complex64::zero()),
            CPoint::Finite(z) if z.norm() <= 1.0 => (*z, one),
            CPoint::Finite(z) => (one, z.inv()),
        }
    }

    /// Image under stereographic projection onto the unit sphere, with
    /// `inf` at the north pole `(0, 0, 1)`.
    pub fn to_sphere(&self) -> [f64; 3] {
        match self {
            CPoint::Infinity => [0.0, 0.0, 1.0],
            CPoint::Finite(z) => {
                let n2 = z.norm_sqr();
                if n2 <= 1.0 {
                    let den = 1.0 + n2;
                    [2.0 * z.re / den, 2.0 * z.im / den, (n2 - 1.0) / den]
                } else {
                    let w = z.inv();
                    let m2 = w.norm_sqr();
                    let den = 1.0 + m2;
                    [2.0 * w.re / den, -2.0 * w.im / den, (1.0 - m2) / den]
                }
            }
        }
    }

    /// Chordal distance: Euclidean distance of the sphere images, in `[0, 2]`.
    pub fn distance(&self, other: &CPoint) -> f64 {
        let a = self.to_sphere();
        let b = other.to_sphere();
        ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
    }

    /// `(x, y, z)` string for CSV output in the sphere chart.
    pub fn sphere_csv(&self) -> String {
        let s = self.to_sphere();
        format!("{:.12},{:.12},{:.12}", s[0], s[1], s[2])
    }

    /// `(re, im)` string for CSV output in the affine chart, `inf,inf` at infinity.
    pub fn affine_csv(&self) -> String {
        match self {
            CPoint::Finite(z) => format!("{:.12},{:.12}", z.re, z.im),
            CPoint::Infinity => "inf,inf".to_string(),
        }
    }
}

/// A closed spherical cap `{p : <p, center> >= cos(radius)}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Cap {
    pub center: [f64; 3],
    pub radius: f64,
}

impl Cap {
    pub fn contains(&self, p: &[f64; 3]) -> bool {
        let dot = p[0] * self.center[0] + p[1] * self.center[1] + p[2] * self.center[2];
        dot >= self.radius.cos()
    }
}

/// Number of caps in the standard family.
pub const CAP_COUNT: usize = 64;

/// Angular radius shared by every cap of the standard family.
pub const CAP_RADIUS: f64 = PI / 3.0;

/// The standard comparison family: 64 caps of angular radius `pi/3` centred
/// on a Fibonacci-sphere net. Fixed once; every discrepancy in the crate is
/// measured against it.
pub fn standard_caps() -> Vec<Cap> {
    let golden = PI * (3.0 - 5f64.sqrt());
    (0..CAP_COUNT)
        .map(|i| {
            let z = 1.0 - (2 * i + 1) as f64 / CAP_COUNT as f64;
            let r = (1.0 - z * z).sqrt();
            let phi = golden * i as f64;
            Cap {
                center: [r * phi.cos(), r * phi.sin(), z],
                radius: CAP_RADIUS,
            }
        })
        .collect()
}

/// Fraction of `points` lying in each cap.
pub fn cap_masses<'a, I>(caps: &[Cap], points: I) -> Vec<f64>
where
    I: IntoIterator<Item = &'a CPoint>,
{
    let mut counts = vec![0usize; caps.len()];
    let mut total = 0usize;
    for p in points {
        let s = p.to_sphere();
        total += 1;
        for (c, cap) in counts.iter_mut().zip(caps) {
            if cap.contains(&s) {
                *c += 1;
            }
        }
    }
    if total == 0 {
        return vec![0.0; caps.len()];
    }
    counts.iter().map(|&c| c as f64 / total as f64).collect()
}

/// `max_k |a_k - b_k|`.
pub fn max_difference(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Heuristic CLT threshold `3 sqrt(ln 64 / N)` for cap discrepancies.
pub fn discrepancy_threshold(n: usize) -> f64 {
    3.0 * ((CAP_COUNT as f64).ln() / n as f64).sqrt()
}
