use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Size limits shared by the exact routines.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Caps {
    /// Largest admissible coefficient or coordinate, in decimal digits.
    pub coefficient_digits: usize,
    /// Largest admissible `d^n` for periodic point computations.
    pub periodic_degree: u64,
    /// Largest admissible degree in either block of a pushed-forward curve.
    #[serde(default = "default_curve_degree")]
    pub curve_degree: usize,
}

fn default_curve_degree() -> usize {
    128
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            coefficient_digits: 1_000_000,
            periodic_degree: 4096,
            curve_degree: default_curve_degree(),
        }
    }
}

impl Caps {
    /// Fails with `Overflow` when an integer of `bits` bits is over the digit cap.
    pub fn check_bits(&self, bits: u64) -> Result<()> {
        // log10(2) rounded up, so the estimate never undercounts
        #[allow(clippy::approx_constant)]
        let digits = (bits as f64 * 0.301_029_995_7).ceil() as usize;
        if digits > self.coefficient_digits {
            return Err(Error::Overflow {
                digits,
                cap: self.coefficient_digits,
            });
        }
        Ok(())
    }
}
