use serde::{Deserialize, Serialize};

use crate::spectral::ChangOptions;

/// The unnamed constants `c`, `C` of the argument, made explicit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TuningConstants {
    /// Constant of the Chang size diagnostic.
    pub c_chang: f64,
    /// Constant `C` in the translate-set floor `sigma^{C eps^{-2} p}`.
    pub c_size: f64,
    /// Increment constant `c`.
    pub c_increment: f64,
    /// Re-check every Chang dissection by span enumeration when small enough.
    pub verify_chang: bool,
}

impl Default for TuningConstants {
    fn default() -> Self {
        TuningConstants {
            c_chang: 8.0,
            c_size: 1.0,
            c_increment: 1.0 / 8.0,
            verify_chang: false,
        }
    }
}

impl TuningConstants {
    /// Guaranteed growth factor `1 + c'` per accepted increment, with
    /// `c' = min(c/4, c/(2(s-1)))` so that both branches of a step qualify.
    pub fn c_prime(&self, s: usize) -> f64 {
        let c = self.c_increment;
        (c / 4.0).min(c / (2.0 * (s as f64 - 1.0)))
    }

    /// `C` with at most `C ln(1/alpha) + 1` steps.
    pub fn step_constant(&self, s: usize) -> f64 {
        1.0 / (1.0 + self.c_prime(s)).ln()
    }

    pub fn chang(&self) -> ChangOptions {
        ChangOptions {
            c_chang: self.c_chang,
            verify: self.verify_chang,
        }
    }
}
