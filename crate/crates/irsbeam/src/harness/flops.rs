//! Closed-form floating-point-operation counts for the iterative methods,
//! parameterized by their measured iteration counts.

use crate::beamformers::Method;
use crate::{Error, Result};

/// Iteration counts for the flop model.
///
/// `l1`: outer iterations of `gmrr`. `l2`: outer iterations of
/// `max_ssnr_rr`. `l4`: outer iterations of `max_ssnr_fp`, and `l3` the
/// KKT-system solves one of its outer iterations performs (Dinkelbach steps
/// times the multiplier bisection depth).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ComplexityParams {
    pub l1: u64,
    pub l2: u64,
    pub l3: u64,
    pub l4: u64,
}

impl ComplexityParams {
    pub fn new(l1: u64, l2: u64, l3: u64, l4: u64) -> Result<Self> {
        for (name, v) in [("l1", l1), ("l2", l2), ("l3", l3), ("l4", l4)] {
            if v < 1 {
                return Err(Error::domain(format!("iteration count {name} must be at least 1")));
            }
        }
        Ok(ComplexityParams { l1, l2, l3, l4 })
    }
}

impl Default for ComplexityParams {
    fn default() -> Self {
        ComplexityParams { l1: 1, l2: 1, l3: 1, l4: 1 }
    }
}

/// Flop count of one solve at `n` elements.
///
/// * `gmrr` — `L1 (2N^3 + 13N - 4)`
/// * `max-ssnr-rr` — `L2 (2N^3 + 6N^2 + 7N - 1)`
/// * `max-ssnr-fp` — `L4 L3 (24N^2 + 2N) log2(N) + 5N - 1`, with the
///   logarithm evaluated in real arithmetic and the result rounded to the
///   nearest integer.
///
/// The non-iterative baselines have no flop model and return an error.
pub fn flop_count(method: Method, n: usize, cp: &ComplexityParams) -> Result<u64> {
    if n == 0 {
        return Err(Error::domain("flop model needs n >= 1"));
    }
    let nn = n as u128;
    let raw = match method {
        Method::Gmrr => u128::from(cp.l1) * (2 * nn * nn * nn + 13 * nn - 4),
        Method::MaxSsnrRr => u128::from(cp.l2) * (2 * nn * nn * nn + 6 * nn * nn + 7 * nn - 1),
        Method::MaxSsnrFp => {
            let nf = n as f64;
            let per_outer = cp.l3 as f64 * (24.0 * nf * nf + 2.0 * nf) * nf.log2();
            let total = cp.l4 as f64 * per_outer + 5.0 * nf - 1.0;
            total.round() as u128
        }
        Method::Passive | Method::MaxRsnr => {
            return Err(Error::domain(format!(
                "method `{}` has no iteration-complexity model",
                method.tag()
            )))
        }
    };
    u64::try_from(raw).map_err(|_| Error::numeric("flop count overflows u64"))
}
