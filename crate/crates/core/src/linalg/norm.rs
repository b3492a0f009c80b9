use super::{lu_factor, norm2, Matrix};
use crate::error::{Error, Result};

/// Operator 2-norm `max ‖Mx‖ / ‖x‖`, estimated by power iteration on `MᵀM`.
///
/// The start vector is all-ones with a small index-dependent tilt and the
/// iteration count is capped at `10·n + 100`, so the result is a
/// deterministic function of `m`. Power iteration approaches the norm from
/// below; accuracy depends on the gap between the two largest singular
/// values.
pub fn spectral_norm(m: &Matrix) -> f64 {
    let n = m.ncols();
    let cap = 10 * n + 100;
    let mut v: Vec<f64> = (0..n).map(|i| 1.0 + 0.01 * (i + 1) as f64).collect();
    let mut best = 0.0f64;

    for _ in 0..cap {
        let len = norm2(&v);
        if len == 0.0 || !len.is_finite() {
            break;
        }
        v.iter_mut().for_each(|x| *x /= len);
        let mv = m.mul_vec(&v);
        let sigma = norm2(&mv);
        if sigma <= best {
            // Rayleigh quotients of a PSD operator are nondecreasing, so a
            // stall means we are at machine precision.
            best = best.max(sigma);
            break;
        }
        best = sigma;
        v = m.tr_mul_vec(&mv);
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BanachEstimate {
    /// `‖E‖`
    pub e_norm: f64,
    /// Computed `‖(E − I)⁻¹‖`.
    pub inverse_norm: f64,
    /// `1 / (1 − ‖E‖)`
    pub bound: f64,
}

impl BanachEstimate {
    pub fn holds(&self, slack: f64) -> bool {
        self.inverse_norm <= self.bound + slack
    }
}

/// Computes `‖(E − I)⁻¹‖` alongside the bound `1/(1 − ‖E‖)` that holds
/// whenever `‖E‖ < 1`.
pub fn banach_inverse_bound(e: &Matrix) -> Result<BanachEstimate> {
    if !e.is_square() {
        return Err(Error::NonSquare {
            rows: e.nrows(),
            cols: e.ncols(),
        });
    }
    let e_norm = spectral_norm(e);
    if e_norm >= 1.0 {
        return Err(Error::NormTooLarge { norm: e_norm });
    }
    let inverse = lu_factor(&e.minus_identity())?.inverse();
    Ok(BanachEstimate {
        e_norm,
        inverse_norm: spectral_norm(&inverse),
        bound: 1.0 / (1.0 - e_norm),
    })
}
