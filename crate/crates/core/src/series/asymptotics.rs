use super::TruncatedSeries;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Number of `1/n` correction terms removed by [`fit_asymptotics`].
pub const RICHARDSON_LEVELS: usize = 2;

/// Smallest truncation order accepted by [`fit_asymptotics`].
pub const MIN_FIT_ORDER: usize = 40;

/// Richardson extrapolation of `a(n), a(n+1), ..., a(n+levels)` for a
/// sequence `a(n) = L + α_1/n + ... + α_levels/n^levels + O(n^-(levels+1))`.
pub fn richardson(a: impl Fn(usize) -> f64, n: usize, levels: usize) -> f64 {
    let mut sum = 0.0;
    let mut binom = 1.0;
    for k in 0..=levels {
        if k > 0 {
            binom = binom * (levels - k + 1) as f64 / k as f64;
        }
        let m = (n + k) as f64;
        let sign = if (k + levels) % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign * binom * a(n + k) * m.powi(levels as i32);
    }
    let mut fact = 1.0;
    for i in 2..=levels {
        fact *= i as f64;
    }
    sum / fact
}

/// Extrapolated limit of `c_n ρ^n n^(3/2)`, i.e. the constant `A` in
/// `c_n ~ A ρ^(-n) n^(-3/2)`.
///
/// The limit is taken near the end of the series and again near half its
/// order; a relative disagreement above `rel_tol` means the coefficients do
/// not follow a square-root law.
pub fn fit_asymptotics<T: Scalar>(series: &TruncatedSeries<T>, rho: f64, rel_tol: f64) -> Result<f64> {
    let order = series.order();
    if order < MIN_FIT_ORDER {
        return Err(Error::OrderTooLow(format!(
            "coefficients up to order {order}; at least {MIN_FIT_ORDER} are needed"
        )));
    }
    let log_rho = rho.ln();
    let term = |n: usize| -> f64 {
        let c = series.coeff(n).to_f64();
        if c <= 0.0 {
            return f64::NAN;
        }
        (c.ln() + n as f64 * log_rho + 1.5 * (n as f64).ln()).exp()
    };
    let levels = RICHARDSON_LEVELS;
    let hi = richardson(term, order - levels, levels);
    let lo = richardson(term, order / 2 - levels, levels);
    if !hi.is_finite() || !lo.is_finite() || hi <= 0.0 {
        return Err(Error::AsymptoticsMismatch(format!(
            "c_n ρ^n n^(3/2) is not a positive finite sequence (estimates {lo}, {hi})"
        )));
    }
    let rel = (hi - lo).abs() / hi.abs();
    if rel > rel_tol {
        return Err(Error::AsymptoticsMismatch(format!(
            "extrapolated limits {lo:.6e} (n = {}) and {hi:.6e} (n = {}) differ by {rel:.2e}",
            order / 2,
            order
        )));
    }
    Ok(hi)
}
