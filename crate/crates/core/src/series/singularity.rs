//! Locating the dominant singularity of `C•`.
//!
//! Both kinds reduce to `y = z·exp(G(y, z))` with nonnegative coefficients,
//! whose branch point is where the curve touches the diagonal:
//! `y = φ(y, z)` and `∂φ/∂y = 1`. The labelled case has `G = B'(y)`; the
//! unlabelled one has `G = Σ_a W_a(z) y^a + A(z)`, where `W_a` and `A`
//! collect everything that depends on `C•(z^l)` with `l >= 2` only.

use std::f64::consts::PI;

use serde::Serialize;

use super::{solve_unlabelled_class, TruncatedSeries};
use crate::classes::{BlockClass, ClassKind, CycleIndex};
use crate::error::{Error, Result};

const BISECTION_STEPS: usize = 200;

/// Location and strength of the square-root singularity of `C•`.
///
/// Near `ρ`, `C•(z) = τ - b·sqrt(1 - z/ρ) + O(1 - z/ρ)` and hence
/// `[z^n] C•(z) ~ A·ρ^(-n)·n^(-3/2)` with `A = b / (2√π)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SingularityData {
    pub rho: f64,
    pub tau: f64,
    pub b: f64,
    #[serde(rename = "A")]
    pub a: f64,
    pub truncation_order: usize,
    pub residual: f64,
}

impl SingularityData {
    fn new(rho: f64, tau: f64, b: f64, truncation_order: usize, residual: f64) -> Self {
        SingularityData {
            rho,
            tau,
            b,
            a: b / (2.0 * PI.sqrt()),
            truncation_order,
            residual,
        }
    }
}

/// Solves the singular system of `class` with its `B'` data truncated at
/// `order`. Fails with [`Error::NotSubcritical`] if the touching point is not
/// strictly inside the convergence domain of the block series.
pub fn find_singularity(class: &BlockClass, order: usize, tol: f64) -> Result<SingularityData> {
    let data = match class.kind() {
        ClassKind::Labelled => labelled(class, order)?,
        ClassKind::Unlabelled => UnlabelledSystem::new(class, order)?.singularity()?,
    };
    if !(data.residual <= tol) || !(data.rho > 0.0) || !(data.b > 0.0) {
        return Err(Error::NotSubcritical(format!(
            "singular system residual {:e} exceeds tolerance {tol:e}",
            data.residual
        )));
    }
    Ok(data)
}

/// `(b_i / b_j)^(1/(j-i))` for the last two nonzero coefficients; infinite
/// for polynomials.
fn ratio_radius(coeffs: &[f64], finite: bool) -> f64 {
    if finite {
        return f64::INFINITY;
    }
    let nz: Vec<usize> = (0..coeffs.len()).filter(|&k| coeffs[k] != 0.0).collect();
    match nz.as_slice() {
        [.., i, j] if *i > 0 => (coeffs[*i] / coeffs[*j]).powf(1.0 / (j - i) as f64),
        _ => f64::INFINITY,
    }
}

/// Root of an increasing function on `(0, cap)`, with `f(0+) < 0`. Returns
/// `None` if `f` stays negative up to `cap`.
fn increasing_root(f: impl Fn(f64) -> f64, start: f64, cap: f64) -> Option<f64> {
    let mut hi = start.min(0.5 * cap);
    while f(hi) < 0.0 {
        if hi >= cap * (1.0 - 1e-12) {
            return None;
        }
        hi = (2.0 * hi).min(cap * (1.0 - 1e-12));
    }
    let mut lo = 0.0;
    for _ in 0..BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

fn labelled(class: &BlockClass, order: usize) -> Result<SingularityData> {
    let b1 = class.bprime::<f64>(order)?;
    let radius = ratio_radius(b1.coeffs(), class.bprime_degree().is_some());
    let b2 = b1.derivative();
    let b3 = b2.derivative();
    let h = |y: f64| y * b2.eval_f64(y) - 1.0;
    let tau = increasing_root(h, 1.0, radius).ok_or_else(|| {
        Error::NotSubcritical(format!("y·B''(y) stays below 1 up to the radius {radius:.6} of B'"))
    })?;
    if tau > 0.99 * radius {
        return Err(Error::NotSubcritical(format!(
            "τ = {tau:.6} is at the radius {radius:.6} of B'"
        )));
    }
    let (bp, bpp, bppp) = (b1.eval_f64(tau), b2.eval_f64(tau), b3.eval_f64(tau));
    let rho = tau * (-bp).exp();
    let b = (2.0 / (bppp + bpp * bpp)).sqrt();
    let residual = (rho * bp.exp() - tau).abs().max((tau * bpp - 1.0).abs());
    Ok(SingularityData::new(rho, tau, b, order, residual))
}

/// The unlabelled equation `y = z·exp(Σ_a W_a(z) y^a + A(z))`, with the
/// `C•(z^l)`, `l >= 2`, evaluated from a float solution of the class.
#[derive(Clone, Debug)]
pub struct UnlabelledSystem {
    order: usize,
    c: TruncatedSeries<f64>,
    z: CycleIndex,
    split: Vec<CycleIndex>,
    finite_in_s1: bool,
}

/// `G` and its `y`-derivatives at one point.
#[derive(Clone, Copy, Debug)]
pub struct GValues {
    pub g: f64,
    pub g_y: f64,
    pub g_yy: f64,
}

impl UnlabelledSystem {
    pub fn new(class: &BlockClass, order: usize) -> Result<Self> {
        class.require_kind(ClassKind::Unlabelled)?;
        let c = solve_unlabelled_class::<f64>(class, order)?;
        let z = class.z_bprime(order)?;
        let split = z.split_by_first();
        Ok(UnlabelledSystem {
            order,
            c,
            z,
            split,
            finite_in_s1: class.bprime_degree().is_some(),
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// The float solution `C•(z)` this system was built from.
    pub fn series(&self) -> &TruncatedSeries<f64> {
        &self.c
    }

    /// Truncated `C•(x)`; only meaningful for `x` well inside the radius.
    pub fn c_at(&self, x: f64) -> f64 {
        self.c.eval_f64(x)
    }

    fn max_len(&self) -> usize {
        self.z.terms().map(|(m, _)| m.exponents().len()).max().unwrap_or(0)
    }

    /// `W_a(z)` for all `a`, i.e. the coefficients of `G` as a series in `y`.
    pub fn w(&self, z: f64) -> Vec<f64> {
        let args: Vec<f64> = (1..=self.max_len()).map(|l| self.c_at(z.powi(l as i32))).collect();
        self.split
            .iter()
            .map(|w| w.eval_f64(|l| if l == 1 { 0.0 } else { args[l - 1] }))
            .collect()
    }

    /// `A(z) = Σ_{i>=2} Z_{B'}(C•(z^i), C•(z^{2i}), ...) / i`.
    pub fn a_term(&self, z: f64) -> f64 {
        let mut total = 0.0;
        for i in 2..=self.order.max(2) {
            let zi = z.powi(i as i32);
            if zi < 1e-18 {
                break;
            }
            let v = self.z.eval_f64(|l| self.c_at(zi.powi(l as i32)));
            total += v / i as f64;
        }
        total
    }

    /// `G = a + Σ_k w_k y^k` and its first two `y`-derivatives.
    pub fn g_values(w: &[f64], a: f64, y: f64) -> GValues {
        GValues {
            g: a + horner_shift(w, y, 0),
            g_y: horner_shift(w, y, 1),
            g_yy: horner_shift(w, y, 2),
        }
    }

    fn y_cap(&self, w: &[f64]) -> f64 {
        ratio_radius(w, self.finite_in_s1)
    }

    /// For fixed `z`: the minimiser `y*` of `φ(y) - y` on `[0, cap)` and the
    /// minimum. The minimum is `<= 0` exactly when `z <= ρ`.
    fn inner(&self, z: f64) -> (f64, f64) {
        let w = self.w(z);
        let a = self.a_term(z);
        let cap = self.y_cap(&w);
        let phi = |y: f64| z * Self::g_values(&w, a, y).g.exp();
        let slope = |y: f64| {
            let v = Self::g_values(&w, a, y);
            z * v.g.exp() * v.g_y - 1.0
        };
        let y = if slope(0.0) >= 0.0 {
            0.0
        } else {
            increasing_root(slope, 1.0, cap).unwrap_or(cap * (1.0 - 1e-12))
        };
        (y, phi(y) - y)
    }

    pub fn singularity(&self) -> Result<SingularityData> {
        let n = self.order;
        let cs = self.c.coeffs();
        let mut hi = if n >= 2 && cs[n] > 0.0 && cs[n - 1] > 0.0 {
            (cs[n - 1] / cs[n]) * 1.05
        } else {
            0.5
        };
        hi = hi.min(0.999);
        while self.inner(hi).1 <= 0.0 {
            if hi >= 0.999 {
                return Err(Error::NotSubcritical("no branch point below z = 1".into()));
            }
            hi = (hi * 1.25).min(0.999);
        }
        let mut lo = 0.0;
        for _ in 0..BISECTION_STEPS {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.inner(mid).1 <= 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let rho = lo;
        let (tau, _) = self.inner(rho);
        let w = self.w(rho);
        let cap = self.y_cap(&w);
        if tau > 0.99 * cap {
            return Err(Error::NotSubcritical(format!(
                "τ = {tau:.6} is at the radius {cap:.6} of Z_B' in s1"
            )));
        }
        let a = self.a_term(rho);
        let v = Self::g_values(&w, a, tau);
        let h = 1e-6 * rho;
        let g_at = |z: f64| Self::g_values(&self.w(z), self.a_term(z), tau).g;
        let g_z = (g_at(rho + h) - g_at(rho - h)) / (2.0 * h);
        let b = (2.0 * (1.0 + rho * g_z) / (v.g_yy + v.g_y * v.g_y)).sqrt();
        let residual = (rho * v.g.exp() - tau).abs().max((tau * v.g_y - 1.0).abs());
        Ok(SingularityData::new(rho, tau, b, n, residual))
    }
}

/// `Σ_k k(k-1)...(k-d+1) w_k y^(k-d)`.
fn horner_shift(w: &[f64], y: f64, d: usize) -> f64 {
    let mut acc = 0.0;
    for k in (d..w.len()).rev() {
        let mut f = 1.0;
        for j in 0..d {
            f *= (k - j) as f64;
        }
        acc = acc * y + f * w[k];
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labelled_trees() {
        let t = BlockClass::builtin("trees_labelled").unwrap();
        let s = find_singularity(&t, 50, 1e-12).unwrap();
        assert!((s.rho - (-1.0f64).exp()).abs() < 1e-12);
        assert!((s.tau - 1.0).abs() < 1e-12);
        assert!((s.a - 1.0 / (2.0 * PI).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn unlabelled_trees() {
        let t = BlockClass::builtin("trees_unlabelled").unwrap();
        let s = find_singularity(&t, 100, 1e-10).unwrap();
        assert!((s.rho - 0.338_321_856_9).abs() < 1e-9, "{}", s.rho);
        assert!((s.tau - 1.0).abs() < 1e-7, "{}", s.tau);
    }

    #[test]
    fn cacti_stable_under_doubling() {
        let c = BlockClass::builtin("cacti_labelled").unwrap();
        let a = find_singularity(&c, 60, 1e-10).unwrap();
        let b = find_singularity(&c, 120, 1e-10).unwrap();
        assert!((a.rho - b.rho).abs() <= 1e-9 * a.rho);
    }

    #[test]
    fn g_values_of_polynomial() {
        // G = 1 + 2y + 3y^2 at y = 2: 17, G' = 14, G'' = 6
        let v = UnlabelledSystem::g_values(&[1.0, 2.0, 3.0], 0.5, 2.0);
        assert_eq!((v.g, v.g_y, v.g_yy), (17.5, 14.0, 6.0));
    }
}
