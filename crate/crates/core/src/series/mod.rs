//! Truncated formal power series and the generating-function machinery
//! built on them: class solvers, singularity location, coefficient
//! asymptotics and level series.

mod asymptotics;
mod level;
mod singularity;
mod solve;

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub use asymptotics::{fit_asymptotics, richardson, MIN_FIT_ORDER, RICHARDSON_LEVELS};
pub use level::level_series;
pub(crate) use level::pointing_weights;
pub use singularity::{find_singularity, GValues, SingularityData, UnlabelledSystem};
pub use solve::{
    solve_class, solve_class_scaled, solve_implicit, solve_implicit_scaled, solve_labelled_class, solve_unlabelled_class,
};
pub(crate) use solve::scaled_substitution;

/// Coefficients `c_0..=c_N` of a power series known modulo `z^(N+1)`.
///
/// Every operation is explicit about the order of its result: binary
/// operations work at the smaller of the two orders and nothing past `N` is
/// ever read or produced.
#[derive(Clone, PartialEq)]
pub struct TruncatedSeries<T> {
    coeffs: Vec<T>,
}

impl<T: Scalar> TruncatedSeries<T> {
    pub fn zero(order: usize) -> Self {
        TruncatedSeries {
            coeffs: vec![T::zero(); order + 1],
        }
    }

    pub fn one(order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = T::one();
        s
    }

    /// The series `z`.
    pub fn variable(order: usize) -> Self {
        Self::monomial(T::one(), 1, order)
    }

    pub fn monomial(c: T, k: usize, order: usize) -> Self {
        let mut s = Self::zero(order);
        if k <= order {
            s.coeffs[k] = c;
        }
        s
    }

    /// Series with the given coefficients; the order is `coeffs.len() - 1`.
    ///
    /// # Panics
    /// If `coeffs` is empty.
    pub fn from_coeffs(coeffs: Vec<T>) -> Self {
        assert!(!coeffs.is_empty(), "a truncated series needs at least c_0");
        TruncatedSeries { coeffs }
    }

    /// A polynomial viewed as a series of the given order (higher terms are
    /// dropped, missing ones are zero).
    pub fn polynomial(mut coeffs: Vec<T>, order: usize) -> Self {
        coeffs.resize(order + 1, T::zero());
        TruncatedSeries { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, k: usize) -> &T {
        &self.coeffs[k]
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<T> {
        self.coeffs
    }

    pub fn set_coeff(&mut self, k: usize, c: T) {
        self.coeffs[k] = c;
    }

    /// Index of the first nonzero coefficient.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn is_zero(&self) -> bool {
        self.valuation().is_none()
    }

    /// Drops every coefficient above `order`.
    ///
    /// # Panics
    /// If `order` exceeds the current order (that would invent coefficients).
    pub fn truncate(&self, order: usize) -> Self {
        assert!(
            order <= self.order(),
            "cannot raise the order of a truncated series ({} -> {})",
            self.order(),
            order
        );
        TruncatedSeries {
            coeffs: self.coeffs[..=order].to_vec(),
        }
    }

    pub fn scale(&self, c: &T) -> Self {
        TruncatedSeries {
            coeffs: self
                .coeffs
                .iter()
                .map(|a| {
                    let mut a = a.clone();
                    a *= c;
                    a
                })
                .collect(),
        }
    }

    /// Product truncated at `min(order, self.order(), other.order())`.
    pub fn mul_to(&self, other: &Self, order: usize) -> Self {
        let order = order.min(self.order()).min(other.order());
        let mut out = vec![T::zero(); order + 1];
        let nz: Vec<usize> = (0..=order).filter(|&j| !other.coeffs[j].is_zero()).collect();
        for i in 0..=order {
            let a = &self.coeffs[i];
            if a.is_zero() {
                continue;
            }
            for &j in &nz {
                if i + j > order {
                    break;
                }
                out[i + j].add_product(a, &other.coeffs[j]);
            }
        }
        TruncatedSeries { coeffs: out }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one(self.order());
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// `d/dz`; the result is known one order less.
    pub fn derivative(&self) -> Self {
        if self.order() == 0 {
            return Self::zero(0);
        }
        TruncatedSeries {
            coeffs: (1..=self.order())
                .map(|k| self.coeffs[k].clone() * T::from_usize(k))
                .collect(),
        }
    }

    /// `exp(self)` by the recurrence `g' = f' g`, i.e.
    /// `g_n = (1/n) Σ_{k=1..n} k f_k g_{n-k}`. Exact in rational mode.
    pub fn exp(&self) -> Result<Self> {
        if !self.coeffs[0].is_zero() {
            return Err(Error::NonzeroConstantTerm);
        }
        let n = self.order();
        let mut g = vec![T::zero(); n + 1];
        g[0] = T::one();
        let kf: Vec<T> = (0..=n)
            .map(|k| self.coeffs[k].clone() * T::from_usize(k))
            .collect();
        for m in 1..=n {
            let mut acc = T::zero();
            for k in 1..=m {
                acc.add_product(&kf[k], &g[m - k]);
            }
            g[m] = acc / T::from_usize(m);
        }
        Ok(TruncatedSeries { coeffs: g })
    }

    /// `f(z^i)` at the same order: `c_k` moves to index `i*k`.
    ///
    /// # Panics
    /// If `i == 0`.
    pub fn substitute_powers(&self, i: usize) -> Self {
        assert!(i >= 1, "substitute_powers needs i >= 1");
        let n = self.order();
        let mut out = vec![T::zero(); n + 1];
        for (k, c) in self.coeffs.iter().enumerate() {
            if i * k > n {
                break;
            }
            out[i * k] = c.clone();
        }
        TruncatedSeries { coeffs: out }
    }

    /// `f(z^i)` at a new `order`; valid as long as `order / i <= self.order()`.
    ///
    /// # Panics
    /// If `i == 0` or the result would need coefficients beyond `self.order()`.
    pub fn substitute_powers_to(&self, i: usize, order: usize) -> Self {
        assert!(i >= 1, "substitute_powers needs i >= 1");
        assert!(
            order / i <= self.order(),
            "f(z^{i}) to order {order} needs f to order {}",
            order / i
        );
        let mut out = vec![T::zero(); order + 1];
        for k in 0..=order / i {
            out[i * k] = self.coeffs[k].clone();
        }
        TruncatedSeries { coeffs: out }
    }

    /// Horner evaluation of the truncated polynomial.
    pub fn eval(&self, x: &T) -> T {
        let mut acc = T::zero();
        for c in self.coeffs.iter().rev() {
            acc *= x;
            acc += c;
        }
        acc
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> TruncatedSeries<U> {
        TruncatedSeries {
            coeffs: self.coeffs.iter().map(f).collect(),
        }
    }

    pub fn to_f64(&self) -> TruncatedSeries<f64> {
        self.map(|c| c.to_f64())
    }

    pub fn to_f64_vec(&self) -> Vec<f64> {
        self.coeffs.iter().map(|c| c.to_f64()).collect()
    }
}

impl TruncatedSeries<f64> {
    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }

    /// Value of the derivative at `x`.
    pub fn eval_derivative_f64(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for (k, c) in self.coeffs.iter().enumerate().skip(1).rev() {
            acc = acc * x + c * k as f64;
        }
        acc
    }
}

impl<T: Scalar> Add for &TruncatedSeries<T> {
    type Output = TruncatedSeries<T>;

    fn add(self, rhs: Self) -> TruncatedSeries<T> {
        let n = self.order().min(rhs.order());
        TruncatedSeries {
            coeffs: (0..=n)
                .map(|k| {
                    let mut c = self.coeffs[k].clone();
                    c += &rhs.coeffs[k];
                    c
                })
                .collect(),
        }
    }
}

impl<T: Scalar> Sub for &TruncatedSeries<T> {
    type Output = TruncatedSeries<T>;

    fn sub(self, rhs: Self) -> TruncatedSeries<T> {
        let n = self.order().min(rhs.order());
        TruncatedSeries {
            coeffs: (0..=n)
                .map(|k| {
                    let mut c = self.coeffs[k].clone();
                    c -= &rhs.coeffs[k];
                    c
                })
                .collect(),
        }
    }
}

impl<T: Scalar> Mul for &TruncatedSeries<T> {
    type Output = TruncatedSeries<T>;

    fn mul(self, rhs: Self) -> TruncatedSeries<T> {
        self.mul_to(rhs, usize::MAX)
    }
}

impl<T: Scalar> Neg for &TruncatedSeries<T> {
    type Output = TruncatedSeries<T>;

    fn neg(self) -> TruncatedSeries<T> {
        self.map(|c| -c.clone())
    }
}

impl<T: Scalar + fmt::Display> fmt::Display for TruncatedSeries<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{c}")?,
                1 => write!(f, "{c}·z")?,
                _ => write!(f, "{c}·z^{k}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(z^{})", self.order() + 1)
    }
}

impl<T: Scalar> fmt::Debug for TruncatedSeries<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TruncatedSeries")
            .field("order", &self.order())
            .field("coeffs", &self.coeffs)
            .finish()
    }
}

impl<T: Scalar> Serialize for TruncatedSeries<T> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_f64_vec().serialize(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ratio;
    use crate::ExactSeries;
    use num_rational::BigRational;
    use proptest::prelude::*;

    fn q(p: i64, d: i64) -> BigRational {
        ratio(p, d)
    }

    fn exact(c: &[(i64, i64)]) -> ExactSeries {
        TruncatedSeries::from_coeffs(c.iter().map(|&(p, d)| q(p, d)).collect())
    }

    #[test]
    fn exp_of_zero_is_one() {
        let e = ExactSeries::zero(5).exp().unwrap();
        assert_eq!(e, ExactSeries::one(5));
    }

    #[test]
    fn exp_of_z() {
        let e = ExactSeries::variable(4).exp().unwrap();
        let want = exact(&[(1, 1), (1, 1), (1, 2), (1, 6), (1, 24)]);
        assert_eq!(e, want);
    }

    #[test]
    fn exp_of_z_plus_z2() {
        // Oracle: sum_k (z+z^2)^k / k! multiplied out by hand:
        // k=1: z + z^2; k=2: (z^2 + 2z^3)/2; k=3: z^3/6.
        // [z^3] = 1 + 1/6 = 7/6.
        let f = exact(&[(0, 1), (1, 1), (1, 1), (0, 1)]);
        let e = f.exp().unwrap();
        assert_eq!(*e.coeff(3), q(7, 6));
        assert_eq!(*e.coeff(2), q(3, 2));
    }

    #[test]
    fn exp_rejects_constant_term() {
        let f = exact(&[(1, 1), (1, 1)]);
        assert!(matches!(f.exp(), Err(Error::NonzeroConstantTerm)));
    }

    #[test]
    fn substitute_powers_cases() {
        let f = exact(&[(1, 1), (1, 1), (1, 1), (0, 1), (0, 1)]);
        let g = f.substitute_powers(2);
        assert_eq!(g, exact(&[(1, 1), (0, 1), (1, 1), (0, 1), (1, 1)]));
        assert_eq!(f.substitute_powers(1), f);
        let z = ExactSeries::variable(2);
        assert!(z.substitute_powers(3).is_zero());
    }

    #[test]
    fn truncation_is_explicit() {
        let a = ExactSeries::variable(3);
        let b = ExactSeries::variable(5);
        assert_eq!((&a * &b).order(), 3);
        assert_eq!((&a + &b).order(), 3);
        assert_eq!(b.pow(4).coeff(4), &q(1, 1));
        assert!(b.pow(6).is_zero());
    }

    #[test]
    fn derivative_drops_order() {
        let f = exact(&[(0, 1), (1, 1), (1, 2), (1, 3)]);
        let d = f.derivative();
        assert_eq!(d, exact(&[(1, 1), (1, 1), (1, 1)]));
    }

    #[test]
    fn float_evaluation() {
        let f = TruncatedSeries::from_coeffs(vec![1.0, 2.0, 3.0]);
        assert_eq!(f.eval_f64(2.0), 17.0);
        assert_eq!(f.eval_derivative_f64(2.0), 14.0);
        assert_eq!(f.eval(&2.0), 17.0);
    }

    fn small_series(order: usize) -> impl Strategy<Value = ExactSeries> {
        prop::collection::vec(-4i64..=4, order).prop_map(move |v| {
            let mut c = vec![q(0, 1)];
            c.extend(v.into_iter().map(|x| q(x, 1 + (x.unsigned_abs() as i64 % 3))));
            TruncatedSeries::from_coeffs(c)
        })
    }

    proptest! {
        #[test]
        fn multiplication_is_associative(a in small_series(6), b in small_series(6), c in small_series(6)) {
            let left = &(&a * &b) * &c;
            let right = &a * &(&b * &c);
            prop_assert_eq!(left, right);
        }

        #[test]
        fn exp_is_a_homomorphism(a in small_series(6), b in small_series(6)) {
            let lhs = (&a + &b).exp().unwrap();
            let rhs = &a.exp().unwrap() * &b.exp().unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }
}
