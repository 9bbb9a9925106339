use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::scalar::{rational_to_string, Scalar};
use crate::series::TruncatedSeries;

/// Exponent vector of a monomial `s_1^e_1 s_2^e_2 ...`; `exps[l-1]` belongs to
/// `s_l`. Trailing zeros are always trimmed so equal monomials compare equal.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn new(mut exps: Vec<u32>) -> Self {
        while exps.last() == Some(&0) {
            exps.pop();
        }
        Monomial(exps)
    }

    /// Cycle type of a permutation restricted to `support` (which must be
    /// invariant under `perm`).
    pub fn cycle_type(perm: &[usize], support: &[usize]) -> Self {
        let mut seen = vec![false; perm.len()];
        let mut exps: Vec<u32> = Vec::new();
        for &v in support {
            if seen[v] {
                continue;
            }
            let mut len = 0;
            let mut w = v;
            while !seen[w] {
                seen[w] = true;
                w = perm[w];
                len += 1;
            }
            if exps.len() < len {
                exps.resize(len, 0);
            }
            exps[len - 1] += 1;
        }
        Monomial::new(exps)
    }

    pub fn exponent(&self, l: usize) -> u32 {
        self.0.get(l - 1).copied().unwrap_or(0)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    /// `Σ l·e_l`: the number of permuted points.
    pub fn weight(&self) -> usize {
        self.0
            .iter()
            .enumerate()
            .map(|(i, &e)| (i + 1) * e as usize)
            .sum()
    }

    fn with_exponent(&self, l: usize, e: u32) -> Self {
        let mut v = self.0.clone();
        if v.len() < l {
            v.resize(l, 0);
        }
        v[l - 1] = e;
        Monomial::new(v)
    }
}

/// A (possibly truncated) cycle index polynomial with rational coefficients.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct CycleIndex {
    terms: BTreeMap<Monomial, BigRational>,
}

impl CycleIndex {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        let mut c = Self::new();
        c.add_term(Monomial::default(), BigRational::one());
        c
    }

    pub fn add_term(&mut self, m: Monomial, coef: BigRational) {
        if coef.is_zero() {
            return;
        }
        let entry = self.terms.entry(m).or_insert_with(BigRational::zero);
        *entry += coef;
        let zero = entry.is_zero();
        if zero {
            self.terms.retain(|_, c| !c.is_zero());
        }
    }

    pub fn add(&mut self, other: &CycleIndex) {
        for (m, c) in &other.terms {
            self.add_term(m.clone(), c.clone());
        }
    }

    /// Average of the cycle types of `group` acting on `support`.
    pub fn from_group(group: &[Vec<usize>], support: &[usize]) -> Self {
        let mut c = Self::new();
        let w = BigRational::new(1.into(), (group.len() as i64).into());
        for g in group {
            c.add_term(Monomial::cycle_type(g, support), w.clone());
        }
        c
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, m: &Monomial) -> BigRational {
        self.terms.get(m).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn total_coefficient(&self) -> BigRational {
        self.terms.values().fold(BigRational::zero(), |a, c| a + c)
    }

    pub fn all_positive(&self) -> bool {
        self.terms.values().all(|c| c.is_positive())
    }

    pub fn max_weight(&self) -> usize {
        self.terms.keys().map(Monomial::weight).max().unwrap_or(0)
    }

    /// Drops monomials of weight above `w`.
    pub fn truncate_weight(&self, w: usize) -> Self {
        CycleIndex {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.weight() <= w)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// `∂/∂s_l`.
    pub fn partial(&self, l: usize) -> Self {
        let mut out = Self::new();
        for (m, c) in &self.terms {
            let e = m.exponent(l);
            if e == 0 {
                continue;
            }
            out.add_term(
                m.with_exponent(l, e - 1),
                c * BigRational::from_integer(e.into()),
            );
        }
        out
    }

    /// Splits `Z = Σ_a s_1^a W_a(s_2, s_3, ...)` into the `W_a`.
    pub fn split_by_first(&self) -> Vec<CycleIndex> {
        let mut out: Vec<CycleIndex> = Vec::new();
        for (m, c) in &self.terms {
            let a = m.exponent(1) as usize;
            if out.len() <= a {
                out.resize_with(a + 1, CycleIndex::new);
            }
            out[a].add_term(m.with_exponent(1, 0), c.clone());
        }
        out
    }

    /// Numeric evaluation with `s_l = x(l)`.
    pub fn eval_f64(&self, x: impl Fn(usize) -> f64) -> f64 {
        let max_l = self.terms.keys().map(|m| m.0.len()).max().unwrap_or(0);
        let xs: Vec<f64> = (1..=max_l).map(&x).collect();
        self.terms
            .iter()
            .map(|(m, c)| {
                let mut v = Scalar::to_f64(c);
                for (i, &e) in m.0.iter().enumerate() {
                    if e > 0 {
                        v *= xs[i].powi(e as i32);
                    }
                }
                v
            })
            .sum()
    }

    /// Evaluation at `s_l = z^l`, which turns a cycle index into a generating
    /// function value.
    pub fn eval_at_powers(&self, z: f64) -> f64 {
        self.eval_f64(|l| z.powi(l as i32))
    }

    /// Substitutes the series `args[l-1]` for `s_l` (missing arguments are
    /// zero) and truncates at `order`.
    pub fn eval_series<T: Scalar>(&self, args: &[TruncatedSeries<T>], order: usize) -> TruncatedSeries<T> {
        let mut caches: Vec<PowerCache<T>> = args.iter().map(|a| PowerCache::new(a, order)).collect();
        let mut out = TruncatedSeries::<T>::zero(order);
        'terms: for (m, c) in &self.terms {
            let coef = T::from_rational(c);
            let mut acc: Option<TruncatedSeries<T>> = None;
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                if i >= caches.len() {
                    continue 'terms;
                }
                let Some(p) = caches[i].get(e) else {
                    continue 'terms;
                };
                acc = Some(match acc {
                    None => p.clone(),
                    Some(a) => {
                        let prod = a.mul_to(p, order);
                        if prod.is_zero() {
                            continue 'terms;
                        }
                        prod
                    }
                });
            }
            match acc {
                None => {
                    let mut c0 = out.coeff(0).clone();
                    c0 += &coef;
                    out.set_coeff(0, c0);
                }
                Some(a) => {
                    for k in 0..=order.min(a.order()) {
                        if a.coeff(k).is_zero() {
                            continue;
                        }
                        let mut v = out.coeff(k).clone();
                        v.add_product(&coef, a.coeff(k));
                        out.set_coeff(k, v);
                    }
                }
            }
        }
        out
    }
}

struct PowerCache<'a, T> {
    base: &'a TruncatedSeries<T>,
    order: usize,
    pows: Vec<TruncatedSeries<T>>,
    vanished: bool,
}

impl<'a, T: Scalar> PowerCache<'a, T> {
    fn new(base: &'a TruncatedSeries<T>, order: usize) -> Self {
        let order = order.min(base.order());
        PowerCache {
            base,
            order,
            pows: vec![TruncatedSeries::one(order)],
            vanished: false,
        }
    }

    fn get(&mut self, e: u32) -> Option<&TruncatedSeries<T>> {
        let e = e as usize;
        while self.pows.len() <= e && !self.vanished {
            let next = self.pows.last().unwrap().mul_to(self.base, self.order);
            if next.is_zero() {
                self.vanished = true;
            } else {
                self.pows.push(next);
            }
        }
        self.pows.get(e)
    }
}

impl fmt::Display for CycleIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{}", rational_to_string(c))?;
            for (i, &e) in m.0.iter().enumerate() {
                match e {
                    0 => {}
                    1 => write!(f, "·s{}", i + 1)?,
                    _ => write!(f, "·s{}^{}", i + 1, e)?,
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ratio;
    use crate::ExactSeries;

    fn mono(e: &[u32]) -> Monomial {
        Monomial::new(e.to_vec())
    }

    #[test]
    fn cycle_type_of_reflection() {
        // reflection of a 4-cycle through vertex 0: fixes 0 and 2, swaps 1,3
        let perm = vec![0, 3, 2, 1];
        assert_eq!(Monomial::cycle_type(&perm, &[1, 2, 3]), mono(&[1, 1]));
        assert_eq!(Monomial::cycle_type(&perm, &[1, 2, 3]).weight(), 3);
    }

    #[test]
    fn partial_derivative_and_split() {
        // Z = 1/2 s1^2 + 1/2 s2
        let mut z = CycleIndex::new();
        z.add_term(mono(&[2]), ratio(1, 2));
        z.add_term(mono(&[0, 1]), ratio(1, 2));
        let d = z.partial(1);
        assert_eq!(d.coefficient(&mono(&[1])), ratio(1, 1));
        assert_eq!(d.len(), 1);
        let w = z.split_by_first();
        assert_eq!(w.len(), 3);
        assert_eq!(w[0].coefficient(&mono(&[0, 1])), ratio(1, 2));
        assert_eq!(w[2].coefficient(&Monomial::default()), ratio(1, 2));
        assert_eq!(z.to_string(), "1/2·s2 + 1/2·s1^2");
    }

    #[test]
    fn series_evaluation_matches_powers() {
        // Z = 1/2 (s1^2 + s2) at s_l = z^l gives z^2
        let mut z = CycleIndex::new();
        z.add_term(mono(&[2]), ratio(1, 2));
        z.add_term(mono(&[0, 1]), ratio(1, 2));
        let order = 4;
        let args: Vec<ExactSeries> = (1..=order)
            .map(|l| ExactSeries::monomial(ratio(1, 1), l, order))
            .collect();
        let s = z.eval_series(&args, order);
        assert_eq!(s, ExactSeries::monomial(ratio(1, 1), 2, order));
        assert!((z.eval_at_powers(0.3) - 0.09).abs() < 1e-15);
    }

    #[test]
    fn cancelling_terms_disappear() {
        let mut z = CycleIndex::new();
        z.add_term(mono(&[1]), ratio(1, 2));
        z.add_term(mono(&[1]), ratio(-1, 2));
        assert!(z.is_empty());
    }
}
