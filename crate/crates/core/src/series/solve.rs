
use super::TruncatedSeries;
use crate::classes::{BlockClass, ClassKind, CycleIndex};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Solves `y = z · exp(A(z) + Σ_a φ_a(z) y^a)` for the power series `y` with
/// `y(0) = 0`, to `order`. `phis[a]` multiplies `y^a`; `A(0) + φ_0(0)` must be 0.
///
/// Coefficients are produced one at a time: `y_{t+1}` is the `t`-th
/// coefficient of the exponential, which only needs `y_1..y_t`.
pub fn solve_implicit<T: Scalar>(
    a: &TruncatedSeries<T>,
    phis: &[TruncatedSeries<T>],
    order: usize,
) -> Result<TruncatedSeries<T>> {
    solve_implicit_scaled(a, phis, order, &T::one())
}

/// [`solve_implicit`] for `y = s·z·exp(...)`. With `A`, `φ_a` given at `s·z`
/// this yields `y(s·z)`, i.e. coefficients `y_n s^n`.
pub fn solve_implicit_scaled<T: Scalar>(
    a: &TruncatedSeries<T>,
    phis: &[TruncatedSeries<T>],
    order: usize,
    scale: &T,
) -> Result<TruncatedSeries<T>> {
    let at = |s: &TruncatedSeries<T>, k: usize| -> T {
        if k <= s.order() {
            s.coeff(k).clone()
        } else {
            T::zero()
        }
    };
    let mut c0 = at(a, 0);
    if let Some(p0) = phis.first() {
        c0 += &at(p0, 0);
    }
    if !c0.is_zero() {
        return Err(Error::NonzeroConstantTerm);
    }
    let degree = phis.len().saturating_sub(1).min(order);
    let mut y = vec![T::zero(); order + 1];
    // pows[a][t] = [z^t] y^a for a >= 1
    let mut pows: Vec<Vec<T>> = vec![vec![T::zero(); order + 1]; degree + 1];
    let mut f = vec![T::zero(); order + 1];
    let mut e = vec![T::zero(); order + 1];
    e[0] = T::one();
    if order >= 1 {
        y[1] = scale.clone();
    }
    for t in 1..=order {
        // y_1..y_t are known; extend powers at index t
        pows[1][t] = y[t].clone();
        for p in 2..=degree.min(t) {
            let mut s = T::zero();
            for j in 1..=t - (p - 1) {
                if y[j].is_zero() {
                    continue;
                }
                s.add_product(&y[j], &pows[p - 1][t - j]);
            }
            pows[p][t] = s;
        }
        let mut ft = at(a, t);
        if let Some(p0) = phis.first() {
            ft += &at(p0, t);
        }
        for (p, phi) in phis.iter().enumerate().skip(1).take(degree) {
            for k in p..=t {
                let pk = &pows[p][k];
                if pk.is_zero() {
                    continue;
                }
                let c = at(phi, t - k);
                if !c.is_zero() {
                    ft.add_product(&c, pk);
                }
            }
        }
        f[t] = ft;
        let mut s = T::zero();
        for j in 1..=t {
            if f[j].is_zero() || e[t - j].is_zero() {
                continue;
            }
            let mut term = f[j].clone();
            term *= &T::from_usize(j);
            s.add_product(&term, &e[t - j]);
        }
        e[t] = s / T::from_usize(t);
        if t < order {
            let mut next = e[t].clone();
            next *= scale;
            y[t + 1] = next;
        }
    }
    Ok(TruncatedSeries::from_coeffs(y))
}

/// `C•(z) = z exp(B'(C•(z)))` for a labelled class, as an exponential
/// generating function to `order`.
pub fn solve_labelled_class<T: Scalar>(class: &BlockClass, order: usize) -> Result<TruncatedSeries<T>> {
    class.require_kind(ClassKind::Labelled)?;
    let bprime = class.bprime::<T>(order)?;
    let phis: Vec<TruncatedSeries<T>> = bprime
        .coeffs()
        .iter()
        .map(|c| TruncatedSeries::monomial(c.clone(), 0, 0))
        .collect();
    solve_implicit(&TruncatedSeries::zero(0), &phis, order)
}

/// `C•(s·z)` in floating point, i.e. coefficients `c_n s^n`. With `s = ρ`
/// these stay bounded where the plain coefficients overflow.
pub fn solve_class_scaled(class: &BlockClass, order: usize, scale: f64) -> Result<TruncatedSeries<f64>> {
    match class.kind() {
        ClassKind::Labelled => {
            let bprime = class.bprime::<f64>(order)?;
            let phis: Vec<TruncatedSeries<f64>> =
                bprime.coeffs().iter().map(|&c| TruncatedSeries::monomial(c, 0, 0)).collect();
            solve_implicit_scaled(&TruncatedSeries::zero(0), &phis, order, &scale)
        }
        ClassKind::Unlabelled => solve_unlabelled_scaled(class, order, &scale),
    }
}

/// `C•(z) = z exp(Σ_i Z_{B'}(C•(z^i), C•(z^{2i}), ...) / i)` for an
/// unlabelled class, as an ordinary generating function to `order`.
///
/// Works by doubling: once `C•` is known to order `m`, every term except
/// the `s_1` dependence of the `i = 1` summand is known to order `2m + 1`,
/// and the remaining equation is of the form handled by [`solve_implicit`].
pub fn solve_unlabelled_class<T: Scalar>(class: &BlockClass, order: usize) -> Result<TruncatedSeries<T>> {
    solve_unlabelled_scaled(class, order, &T::one())
}

fn solve_unlabelled_scaled<T: Scalar>(class: &BlockClass, order: usize, scale: &T) -> Result<TruncatedSeries<T>> {
    class.require_kind(ClassKind::Unlabelled)?;
    let z = class.z_bprime(order)?;
    let split = z.split_by_first();
    if order == 0 {
        return Ok(TruncatedSeries::zero(0));
    }
    let mut c = TruncatedSeries::<T>::monomial(scale.clone(), 1, 1);
    let mut m = c.order();
    while m < order {
        let target = (2 * m + 1).min(order);
        let (a, phis) = fixed_part(&z, &split, &c, target, scale);
        c = solve_implicit_scaled(&a, &phis, target, scale)?;
        m = target;
    }
    Ok(c)
}

/// The pieces of the unlabelled equation that depend on `C•` only through
/// `C•(z^l)` with `l >= 2`: `A = Σ_{i>=2} Z(...)/i` and the `W_a(C•(z^2), ...)`.
fn fixed_part<T: Scalar>(
    z: &CycleIndex,
    split: &[CycleIndex],
    c: &TruncatedSeries<T>,
    target: usize,
    scale: &T,
) -> (TruncatedSeries<T>, Vec<TruncatedSeries<T>>) {
    // s_l <- C•(z^{stride·l}); the i = 1 summand's s_1 is handled by the solver
    let subs = |stride: usize, count: usize| -> Vec<TruncatedSeries<T>> {
        (1..=count)
            .map(|l| match stride * l {
                1 => TruncatedSeries::zero(target),
                k => scaled_substitution(c, k, target, scale),
            })
            .collect()
    };
    let mut a = TruncatedSeries::zero(target);
    for i in 2..=target {
        let zi = z.truncate_weight(target / i);
        if zi.is_empty() {
            break;
        }
        let args = subs(i, zi.terms().map(|(m, _)| m.exponents().len()).max().unwrap_or(0));
        let v = zi.eval_series(&args, target);
        a = &a + &v.scale(&T::from_ratio(1, i as i64));
    }
    let max_len = z.terms().map(|(m, _)| m.exponents().len()).max().unwrap_or(0);
    let args = subs(1, max_len);
    let phis = split.iter().map(|w| w.eval_series(&args, target)).collect();
    (a, phis)
}

/// `C(s^k z^k)` given `C(s z)`: coefficient `j` moves to `k·j` and gains
/// `s^((k-1) j)`.
pub(crate) fn scaled_substitution<T: Scalar>(
    c: &TruncatedSeries<T>,
    k: usize,
    target: usize,
    scale: &T,
) -> TruncatedSeries<T> {
    let mut out = c.substitute_powers_to(k, target);
    if scale.is_one() {
        return out;
    }
    let mut step = T::one();
    for _ in 1..k {
        step *= scale;
    }
    let mut f = T::one();
    for j in 1..=target / k {
        f *= &step;
        let mut v = out.coeff(k * j).clone();
        v *= &f;
        out.set_coeff(k * j, v);
    }
    out
}

/// Dispatches on the kind of `class`.
pub fn solve_class<T: Scalar>(class: &BlockClass, order: usize) -> Result<TruncatedSeries<T>> {
    match class.kind() {
        ClassKind::Labelled => solve_labelled_class(class, order),
        ClassKind::Unlabelled => solve_unlabelled_class(class, order),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ratio;
    use crate::ExactSeries;
    use num_rational::BigRational;

    fn ints(s: &ExactSeries) -> Vec<i64> {
        s.coeffs()
            .iter()
            .map(|c| {
                assert!(c.is_integer(), "{c} is not an integer");
                i64::try_from(c.to_integer()).unwrap()
            })
            .collect()
    }

    #[test]
    fn labelled_trees() {
        let t = BlockClass::builtin("trees_labelled").unwrap();
        let c: ExactSeries = solve_labelled_class(&t, 5).unwrap();
        let expect = [ratio(0, 1), ratio(1, 1), ratio(1, 1), ratio(3, 2), ratio(8, 3), ratio(125, 24)];
        assert_eq!(c.coeffs(), &expect);
    }

    #[test]
    fn unlabelled_trees() {
        let t = BlockClass::builtin("trees_unlabelled").unwrap();
        let c: ExactSeries = solve_unlabelled_class(&t, 12).unwrap();
        assert_eq!(ints(&c), vec![0, 1, 1, 2, 4, 9, 20, 48, 115, 286, 719, 1842, 4766]);
    }

    #[test]
    fn float_agrees_with_exact() {
        let t = BlockClass::builtin("cacti_unlabelled").unwrap();
        let e: ExactSeries = solve_unlabelled_class(&t, 15).unwrap();
        let f: TruncatedSeries<f64> = solve_unlabelled_class(&t, 15).unwrap();
        for (a, b) in e.to_f64_vec().iter().zip(f.coeffs()) {
            assert!((a - b).abs() <= 1e-9 * a.abs().max(1.0));
        }
    }

    #[test]
    fn scaled_solutions() {
        for name in ["cacti_unlabelled", "blockgraphs_labelled"] {
            let class = BlockClass::builtin(name).unwrap();
            let plain: TruncatedSeries<f64> = solve_class(&class, 30).unwrap();
            let scaled = solve_class_scaled(&class, 30, 0.3).unwrap();
            for n in 0..=30 {
                let expect = plain.coeff(n) * 0.3f64.powi(n as i32);
                assert!((scaled.coeff(n) - expect).abs() <= 1e-12 * expect.abs().max(1e-300), "{name} {n}");
            }
        }
    }

    #[test]
    fn implicit_solver_rejects_constant() {
        let a = ExactSeries::one(3);
        assert!(matches!(
            solve_implicit::<BigRational>(&a, &[], 3),
            Err(Error::NonzeroConstantTerm)
        ));
    }

    #[test]
    fn wrong_kind() {
        let t = BlockClass::builtin("trees_labelled").unwrap();
        assert!(solve_unlabelled_class::<f64>(&t, 4).is_err());
    }
}
