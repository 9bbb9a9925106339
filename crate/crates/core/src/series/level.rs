use super::{solve_unlabelled_class, TruncatedSeries};
use crate::classes::{BlockClass, ClassKind};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// `T^(k)(z)`: the sum over rooted class members of `z^n` times the number of
/// vertices of level below `k` (the root has level 0, the non-root vertices
/// of a block at the root have level 1, and so on).
///
/// Marking a vertex inside `C•(z^{iℓ})` (an `ℓ`-cycle of the `i`-th Pólya
/// term) gives
/// `T^(k+1) = C•·(1 + Σ_i Σ_ℓ ℓ·∂_ℓ Z_{B'}(C•(z^i), C•(z^{2i}), ...)·T^(k)(z^{iℓ}))`.
pub fn level_series<T: Scalar>(class: &BlockClass, k: usize, order: usize) -> Result<TruncatedSeries<T>> {
    class.require_kind(ClassKind::Unlabelled)?;
    if k == 0 {
        return Err(Error::InvalidClass("level series are indexed from k = 1".into()));
    }
    let c = solve_unlabelled_class::<T>(class, order)?;
    if k == 1 {
        return Ok(c);
    }
    let weights = pointing_weights(class, &c, order)?;
    let mut t = c.clone();
    for _ in 1..k {
        let mut sum = TruncatedSeries::one(order);
        for (stride, p) in &weights {
            sum = &sum + &p.mul_to(&t.substitute_powers(*stride), order);
        }
        t = c.mul_to(&sum, order);
    }
    Ok(t)
}

/// The series `ℓ·∂_ℓ Z_{B'}(C•(z^i), C•(z^{2i}), ...)` paired with the stride
/// `iℓ`, for every `iℓ <= order`: the weight of marking a vertex inside a
/// branch that sits on an `ℓ`-cycle of the `i`-th Pólya term.
pub(crate) fn pointing_weights<T: Scalar>(
    class: &BlockClass,
    c: &TruncatedSeries<T>,
    order: usize,
) -> Result<Vec<(usize, TruncatedSeries<T>)>> {
    let z = class.z_bprime(order)?;
    let max_len = z.terms().map(|(m, _)| m.exponents().len()).max().unwrap_or(0);
    let mut weights = Vec::new();
    for l in 1..=max_len {
        let dz = z.partial(l);
        if dz.is_empty() {
            continue;
        }
        for i in 1..=order {
            if i * l > order {
                break;
            }
            let zi = dz.truncate_weight(order / i);
            let args: Vec<TruncatedSeries<T>> = (1..=max_len).map(|m| c.substitute_powers(i * m)).collect();
            let p = zi.eval_series(&args, order).scale(&T::from_usize(l));
            if !p.is_zero() {
                weights.push((i * l, p));
            }
        }
    }
    Ok(weights)
}
