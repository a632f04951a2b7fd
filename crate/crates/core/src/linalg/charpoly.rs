use std::ops::Neg;

use num_traits::Num;

use super::IntMatrix;
use crate::error::Result;
use crate::poly::IntPolynomial;

/// Characteristic polynomial `det(xI - m)`, exact and monic.
///
/// Uses the power-sum (Newton) recurrence on the traces of `m, m^2, ..., m^n`;
/// every division in it is exact over the integers.
pub fn char_poly(m: &IntMatrix) -> Result<IntPolynomial> {
    let n = m.require_square("characteristic polynomial")?;
    Ok(IntPolynomial::new(trace_charpoly(n, m.entries())))
}

/// Power-sum recurrence over any exact integer type, used with `i64` by the
/// oracle's small-graph fast path. Returns ascending coefficients, length n+1.
pub(crate) fn trace_charpoly<T>(n: usize, m: &[T]) -> Vec<T>
where
    T: Num + Clone + Neg<Output = T> + From<i32>,
{
    debug_assert_eq!(m.len(), n * n);
    let mut power = m.to_vec();
    let mut traces = Vec::with_capacity(n);
    for k in 1..=n {
        traces.push((0..n).fold(T::zero(), |acc, i| acc + power[i * n + i].clone()));
        if k < n {
            power = mat_mul(n, &power, m);
        }
    }
    // c[n-k] = -(1/k) * sum_{i=1..k} c[n-k+i] * p_i
    let mut c = vec![T::zero(); n + 1];
    c[n] = T::one();
    for k in 1..=n {
        let mut acc = T::zero();
        for i in 1..=k {
            acc = acc + c[n - k + i].clone() * traces[i - 1].clone();
        }
        c[n - k] = -(acc / T::from(k as i32));
    }
    c
}

fn mat_mul<T: Num + Clone>(n: usize, a: &[T], b: &[T]) -> Vec<T> {
    let mut out = vec![T::zero(); n * n];
    for i in 0..n {
        for k in 0..n {
            let x = &a[i * n + k];
            if x.is_zero() {
                continue;
            }
            for j in 0..n {
                out[i * n + j] = out[i * n + j].clone() + x.clone() * b[k * n + j].clone();
            }
        }
    }
    out
}
