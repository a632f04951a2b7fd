//! Walk matrix `W = [e, Ae, ..., A^{n-1}e]` and its arithmetic profile.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::linalg::{det, smith_normal_form, IntMatrix};
use crate::number_theory::{factor, p_adic_valuation, Factorization};

/// Columns `e, Ae, ..., A^{n-1}e`; entry `(i, j)` counts walks of length `j`
/// starting at vertex `i`.
pub fn build_walk_matrix(g: &Graph) -> IntMatrix {
    let n = g.order();
    let mut columns: Vec<Vec<BigInt>> = Vec::with_capacity(n);
    columns.push(vec![BigInt::one(); n]);
    for _ in 1..n {
        let prev = columns.last().expect("nonempty");
        let next = (0..n)
            .map(|i| g.neighbors(i).map(|j| &prev[j]).sum())
            .collect();
        columns.push(next);
    }
    IntMatrix::from_fn(n, n, |i, j| columns[j][i].clone())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WalkProfile {
    pub n: usize,
    pub walk_matrix: IntMatrix,
    pub det: BigInt,
    /// Invariant factors `d_1 | ... | d_n` of `W`.
    pub snf_diagonal: Vec<BigInt>,
    /// Factorization of `d_n`; absent when `W` is singular.
    pub dn_factorization: Option<Factorization>,
    /// Factorization of `det W`; absent when `W` is singular.
    pub det_factorization: Option<Factorization>,
    pub controllable: bool,
    /// Membership in the square-free family; `None` when undecidable
    /// because a factorization is incomplete.
    pub in_fn: Option<bool>,
}

impl WalkProfile {
    /// Last invariant factor `d_n`.
    pub fn dn(&self) -> &BigInt {
        self.snf_diagonal.last().expect("n >= 1")
    }

    /// `v_p(det W)`; `None` for a singular walk matrix.
    pub fn det_valuation(&self, p: &BigUint) -> Option<u32> {
        if !self.controllable {
            return None;
        }
        Some(p_adic_valuation(&self.det, p).expect("det is nonzero and p prime"))
    }

    pub fn dn_valuation(&self, p: &BigUint) -> Option<u32> {
        if !self.controllable {
            return None;
        }
        Some(p_adic_valuation(self.dn(), p).expect("d_n is nonzero and p prime"))
    }
}

/// Computes the walk matrix and everything derived from it.
pub fn profile(g: &Graph, effort_bound: u64) -> WalkProfile {
    let n = g.order();
    let w = build_walk_matrix(g);
    let d = det(&w).expect("walk matrix is square");
    let snf = smith_normal_form(&w);
    let controllable = !d.is_zero();
    let (dn_factorization, det_factorization) = if controllable {
        let dn_f = factor(snf.last(), effort_bound).expect("d_n is nonzero");
        let det_f = det_factorization_from(&d, &dn_f, effort_bound);
        (Some(dn_f), Some(det_f))
    } else {
        (None, None)
    };
    let mut p = WalkProfile {
        n,
        walk_matrix: w,
        det: d,
        snf_diagonal: snf.diagonal,
        dn_factorization,
        det_factorization,
        controllable,
        in_fn: None,
    };
    p.in_fn = in_family_fn(&p).ok();
    p
}

/// Every prime of `det W` divides `d_n`, so a complete factorization of
/// `d_n` yields one of `det W` by valuations alone.
fn det_factorization_from(d: &BigInt, dn_f: &Factorization, effort_bound: u64) -> Factorization {
    if !dn_f.complete {
        return factor(d, effort_bound).expect("det is nonzero");
    }
    let factors = dn_f
        .factors
        .iter()
        .map(|(p, _)| (p.clone(), p_adic_valuation(d, p).expect("prime")))
        .collect();
    let f = Factorization {
        sign: if d < &BigInt::zero() { -1 } else { 1 },
        factors,
        residual: BigUint::one(),
        complete: true,
        probabilistic: dn_f.probabilistic,
    };
    debug_assert_eq!(&f.value(), d);
    f
}

/// Whether `G` is controllable, `2^{floor(n/2)}` exactly divides `det W`, and
/// the odd part of `det W` is square-free.
///
/// Negative answers that are already certain from the known primes are
/// returned even when the factorization is incomplete; a positive answer
/// needs a complete factorization.
pub fn in_family_fn(p: &WalkProfile) -> Result<bool> {
    if !p.controllable {
        return Ok(false);
    }
    let f = p
        .det_factorization
        .as_ref()
        .expect("controllable profiles carry a factorization");
    let half = (p.n / 2) as u32;
    let two = BigUint::from(2u32);
    if f.exponent_of(&two).unwrap_or(0) != half {
        return Ok(false);
    }
    if f.factors.iter().any(|(q, e)| *q != two && *e > 1) {
        return Ok(false);
    }
    if !f.complete {
        return Err(Error::Indeterminate(format!(
            "det(W) has an unfactored cofactor {}",
            f.residual
        )));
    }
    Ok(true)
}
