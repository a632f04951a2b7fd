use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::ToPrimitive;

use super::IntMatrix;
use crate::error::{Error, Result};
use crate::number_theory::is_prime;

/// Arithmetic in the prime field `F_p`, `p < 2^64`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Fp {
    p: u64,
}

impl Fp {
    /// Fails unless `p` is prime.
    pub fn new(p: u64) -> Result<Self> {
        if is_prime(&BigUint::from(p)) {
            Ok(Fp { p })
        } else {
            Err(Error::Argument(format!("{p} is not prime")))
        }
    }

    pub fn modulus(self) -> u64 {
        self.p
    }

    pub fn reduce(self, x: &BigInt) -> u64 {
        x.mod_floor(&BigInt::from(self.p))
            .to_u64()
            .expect("residue fits in u64")
    }

    pub fn add(self, a: u64, b: u64) -> u64 {
        ((a as u128 + b as u128) % self.p as u128) as u64
    }

    pub fn sub(self, a: u64, b: u64) -> u64 {
        self.add(a, self.p - b % self.p)
    }

    pub fn mul(self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.p as u128) as u64
    }

    pub fn pow(self, mut base: u64, mut exp: u64) -> u64 {
        let mut acc = 1 % self.p;
        base %= self.p;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Inverse of a nonzero element.
    pub fn inv(self, a: u64) -> u64 {
        debug_assert!(!a.is_multiple_of(self.p));
        self.pow(a, self.p - 2)
    }

    pub fn dot(self, a: &[u64], b: &[u64]) -> u64 {
        a.iter().zip(b).fold(0, |acc, (&x, &y)| self.add(acc, self.mul(x, y)))
    }
}

/// Reduced row echelon form over `F_p`. Returns the pivot columns; `rows` is
/// rewritten in place and zero rows are dropped.
pub fn rref_mod_p(rows: &mut Vec<Vec<u64>>, field: Fp) -> Vec<usize> {
    let cols = rows.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(found) = (r..rows.len()).find(|&i| rows[i][c] != 0) else {
            continue;
        };
        rows.swap(r, found);
        let inv = field.inv(rows[r][c]);
        for x in rows[r].iter_mut() {
            *x = field.mul(*x, inv);
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[c] == 0 {
                continue;
            }
            let f = row[c];
            for (x, &y) in row.iter_mut().zip(&pivot_row) {
                *x = field.sub(*x, field.mul(f, y));
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    rows.truncate(r);
    pivots
}

fn reduced_rows(m: &IntMatrix, field: Fp) -> Vec<Vec<u64>> {
    (0..m.rows())
        .map(|i| m.row(i).iter().map(|x| field.reduce(x)).collect())
        .collect()
}

/// Rank of `m` over `F_p`.
pub fn rank_mod_p(m: &IntMatrix, p: u64) -> Result<usize> {
    let field = Fp::new(p)?;
    let mut rows = reduced_rows(m, field);
    Ok(rref_mod_p(&mut rows, field).len())
}

/// Basis of the right nullspace `{x : m x = 0}` over `F_p`.
///
/// The basis is in reduced row echelon form, so every vector's first nonzero
/// coordinate is 1 and the basis is canonical for the subspace.
pub fn nullspace_mod_p(m: &IntMatrix, p: u64) -> Result<Vec<Vec<u64>>> {
    let field = Fp::new(p)?;
    let n = m.cols();
    let mut rows = reduced_rows(m, field);
    let pivots = rref_mod_p(&mut rows, field);
    let mut basis: Vec<Vec<u64>> = Vec::new();
    for free in (0..n).filter(|c| !pivots.contains(c)) {
        let mut v = vec![0u64; n];
        v[free] = 1;
        for (row, &pc) in rows.iter().zip(&pivots) {
            v[pc] = field.sub(0, row[free]);
        }
        basis.push(v);
    }
    if !basis.is_empty() {
        rref_mod_p(&mut basis, field);
    }
    Ok(basis)
}
