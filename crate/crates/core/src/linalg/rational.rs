use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::IntMatrix;
use crate::error::{Error, Result};

/// Dense matrix of exact rationals, each entry kept in lowest terms with a
/// positive denominator (guaranteed by `BigRational`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigRational>,
}

impl RatMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<BigRational>) -> Result<Self> {
        if rows == 0 || cols == 0 || data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{rows}x{cols} rational matrix with {} entries",
                data.len()
            )));
        }
        Ok(RatMatrix { rows, cols, data })
    }

    pub fn from_int(m: &IntMatrix) -> Self {
        RatMatrix {
            rows: m.rows(),
            cols: m.cols(),
            data: m.entries().iter().map(|x| BigRational::from_integer(x.clone())).collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigRational {
        &self.data[i * self.cols + j]
    }

    pub fn entries(&self) -> &[BigRational] {
        &self.data
    }

    pub fn transpose(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self.get(i, j).clone());
            }
        }
        RatMatrix {
            rows: self.cols,
            cols: self.rows,
            data,
        }
    }

    pub fn mul(&self, other: &RatMatrix) -> Result<RatMatrix> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut data = vec![BigRational::zero(); self.rows * other.cols];
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    data[i * other.cols + j] += a * other.get(k, j);
                }
            }
        }
        Ok(RatMatrix {
            rows: self.rows,
            cols: other.cols,
            data,
        })
    }

    /// Least common multiple of the entry denominators: the smallest positive
    /// integer `l` with `l * self` integral.
    pub fn common_denominator(&self) -> BigInt {
        self.data
            .iter()
            .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
    }

    /// `scale * self` as an integer matrix, if integral.
    pub fn scaled_to_int(&self, scale: &BigInt) -> Option<IntMatrix> {
        let mut out = Vec::with_capacity(self.data.len());
        for x in &self.data {
            let y = x * scale;
            if !y.is_integer() {
                return None;
            }
            out.push(y.to_integer());
        }
        Some(IntMatrix::new(self.rows, self.cols, out).expect("shape preserved"))
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    let x = self.get(i, j);
                    if i == j {
                        x.is_one()
                    } else {
                        x.is_zero()
                    }
                })
            })
    }
}

/// Exact inverse via fraction-free Gauss-Jordan elimination on `[m | I]`.
pub fn inverse_rational(m: &IntMatrix) -> Result<RatMatrix> {
    let n = m.require_square("inverse")?;
    let mut a: Vec<Vec<BigInt>> = (0..n)
        .map(|i| {
            let mut row = m.row(i).to_vec();
            row.extend((0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }));
            row
        })
        .collect();
    let width = 2 * n;
    let mut prev = BigInt::one();
    for k in 0..n {
        let Some(swap) = (k..n).find(|&i| !a[i][k].is_zero()) else {
            return Err(Error::Singular);
        };
        a.swap(k, swap);
        for i in 0..n {
            if i == k {
                continue;
            }
            for j in 0..width {
                if j == k {
                    continue;
                }
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
            a[i][k] = BigInt::zero();
        }
        prev = a[k][k].clone();
    }
    // Each row i now reads [0.. d ..0 | adj_row] with d = +-det on the diagonal.
    let mut data = Vec::with_capacity(n * n);
    for (i, row) in a.iter().enumerate() {
        let d = &row[i];
        debug_assert!(!d.is_zero());
        for x in &row[n..] {
            let mut q = BigRational::new(x.clone(), d.clone());
            if q.denom().is_negative() {
                q = -q;
            }
            data.push(q);
        }
    }
    RatMatrix::new(n, n, data)
}
