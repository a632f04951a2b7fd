use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use super::IntMatrix;

/// Smith normal form `M = U * diag(d) * V` with `U`, `V` unimodular.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SnfResult {
    /// Invariant factors `d_1 | d_2 | ... | d_k`, nonnegative, zeros last.
    /// Length is `min(rows, cols)`.
    pub diagonal: Vec<BigInt>,
    pub left: IntMatrix,
    pub right: IntMatrix,
}

impl SnfResult {
    /// The last invariant factor `d_n`.
    pub fn last(&self) -> &BigInt {
        self.diagonal.last().expect("matrices are nonempty")
    }

    /// `diag(d)` padded to the shape of the original matrix.
    pub fn diagonal_matrix(&self) -> IntMatrix {
        let (r, c) = (self.left.cols(), self.right.rows());
        IntMatrix::from_fn(r, c, |i, j| {
            if i == j {
                self.diagonal[i].clone()
            } else {
                BigInt::zero()
            }
        })
    }
}

/// Working state: `original = u * s * v` is kept invariant through every
/// elementary operation applied to `s`.
struct Reduction {
    s: IntMatrix,
    u: IntMatrix,
    v: IntMatrix,
}

impl Reduction {
    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.s.cols() {
            let t = self.s[(a, j)].clone();
            self.s[(a, j)] = self.s[(b, j)].clone();
            self.s[(b, j)] = t;
        }
        for i in 0..self.u.rows() {
            let t = self.u[(i, a)].clone();
            self.u[(i, a)] = self.u[(i, b)].clone();
            self.u[(i, b)] = t;
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.s.rows() {
            let t = self.s[(i, a)].clone();
            self.s[(i, a)] = self.s[(i, b)].clone();
            self.s[(i, b)] = t;
        }
        for j in 0..self.v.cols() {
            let t = self.v[(a, j)].clone();
            self.v[(a, j)] = self.v[(b, j)].clone();
            self.v[(b, j)] = t;
        }
    }

    /// row[target] += c * row[src]
    fn add_row(&mut self, target: usize, src: usize, c: &BigInt) {
        for j in 0..self.s.cols() {
            let d = c * &self.s[(src, j)];
            self.s[(target, j)] += d;
        }
        // U <- U * (I - c e_target e_src^T): column src of U -= c * column target
        for i in 0..self.u.rows() {
            let d = c * &self.u[(i, target)];
            self.u[(i, src)] -= d;
        }
    }

    /// col[target] += c * col[src]
    fn add_col(&mut self, target: usize, src: usize, c: &BigInt) {
        for i in 0..self.s.rows() {
            let d = c * &self.s[(i, src)];
            self.s[(i, target)] += d;
        }
        // V <- (I - c e_src e_target^T) * V: row src of V -= c * row target
        for j in 0..self.v.cols() {
            let d = c * &self.v[(target, j)];
            self.v[(src, j)] -= d;
        }
    }

    fn negate_row(&mut self, r: usize) {
        for j in 0..self.s.cols() {
            self.s[(r, j)] = -self.s[(r, j)].clone();
        }
        for i in 0..self.u.rows() {
            self.u[(i, r)] = -self.u[(i, r)].clone();
        }
    }
}

/// Smith normal form by pivoting on the smallest nonzero entry.
///
/// Accepts any shape, including zero rows, zero columns and the zero matrix.
pub fn smith_normal_form(m: &IntMatrix) -> SnfResult {
    let (rows, cols) = (m.rows(), m.cols());
    let mut r = Reduction {
        s: m.clone(),
        u: IntMatrix::identity(rows),
        v: IntMatrix::identity(cols),
    };
    let k = rows.min(cols);
    for t in 0..k {
        let Some((pi, pj)) = smallest_nonzero(&r.s, t) else {
            break;
        };
        r.swap_rows(t, pi);
        r.swap_cols(t, pj);
        loop {
            // Clear column t below and row t right of the pivot; any nonzero
            // remainder becomes the new, strictly smaller pivot.
            let mut dirty = false;
            for i in t + 1..rows {
                if r.s[(i, t)].is_zero() {
                    continue;
                }
                let q = r.s[(i, t)].div_floor(&r.s[(t, t)]);
                r.add_row(i, t, &-q);
                if !r.s[(i, t)].is_zero() {
                    dirty = true;
                }
            }
            for j in t + 1..cols {
                if r.s[(t, j)].is_zero() {
                    continue;
                }
                let q = r.s[(t, j)].div_floor(&r.s[(t, t)]);
                r.add_col(j, t, &-q);
                if !r.s[(t, j)].is_zero() {
                    dirty = true;
                }
            }
            if dirty {
                let (pi, pj) = smallest_in_cross(&r.s, t);
                r.swap_rows(t, pi);
                r.swap_cols(t, pj);
                continue;
            }
            // Pivot must divide the whole trailing block.
            let pivot = r.s[(t, t)].clone();
            let offender = (t + 1..rows)
                .find(|&i| (t + 1..cols).any(|j| !r.s[(i, j)].is_multiple_of(&pivot)));
            match offender {
                Some(i) => r.add_row(t, i, &BigInt::from(1)),
                None => break,
            }
        }
        if r.s[(t, t)].is_negative() {
            r.negate_row(t);
        }
    }
    let diagonal = (0..k).map(|i| r.s[(i, i)].clone()).collect();
    SnfResult {
        diagonal,
        left: r.u,
        right: r.v,
    }
}

fn smallest_nonzero(s: &IntMatrix, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for i in t..s.rows() {
        for j in t..s.cols() {
            let x = &s[(i, j)];
            if x.is_zero() {
                continue;
            }
            if best.is_none_or(|(bi, bj)| x.abs() < s[(bi, bj)].abs()) {
                best = Some((i, j));
            }
        }
    }
    best
}

fn smallest_in_cross(s: &IntMatrix, t: usize) -> (usize, usize) {
    let candidates = (t..s.rows())
        .map(|i| (i, t))
        .chain((t + 1..s.cols()).map(|j| (t, j)));
    candidates
        .filter(|&p| !s[p].is_zero())
        .min_by(|&a, &b| s[a].abs().cmp(&s[b].abs()))
        .expect("a nonzero remainder exists")
}
