//! Rational orthogonal matrices with unit row sums, stored as `(l * Q, l)`.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::linalg::{inverse_rational, IntMatrix, RatMatrix};
use crate::walk::build_walk_matrix;

/// Rational orthogonal `Q` with `Qe = e`, held as the integer matrix `l * Q`
/// and its level `l`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalOrthogonal {
    scaled: IntMatrix,
    level: BigUint,
}

/// Outcome of each structural check on a candidate `(l * Q, l)`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct QValidation {
    pub not_square: bool,
    /// First `(i, j)` where `(lQ)^T (lQ) != l^2 I`, with the offending value.
    pub orthogonality: Option<(usize, usize, BigInt)>,
    /// First row whose sum is not `l`.
    pub row_sum: Option<(usize, BigInt)>,
    /// First column whose sum is not `l`.
    pub column_sum: Option<(usize, BigInt)>,
    /// `gcd(l, entries)` when it exceeds 1, i.e. `l` is not minimal.
    pub common_factor: Option<BigUint>,
}

impl QValidation {
    pub fn is_valid(&self) -> bool {
        !self.not_square
            && self.orthogonality.is_none()
            && self.row_sum.is_none()
            && self.column_sum.is_none()
            && self.common_factor.is_none()
    }

    pub fn failures(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.not_square {
            out.push("matrix is not square".to_string());
        }
        if let Some((i, j, v)) = &self.orthogonality {
            out.push(format!("orthogonality fails at ({i},{j}): (lQ)^T(lQ) entry is {v}"));
        }
        if let Some((i, v)) = &self.row_sum {
            out.push(format!("row {i} of lQ sums to {v}, expected l"));
        }
        if let Some((j, v)) = &self.column_sum {
            out.push(format!("column {j} of lQ sums to {v}, expected l"));
        }
        if let Some(g) = &self.common_factor {
            out.push(format!("level is not minimal: {g} divides l and every entry"));
        }
        out
    }
}

/// Runs every check on `scaled = l * Q`.
pub fn validate(scaled: &IntMatrix, level: &BigUint) -> QValidation {
    let mut v = QValidation::default();
    if !scaled.is_square() {
        v.not_square = true;
        return v;
    }
    let n = scaled.rows();
    let l = BigInt::from(level.clone());
    let l2 = &l * &l;
    let gram = scaled.transpose().mul(scaled).expect("square");
    'outer: for i in 0..n {
        for j in 0..n {
            let expected = if i == j { l2.clone() } else { BigInt::zero() };
            if gram[(i, j)] != expected {
                v.orthogonality = Some((i, j, gram[(i, j)].clone()));
                break 'outer;
            }
        }
    }
    v.row_sum = (0..n)
        .map(|i| (i, scaled.row(i).iter().sum::<BigInt>()))
        .find(|(_, s)| *s != l);
    v.column_sum = (0..n)
        .map(|j| (j, (0..n).map(|i| &scaled[(i, j)]).sum::<BigInt>()))
        .find(|(_, s)| *s != l);
    let g = scaled
        .entries()
        .iter()
        .fold(l.clone(), |acc, x| acc.gcd(x));
    if !g.is_one() {
        v.common_factor = Some(g.magnitude().clone());
    }
    v
}

impl RationalOrthogonal {
    /// Accepts `(l * Q, l)` only if every invariant holds.
    pub fn new(scaled: IntMatrix, level: BigUint) -> Result<Self> {
        if level.is_zero() {
            return Err(Error::InvalidOrthogonal("level must be positive".into()));
        }
        let v = validate(&scaled, &level);
        if !v.is_valid() {
            return Err(Error::InvalidOrthogonal(v.failures().join("; ")));
        }
        Ok(RationalOrthogonal { scaled, level })
    }

    pub fn from_rational(q: &RatMatrix) -> Result<Self> {
        let l = level(q);
        let scaled = q
            .scaled_to_int(&BigInt::from(l.clone()))
            .expect("level clears every denominator");
        Self::new(scaled, l)
    }

    pub fn identity(n: usize) -> Self {
        RationalOrthogonal {
            scaled: IntMatrix::identity(n),
            level: BigUint::one(),
        }
    }

    /// Permutation matrix with `P[i][perm[i]] = 1`.
    pub fn permutation(perm: &[usize]) -> Result<Self> {
        let n = perm.len();
        let m = IntMatrix::from_fn(n, n, |i, j| BigInt::from((perm[i] == j) as u8));
        Self::new(m, BigUint::one())
    }

    pub fn scaled(&self) -> &IntMatrix {
        &self.scaled
    }

    pub fn level(&self) -> &BigUint {
        &self.level
    }

    pub fn order(&self) -> usize {
        self.scaled.rows()
    }

    pub fn to_rational(&self) -> RatMatrix {
        let l = BigInt::from(self.level.clone());
        let data = self
            .scaled
            .entries()
            .iter()
            .map(|x| num_rational::BigRational::new(x.clone(), l.clone()))
            .collect();
        RatMatrix::new(self.order(), self.order(), data).expect("square")
    }

    pub fn is_permutation(&self) -> bool {
        self.level.is_one()
    }
}

/// Least common denominator of the entries.
pub fn level(q: &RatMatrix) -> BigUint {
    q.common_denominator().magnitude().clone()
}

/// Computes `B = Q^T A(G) Q`; returns the graph with adjacency `B` when `B` is
/// a symmetric 0/1 matrix with zero diagonal.
pub fn check_membership(q: &RationalOrthogonal, g: &Graph) -> Result<Option<Graph>> {
    let n = g.order();
    if q.order() != n {
        return Err(Error::Dimension(format!(
            "Q is {}x{} but the graph has {n} vertices",
            q.order(),
            q.order()
        )));
    }
    let s = q.scaled();
    let b = s
        .transpose()
        .mul(&g.adjacency_matrix())
        .and_then(|m| m.mul(s))
        .expect("square");
    let l = BigInt::from(q.level().clone());
    let l2 = &l * &l;
    let mut bits = vec![false; n * n];
    for i in 0..n {
        for j in 0..n {
            let x = &b[(i, j)];
            if x.is_zero() {
                continue;
            }
            if *x != l2 || i == j {
                return Ok(None);
            }
            bits[i * n + j] = true;
        }
    }
    if (0..n).any(|i| (0..n).any(|j| bits[i * n + j] != bits[j * n + i])) {
        return Ok(None);
    }
    Ok(Some(Graph::from_fn(n, |i, j| bits[i * n + j])))
}

/// Recovers the unique `Q` with `Q^T A(G) Q = A(H)` and `Qe = e` for a
/// generalized-cospectral pair of controllable graphs: `Q^T = W_H W_G^{-1}`.
pub fn recover_q(g: &Graph, h: &Graph) -> Result<RationalOrthogonal> {
    if g.order() != h.order() {
        return Err(Error::Dimension("graphs have different orders".into()));
    }
    let wg = build_walk_matrix(g);
    let wh = build_walk_matrix(h);
    let wg_inv = match inverse_rational(&wg) {
        Ok(inv) => inv,
        Err(Error::Singular) => return Err(Error::Inapplicable("first graph is not controllable".into())),
        Err(e) => return Err(e),
    };
    if crate::linalg::det(&wh)?.is_zero() {
        return Err(Error::Inapplicable("second graph is not controllable".into()));
    }
    let qt = RatMatrix::from_int(&wh).mul(&wg_inv)?;
    let q = RationalOrthogonal::from_rational(&qt.transpose())
        .map_err(|e| Error::NotCospectral(e.to_string()))?;
    match check_membership(&q, g)? {
        Some(image) if &image == h => Ok(q),
        _ => Err(Error::NotCospectral("Q^T A(G) Q != A(H)".into())),
    }
}

/// Parses `"n l"` followed by `n` rows of `n` integers (the entries of `l Q`).
/// Blank lines and `#` comments are ignored. Line numbers are one-based.
pub fn parse_q_text(text: &str) -> Result<(IntMatrix, BigUint)> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    let err = |line: usize, reason: String| Error::QText { line, reason };
    let (hl, header) = lines.next().ok_or_else(|| err(1, "empty input".into()))?;
    let parts: Vec<&str> = header.split_whitespace().collect();
    if parts.len() != 2 {
        return Err(err(hl, "header must be \"n l\"".into()));
    }
    let n: usize = parts[0]
        .parse()
        .map_err(|_| err(hl, format!("bad order {:?}", parts[0])))?;
    let level: BigUint = parts[1]
        .parse()
        .map_err(|_| err(hl, format!("bad level {:?}", parts[1])))?;
    if n == 0 || level.is_zero() {
        return Err(err(hl, "order and level must be positive".into()));
    }
    let mut rows = Vec::with_capacity(n);
    for (ln, line) in lines {
        if rows.len() == n {
            return Err(err(ln, "more rows than the declared order".into()));
        }
        let row = line
            .split_whitespace()
            .map(|t| t.parse::<BigInt>().map_err(|_| err(ln, format!("bad integer {t:?}"))))
            .collect::<Result<Vec<_>>>()?;
        if row.len() != n {
            return Err(err(ln, format!("row has {} entries, expected {n}", row.len())));
        }
        rows.push(row);
    }
    if rows.len() != n {
        return Err(err(text.lines().count().max(1), format!("expected {n} rows, found {}", rows.len())));
    }
    Ok((IntMatrix::from_rows(&rows)?, level))
}

pub fn to_q_text(q: &RationalOrthogonal) -> String {
    let mut out = format!("{} {}\n", q.order(), q.level());
    out.push_str(&q.scaled().to_string());
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::parse_adjacency_text;

    fn counterexample() -> (Graph, RationalOrthogonal) {
        let g = parse_adjacency_text(include_str!("../fixtures/counterexample.adj")).unwrap();
        let (m, l) = parse_q_text(include_str!("../fixtures/counterexample.q")).unwrap();
        (g, RationalOrthogonal::new(m, l).unwrap())
    }

    fn level3_3x3() -> RationalOrthogonal {
        let m = IntMatrix::from_rows(&[vec![2, 2, -1], vec![2, -1, 2], vec![-1, 2, 2]]).unwrap();
        RationalOrthogonal::new(m, BigUint::from(3u32)).unwrap()
    }

    #[test]
    fn levels() {
        assert_eq!(level(&RatMatrix::from_int(&IntMatrix::identity(4))), BigUint::one());
        let p = RationalOrthogonal::permutation(&[2, 0, 1]).unwrap();
        assert_eq!(level(&p.to_rational()), BigUint::one());
        let (_, q) = counterexample();
        assert_eq!(level(&q.to_rational()), BigUint::from(3u32));
    }

    #[test]
    fn constructor_rejects_broken_matrices() {
        let (_, q) = counterexample();
        let mut m = q.scaled().clone();
        m[(1, 0)] += 1;
        let v = validate(&m, q.level());
        assert!(v.orthogonality.is_some() && v.row_sum == Some((1, BigInt::from(4))));
        assert!(RationalOrthogonal::new(m, q.level().clone()).is_err());
        // l = 6 with every entry doubled is orthogonal with unit sums but not minimal.
        let doubled = IntMatrix::from_fn(12, 12, |i, j| &q.scaled()[(i, j)] * 2);
        let v = validate(&doubled, &BigUint::from(6u32));
        assert_eq!(v.common_factor, Some(BigUint::from(2u32)));
        assert!(v.orthogonality.is_none() && v.row_sum.is_none());
        let neg = IntMatrix::from_rows(&[vec![-1]]).unwrap();
        assert!(RationalOrthogonal::new(neg, BigUint::one()).is_err());
    }

    #[test]
    fn membership() {
        let g = Graph::path(4);
        assert_eq!(check_membership(&RationalOrthogonal::identity(4), &g).unwrap(), Some(g));
        let (ce, q) = counterexample();
        let h = check_membership(&q, &ce).unwrap().expect("level-3 member");
        assert_eq!(h.generalized_charpoly(), ce.generalized_charpoly());
        assert!(check_membership(&q, &Graph::path(3)).is_err());
    }

    #[test]
    fn level3_rotation_on_small_graphs() {
        let q = level3_3x3();
        assert_eq!(check_membership(&q, &Graph::path(3)).unwrap(), None);
        // Q^T (J - I) Q = J - I for every Q with Qe = e.
        assert_eq!(check_membership(&q, &Graph::complete(3)).unwrap(), Some(Graph::complete(3)));
    }

    #[test]
    fn recover_identity_and_permutations() {
        let g = parse_adjacency_text(include_str!("../fixtures/g1.adj")).unwrap();
        let q = recover_q(&g, &g).unwrap();
        assert_eq!(q, RationalOrthogonal::identity(12));
        let perm = [3, 1, 4, 0, 5, 9, 2, 6, 8, 7, 11, 10];
        let h = g.permuted(&perm).unwrap();
        let q = recover_q(&g, &h).unwrap();
        assert!(q.is_permutation());
        // Q^T A(G) Q = A(H) with A(H)[perm[u]][perm[v]] = A(G)[u][v]  =>  Q[u][perm[u]] = 1
        for (u, &pu) in perm.iter().enumerate() {
            assert!(q.scaled()[(u, pu)].is_one());
        }
    }

    #[test]
    fn recover_level3_counterexample() {
        let (ce, q) = counterexample();
        let h = check_membership(&q, &ce).unwrap().unwrap();
        let back = recover_q(&ce, &h).unwrap();
        assert_eq!(back.level(), &BigUint::from(3u32));
        assert_eq!(back, q);
    }

    #[test]
    fn recover_errors() {
        let g = Graph::path(4);
        assert!(matches!(recover_q(&g, &g), Err(Error::Inapplicable(_))));
        let g1 = parse_adjacency_text(include_str!("../fixtures/g1.adj")).unwrap();
        let g2 = parse_adjacency_text(include_str!("../fixtures/counterexample.adj")).unwrap();
        assert!(matches!(recover_q(&g1, &g2), Err(Error::NotCospectral(_))));
        assert!(matches!(recover_q(&g1, &Graph::path(3)), Err(Error::Dimension(_))));
    }

    #[test]
    fn q_text_round_trip_and_errors() {
        let (_, q) = counterexample();
        let (m, l) = parse_q_text(&to_q_text(&q)).unwrap();
        assert_eq!(RationalOrthogonal::new(m, l).unwrap(), q);
        assert!(matches!(parse_q_text(""), Err(Error::QText { line: 1, .. })));
        assert!(matches!(parse_q_text("2 1\n1 0\n0"), Err(Error::QText { line: 3, .. })));
        assert!(matches!(parse_q_text("2 1\n1 x\n0 1"), Err(Error::QText { line: 2, .. })));
        assert!(matches!(parse_q_text("2\n1 0\n0 1"), Err(Error::QText { line: 1, .. })));
        assert!(matches!(parse_q_text("1 1\n1\n1"), Err(Error::QText { line: 3, .. })));
        assert!(parse_q_text("# comment\n1 1\n1\n").is_ok());
    }
}
