//! Simple undirected graphs, their text formats, and exact spectra.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::linalg::{char_poly, IntMatrix};
use crate::poly::IntPolynomial;

/// Largest order representable in graph6 short form.
pub const GRAPH6_MAX_ORDER: usize = 62;

/// Simple undirected graph on vertices `0..n`.
///
/// The adjacency relation is stored as a dense symmetric boolean matrix with
/// a false diagonal; every constructor enforces that.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Graph {
    n: usize,
    adj: Vec<bool>,
}

impl Graph {
    /// Edgeless graph on `n >= 1` vertices.
    ///
    /// # Panics
    /// If `n == 0`.
    pub fn empty(n: usize) -> Self {
        assert!(n >= 1, "a graph has at least one vertex");
        Graph {
            n,
            adj: vec![false; n * n],
        }
    }

    pub fn complete(n: usize) -> Self {
        Graph::empty(n).complement()
    }

    pub fn path(n: usize) -> Self {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Graph::from_edges(n, &edges).expect("path edges are valid")
    }

    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3, "cycles need at least three vertices");
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Graph::from_edges(n, &edges).expect("cycle edges are valid")
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if n == 0 {
            return Err(Error::Argument("a graph has at least one vertex".into()));
        }
        let mut g = Graph::empty(n);
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::Argument(format!("edge ({u}, {v}) out of range for n = {n}")));
            }
            if u == v {
                return Err(Error::Argument(format!("self-loop at vertex {u}")));
            }
            g.set(u, v, true);
        }
        Ok(g)
    }

    /// Builds a graph from a predicate evaluated on pairs `i < j`.
    pub fn from_fn(n: usize, mut edge: impl FnMut(usize, usize) -> bool) -> Self {
        let mut g = Graph::empty(n);
        for j in 1..n {
            for i in 0..j {
                if edge(i, j) {
                    g.set(i, j, true);
                }
            }
        }
        g
    }

    fn set(&mut self, u: usize, v: usize, on: bool) {
        self.adj[u * self.n + v] = on;
        self.adj[v * self.n + u] = on;
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u * self.n + v]
    }

    pub fn neighbors(&self, u: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&v| self.has_edge(u, v))
    }

    pub fn degree(&self, u: usize) -> usize {
        self.neighbors(u).count()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().filter(|&&b| b).count() / 2
    }

    /// Edges `(i, j)` with `i < j`, ordered by `j` then `i`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for j in 1..self.n {
            for i in 0..j {
                if self.has_edge(i, j) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Relabels vertex `v` as `perm[v]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Graph> {
        let mut seen = vec![false; self.n];
        if perm.len() != self.n || perm.iter().any(|&p| p >= self.n || std::mem::replace(&mut seen[p], true)) {
            return Err(Error::Argument("not a permutation of the vertex set".into()));
        }
        let mut g = Graph::empty(self.n);
        for (u, v) in self.edges() {
            g.set(perm[u], perm[v], true);
        }
        Ok(g)
    }

    pub fn complement(&self) -> Graph {
        Graph::from_fn(self.n, |i, j| !self.has_edge(i, j))
    }

    pub fn adjacency_matrix(&self) -> IntMatrix {
        IntMatrix::from_fn(self.n, self.n, |i, j| {
            if self.has_edge(i, j) {
                BigInt::one()
            } else {
                BigInt::zero()
            }
        })
    }

    /// Adjacency matrix as a flat row-major `i64` buffer.
    pub(crate) fn adjacency_i64(&self) -> Vec<i64> {
        self.adj.iter().map(|&b| b as i64).collect()
    }

    /// Characteristic polynomials of `A(G)` and of `A` of the complement.
    pub fn generalized_charpoly(&self) -> (IntPolynomial, IntPolynomial) {
        let a = char_poly(&self.adjacency_matrix()).expect("adjacency is square");
        let b = char_poly(&self.complement().adjacency_matrix()).expect("adjacency is square");
        (a, b)
    }

    pub fn to_graph6(&self) -> Result<String> {
        emit_graph6(self)
    }

    /// Rows of `0`/`1` separated by single spaces, one line per vertex.
    pub fn to_adjacency_text(&self) -> String {
        let mut out = String::new();
        for i in 0..self.n {
            let row: Vec<&str> = (0..self.n)
                .map(|j| if self.has_edge(i, j) { "1" } else { "0" })
                .collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        out
    }
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match emit_graph6(self) {
            Ok(s) => write!(f, "Graph({s})"),
            Err(_) => write!(f, "Graph(n={}, edges={:?})", self.n, self.edges()),
        }
    }
}

/// Parses one graph6 short-form record, optionally newline-terminated.
pub fn parse_graph6(text: &[u8]) -> Result<Graph> {
    let body = text
        .strip_suffix(b"\n")
        .map(|t| t.strip_suffix(b"\r").unwrap_or(t))
        .unwrap_or(text);
    let err = |offset: usize, reason: &str| Error::Graph6 {
        offset,
        reason: reason.to_string(),
    };
    let Some(&header) = body.first() else {
        return Err(err(0, "empty record"));
    };
    if header == 126 {
        return Err(err(0, "long-form header (n > 62) is not supported"));
    }
    if !(63..126).contains(&header) {
        return Err(err(0, &format!("invalid header byte 0x{header:02x}")));
    }
    let n = (header - 63) as usize;
    if n == 0 {
        return Err(err(0, "graph with zero vertices"));
    }
    let bits = n * (n - 1) / 2;
    let groups = bits.div_ceil(6);
    let data = &body[1..];
    let mut values = Vec::with_capacity(groups);
    for (k, &b) in data.iter().enumerate() {
        if !(63..=126).contains(&b) {
            return Err(err(1 + k, &format!("byte 0x{b:02x} outside the graph6 range")));
        }
        values.push(b - 63);
    }
    if data.len() < groups {
        return Err(err(body.len(), &format!("truncated: expected {groups} data bytes, found {}", data.len())));
    }
    if data.len() > groups {
        return Err(err(1 + groups, "trailing bytes after the edge section"));
    }
    if !bits.is_multiple_of(6) {
        let pad = 6 - bits % 6;
        let last = values[groups - 1];
        if last & ((1 << pad) - 1) != 0 {
            return Err(err(groups, "nonzero padding bits"));
        }
    }
    let mut g = Graph::empty(n);
    let mut k = 0;
    for j in 1..n {
        for i in 0..j {
            let bit = (values[k / 6] >> (5 - k % 6)) & 1;
            if bit == 1 {
                g.set(i, j, true);
            }
            k += 1;
        }
    }
    Ok(g)
}

/// Canonical graph6 short-form encoding (no trailing newline).
pub fn emit_graph6(g: &Graph) -> Result<String> {
    let n = g.order();
    if n > GRAPH6_MAX_ORDER {
        return Err(Error::UnsupportedSize(n));
    }
    let mut out = vec![63 + n as u8];
    let mut acc = 0u8;
    let mut filled = 0;
    for j in 1..n {
        for i in 0..j {
            acc = (acc << 1) | g.has_edge(i, j) as u8;
            filled += 1;
            if filled == 6 {
                out.push(63 + acc);
                acc = 0;
                filled = 0;
            }
        }
    }
    if filled > 0 {
        out.push(63 + (acc << (6 - filled)));
    }
    Ok(String::from_utf8(out).expect("graph6 is ASCII"))
}

/// Parses `n` lines of `n` binary symbols each. Whitespace between symbols
/// is optional; blank lines are ignored. Rows and columns in errors are
/// zero-based.
pub fn parse_adjacency_text(text: &str) -> Result<Graph> {
    let rows: Vec<Vec<char>> = text
        .lines()
        .map(|l| l.chars().filter(|c| !c.is_whitespace()).collect::<Vec<_>>())
        .filter(|r| !r.is_empty())
        .collect();
    let n = rows.len();
    let err = |row: usize, col: usize, reason: String| Error::Adjacency { row, col, reason };
    if n == 0 {
        return Err(err(0, 0, "no rows".into()));
    }
    let mut bits = vec![vec![false; n]; n];
    for (i, row) in rows.iter().enumerate() {
        if row.len() != n {
            return Err(err(i, row.len().min(n), format!("row has {} symbols, expected {n}", row.len())));
        }
        for (j, &c) in row.iter().enumerate() {
            bits[i][j] = match c {
                '0' => false,
                '1' => true,
                other => return Err(err(i, j, format!("symbol {other:?} is not 0 or 1"))),
            };
        }
    }
    for i in 0..n {
        if bits[i][i] {
            return Err(err(i, i, "nonzero diagonal entry".into()));
        }
        for j in i + 1..n {
            if bits[i][j] != bits[j][i] {
                return Err(err(i, j, format!("asymmetric: ({i},{j}) != ({j},{i})")));
            }
        }
    }
    Ok(Graph::from_fn(n, |i, j| bits[i][j]))
}
