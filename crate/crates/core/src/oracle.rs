//! Brute-force ground truth at small orders.
//!
//! Every labeled graph on `n <= 7` vertices is bucketed by the exact pair of
//! characteristic polynomials (of `A` and of the complement's `A`), and each
//! bucket is split into isomorphism classes. Two classes sharing a bucket are
//! generalized-cospectral mates, so a class is determined by its generalized
//! spectrum iff it is alone in its bucket.

use std::collections::{BTreeMap, HashMap};
use std::io::BufRead;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exclusion::{exclude_by_isotropy, exclude_level2, CertificationReport, Status, Verdict};
use crate::graph::{emit_graph6, parse_graph6, Graph};
use crate::linalg::{nullspace_mod_p, trace_charpoly, Fp};
use crate::poly::IntPolynomial;
use crate::qmatrix::recover_q;
use crate::walk::WalkProfile;

/// Largest order for exhaustive labeled enumeration.
pub const MAX_EXHAUSTIVE_ORDER: usize = 7;

/// Smallest order with a graph that has a generalized-cospectral mate, as
/// measured by the exhaustive sweep.
pub const SMALLEST_NON_DGS_ORDER: usize = 7;

/// Number of isomorphism classes at [`SMALLEST_NON_DGS_ORDER`] that have a
/// generalized-cospectral mate.
pub const NON_DGS_CLASSES_AT_SMALLEST_ORDER: usize = 40;

/// Characteristic polynomials of `A(G)` and `A(complement of G)`, compared
/// exactly.
pub type SpectrumKey = (IntPolynomial, IntPolynomial);

fn pair_count(n: usize) -> usize {
    n * (n - 1) / 2
}

/// Graph whose edge `(i, j)`, `i < j`, is bit `k` of `mask`, where `k` runs
/// over pairs ordered by `j` then `i` (the graph6 bit order).
pub fn graph_from_mask(n: usize, mask: u64) -> Graph {
    let mut k = 0;
    let mut bits = vec![false; n * n];
    for j in 1..n {
        for i in 0..j {
            if mask >> k & 1 == 1 {
                bits[i * n + j] = true;
            }
            k += 1;
        }
    }
    Graph::from_fn(n, |i, j| bits[i * n + j])
}

/// Every labeled graph on `n` vertices, in edge-bitmask order.
pub fn enumerate_labeled_graphs(n: usize) -> Result<impl Iterator<Item = Graph>> {
    if n == 0 {
        return Err(Error::Argument("n must be positive".into()));
    }
    if n > MAX_EXHAUSTIVE_ORDER {
        return Err(Error::EnumerationSize(n));
    }
    let total = 1u64 << pair_count(n);
    Ok((0..total).map(move |mask| graph_from_mask(n, mask)))
}

fn small_key(n: usize, mask: u64) -> (Vec<i64>, Vec<i64>) {
    let mut a = vec![0i64; n * n];
    let mut b = vec![0i64; n * n];
    let mut k = 0;
    for j in 1..n {
        for i in 0..j {
            let m = if mask >> k & 1 == 1 { &mut a } else { &mut b };
            m[i * n + j] = 1;
            m[j * n + i] = 1;
            k += 1;
        }
    }
    (trace_charpoly(n, &a), trace_charpoly(n, &b))
}

/// Exact generalized characteristic polynomial pair, with an `i64` fast path
/// for small orders.
pub fn spectrum_key(g: &Graph) -> SpectrumKey {
    let n = g.order();
    if n <= 10 {
        let a = g.adjacency_i64();
        let b = g.complement().adjacency_i64();
        let to_poly = |v: Vec<i64>| IntPolynomial::from_i64(&v);
        (to_poly(trace_charpoly(n, &a)), to_poly(trace_charpoly(n, &b)))
    } else {
        g.generalized_charpoly()
    }
}

/// Stable vertex coloring of the disjoint union of `g` and `h` by iterated
/// degree refinement. Returns the colors of `g`'s and `h`'s vertices.
fn refine_colors(g: &Graph, h: &Graph) -> (Vec<usize>, Vec<usize>) {
    let n = g.order();
    let graphs = [g, h];
    let mut colors: Vec<usize> = graphs
        .iter()
        .flat_map(|x| (0..n).map(move |v| x.degree(v)))
        .collect();
    let mut classes = {
        let mut c = colors.clone();
        c.sort_unstable();
        c.dedup();
        c.len()
    };
    loop {
        let signatures: Vec<(usize, Vec<usize>)> = (0..2 * n)
            .map(|u| {
                let (gi, v) = (u / n, u % n);
                let mut nb: Vec<usize> = graphs[gi].neighbors(v).map(|w| colors[gi * n + w]).collect();
                nb.sort_unstable();
                (colors[u], nb)
            })
            .collect();
        let mut sorted: Vec<&(usize, Vec<usize>)> = signatures.iter().collect();
        sorted.sort();
        sorted.dedup();
        let next: Vec<usize> = signatures
            .iter()
            .map(|s| sorted.binary_search(&s).expect("present"))
            .collect();
        let count = sorted.len();
        colors = next;
        if count == classes {
            break;
        }
        classes = count;
    }
    let h_colors = colors.split_off(n);
    (colors, h_colors)
}

/// Exact isomorphism test: color refinement, then backtracking over
/// color-preserving maps. Graphs of different orders are never isomorphic.
pub fn is_isomorphic(g: &Graph, h: &Graph) -> bool {
    let n = g.order();
    if h.order() != n || g.edge_count() != h.edge_count() {
        return false;
    }
    let (cg, ch) = refine_colors(g, h);
    let mut hist_g = cg.clone();
    let mut hist_h = ch.clone();
    hist_g.sort_unstable();
    hist_h.sort_unstable();
    if hist_g != hist_h {
        return false;
    }
    // Map the vertices of g in order of increasing color-class size.
    let class_size = |c: usize| cg.iter().filter(|&&x| x == c).count();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| (class_size(cg[v]), cg[v], v));
    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];
    extend_map(g, h, &cg, &ch, &order, 0, &mut map, &mut used)
}

#[allow(clippy::too_many_arguments)]
fn extend_map(
    g: &Graph,
    h: &Graph,
    cg: &[usize],
    ch: &[usize],
    order: &[usize],
    depth: usize,
    map: &mut [usize],
    used: &mut [bool],
) -> bool {
    let Some(&v) = order.get(depth) else {
        return true;
    };
    for w in 0..h.order() {
        if used[w] || ch[w] != cg[v] {
            continue;
        }
        let consistent = order[..depth]
            .iter()
            .all(|&u| g.has_edge(u, v) == h.has_edge(map[u], w));
        if !consistent {
            continue;
        }
        map[v] = w;
        used[w] = true;
        if extend_map(g, h, cg, ch, order, depth + 1, map, used) {
            return true;
        }
        used[w] = false;
        map[v] = usize::MAX;
    }
    false
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MateReport {
    pub graph: Graph,
    /// Pairwise non-isomorphic graphs, none isomorphic to `graph`, sharing
    /// its generalized characteristic polynomial pair; sorted by graph6.
    pub mates: Vec<Graph>,
    pub is_dgs: bool,
}

/// Scans `universe` for generalized-cospectral mates of `g`.
pub fn find_gcs_mates(g: &Graph, universe: impl IntoIterator<Item = Graph>) -> MateReport {
    let key = spectrum_key(g);
    let mut mates: Vec<Graph> = Vec::new();
    for h in universe {
        if h.order() != g.order() || h.edge_count() != g.edge_count() {
            continue;
        }
        if spectrum_key(&h) != key || is_isomorphic(g, &h) {
            continue;
        }
        if !mates.iter().any(|m| is_isomorphic(m, &h)) {
            mates.push(h);
        }
    }
    mates.sort_by_cached_key(graph6_key);
    MateReport {
        graph: g.clone(),
        is_dgs: mates.is_empty(),
        mates,
    }
}

fn graph6_key(g: &Graph) -> String {
    emit_graph6(g).unwrap_or_default()
}

/// One isomorphism class found during bucketing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsoClass {
    /// First member met in input order.
    pub representative: Graph,
    /// Number of input graphs in the class.
    pub members: u64,
}

/// All isomorphism classes sharing one generalized spectrum.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpectrumBucket {
    pub key: SpectrumKey,
    pub classes: Vec<IsoClass>,
}

/// Input graphs grouped by generalized spectrum, then by isomorphism class.
/// Buckets are ordered by the graph6 encoding of their first representative.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpectrumIndex {
    pub n: usize,
    pub total_graphs: u64,
    pub buckets: Vec<SpectrumBucket>,
}

impl SpectrumIndex {
    /// Index of every labeled graph on `n <= 7` vertices.
    pub fn exhaustive(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Argument("n must be positive".into()));
        }
        if n > MAX_EXHAUSTIVE_ORDER {
            return Err(Error::EnumerationSize(n));
        }
        let total = 1u64 << pair_count(n);
        let chunk = 1u64 << 12;
        let grouped: HashMap<(Vec<i64>, Vec<i64>), Vec<u64>> = (0..total.div_ceil(chunk))
            .into_par_iter()
            .map(|c| {
                let mut local: HashMap<(Vec<i64>, Vec<i64>), Vec<u64>> = HashMap::new();
                for mask in c * chunk..((c + 1) * chunk).min(total) {
                    local.entry(small_key(n, mask)).or_default().push(mask);
                }
                local
            })
            .reduce(HashMap::new, |mut a, b| {
                for (k, mut v) in b {
                    a.entry(k).or_default().append(&mut v);
                }
                a
            });
        let buckets = grouped
            .into_par_iter()
            .map(|((a, b), mut masks)| {
                masks.sort_unstable();
                let key = (IntPolynomial::from_i64(&a), IntPolynomial::from_i64(&b));
                let classes = split_classes(masks.into_iter().map(|m| graph_from_mask(n, m)));
                SpectrumBucket { key, classes }
            })
            .collect();
        Ok(Self::finish(n, total, buckets))
    }

    /// Index of an arbitrary collection of graphs of one order, such as a
    /// graph6 stream of class representatives.
    pub fn from_graphs(graphs: impl IntoIterator<Item = Graph>) -> Result<Self> {
        let mut n = None;
        let mut total = 0u64;
        let mut grouped: HashMap<SpectrumKey, Vec<Graph>> = HashMap::new();
        for g in graphs {
            match n {
                None => n = Some(g.order()),
                Some(m) if m != g.order() => {
                    return Err(Error::Dimension(format!("mixed orders {m} and {}", g.order())))
                }
                _ => {}
            }
            total += 1;
            grouped.entry(spectrum_key(&g)).or_default().push(g);
        }
        let buckets = grouped
            .into_par_iter()
            .map(|(key, graphs)| SpectrumBucket {
                key,
                classes: split_classes(graphs.into_iter()),
            })
            .collect();
        Ok(Self::finish(n.unwrap_or(0), total, buckets))
    }

    fn finish(n: usize, total_graphs: u64, mut buckets: Vec<SpectrumBucket>) -> Self {
        for b in &mut buckets {
            b.classes.sort_by_cached_key(|c| graph6_key(&c.representative));
        }
        buckets.sort_by_cached_key(|b| graph6_key(&b.classes[0].representative));
        SpectrumIndex {
            n,
            total_graphs,
            buckets,
        }
    }

    pub fn class_count(&self) -> usize {
        self.buckets.iter().map(|b| b.classes.len()).sum()
    }

    /// Class representatives in graph6 order.
    pub fn representatives(&self) -> Vec<Graph> {
        let mut reps: Vec<Graph> = self
            .buckets
            .iter()
            .flat_map(|b| b.classes.iter().map(|c| c.representative.clone()))
            .collect();
        reps.sort_by_cached_key(graph6_key);
        reps
    }

    /// Representatives of classes that share their bucket with another class.
    pub fn non_dgs_representatives(&self) -> Vec<Graph> {
        let mut reps: Vec<Graph> = self
            .buckets
            .iter()
            .filter(|b| b.classes.len() > 1)
            .flat_map(|b| b.classes.iter().map(|c| c.representative.clone()))
            .collect();
        reps.sort_by_cached_key(graph6_key);
        reps
    }
}

/// Splits graphs that share a spectrum into isomorphism classes, comparing
/// each graph only against representatives with the same degree sequence.
fn split_classes(graphs: impl Iterator<Item = Graph>) -> Vec<IsoClass> {
    let mut classes: Vec<(Vec<usize>, IsoClass)> = Vec::new();
    for g in graphs {
        let mut degrees: Vec<usize> = (0..g.order()).map(|v| g.degree(v)).collect();
        degrees.sort_unstable();
        match classes
            .iter_mut()
            .find(|(d, c)| *d == degrees && is_isomorphic(&c.representative, &g))
        {
            Some((_, c)) => c.members += 1,
            None => classes.push((
                degrees,
                IsoClass {
                    representative: g,
                    members: 1,
                },
            )),
        }
    }
    classes.into_iter().map(|(_, c)| c).collect()
}

/// Outcome of checking the certifier against the oracle at one order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub n: usize,
    pub labeled_graphs: u64,
    pub classes: usize,
    pub controllable: usize,
    pub certified: usize,
    pub undecided: usize,
    pub not_controllable: usize,
    /// Classes with at least one generalized-cospectral mate.
    pub non_dgs: usize,
    pub controllable_non_dgs: usize,
    /// CERTIFIED_DGS graphs that have a mate (graph6). Must be empty.
    pub soundness_violations: Vec<String>,
    /// UNDECIDED graphs with no mate: the certifier's incompleteness.
    pub undecided_but_dgs: usize,
    /// Ordered controllable pairs `(G, H)` on which `Q` was recovered.
    pub cospectral_pairs: usize,
    /// Pairs whose level does not divide `d_n(G)`. Must be empty.
    pub level_divisibility_failures: Vec<String>,
    /// Pairs with an odd `p | l` lacking a nontrivial solution of
    /// `W^T x = 0, x^T x = 0 (mod p)`. Must be empty.
    pub isotropy_witness_failures: Vec<String>,
    /// Level-2 pairs where the weight-four test finds no passing candidate.
    /// Must be empty.
    pub level2_necessity_failures: Vec<String>,
    /// Number of recovered `Q` per level.
    pub level_histogram: BTreeMap<String, usize>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.soundness_violations.is_empty()
            && self.level_divisibility_failures.is_empty()
            && self.isotropy_witness_failures.is_empty()
            && self.level2_necessity_failures.is_empty()
    }
}

/// Checks `certifier` against the exhaustive oracle on all graphs of order
/// `n <= 7`, one graph per isomorphism class.
pub fn cross_validate<F>(n: usize, certifier: F) -> Result<ValidationReport>
where
    F: Fn(&Graph) -> CertificationReport + Sync,
{
    let index = SpectrumIndex::exhaustive(n)?;
    Ok(validate_index(&index, certifier))
}

/// As [`cross_validate`] over a prebuilt index.
pub fn validate_index<F>(index: &SpectrumIndex, certifier: F) -> ValidationReport
where
    F: Fn(&Graph) -> CertificationReport + Sync,
{
    let partials: Vec<ValidationReport> = index
        .buckets
        .par_iter()
        .map(|bucket| validate_bucket(bucket, &certifier))
        .collect();
    let mut report = ValidationReport {
        n: index.n,
        labeled_graphs: index.total_graphs,
        ..ValidationReport::default()
    };
    for p in partials {
        report.classes += p.classes;
        report.controllable += p.controllable;
        report.certified += p.certified;
        report.undecided += p.undecided;
        report.not_controllable += p.not_controllable;
        report.non_dgs += p.non_dgs;
        report.controllable_non_dgs += p.controllable_non_dgs;
        report.soundness_violations.extend(p.soundness_violations);
        report.undecided_but_dgs += p.undecided_but_dgs;
        report.cospectral_pairs += p.cospectral_pairs;
        report.level_divisibility_failures.extend(p.level_divisibility_failures);
        report.isotropy_witness_failures.extend(p.isotropy_witness_failures);
        report.level2_necessity_failures.extend(p.level2_necessity_failures);
        for (k, v) in p.level_histogram {
            *report.level_histogram.entry(k).or_default() += v;
        }
    }
    report.soundness_violations.sort();
    report
}

fn validate_bucket<F>(bucket: &SpectrumBucket, certifier: &F) -> ValidationReport
where
    F: Fn(&Graph) -> CertificationReport,
{
    let mut r = ValidationReport::default();
    let has_mate = bucket.classes.len() > 1;
    let reports: Vec<CertificationReport> = bucket
        .classes
        .iter()
        .map(|c| certifier(&c.representative))
        .collect();
    for (class, rep) in bucket.classes.iter().zip(&reports) {
        r.classes += 1;
        if has_mate {
            r.non_dgs += 1;
        }
        match rep.verdict {
            Verdict::NotControllable => r.not_controllable += 1,
            Verdict::CertifiedDgs => {
                r.controllable += 1;
                r.certified += 1;
                if has_mate {
                    r.soundness_violations.push(graph6_key(&class.representative));
                }
            }
            Verdict::Undecided => {
                r.controllable += 1;
                r.undecided += 1;
                if !has_mate {
                    r.undecided_but_dgs += 1;
                }
            }
        }
        if has_mate && rep.verdict != Verdict::NotControllable {
            r.controllable_non_dgs += 1;
        }
    }
    for (gi, (gc, grep)) in bucket.classes.iter().zip(&reports).enumerate() {
        if grep.verdict == Verdict::NotControllable {
            continue;
        }
        for (hi, hc) in bucket.classes.iter().enumerate() {
            if gi == hi {
                continue;
            }
            let (g, h) = (&gc.representative, &hc.representative);
            let Ok(q) = recover_q(g, h) else {
                continue;
            };
            r.cospectral_pairs += 1;
            let tag = format!("{} -> {}", graph6_key(g), graph6_key(h));
            let level = BigInt::from(q.level().clone());
            *r.level_histogram.entry(level.to_string()).or_default() += 1;
            if !grep.profile.dn().is_multiple_of(&level) {
                r.level_divisibility_failures.push(tag.clone());
            }
            let level_f = crate::number_theory::factor(&level, crate::DEFAULT_EFFORT).expect("level > 0");
            for (p, _) in &level_f.factors {
                let Some(p) = p.to_u64().filter(|&p| p != 2) else {
                    continue;
                };
                if !isotropy_witness_holds(&grep.profile, q.scaled(), p) {
                    r.isotropy_witness_failures.push(format!("{tag} (p = {p})"));
                }
            }
            if level == BigInt::from(2) {
                let open = exclude_level2(g, &grep.profile)
                    .map(|(st, _)| st.status == Status::Open)
                    .unwrap_or(false);
                if !open {
                    r.level2_necessity_failures.push(tag);
                }
            }
        }
    }
    r
}

/// For an odd `p | l`, some column `u` of `l Q` is nonzero mod `p` and solves
/// `W^T u = 0, u^T u = 0 (mod p)`; the kernel-based test must then report
/// the prime as not excluded.
fn isotropy_witness_holds(prof: &WalkProfile, scaled: &crate::linalg::IntMatrix, p: u64) -> bool {
    let field = Fp::new(p).expect("prime");
    let wt = prof.walk_matrix.transpose();
    let column_witness = (0..scaled.cols()).any(|j| {
        let u: Vec<u64> = scaled.column(j).iter().map(|x| field.reduce(x)).collect();
        if u.iter().all(|&x| x == 0) || field.dot(&u, &u) != 0 {
            return false;
        }
        (0..wt.rows()).all(|i| {
            let row: Vec<u64> = wt.row(i).iter().map(|x| field.reduce(x)).collect();
            field.dot(&row, &u) == 0
        })
    });
    let kernel_nonempty = nullspace_mod_p(&wt, p).map(|b| !b.is_empty()).unwrap_or(false);
    let engine_agrees = exclude_by_isotropy(prof, p)
        .map(|st| st.status != Status::Excluded)
        .unwrap_or(false);
    column_witness && kernel_nonempty && engine_agrees
}

/// Parsing policy for graph6 streams.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StreamMode {
    /// Abort on the first malformed line.
    Strict,
    /// Skip malformed lines and record them.
    Lenient,
}

/// Graphs read from a graph6 stream, in input order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct IngestReport {
    pub graphs: Vec<Graph>,
    /// `(line number, error)` for each skipped line; line numbers are one-based.
    pub skipped: Vec<(usize, Error)>,
}

/// Line-by-line graph6 reader. Blank lines and an optional `>>graph6<<`
/// header are ignored. Yields `(line number, parse result)`.
pub struct Graph6Lines<R> {
    reader: R,
    line: usize,
    buf: Vec<u8>,
}

impl<R: BufRead> Graph6Lines<R> {
    pub fn new(reader: R) -> Self {
        Graph6Lines {
            reader,
            line: 0,
            buf: Vec::new(),
        }
    }
}

impl<R: BufRead> Iterator for Graph6Lines<R> {
    type Item = (usize, Result<Graph>);

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            self.buf.clear();
            match self.reader.read_until(b'\n', &mut self.buf) {
                Ok(0) => return None,
                Ok(_) => {}
                Err(e) => {
                    self.line += 1;
                    return Some((self.line, Err(Error::Argument(format!("read error: {e}")))));
                }
            }
            self.line += 1;
            let mut rec: &[u8] = &self.buf;
            while let Some(stripped) = rec.strip_suffix(b"\n").or_else(|| rec.strip_suffix(b"\r")) {
                rec = stripped;
            }
            if let Some(stripped) = rec.strip_prefix(b">>graph6<<") {
                rec = stripped;
            }
            if rec.iter().all(u8::is_ascii_whitespace) {
                continue;
            }
            return Some((self.line, parse_graph6(rec)));
        }
    }
}

/// Reads every graph of a graph6 stream.
pub fn ingest_graph6_stream(reader: impl BufRead, mode: StreamMode) -> Result<IngestReport> {
    let mut out = IngestReport::default();
    for (line, parsed) in Graph6Lines::new(reader) {
        match parsed {
            Ok(g) => out.graphs.push(g),
            Err(e) => match mode {
                StreamMode::Strict => {
                    return Err(Error::Argument(format!("line {line}: {e}")));
                }
                StreamMode::Lenient => out.skipped.push((line, e)),
            },
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exclusion::certify;
    use rand::seq::SliceRandom;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn two_triangles() -> Graph {
        Graph::from_edges(6, &[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]).unwrap()
    }

    fn brute_force_isomorphic(g: &Graph, h: &Graph) -> bool {
        fn permutations(k: usize, perm: &mut Vec<usize>, used: &mut Vec<bool>, g: &Graph, h: &Graph) -> bool {
            let n = g.order();
            if k == n {
                return (0..n).all(|i| (0..n).all(|j| g.has_edge(i, j) == h.has_edge(perm[i], perm[j])));
            }
            for w in 0..n {
                if !used[w] {
                    used[w] = true;
                    perm.push(w);
                    if permutations(k + 1, perm, used, g, h) {
                        return true;
                    }
                    perm.pop();
                    used[w] = false;
                }
            }
            false
        }
        g.order() == h.order() && permutations(0, &mut Vec::new(), &mut vec![false; g.order()], g, h)
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(enumerate_labeled_graphs(1).unwrap().count(), 1);
        assert_eq!(enumerate_labeled_graphs(2).unwrap().count(), 2);
        assert_eq!(enumerate_labeled_graphs(3).unwrap().count(), 8);
        assert_eq!(enumerate_labeled_graphs(5).unwrap().count(), 1024);
        assert!(matches!(enumerate_labeled_graphs(8), Err(Error::EnumerationSize(8))));
        assert!(enumerate_labeled_graphs(0).is_err());
    }

    #[test]
    fn mask_order_matches_graph6_bit_order() {
        let g = graph_from_mask(3, 0b001);
        assert_eq!(g.edges(), vec![(0, 1)]);
        let g = graph_from_mask(3, 0b010);
        assert_eq!(g.edges(), vec![(0, 2)]);
        let g = graph_from_mask(3, 0b100);
        assert_eq!(g.edges(), vec![(1, 2)]);
        assert_eq!(emit_graph6(&graph_from_mask(3, 0b111)).unwrap(), "Bw");
    }

    #[test]
    fn isomorphism_examples() {
        let p3 = Graph::path(3);
        let relabeled = p3.permuted(&[2, 0, 1]).unwrap();
        assert!(is_isomorphic(&p3, &relabeled));
        assert!(!is_isomorphic(&p3, &Graph::complete(3)));
        assert!(!is_isomorphic(&Graph::cycle(6), &two_triangles()));
        assert!(!is_isomorphic(&Graph::path(3), &Graph::path(4)));
    }

    #[test]
    fn isomorphism_agrees_with_permutation_search() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x150);
        for _ in 0..1000 {
            let n = rng.gen_range(1..=6);
            let m = pair_count(n);
            let g = graph_from_mask(n, rng.gen_range(0..1u64 << m));
            let h = if rng.gen_bool(0.5) {
                let mut perm: Vec<usize> = (0..n).collect();
                perm.shuffle(&mut rng);
                g.permuted(&perm).unwrap()
            } else {
                // Same edge count makes the comparison nontrivial.
                let mut mask = 0u64;
                let mut bits: Vec<usize> = (0..m).collect();
                bits.shuffle(&mut rng);
                for &b in bits.iter().take(g.edge_count()) {
                    mask |= 1 << b;
                }
                graph_from_mask(n, mask)
            };
            assert_eq!(is_isomorphic(&g, &h), brute_force_isomorphic(&g, &h), "{g:?} {h:?}");
        }
    }

    #[test]
    fn every_graph_on_at_most_three_vertices_is_dgs() {
        for n in 1..=3 {
            for g in enumerate_labeled_graphs(n).unwrap() {
                let report = find_gcs_mates(&g, enumerate_labeled_graphs(n).unwrap());
                assert!(report.is_dgs, "{g:?}");
                assert!(report.mates.is_empty());
            }
        }
    }

    #[test]
    fn class_counts_match_known_sequence() {
        let expected = [1, 2, 4, 11, 34, 156];
        for (n, &count) in (1..=6).zip(&expected) {
            let index = SpectrumIndex::exhaustive(n).unwrap();
            assert_eq!(index.class_count(), count, "n = {n}");
            assert_eq!(index.total_graphs, 1 << pair_count(n));
            let members: u64 = index.buckets.iter().flat_map(|b| &b.classes).map(|c| c.members).sum();
            assert_eq!(members, index.total_graphs);
        }
    }

    #[test]
    fn buckets_share_exact_spectra() {
        let index = SpectrumIndex::exhaustive(5).unwrap();
        let mut keys: Vec<&SpectrumKey> = index.buckets.iter().map(|b| &b.key).collect();
        for b in &index.buckets {
            for c in &b.classes {
                assert_eq!(c.representative.generalized_charpoly(), b.key);
            }
        }
        keys.sort_by_key(|k| format!("{} {}", k.0, k.1));
        keys.dedup();
        assert_eq!(keys.len(), index.buckets.len());
    }

    #[test]
    fn no_mates_below_seven_vertices() {
        for n in 1..=6 {
            assert!(SpectrumIndex::exhaustive(n).unwrap().non_dgs_representatives().is_empty());
        }
    }

    #[test]
    fn mates_of_a_switched_pair() {
        // Godsil-McKay switching on D = {0, 1, 2, 3} (a 4-cycle); vertex 4
        // sees two vertices of D, vertex 5 none, vertex 6 all four.
        let g = Graph::from_edges(
            7,
            &[(0, 1), (1, 2), (2, 3), (3, 0), (4, 0), (4, 1), (6, 0), (6, 1), (6, 2), (6, 3), (4, 5), (5, 6)],
        )
        .unwrap();
        let h = Graph::from_fn(7, |i, j| {
            let flip = i < 4 && j == 4;
            g.has_edge(i, j) != flip
        });
        assert_eq!(g.generalized_charpoly(), h.generalized_charpoly());
        let universe = vec![g.clone(), h.clone(), g.complement(), Graph::path(7)];
        let report = find_gcs_mates(&g, universe.clone());
        if is_isomorphic(&g, &h) {
            assert!(report.is_dgs);
        } else {
            assert_eq!(report.mates, vec![h.clone()]);
            let dual = find_gcs_mates(&g.complement(), vec![h.complement(), g.clone()]);
            assert_eq!(dual.mates.len(), 1);
        }
    }

    #[test]
    fn from_graphs_matches_exhaustive_index() {
        let reps = SpectrumIndex::exhaustive(5).unwrap().representatives();
        let index = SpectrumIndex::from_graphs(reps.clone()).unwrap();
        assert_eq!(index.class_count(), reps.len());
        assert_eq!(index.representatives(), reps);
        assert!(SpectrumIndex::from_graphs(vec![Graph::path(3), Graph::path(4)]).is_err());
    }

    #[test]
    fn cross_validation_is_clean_at_small_orders() {
        for n in 1..=6 {
            let report = cross_validate(n, |g| certify(g, crate::DEFAULT_EFFORT)).unwrap();
            assert!(report.is_clean(), "{report:?}");
            assert_eq!(report.classes, report.controllable + report.not_controllable);
            assert_eq!(report.controllable, report.certified + report.undecided);
        }
    }

    #[test]
    fn a_lying_certifier_is_caught() {
        let report = cross_validate(5, |g| {
            let mut r = certify(g, crate::DEFAULT_EFFORT);
            if r.verdict == Verdict::Undecided {
                r.verdict = Verdict::CertifiedDgs;
            }
            r
        })
        .unwrap();
        if report.controllable_non_dgs > 0 {
            assert!(!report.soundness_violations.is_empty());
        }
    }

    #[test]
    fn graph6_streams() {
        let ok = ingest_graph6_stream("@\nA_\n".as_bytes(), StreamMode::Strict).unwrap();
        assert_eq!(ok.graphs, vec![Graph::empty(1), Graph::complete(2)]);
        let empty = ingest_graph6_stream("".as_bytes(), StreamMode::Strict).unwrap();
        assert!(empty.graphs.is_empty());
        let text = ">>graph6<<Bw\n\nA_\r\nA~\nDQc\n";
        let lenient = ingest_graph6_stream(text.as_bytes(), StreamMode::Lenient).unwrap();
        assert_eq!(lenient.graphs.len(), 3);
        assert_eq!(lenient.skipped.len(), 1);
        assert_eq!(lenient.skipped[0].0, 4);
        let strict = ingest_graph6_stream(text.as_bytes(), StreamMode::Strict).unwrap_err();
        assert!(strict.to_string().contains("line 4"), "{strict}");
    }
}
