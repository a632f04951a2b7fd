//! Property checks shared by the property tests and the acceptance runner.
//! Each public function panics with a description on the first failure.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use dgs_core::density::sample_gnp_half;
use dgs_core::exclusion::{certify, Rule, Status, Verdict};
use dgs_core::linalg::{det, inverse_rational, rank_mod_p, smith_normal_form};
use dgs_core::oracle::{graph_from_mask, is_isomorphic, validate_index, SpectrumIndex};
use dgs_core::qmatrix::{check_membership, recover_q};
use dgs_core::walk::build_walk_matrix;
use dgs_core::{Graph, IntMatrix, DEFAULT_EFFORT};

const SEED: u64 = 0x5eed_2024;
const RANDOM_SAMPLES: usize = 1000;

fn pair_count(n: usize) -> u32 {
    (n * (n - 1) / 2) as u32
}

/// Walk vectors `A^k e`, `k = 0..=n`, in machine integers (entries stay
/// below `(n-1)^n`).
fn walk_vectors_i64(g: &Graph) -> Vec<Vec<i64>> {
    let n = g.order();
    let mut out = vec![vec![1i64; n]];
    for _ in 0..n {
        let prev = out.last().unwrap();
        let next = (0..n).map(|i| g.neighbors(i).map(|j| prev[j]).sum()).collect();
        out.push(next);
    }
    out
}

/// Rank over `F_2` of the `n x n` walk matrix built from `walks[0..n]`.
fn rank2(walks: &[Vec<i64>], n: usize) -> usize {
    let mut rows: Vec<u64> = (0..n)
        .map(|i| (0..n).fold(0u64, |acc, k| acc | (((walks[k][i] & 1) as u64) << k)))
        .collect();
    let mut rank = 0;
    for bit in 0..n {
        let Some(pos) = (rank..n).find(|&r| rows[r] >> bit & 1 == 1) else {
            continue;
        };
        rows.swap(rank, pos);
        for r in 0..n {
            if r != rank && rows[r] >> bit & 1 == 1 {
                rows[r] ^= rows[rank];
            }
        }
        rank += 1;
    }
    rank
}

fn check_parity_and_rank(g: &Graph) -> Result<(), String> {
    let n = g.order();
    let walks = walk_vectors_i64(g);
    for (k, w) in walks.iter().enumerate().skip(1) {
        if w.iter().sum::<i64>() % 2 != 0 {
            return Err(format!("{g:?}: e^T A^{k} e is odd"));
        }
    }
    let r = rank2(&walks, n);
    if r > n.div_ceil(2) {
        return Err(format!("{g:?}: rank_2(W) = {r} > ceil(n/2)"));
    }
    Ok(())
}

/// Checks the determinant's 2-adic bound, the Smith form, and that `d_n` is
/// the exact denominator of `W^{-1}`.
fn check_walk_arithmetic(g: &Graph) -> Result<(), String> {
    let n = g.order();
    let w = build_walk_matrix(g);
    let d = det(&w).unwrap();
    let r2 = rank_mod_p(&w, 2).unwrap();
    if r2 != rank2(&walk_vectors_i64(g), n) || r2 > n.div_ceil(2) {
        return Err(format!("{g:?}: rank_2(W) = {r2}"));
    }
    let snf = smith_normal_form(&w);
    let rebuilt = snf
        .left
        .mul(&snf.diagonal_matrix())
        .and_then(|m| m.mul(&snf.right))
        .unwrap();
    if rebuilt != w {
        return Err(format!("{g:?}: U S V != W"));
    }
    for pair in snf.diagonal.windows(2) {
        let ok = if pair[0].is_zero() { pair[1].is_zero() } else { pair[1].is_multiple_of(&pair[0]) };
        if !ok {
            return Err(format!("{g:?}: divisibility chain broken at {pair:?}"));
        }
    }
    let product: BigInt = snf.diagonal.iter().product();
    if product != d.abs() {
        return Err(format!("{g:?}: product of invariant factors {product} != |det| {}", d.abs()));
    }
    if d.is_zero() {
        return Ok(());
    }
    let two = BigInt::from(2);
    let mut v2 = 0;
    let mut rest = d.clone();
    while rest.is_even() {
        rest /= &two;
        v2 += 1;
    }
    if v2 < n / 2 {
        return Err(format!("{g:?}: v_2(det W) = {v2} < floor(n/2)"));
    }
    let dn = snf.last().clone();
    let inv = inverse_rational(&w).unwrap();
    if inv.common_denominator() != dn {
        return Err(format!("{g:?}: denominator of W^-1 is {} but d_n = {dn}", inv.common_denominator()));
    }
    if inv.scaled_to_int(&dn).is_none() {
        return Err(format!("{g:?}: d_n W^-1 is not integral"));
    }
    let f = dgs_core::number_theory::factor(&dn, DEFAULT_EFFORT).unwrap();
    for (q, _) in &f.factors {
        let smaller = &dn / BigInt::from(q.clone());
        if inv.scaled_to_int(&smaller).is_some() {
            return Err(format!("{g:?}: (d_n/{q}) W^-1 is integral"));
        }
    }
    Ok(())
}

pub fn walk_parity_and_binary_rank_on_every_labeled_graph_up_to_seven_vertices() {
    for n in 1..=7usize {
        for mask in 0..1u64 << pair_count(n) {
            if let Err(e) = check_parity_and_rank(&graph_from_mask(n, mask)) {
                panic!("{e}");
            }
        }
    }
}

pub fn walk_arithmetic_on_every_labeled_graph_up_to_six_vertices() {
    for n in 1..=6usize {
        for mask in 0..1u64 << pair_count(n) {
            if let Err(e) = check_walk_arithmetic(&graph_from_mask(n, mask)) {
                panic!("{e}");
            }
        }
    }
}

pub fn walk_arithmetic_on_every_class_at_seven_vertices() {
    let reps = super::graphs7();
    assert_eq!(reps.len(), 1044);
    for g in &reps {
        if let Err(e) = check_walk_arithmetic(g) {
            panic!("{e}");
        }
    }
}

pub fn random_graphs_up_to_sixteen_vertices() {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    for _ in 0..RANDOM_SAMPLES {
        let n = rng.gen_range(8..=16);
        let g = sample_gnp_half(n, &mut rng);
        if let Err(e) = check_parity_and_rank(&g).and_then(|_| check_walk_arithmetic(&g)) {
            panic!("{e}");
        }
    }
}

pub fn fixture_graphs_satisfy_the_structural_properties() {
    for g in [super::g1(), super::g2(), super::counterexample()] {
        check_parity_and_rank(&g).unwrap();
        check_walk_arithmetic(&g).unwrap();
    }
}

fn random_unimodular(n: usize, rng: &mut impl Rng) -> IntMatrix {
    let mut m = IntMatrix::identity(n);
    if n < 2 {
        return m;
    }
    for _ in 0..2 * n {
        let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if i == j {
            continue;
        }
        let c = BigInt::from(rng.gen_range(-2..=2));
        for k in 0..n {
            let add = &c * &m[(j, k)];
            m[(i, k)] += add;
        }
    }
    m
}

/// A random square matrix, either uniform with small entries or built as
/// `U D V` with unimodular `U, V` and a diagonal rich in powers of `p`.
fn random_matrix(n: usize, p: i64, rng: &mut impl Rng) -> IntMatrix {
    if rng.gen_bool(0.4) {
        return IntMatrix::from_fn(n, n, |_, _| BigInt::from(rng.gen_range(-4..=4)));
    }
    let choices = [1, 1, p, p, p * p, 2 * p * p, p * p * p, 0, 3];
    let diag: Vec<BigInt> = (0..n).map(|_| BigInt::from(*choices.choose(rng).unwrap())).collect();
    let u = random_unimodular(n, rng);
    let v = random_unimodular(n, rng);
    u.mul(&IntMatrix::diagonal(&diag)).unwrap().mul(&v).unwrap()
}

/// Whether `M x = 0 (mod p^2)` has a solution with `x != 0 (mod p)`, by
/// scanning all of `(Z/p^2)^n`.
fn brute_force_solvable(m: &IntMatrix, p: i64) -> bool {
    let n = m.rows();
    let q = p * p;
    let entries: Vec<i64> = m
        .entries()
        .iter()
        .map(|x| x.mod_floor(&BigInt::from(q)).try_into().unwrap())
        .collect();
    let mut x = vec![0i64; n];
    loop {
        // Advance the odometer; the all-zero vector is never tested.
        let mut i = 0;
        loop {
            if i == n {
                return false;
            }
            x[i] += 1;
            if x[i] < q {
                break;
            }
            x[i] = 0;
            i += 1;
        }
        if x.iter().all(|v| v % p == 0) {
            continue;
        }
        let solves = (0..n).all(|r| (0..n).map(|c| entries[r * n + c] * x[c]).sum::<i64>() % q == 0);
        if solves {
            return true;
        }
    }
}

pub fn square_modulus_solvability_matches_last_invariant_factor() {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 0x34);
    for p in [2i64, 3, 5] {
        let (mut yes, mut no) = (0, 0);
        for n in 1..=5usize {
            let samples = match (p, n) {
                (5, 5) => 3,
                (5, 4) => 12,
                _ => 40,
            };
            for _ in 0..samples {
                let m = random_matrix(n, p, &mut rng);
                let dn = smith_normal_form(&m).last().clone();
                let predicted = dn.is_multiple_of(&BigInt::from(p * p));
                assert_eq!(brute_force_solvable(&m, p), predicted, "p = {p}, M = {m}, d_n = {dn}");
                if predicted {
                    yes += 1;
                } else {
                    no += 1;
                }
            }
        }
        assert!(yes > 10 && no > 10, "p = {p}: {yes} solvable, {no} not");
    }
}

fn ledger(report: &dgs_core::CertificationReport) -> Vec<(BigUint, Status, Rule)> {
    report.primes.iter().map(|s| (s.prime.clone(), s.status, s.rule)).collect()
}

pub fn certification_is_invariant_under_relabeling() {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 0x11);
    let mut graphs = vec![super::g1(), super::g2(), super::counterexample()];
    for _ in 0..150 {
        let n = rng.gen_range(6..=12);
        graphs.push(sample_gnp_half(n, &mut rng));
    }
    for g in graphs {
        let mut perm: Vec<usize> = (0..g.order()).collect();
        perm.shuffle(&mut rng);
        let h = g.permuted(&perm).unwrap();
        let (a, b) = (certify(&g, DEFAULT_EFFORT), certify(&h, DEFAULT_EFFORT));
        assert_eq!(a.verdict, b.verdict, "{g:?}");
        assert_eq!(ledger(&a), ledger(&b), "{g:?}");
        assert_eq!(a.level2.status, b.level2.status, "{g:?}");
    }
}

pub fn the_isotropy_test_is_never_used_for_two() {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 0x22);
    for _ in 0..300 {
        let n = rng.gen_range(4..=14);
        let report = certify(&sample_gnp_half(n, &mut rng), DEFAULT_EFFORT);
        let two = BigUint::from(2u32);
        for st in report.primes.iter().filter(|s| s.prime == two) {
            assert_ne!(st.rule, Rule::Isotropy);
            assert!(st.isotropy.is_none());
        }
        if report.verdict == Verdict::CertifiedDgs {
            assert!(report.primes.iter().all(|s| s.status == Status::Excluded));
        }
    }
}

/// Godsil-McKay switching with respect to a 4-cycle on vertices 0..4: every
/// other vertex sees 0, 2 or 4 of them, and those seeing exactly two have
/// their adjacencies to the cycle complemented. The switch is realized by a
/// rational orthogonal matrix of level 2.
fn switched_pair(n: usize, rng: &mut impl Rng) -> (Graph, Graph) {
    let base = sample_gnp_half(n, rng);
    let mut edges: Vec<(usize, usize)> = base.edges().into_iter().filter(|&(i, _)| i >= 4).collect();
    edges.extend([(0, 1), (1, 2), (2, 3), (0, 3)]);
    let mut flipped = vec![false; n];
    for (v, flip) in flipped.iter_mut().enumerate().skip(4) {
        match rng.gen_range(0..3) {
            0 => {}
            1 => {
                let a = rng.gen_range(0..4);
                let b = (a + rng.gen_range(1..4)) % 4;
                edges.extend([(a, v), (b, v)]);
                *flip = true;
            }
            _ => edges.extend((0..4).map(|a| (a, v))),
        }
    }
    edges.sort();
    edges.dedup();
    let g = Graph::from_edges(n, &edges).unwrap();
    let h = Graph::from_fn(n, |i, j| {
        let across = (i < 4 && flipped[j]) || (j < 4 && flipped[i]);
        g.has_edge(i, j) != across
    });
    (g, h)
}

pub fn switched_pairs_obey_the_level_conditions() {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 0x33);
    let mut checked = 0;
    while checked < 60 {
        let (g, h) = switched_pair(rng.gen_range(9..=12), &mut rng);
        assert_eq!(g.generalized_charpoly(), h.generalized_charpoly());
        if is_isomorphic(&g, &h) || certify(&g, DEFAULT_EFFORT).verdict == Verdict::NotControllable {
            continue;
        }
        checked += 1;
        let q = recover_q(&g, &h).unwrap();
        assert_eq!(*q.level(), BigUint::from(2u32));
        assert_eq!(check_membership(&q, &g).unwrap(), Some(h.clone()));
        let index = SpectrumIndex::from_graphs(vec![g.clone(), h.clone()]).unwrap();
        let report = validate_index(&index, |x| certify(x, DEFAULT_EFFORT));
        assert!(report.is_clean(), "{report:?}");
        assert_eq!(report.cospectral_pairs, 2);
        assert_eq!(report.certified, 0, "{g:?} has a mate but was certified");
    }
}

pub fn membership_preserves_the_generalized_spectrum() {
    let g = super::counterexample();
    let h = check_membership(&super::counterexample_q(), &g).unwrap().unwrap();
    assert_eq!(g.generalized_charpoly(), h.generalized_charpoly());
    assert!(!is_isomorphic(&g, &h));
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 0x44);
    for _ in 0..20 {
        let (g, h) = switched_pair(10, &mut rng);
        if certify(&g, DEFAULT_EFFORT).verdict == Verdict::NotControllable {
            continue;
        }
        let q = recover_q(&g, &h).unwrap();
        let image = check_membership(&q, &g).unwrap().unwrap();
        assert_eq!(image.generalized_charpoly(), g.generalized_charpoly());
        assert!(BigInt::from(q.level().clone()).is_one() || q.level() == &BigUint::from(2u32));
    }
}
