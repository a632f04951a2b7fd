//! Per-prime exclusion tests and verdict assembly.
//!
//! For a controllable graph every rational orthogonal `Q` with `Qe = e`
//! conjugating `A(G)` to another adjacency matrix has a level `l` dividing
//! `d_n`. Each prime of `d_n` is ruled out as a divisor of `l` by one of:
//!
//! * [`Rule::SquareFree`]: odd `p` with `v_p(det W) = 1`;
//! * [`Rule::Isotropy`]: odd `p` whose mod-`p` kernel of `W^T` contains no
//!   nonzero `x` with `x^T x = 0`;
//! * [`Rule::Level2`]: when every odd prime is gone and `2 || d_n`, no
//!   weight-four 0/1 vector in the mod-2 kernel of `W^T` satisfies
//!   `u^T A^k u = 0 (mod 4)` for `k = 1..n-1`.
//!
//! If every prime is excluded the level is 1, so `Q` is a permutation and the
//! graph is determined by its generalized spectrum.

use std::time::{Duration, Instant};

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::linalg::{nullspace_mod_p, Fp};
use crate::number_theory::{qr_class_u64, QrClass};
use crate::walk::{profile, WalkProfile};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Status {
    /// The prime cannot divide the level of any conjugator.
    Excluded,
    /// The criterion fails: a witness that blocks exclusion exists.
    Open,
    /// Not decided (unfactored cofactor, unsupported 2-power, not consulted).
    Unknown,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Rule {
    SquareFree,
    Isotropy,
    Level2,
    None,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    /// A vector over `F_p`.
    Vector(Vec<u64>),
    /// Supports of weight-four candidates that satisfy the mod-4 condition.
    Candidates(Vec<[usize; 4]>),
}

/// What the isotropy test saw in the kernel of `W^T` mod `p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsotropyData {
    pub nullity: usize,
    /// Canonical (reduced echelon) kernel basis.
    pub basis: Vec<Vec<u64>>,
    /// `xi^T xi mod p` for a one-dimensional kernel.
    pub xi_dot_xi: Option<u64>,
    pub qr_class: Option<QrClass>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimeStatus {
    /// The prime, or for an unfactored entry the composite cofactor.
    pub prime: BigUint,
    pub status: Status,
    pub rule: Rule,
    pub witness: Option<Witness>,
    pub isotropy: Option<IsotropyData>,
    pub detail: String,
}

impl PrimeStatus {
    fn new(prime: BigUint, status: Status, rule: Rule, detail: impl Into<String>) -> Self {
        PrimeStatus {
            prime,
            status,
            rule,
            witness: None,
            isotropy: None,
            detail: detail.into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Level2Candidate {
    pub support: [usize; 4],
    pub passes_mod4: bool,
    /// Smallest `k` with `u^T A^k u != 0 (mod 4)`.
    pub first_failing_power: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    CertifiedDgs,
    Undecided,
    NotControllable,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Timings {
    pub profile: Duration,
    pub odd_primes: Duration,
    pub level2: Duration,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CertificationReport {
    pub verdict: Verdict,
    pub profile: WalkProfile,
    /// One entry per prime divisor of `d_n`, ascending, then any unfactored
    /// cofactor.
    pub primes: Vec<PrimeStatus>,
    pub level2: PrimeStatus,
    pub level2_candidates: Vec<Level2Candidate>,
    pub timings: Timings,
}

impl CertificationReport {
    pub fn prime(&self, p: u64) -> Option<&PrimeStatus> {
        let p = BigUint::from(p);
        self.primes.iter().find(|s| s.prime == p)
    }
}

fn odd_prime_of_dn(profile: &WalkProfile, p: &BigUint) -> Result<()> {
    if !profile.controllable {
        return Err(Error::Inapplicable("walk matrix is singular".into()));
    }
    if *p == BigUint::from(2u32) {
        return Err(Error::Argument("criterion applies to odd primes only".into()));
    }
    if !crate::number_theory::is_prime(p) {
        return Err(Error::Argument(format!("{p} is not prime")));
    }
    if profile.dn_valuation(p) == Some(0) {
        return Err(Error::Argument(format!("{p} does not divide d_n")));
    }
    Ok(())
}

/// Excludes an odd prime dividing `det W` exactly once.
pub fn exclude_by_squarefree(profile: &WalkProfile, p: &BigUint) -> Result<PrimeStatus> {
    odd_prime_of_dn(profile, p)?;
    let v = profile.det_valuation(p).expect("controllable");
    Ok(if v == 1 {
        PrimeStatus::new(p.clone(), Status::Excluded, Rule::SquareFree, "v_p(det W) = 1")
    } else {
        PrimeStatus::new(p.clone(), Status::Open, Rule::None, format!("v_p(det W) = {v}"))
    })
}

/// Excludes an odd prime when the kernel of `W^T` over `F_p` has no nonzero
/// isotropic vector.
pub fn exclude_by_isotropy(profile: &WalkProfile, p: u64) -> Result<PrimeStatus> {
    odd_prime_of_dn(profile, &BigUint::from(p))?;
    let field = Fp::new(p)?;
    let basis = nullspace_mod_p(&profile.walk_matrix.transpose(), p)?;
    let prime = BigUint::from(p);
    let mut data = IsotropyData {
        nullity: basis.len(),
        basis: basis.clone(),
        xi_dot_xi: None,
        qr_class: None,
    };
    let mut st = match basis.len() {
        0 => unreachable!("p divides d_n, so W is singular mod p"),
        1 => {
            let xi = &basis[0];
            let s = field.dot(xi, xi);
            data.xi_dot_xi = Some(s);
            data.qr_class = Some(qr_class_u64(s, p));
            let mut st = if s != 0 {
                PrimeStatus::new(prime, Status::Excluded, Rule::Isotropy, format!("xi^T xi = {s} != 0 mod {p}"))
            } else {
                PrimeStatus::new(prime, Status::Open, Rule::None, format!("xi^T xi = 0 mod {p}"))
            };
            st.witness = Some(Witness::Vector(xi.clone()));
            st
        }
        2 => match isotropic_in_plane(&basis[0], &basis[1], field) {
            None => PrimeStatus::new(
                prime,
                Status::Excluded,
                Rule::Isotropy,
                format!("two-dimensional kernel mod {p} has no isotropic line"),
            ),
            Some(v) => {
                let mut st = PrimeStatus::new(
                    prime,
                    Status::Open,
                    Rule::None,
                    format!("two-dimensional kernel mod {p} contains an isotropic vector"),
                );
                st.witness = Some(Witness::Vector(v));
                st
            }
        },
        d => PrimeStatus::new(
            prime,
            Status::Open,
            Rule::None,
            format!("{d}-dimensional kernel mod {p}: a quadratic form in >= 3 variables always has a nontrivial zero"),
        ),
    };
    st.isotropy = Some(data);
    Ok(st)
}

/// Scans the `p + 1` projective points of `span(b1, b2)` for a zero of
/// `x^T x`.
fn isotropic_in_plane(b1: &[u64], b2: &[u64], field: Fp) -> Option<Vec<u64>> {
    let a = field.dot(b1, b1);
    let b = field.dot(b1, b2);
    let c = field.dot(b2, b2);
    let combine = |t: u64| -> Vec<u64> {
        b1.iter()
            .zip(b2)
            .map(|(&x, &y)| field.add(x, field.mul(t, y)))
            .collect()
    };
    if c == 0 {
        return Some(b2.to_vec());
    }
    let two_b = field.add(b, b);
    (0..field.modulus())
        .find(|&t| field.add(a, field.mul(t, field.add(two_b, field.mul(c, t)))) == 0)
        .map(combine)
}

/// Brute-force search over every projective point of `span(basis)` for a
/// nonzero `x` with `x^T x = 0`. Costs `(p^d - 1)/(p - 1)` evaluations.
pub fn isotropic_by_enumeration(basis: &[Vec<u64>], p: u64) -> Result<Option<Vec<u64>>> {
    let field = Fp::new(p)?;
    let d = basis.len();
    let Some(n) = basis.first().map(Vec::len) else {
        return Ok(None);
    };
    for lead in 0..d {
        // Coefficients: 0 before `lead`, 1 at `lead`, free after.
        let free = d - lead - 1;
        let mut coeffs = vec![0u64; free];
        loop {
            let mut v = basis[lead].clone();
            for (k, &c) in coeffs.iter().enumerate() {
                if c != 0 {
                    for (x, &y) in v.iter_mut().zip(&basis[lead + 1 + k]) {
                        *x = field.add(*x, field.mul(c, y));
                    }
                }
            }
            debug_assert_eq!(v.len(), n);
            if field.dot(&v, &v) == 0 {
                return Ok(Some(v));
            }
            // odometer increment
            let mut i = 0;
            loop {
                if i == free {
                    break;
                }
                coeffs[i] += 1;
                if coeffs[i] < p {
                    break;
                }
                coeffs[i] = 0;
                i += 1;
            }
            if i == free {
                break;
            }
        }
    }
    Ok(None)
}

/// Weight-four test ruling out level exactly 2.
///
/// Returns every weight-four 0/1 vector `u` with `W^T u = 0 (mod 2)`, in
/// lexicographic order of support, each marked with whether it satisfies
/// `u^T A^k u = 0 (mod 4)` for all `k = 1..n-1`. The status is EXCLUDED iff
/// none does.
pub fn exclude_level2(g: &Graph, profile: &WalkProfile) -> Result<(PrimeStatus, Vec<Level2Candidate>)> {
    if !profile.controllable {
        return Err(Error::Inapplicable("walk matrix is singular".into()));
    }
    let n = g.order();
    if n != profile.n {
        return Err(Error::Dimension("graph and profile orders differ".into()));
    }
    let two = BigUint::from(2u32);
    if n < 4 {
        let st = PrimeStatus::new(two, Status::Excluded, Rule::Level2, "n < 4: no weight-four vectors exist");
        return Ok((st, Vec::new()));
    }
    let words = n.div_ceil(64);
    let parity: Vec<Vec<u64>> = (0..n)
        .map(|i| {
            let mut bits = vec![0u64; words];
            for (j, x) in profile.walk_matrix.row(i).iter().enumerate() {
                if x.bit(0) {
                    bits[j / 64] |= 1 << (j % 64);
                }
            }
            bits
        })
        .collect();
    let adj = g.adjacency_i64();
    let mut candidates = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                for d in c + 1..n {
                    let zero = (0..words)
                        .all(|w| parity[a][w] ^ parity[b][w] ^ parity[c][w] ^ parity[d][w] == 0);
                    if !zero {
                        continue;
                    }
                    let support = [a, b, c, d];
                    let first_failing_power = first_mod4_failure(&adj, n, &support);
                    candidates.push(Level2Candidate {
                        support,
                        passes_mod4: first_failing_power.is_none(),
                        first_failing_power,
                    });
                }
            }
        }
    }
    let passing: Vec<[usize; 4]> = candidates
        .iter()
        .filter(|c| c.passes_mod4)
        .map(|c| c.support)
        .collect();
    let st = if passing.is_empty() {
        PrimeStatus::new(
            two,
            Status::Excluded,
            Rule::Level2,
            format!("{} weight-four kernel vectors, none satisfies the mod-4 condition", candidates.len()),
        )
    } else {
        let mut st = PrimeStatus::new(
            two,
            Status::Open,
            Rule::None,
            format!("{} of {} weight-four kernel vectors satisfy the mod-4 condition", passing.len(), candidates.len()),
        );
        st.witness = Some(Witness::Candidates(passing));
        st
    };
    Ok((st, candidates))
}

fn first_mod4_failure(adj: &[i64], n: usize, support: &[usize; 4]) -> Option<usize> {
    let mut v = vec![0i64; n];
    for &s in support {
        v[s] = 1;
    }
    for k in 1..n {
        v = (0..n)
            .map(|i| (0..n).map(|j| adj[i * n + j] * v[j]).sum::<i64>() & 3)
            .collect();
        let q: i64 = support.iter().map(|&s| v[s]).sum();
        if q & 3 != 0 {
            return Some(k);
        }
    }
    None
}

/// Runs the full exclusion pipeline on `g`.
pub fn certify(g: &Graph, effort_bound: u64) -> CertificationReport {
    let t0 = Instant::now();
    let prof = profile(g, effort_bound);
    certify_profile(g, prof, t0.elapsed())
}

/// Runs the exclusion pipeline on an already computed profile of `g`.
pub fn certify_profile(g: &Graph, prof: WalkProfile, t_profile: Duration) -> CertificationReport {
    if !prof.controllable {
        return CertificationReport {
            verdict: Verdict::NotControllable,
            profile: prof,
            primes: Vec::new(),
            level2: PrimeStatus::new(BigUint::from(2u32), Status::Unknown, Rule::None, "walk matrix is singular"),
            level2_candidates: Vec::new(),
            timings: Timings {
                profile: t_profile,
                ..Timings::default()
            },
        };
    }

    let t1 = Instant::now();
    let two = BigUint::from(2u32);
    let dn_f = prof.dn_factorization.clone().expect("controllable");
    let mut odd = Vec::new();
    for (p, _) in dn_f.factors.iter().filter(|(p, _)| *p != two) {
        odd.push(exclude_odd_prime(&prof, p));
    }
    if !dn_f.complete {
        odd.push(PrimeStatus::new(
            dn_f.residual.clone(),
            Status::Unknown,
            Rule::None,
            "unfactored composite cofactor of d_n (raise the effort bound)",
        ));
    }
    let t_odd = t1.elapsed();

    let t2 = Instant::now();
    let v2 = prof.dn_valuation(&two).expect("controllable");
    let all_odd_excluded = odd.iter().all(|s| s.status == Status::Excluded);
    let (level2, level2_candidates) = if v2 >= 2 {
        (
            PrimeStatus::new(two.clone(), Status::Unknown, Rule::None, format!("v_2(d_n) = {v2}: no criterion for 4 | d_n")),
            Vec::new(),
        )
    } else if !all_odd_excluded {
        (
            PrimeStatus::new(two.clone(), Status::Unknown, Rule::None, "not consulted: an odd prime of d_n is not excluded"),
            Vec::new(),
        )
    } else {
        exclude_level2(g, &prof).expect("controllable and consistent")
    };
    let t_level2 = t2.elapsed();

    let mut primes = Vec::with_capacity(odd.len() + 1);
    if v2 >= 1 {
        primes.push(level2.clone());
    }
    primes.extend(odd);
    let verdict = if primes.iter().all(|s| s.status == Status::Excluded) && v2 <= 1 {
        Verdict::CertifiedDgs
    } else {
        Verdict::Undecided
    };
    CertificationReport {
        verdict,
        profile: prof,
        primes,
        level2,
        level2_candidates,
        timings: Timings {
            profile: t_profile,
            odd_primes: t_odd,
            level2: t_level2,
        },
    }
}

fn exclude_odd_prime(prof: &WalkProfile, p: &BigUint) -> PrimeStatus {
    let sq = exclude_by_squarefree(prof, p).expect("odd prime of d_n");
    if sq.status == Status::Excluded {
        return sq;
    }
    match p.to_u64() {
        Some(small) => {
            let mut st = exclude_by_isotropy(prof, small).expect("odd prime of d_n");
            st.detail = format!("{}; {}", sq.detail, st.detail);
            st
        }
        None => PrimeStatus::new(
            p.clone(),
            Status::Unknown,
            Rule::None,
            format!("{}; prime exceeds 64 bits, isotropy test not run", sq.detail),
        ),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::parse_adjacency_text;
    use crate::DEFAULT_EFFORT;

    fn fixture(name: &str) -> Graph {
        let text = match name {
            "g1" => include_str!("../fixtures/g1.adj"),
            "g2" => include_str!("../fixtures/g2.adj"),
            _ => include_str!("../fixtures/counterexample.adj"),
        };
        parse_adjacency_text(text).unwrap()
    }

    fn big(p: u64) -> BigUint {
        BigUint::from(p)
    }

    #[test]
    fn squarefree_rule() {
        let g2 = profile(&fixture("g2"), DEFAULT_EFFORT);
        let st = exclude_by_squarefree(&g2, &big(5)).unwrap();
        assert_eq!((st.status, st.rule), (Status::Excluded, Rule::SquareFree));
        let ce = profile(&fixture("ce"), DEFAULT_EFFORT);
        let st = exclude_by_squarefree(&ce, &big(3)).unwrap();
        assert_eq!(st.status, Status::Open);
        let g1 = profile(&fixture("g1"), DEFAULT_EFFORT);
        assert_eq!(exclude_by_squarefree(&g1, &big(17)).unwrap().status, Status::Excluded);
        assert!(exclude_by_squarefree(&g1, &big(2)).is_err());
        assert!(exclude_by_squarefree(&g1, &big(3)).is_err());
    }

    #[test]
    fn isotropy_rule_on_g1() {
        let g1 = profile(&fixture("g1"), DEFAULT_EFFORT);
        for (p, reference) in [(17u64, 12u64), (67, 25), (8054231, 1492735)] {
            let st = exclude_by_isotropy(&g1, p).unwrap();
            assert_eq!(st.status, Status::Excluded, "p = {p}");
            let data = st.isotropy.unwrap();
            assert_eq!(data.nullity, 1);
            assert_ne!(data.xi_dot_xi, Some(0));
            assert_eq!(data.qr_class, Some(qr_class_u64(reference, p)), "p = {p}");
        }
        assert!(exclude_by_isotropy(&g1, 2).is_err());
        assert!(exclude_by_isotropy(&g1, 3).is_err());
    }

    #[test]
    fn isotropy_rule_on_g2() {
        let g2 = profile(&fixture("g2"), DEFAULT_EFFORT);
        let st = exclude_by_isotropy(&g2, 5).unwrap();
        assert_eq!(st.status, Status::Open);
        assert_eq!(st.isotropy.unwrap().xi_dot_xi, Some(0));
        let st = exclude_by_isotropy(&g2, 3).unwrap();
        assert_eq!(st.status, Status::Excluded);
        assert_eq!(st.isotropy.unwrap().qr_class, Some(QrClass::Residue));
    }

    #[test]
    fn enumeration_agrees_with_xi_test_for_one_dimensional_kernels() {
        for name in ["g1", "g2", "ce"] {
            let prof = profile(&fixture(name), DEFAULT_EFFORT);
            for (p, _) in &prof.dn_factorization.as_ref().unwrap().factors {
                let p = p.to_u64().unwrap();
                if p == 2 {
                    continue;
                }
                let st = exclude_by_isotropy(&prof, p).unwrap();
                let data = st.isotropy.as_ref().unwrap();
                let found = isotropic_by_enumeration(&data.basis, p).unwrap();
                assert_eq!(found.is_none(), st.status == Status::Excluded, "{name} p = {p}");
            }
        }
    }

    #[test]
    fn plane_scan_agrees_with_enumeration() {
        let field = Fp::new(7).unwrap();
        for a in 0..7u64 {
            for b in 0..7u64 {
                let b1 = vec![1, 0, a, b];
                let b2 = vec![0, 1, b, 3];
                let fast = isotropic_in_plane(&b1, &b2, field);
                let slow = isotropic_by_enumeration(&[b1.clone(), b2.clone()], 7).unwrap();
                assert_eq!(fast.is_some(), slow.is_some());
                if let Some(v) = fast {
                    assert_eq!(field.dot(&v, &v), 0);
                    assert!(v.iter().any(|&x| x != 0));
                }
            }
        }
    }

    #[test]
    fn level2_on_g1() {
        let g = fixture("g1");
        let prof = profile(&g, DEFAULT_EFFORT);
        let (st, cands) = exclude_level2(&g, &prof).unwrap();
        assert_eq!(cands.len(), 15);
        assert!(cands.iter().all(|c| !c.passes_mod4));
        assert_eq!((st.status, st.rule), (Status::Excluded, Rule::Level2));
        assert!(cands.windows(2).all(|w| w[0].support < w[1].support));
    }

    #[test]
    fn level2_small_graphs() {
        let g = Graph::empty(1);
        let prof = profile(&g, DEFAULT_EFFORT);
        let (st, cands) = exclude_level2(&g, &prof).unwrap();
        assert_eq!(st.status, Status::Excluded);
        assert!(cands.is_empty());
        let k2 = Graph::complete(2);
        assert!(exclude_level2(&k2, &profile(&k2, DEFAULT_EFFORT)).is_err());
    }

    #[test]
    fn verdicts() {
        assert_eq!(certify(&fixture("g1"), DEFAULT_EFFORT).verdict, Verdict::CertifiedDgs);
        assert_eq!(certify(&fixture("g2"), DEFAULT_EFFORT).verdict, Verdict::CertifiedDgs);
        let ce = certify(&fixture("ce"), DEFAULT_EFFORT);
        assert_eq!(ce.verdict, Verdict::Undecided);
        assert_eq!(ce.prime(3).unwrap().status, Status::Open);
        assert_eq!(ce.level2.status, Status::Unknown);
        assert_eq!(certify(&Graph::complete(5), DEFAULT_EFFORT).verdict, Verdict::NotControllable);
        assert_eq!(certify(&Graph::empty(1), DEFAULT_EFFORT).verdict, Verdict::CertifiedDgs);
    }

    #[test]
    fn ledger_covers_every_prime_of_dn() {
        let r = certify(&fixture("g2"), DEFAULT_EFFORT);
        let listed: Vec<u64> = r.primes.iter().map(|s| s.prime.to_u64().unwrap()).collect();
        assert_eq!(listed, vec![2, 3, 5, 197, 263, 5821]);
        assert_eq!(r.prime(5).unwrap().rule, Rule::SquareFree);
        assert_eq!(r.prime(3).unwrap().rule, Rule::Isotropy);
        assert_eq!(r.prime(2).unwrap().rule, Rule::Level2);
    }

    #[test]
    fn incomplete_factorization_is_undecided() {
        let g = fixture("g1");
        let mut prof = profile(&g, DEFAULT_EFFORT);
        // Pretend 67 * 8054231 could not be split.
        let f = prof.dn_factorization.as_mut().unwrap();
        f.factors.retain(|(p, _)| *p == big(2) || *p == big(17));
        f.residual = big(67 * 8054231);
        f.complete = false;
        let r = certify_profile(&g, prof, Duration::ZERO);
        assert_eq!(r.verdict, Verdict::Undecided);
        let last = r.primes.last().unwrap();
        assert_eq!((last.status, last.rule), (Status::Unknown, Rule::None));
        assert_eq!(last.prime, big(67 * 8054231));
        assert_eq!(r.level2.status, Status::Unknown);
    }
}
