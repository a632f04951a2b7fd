//! Sampling experiment: how often a uniformly random graph lies in the
//! square-free family `F_n` (controllable, `det W = 2^{floor(n/2)} * b` with
//! `b` odd and square-free), and whether the certifier behaves as the family
//! predicts on every sampled member.
//!
//! Graphs are drawn sequentially from one seeded ChaCha8 stream and then
//! certified in parallel, so a report depends only on `(n, samples, seed,
//! effort)`.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exclusion::{certify, CertificationReport, Rule, Status, Verdict};
use crate::graph::Graph;

/// Draws a graph from `G(n, 1/2)`, one fair bit per vertex pair in graph6
/// pair order.
pub fn sample_gnp_half(n: usize, rng: &mut impl Rng) -> Graph {
    let mut bits = vec![false; n * n];
    for j in 1..n {
        for i in 0..j {
            bits[i * n + j] = rng.gen_bool(0.5);
        }
    }
    Graph::from_fn(n, |i, j| bits[i * n + j])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DensityConfig {
    pub n: usize,
    pub samples: usize,
    pub seed: u64,
    pub effort: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DensityReport {
    pub n: usize,
    pub samples: usize,
    pub seed: u64,
    pub controllable: usize,
    /// Samples in `F_n`.
    pub in_fn: usize,
    /// Samples whose membership could not be decided (unfactored cofactor).
    pub fn_indeterminate: usize,
    /// `F_n` members certified DGS.
    pub fn_certified: usize,
    /// `F_n` members left undecided by the level-2 test.
    pub fn_undecided: usize,
    /// Verdict counts over all samples.
    pub verdicts: BTreeMap<String, usize>,
    /// `F_n` members (graph6 with a reason) on which the certifier disagreed
    /// with what membership implies. Must be empty.
    pub inconsistencies: Vec<String>,
}

impl DensityReport {
    /// `in_fn / samples` as a reduced fraction `(numerator, denominator)`.
    pub fn fraction(&self) -> (usize, usize) {
        let g = num_integer::gcd(self.in_fn, self.samples.max(1));
        (self.in_fn / g, self.samples.max(1) / g)
    }

    /// Decimal rendering of the `F_n` fraction with six digits after the
    /// point, computed exactly by integer division and rounded half up.
    pub fn fraction_decimal(&self) -> String {
        let (num, den) = self.fraction();
        let scaled = (num as u128 * 2_000_000 + den as u128) / (2 * den as u128);
        format!("{}.{:06}", scaled / 1_000_000, scaled % 1_000_000)
    }

    /// Whether `lo_num/den < in_fn/samples < hi_num/den`, decided exactly.
    pub fn fraction_strictly_between(&self, lo: (u64, u64), hi: (u64, u64)) -> bool {
        let (num, den) = (self.in_fn as u128, self.samples as u128);
        let above = num * lo.1 as u128 > lo.0 as u128 * den;
        let below = num * (hi.1 as u128) < hi.0 as u128 * den;
        self.samples > 0 && above && below
    }
}

/// What membership in `F_n` forces on a certification report: `2 || d_n`,
/// every odd prime of `d_n` excluded by the square-free rule, and a verdict
/// that follows the level-2 test. Returns the first discrepancy found.
pub fn check_fn_consistency(report: &CertificationReport) -> Option<String> {
    let prof = &report.profile;
    let two = BigUint::from(2u32);
    if prof.n >= 2 && prof.dn_valuation(&two) != Some(1) {
        return Some(format!("v_2(d_n) = {:?}, expected 1", prof.dn_valuation(&two)));
    }
    for st in report.primes.iter().filter(|s| s.prime != two) {
        if st.status != Status::Excluded || st.rule != Rule::SquareFree {
            return Some(format!("odd prime {} is {:?} by {:?}", st.prime, st.status, st.rule));
        }
        if prof.det_valuation(&st.prime) != Some(1) {
            return Some(format!("odd prime {} is not simple in det W", st.prime));
        }
    }
    let expected = match (prof.n >= 2, report.level2.status) {
        (false, _) | (true, Status::Excluded) => Verdict::CertifiedDgs,
        (true, Status::Open) => Verdict::Undecided,
        (true, Status::Unknown) => return Some("level-2 test was not run".into()),
    };
    if report.verdict != expected {
        return Some(format!("verdict {:?}, expected {:?}", report.verdict, expected));
    }
    if prof.n < 2 && !prof.dn().is_one() {
        return Some(format!("order {} with d_n = {}", prof.n, prof.dn()));
    }
    None
}

/// Samples `config.samples` graphs from `G(n, 1/2)` and certifies each.
pub fn run_density(config: DensityConfig) -> Result<DensityReport> {
    if config.n == 0 || config.n > 62 {
        return Err(Error::Argument(format!("order {} outside 1..=62", config.n)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let graphs: Vec<Graph> = (0..config.samples)
        .map(|_| sample_gnp_half(config.n, &mut rng))
        .collect();
    let outcomes: Vec<(Verdict, Option<bool>, Option<String>)> = graphs
        .par_iter()
        .map(|g| {
            let report = certify(g, config.effort);
            let member = report.profile.in_fn;
            let issue = if member == Some(true) {
                check_fn_consistency(&report).map(|why| format!("{}: {why}", g.to_graph6().unwrap_or_default()))
            } else {
                None
            };
            (report.verdict, member, issue)
        })
        .collect();
    let mut out = DensityReport {
        n: config.n,
        samples: config.samples,
        seed: config.seed,
        ..DensityReport::default()
    };
    for (verdict, member, issue) in outcomes {
        *out.verdicts.entry(verdict_name(verdict).to_string()).or_default() += 1;
        if verdict != Verdict::NotControllable {
            out.controllable += 1;
        }
        match member {
            Some(true) => {
                out.in_fn += 1;
                match verdict {
                    Verdict::CertifiedDgs => out.fn_certified += 1,
                    _ => out.fn_undecided += 1,
                }
            }
            None => out.fn_indeterminate += 1,
            Some(false) => {}
        }
        out.inconsistencies.extend(issue);
    }
    Ok(out)
}

/// Stable upper-case name used in reports.
pub fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::CertifiedDgs => "CERTIFIED_DGS",
        Verdict::Undecided => "UNDECIDED",
        Verdict::NotControllable => "NOT_CONTROLLABLE",
    }
}
