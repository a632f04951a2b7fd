//! Machine-readable report documents.
//!
//! Documents are serialized through `serde_json::Value`, whose object type
//! keeps keys sorted, so output is byte-identical for identical inputs.
//! Integers that can exceed 64 bits are decimal strings.

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use dgs_core::exclusion::{IsotropyData, Level2Candidate, PrimeStatus, Rule, Status, Verdict, Witness};
use dgs_core::number_theory::QrClass;
use dgs_core::{CertificationReport, Factorization, Graph};

pub const SCHEMA_VERSION: u32 = 1;
pub const TOOL_NAME: &str = "dgs";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ToolInfo {
    pub name: String,
    pub version: String,
}

impl ToolInfo {
    pub fn current() -> Self {
        ToolInfo {
            name: TOOL_NAME.into(),
            version: TOOL_VERSION.into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputDescriptor {
    /// `graph6` or `adjacency`.
    pub format: String,
    /// File path, `-` for standard input, with `:LINE` appended in batch mode.
    pub source: String,
    pub graph6: String,
    pub order: usize,
    pub edges: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorDoc {
    pub prime: String,
    pub exponent: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorizationDoc {
    pub sign: i8,
    pub factors: Vec<FactorDoc>,
    /// Unfactored cofactor; `"1"` when complete.
    pub residual: String,
    pub complete: bool,
    /// Some factor was only shown probably prime.
    pub probabilistic: bool,
}

impl From<&Factorization> for FactorizationDoc {
    fn from(f: &Factorization) -> Self {
        FactorizationDoc {
            sign: f.sign,
            factors: f
                .factors
                .iter()
                .map(|(p, e)| FactorDoc {
                    prime: p.to_string(),
                    exponent: *e,
                })
                .collect(),
            residual: f.residual.to_string(),
            complete: f.complete,
            probabilistic: f.probabilistic,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProfileSummary {
    pub controllable: bool,
    pub det: String,
    pub snf_diagonal: Vec<String>,
    pub dn: String,
    pub det_factorization: Option<FactorizationDoc>,
    pub dn_factorization: Option<FactorizationDoc>,
    /// `null` when membership cannot be decided.
    pub in_fn: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IsotropyDoc {
    pub nullity: usize,
    pub basis: Vec<Vec<String>>,
    pub xi_dot_xi: Option<String>,
    pub qr_class: Option<QrClass>,
}

impl From<&IsotropyData> for IsotropyDoc {
    fn from(d: &IsotropyData) -> Self {
        IsotropyDoc {
            nullity: d.nullity,
            basis: d.basis.iter().map(|v| strings(v)).collect(),
            xi_dot_xi: d.xi_dot_xi.map(|x| x.to_string()),
            qr_class: d.qr_class,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeDoc {
    pub prime: String,
    pub status: Status,
    pub rule: Rule,
    pub detail: String,
    /// Isotropic kernel vector blocking exclusion, or the excluded
    /// one-dimensional kernel generator.
    pub witness_vector: Option<Vec<String>>,
    /// Supports of passing weight-four candidates (prime 2 only).
    pub witness_supports: Option<Vec<[usize; 4]>>,
    pub isotropy: Option<IsotropyDoc>,
}

impl From<&PrimeStatus> for PrimeDoc {
    fn from(s: &PrimeStatus) -> Self {
        let (witness_vector, witness_supports) = match &s.witness {
            Some(Witness::Vector(v)) => (Some(strings(v)), None),
            Some(Witness::Candidates(c)) => (None, Some(c.clone())),
            None => (None, None),
        };
        PrimeDoc {
            prime: s.prime.to_string(),
            status: s.status,
            rule: s.rule,
            detail: s.detail.clone(),
            witness_vector,
            witness_supports,
            isotropy: s.isotropy.as_ref().map(IsotropyDoc::from),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateDoc {
    pub support: [usize; 4],
    pub passes_mod4: bool,
    pub first_failing_power: Option<usize>,
}

impl From<&Level2Candidate> for CandidateDoc {
    fn from(c: &Level2Candidate) -> Self {
        CandidateDoc {
            support: c.support,
            passes_mod4: c.passes_mod4,
            first_failing_power: c.first_failing_power,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Level2Doc {
    pub status: Status,
    pub rule: Rule,
    pub detail: String,
    pub candidates: Vec<CandidateDoc>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TimingsDoc {
    pub profile_us: u64,
    pub odd_primes_us: u64,
    pub level2_us: u64,
}

/// Full certification report for one graph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub schema_version: u32,
    pub tool: ToolInfo,
    pub input: InputDescriptor,
    pub profile: ProfileSummary,
    /// Ledger of every prime of `d_n` (2 first when present), then any
    /// unfactored cofactor.
    pub primes: Vec<PrimeDoc>,
    pub level2: Level2Doc,
    pub verdict: Verdict,
    /// Present only when timings were requested.
    pub timings: Option<TimingsDoc>,
}

fn strings<T: ToString>(v: &[T]) -> Vec<String> {
    v.iter().map(ToString::to_string).collect()
}

fn big_strings(v: &[BigInt]) -> Vec<String> {
    strings(v)
}

impl ReportDocument {
    pub fn new(g: &Graph, format: &str, source: &str, report: &CertificationReport, timings: bool) -> Self {
        let p = &report.profile;
        ReportDocument {
            schema_version: SCHEMA_VERSION,
            tool: ToolInfo::current(),
            input: InputDescriptor {
                format: format.into(),
                source: source.into(),
                graph6: g.to_graph6().unwrap_or_default(),
                order: g.order(),
                edges: g.edge_count(),
            },
            profile: ProfileSummary {
                controllable: p.controllable,
                det: p.det.to_string(),
                snf_diagonal: big_strings(&p.snf_diagonal),
                dn: p.dn().to_string(),
                det_factorization: p.det_factorization.as_ref().map(FactorizationDoc::from),
                dn_factorization: p.dn_factorization.as_ref().map(FactorizationDoc::from),
                in_fn: p.in_fn,
            },
            primes: report.primes.iter().map(PrimeDoc::from).collect(),
            level2: Level2Doc {
                status: report.level2.status,
                rule: report.level2.rule,
                detail: report.level2.detail.clone(),
                candidates: report.level2_candidates.iter().map(CandidateDoc::from).collect(),
            },
            verdict: report.verdict,
            timings: timings.then_some(TimingsDoc {
                profile_us: report.timings.profile.as_micros() as u64,
                odd_primes_us: report.timings.odd_primes.as_micros() as u64,
                level2_us: report.timings.level2.as_micros() as u64,
            }),
        }
    }

    /// Human-readable multi-line rendering.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let push = |out: &mut String, line: String| {
            out.push_str(&line);
            out.push('\n');
        };
        push(&mut out, format!("graph     {} ({} vertices, {} edges) from {}", self.input.graph6, self.input.order, self.input.edges, self.input.source));
        push(&mut out, format!("det W     {}", self.profile.det));
        push(&mut out, format!("SNF       [{}]", self.profile.snf_diagonal.join(", ")));
        if let Some(f) = &self.profile.dn_factorization {
            push(&mut out, format!("d_n       {} = {}", self.profile.dn, render_factorization(f)));
        }
        if let Some(f) = &self.profile.det_factorization {
            push(&mut out, format!("|det W|   {}", render_factorization(f)));
        }
        let fam = match self.profile.in_fn {
            Some(true) => "yes",
            Some(false) => "no",
            None => "undetermined",
        };
        push(&mut out, format!("in F_n    {fam}"));
        for p in &self.primes {
            push(&mut out, format!("prime {:>10}  {:<8} {:<11} {}", p.prime, status_name(p.status), rule_name(p.rule), p.detail));
        }
        let passing = self.level2.candidates.iter().filter(|c| c.passes_mod4).count();
        push(&mut out, format!("level 2   {} ({} candidates, {} passing): {}", status_name(self.level2.status), self.level2.candidates.len(), passing, self.level2.detail));
        push(&mut out, format!("verdict   {}", verdict_name(self.verdict)));
        if let Some(t) = &self.timings {
            push(&mut out, format!("timings   profile {} us, odd primes {} us, level 2 {} us", t.profile_us, t.odd_primes_us, t.level2_us));
        }
        out
    }
}

pub fn render_factorization(f: &FactorizationDoc) -> String {
    let mut parts: Vec<String> = f
        .factors
        .iter()
        .map(|d| if d.exponent == 1 { d.prime.clone() } else { format!("{}^{}", d.prime, d.exponent) })
        .collect();
    if !f.complete {
        parts.push(format!("[{} unfactored]", f.residual));
    }
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join(" * ")
    }
}

pub fn status_name(s: Status) -> &'static str {
    match s {
        Status::Excluded => "EXCLUDED",
        Status::Open => "OPEN",
        Status::Unknown => "UNKNOWN",
    }
}

pub fn rule_name(r: Rule) -> &'static str {
    match r {
        Rule::SquareFree => "SQUARE_FREE",
        Rule::Isotropy => "ISOTROPY",
        Rule::Level2 => "LEVEL2",
        Rule::None => "NONE",
    }
}

pub fn verdict_name(v: Verdict) -> &'static str {
    dgs_core::density::verdict_name(v)
}

/// Serializes with sorted keys and no insignificant whitespace.
pub fn to_sorted_json<T: Serialize>(value: &T) -> String {
    let v = serde_json::to_value(value).expect("report documents are representable as JSON");
    serde_json::to_string(&v).expect("JSON values serialize")
}

/// Pretty variant of [`to_sorted_json`].
pub fn to_sorted_json_pretty<T: Serialize>(value: &T) -> String {
    let v = serde_json::to_value(value).expect("report documents are representable as JSON");
    serde_json::to_string_pretty(&v).expect("JSON values serialize")
}
