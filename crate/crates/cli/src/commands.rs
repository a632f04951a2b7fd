//! Command implementations. Each returns the document to print and the exit
//! code; printing and argument parsing live in the binary.

use std::collections::BTreeMap;
use std::io::{BufRead, Read};
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use dgs_core::density::{run_density, DensityConfig};
use dgs_core::exclusion::{certify, Verdict};
use dgs_core::graph::parse_adjacency_text;
use dgs_core::oracle::{cross_validate, Graph6Lines, MAX_EXHAUSTIVE_ORDER};
use dgs_core::qmatrix::{check_membership, parse_q_text, validate, RationalOrthogonal};
use dgs_core::Graph;

use crate::exit;
use crate::report::{
    to_sorted_json, verdict_name, InputDescriptor, ReportDocument, ToolInfo, SCHEMA_VERSION,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Graph6,
    Adjacency,
}

impl Format {
    pub fn name(self) -> &'static str {
        match self {
            Format::Graph6 => "graph6",
            Format::Adjacency => "adjacency",
        }
    }
}

/// Reads a whole input; `None` or `-` means standard input. Returns the
/// source label and the bytes.
pub fn read_input(path: Option<&Path>) -> Result<(String, Vec<u8>), String> {
    match path {
        None => read_stdin(),
        Some(p) if p == Path::new("-") => read_stdin(),
        Some(p) => std::fs::read(p)
            .map(|b| (p.display().to_string(), b))
            .map_err(|e| format!("{}: {e}", p.display())),
    }
}

fn read_stdin() -> Result<(String, Vec<u8>), String> {
    let mut buf = Vec::new();
    std::io::stdin()
        .read_to_end(&mut buf)
        .map_err(|e| format!("standard input: {e}"))?;
    Ok(("-".into(), buf))
}

/// Parses exactly one graph.
pub fn parse_single(bytes: &[u8], format: Format) -> Result<Graph, String> {
    match format {
        Format::Adjacency => {
            let text = std::str::from_utf8(bytes).map_err(|e| format!("input is not UTF-8: {e}"))?;
            parse_adjacency_text(text).map_err(|e| e.to_string())
        }
        Format::Graph6 => {
            let mut records = Graph6Lines::new(bytes);
            let (line, first) = records.next().ok_or("no graph6 record in input")?;
            let g = first.map_err(|e| format!("line {line}: {e}"))?;
            if let Some((line, _)) = records.next() {
                return Err(format!("line {line}: expected a single graph (use `batch` for streams)"));
            }
            Ok(g)
        }
    }
}

pub fn verdict_exit_code(v: Verdict) -> u8 {
    match v {
        Verdict::CertifiedDgs => exit::CERTIFIED,
        Verdict::Undecided => exit::UNDECIDED,
        Verdict::NotControllable => exit::NOT_CONTROLLABLE,
    }
}

pub fn analyze(g: &Graph, format: Format, source: &str, effort: u64, timings: bool) -> (ReportDocument, u8) {
    let report = certify(g, effort);
    let doc = ReportDocument::new(g, format.name(), source, &report, timings);
    let code = verdict_exit_code(report.verdict);
    (doc, code)
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyCounts {
    pub member: usize,
    pub non_member: usize,
    pub undetermined: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkippedLine {
    pub line: usize,
    pub error: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BatchSummary {
    pub schema_version: u32,
    pub tool: ToolInfo,
    pub graphs: usize,
    pub controllable: usize,
    pub verdicts: BTreeMap<String, usize>,
    pub in_fn: FamilyCounts,
    pub skipped: Vec<SkippedLine>,
}

/// The trailing line of a batch run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BatchSummaryLine {
    pub summary: BatchSummary,
}

pub struct BatchOutcome {
    /// One report per parsed graph, in input order.
    pub reports: Vec<ReportDocument>,
    pub summary: BatchSummary,
}

/// Certifies every graph of a graph6 stream. In strict mode the first
/// malformed line aborts the run with an error naming the line.
pub fn batch(reader: impl BufRead, source: &str, strict: bool, effort: u64, timings: bool) -> Result<BatchOutcome, String> {
    let mut graphs = Vec::new();
    let mut skipped = Vec::new();
    for (line, parsed) in Graph6Lines::new(reader) {
        match parsed {
            Ok(g) => graphs.push((line, g)),
            Err(e) if strict => return Err(format!("{source}:{line}: {e}")),
            Err(e) => skipped.push(SkippedLine {
                line,
                error: e.to_string(),
            }),
        }
    }
    let reports: Vec<ReportDocument> = graphs
        .par_iter()
        .map(|(line, g)| analyze(g, Format::Graph6, &format!("{source}:{line}"), effort, timings).0)
        .collect();
    let mut verdicts: BTreeMap<String, usize> = [Verdict::CertifiedDgs, Verdict::Undecided, Verdict::NotControllable]
        .iter()
        .map(|&v| (verdict_name(v).to_string(), 0))
        .collect();
    let mut in_fn = FamilyCounts::default();
    let mut controllable = 0;
    for r in &reports {
        *verdicts.entry(verdict_name(r.verdict).to_string()).or_default() += 1;
        if r.profile.controllable {
            controllable += 1;
        }
        match r.profile.in_fn {
            Some(true) => in_fn.member += 1,
            Some(false) => in_fn.non_member += 1,
            None => in_fn.undetermined += 1,
        }
    }
    let summary = BatchSummary {
        schema_version: SCHEMA_VERSION,
        tool: ToolInfo::current(),
        graphs: reports.len(),
        controllable,
        verdicts,
        in_fn,
        skipped,
    };
    Ok(BatchOutcome { reports, summary })
}

impl BatchOutcome {
    /// JSON lines: one report per graph, then the summary line.
    pub fn to_json_lines(&self) -> String {
        let mut out = String::new();
        for r in &self.reports {
            out.push_str(&to_sorted_json(r));
            out.push('\n');
        }
        out.push_str(&to_sorted_json(&BatchSummaryLine {
            summary: self.summary.clone(),
        }));
        out.push('\n');
        out
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for r in &self.reports {
            out.push_str(&format!("{}\t{}\t{}\n", r.input.source, r.input.graph6, verdict_name(r.verdict)));
        }
        let s = &self.summary;
        out.push_str(&format!(
            "graphs {}  controllable {}  {}\n",
            s.graphs,
            s.controllable,
            s.verdicts.iter().map(|(k, v)| format!("{k} {v}")).collect::<Vec<_>>().join("  ")
        ));
        out.push_str(&format!(
            "F_n members {}  non-members {}  undetermined {}  skipped lines {}\n",
            s.in_fn.member,
            s.in_fn.non_member,
            s.in_fn.undetermined,
            s.skipped.len()
        ));
        for sk in &s.skipped {
            out.push_str(&format!("skipped line {}: {}\n", sk.line, sk.error));
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QChecks {
    pub dimensions_match: bool,
    pub square: bool,
    pub orthogonality: bool,
    pub row_sums: bool,
    pub column_sums: bool,
    pub level_minimal: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyQDocument {
    pub schema_version: u32,
    pub tool: ToolInfo,
    pub graph: InputDescriptor,
    pub q_source: String,
    pub level: String,
    pub checks: QChecks,
    /// One message per failed check, naming where it failed.
    pub failures: Vec<String>,
    /// `null` when a structural check failed and membership was not tested.
    pub member: Option<bool>,
    pub image_graph6: Option<String>,
    pub image_equals_input: Option<bool>,
}

/// Checks a Q file against a graph: structure first, then membership.
pub fn verify_q(g: &Graph, format: Format, graph_source: &str, q_text: &str, q_source: &str) -> Result<(VerifyQDocument, u8), String> {
    let (scaled, level) = parse_q_text(q_text).map_err(|e| format!("{q_source}: {e}"))?;
    let v = validate(&scaled, &level);
    let dimensions_match = scaled.rows() == g.order() && scaled.cols() == g.order();
    let mut failures = v.failures();
    if !dimensions_match {
        failures.insert(0, format!("Q is {}x{} but the graph has {} vertices", scaled.rows(), scaled.cols(), g.order()));
    }
    let checks = QChecks {
        dimensions_match,
        square: !v.not_square,
        orthogonality: !v.not_square && v.orthogonality.is_none(),
        row_sums: !v.not_square && v.row_sum.is_none(),
        column_sums: !v.not_square && v.column_sum.is_none(),
        level_minimal: !v.not_square && v.common_factor.is_none(),
    };
    let mut doc = VerifyQDocument {
        schema_version: SCHEMA_VERSION,
        tool: ToolInfo::current(),
        graph: InputDescriptor {
            format: format.name().into(),
            source: graph_source.into(),
            graph6: g.to_graph6().unwrap_or_default(),
            order: g.order(),
            edges: g.edge_count(),
        },
        q_source: q_source.into(),
        level: level.to_string(),
        checks,
        failures,
        member: None,
        image_graph6: None,
        image_equals_input: None,
    };
    if !doc.failures.is_empty() {
        return Ok((doc, exit::INVALID_Q));
    }
    let q = RationalOrthogonal::new(scaled, level).map_err(|e| e.to_string())?;
    let image = check_membership(&q, g).map_err(|e| e.to_string())?;
    doc.member = Some(image.is_some());
    doc.image_equals_input = image.as_ref().map(|h| h == g);
    doc.image_graph6 = image.as_ref().map(|h| h.to_graph6().unwrap_or_default());
    let code = if image.is_some() { exit::OK } else { exit::CHECK_FAILED };
    Ok((doc, code))
}

impl VerifyQDocument {
    pub fn to_text(&self) -> String {
        let c = &self.checks;
        let mark = |b: bool| if b { "ok" } else { "FAILED" };
        let mut out = format!(
            "graph {} ({} vertices), Q from {} with level {}\n",
            self.graph.graph6, self.graph.order, self.q_source, self.level
        );
        for (name, ok) in [
            ("dimensions", c.dimensions_match),
            ("square", c.square),
            ("orthogonality", c.orthogonality),
            ("row sums", c.row_sums),
            ("column sums", c.column_sums),
            ("level minimal", c.level_minimal),
        ] {
            out.push_str(&format!("{name:<14} {}\n", mark(ok)));
        }
        for f in &self.failures {
            out.push_str(&format!("failure: {f}\n"));
        }
        match (self.member, &self.image_graph6) {
            (Some(true), Some(h)) => out.push_str(&format!("member         yes, image {h}{}\n", if self.image_equals_input == Some(true) { " (the input graph)" } else { "" })),
            (Some(false), _) => out.push_str("member         no: Q^T A Q is not an adjacency matrix\n"),
            _ => out.push_str("member         not tested\n"),
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleDocument {
    pub schema_version: u32,
    pub tool: ToolInfo,
    pub n: usize,
    pub labeled_graphs: u64,
    pub classes: usize,
    pub controllable: usize,
    pub certified: usize,
    pub undecided: usize,
    pub not_controllable: usize,
    pub non_dgs: usize,
    pub controllable_non_dgs: usize,
    pub soundness_violations: Vec<String>,
    pub undecided_but_dgs: usize,
    pub cospectral_pairs: usize,
    pub level_divisibility_failures: Vec<String>,
    pub isotropy_witness_failures: Vec<String>,
    pub level2_necessity_failures: Vec<String>,
    pub level_histogram: BTreeMap<String, usize>,
    pub clean: bool,
    pub runtime_ms: Option<u64>,
}

pub fn oracle(n: usize, effort: u64, timings: bool) -> Result<(OracleDocument, u8), String> {
    if n == 0 || n > MAX_EXHAUSTIVE_ORDER {
        return Err(format!("n must be between 1 and {MAX_EXHAUSTIVE_ORDER}"));
    }
    let start = Instant::now();
    let r = cross_validate(n, |g| certify(g, effort)).map_err(|e| e.to_string())?;
    let runtime = start.elapsed();
    let clean = r.is_clean();
    let doc = OracleDocument {
        schema_version: SCHEMA_VERSION,
        tool: ToolInfo::current(),
        n,
        labeled_graphs: r.labeled_graphs,
        classes: r.classes,
        controllable: r.controllable,
        certified: r.certified,
        undecided: r.undecided,
        not_controllable: r.not_controllable,
        non_dgs: r.non_dgs,
        controllable_non_dgs: r.controllable_non_dgs,
        soundness_violations: r.soundness_violations,
        undecided_but_dgs: r.undecided_but_dgs,
        cospectral_pairs: r.cospectral_pairs,
        level_divisibility_failures: r.level_divisibility_failures,
        isotropy_witness_failures: r.isotropy_witness_failures,
        level2_necessity_failures: r.level2_necessity_failures,
        level_histogram: r.level_histogram,
        clean,
        runtime_ms: timings.then_some(runtime.as_millis() as u64),
    };
    Ok((doc, if clean { exit::OK } else { exit::CHECK_FAILED }))
}

impl OracleDocument {
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "n = {}: {} labeled graphs, {} isomorphism classes\n",
            self.n, self.labeled_graphs, self.classes
        );
        out.push_str(&format!(
            "controllable {}  certified {}  undecided {}  not controllable {}\n",
            self.controllable, self.certified, self.undecided, self.not_controllable
        ));
        out.push_str(&format!(
            "classes with a mate {} (controllable {})  undecided without a mate {}\n",
            self.non_dgs, self.controllable_non_dgs, self.undecided_but_dgs
        ));
        out.push_str(&format!(
            "soundness violations {}  cospectral pairs checked {}\n",
            self.soundness_violations.len(),
            self.cospectral_pairs
        ));
        for (label, list) in [
            ("soundness violation", &self.soundness_violations),
            ("level does not divide d_n", &self.level_divisibility_failures),
            ("missing isotropy witness", &self.isotropy_witness_failures),
            ("no passing weight-four candidate", &self.level2_necessity_failures),
        ] {
            for item in list {
                out.push_str(&format!("{label}: {item}\n"));
            }
        }
        if let Some(ms) = self.runtime_ms {
            out.push_str(&format!("runtime {ms} ms\n"));
        }
        out.push_str(if self.clean { "result: clean\n" } else { "result: VIOLATIONS\n" });
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DensityDocument {
    pub schema_version: u32,
    pub tool: ToolInfo,
    pub n: usize,
    pub samples: usize,
    pub seed: u64,
    pub effort: u64,
    pub controllable: usize,
    pub in_fn: usize,
    /// Decimal with six digits, rounded half up.
    pub fn_fraction: String,
    /// Reduced `numerator/denominator`.
    pub fn_fraction_exact: String,
    pub fn_indeterminate: usize,
    pub fn_certified: usize,
    pub fn_undecided: usize,
    pub verdicts: BTreeMap<String, usize>,
    pub inconsistencies: Vec<String>,
    pub runtime_ms: Option<u64>,
}

pub fn density(n: usize, samples: usize, seed: u64, effort: u64, timings: bool) -> Result<(DensityDocument, u8), String> {
    let start = Instant::now();
    let r = run_density(DensityConfig { n, samples, seed, effort }).map_err(|e| e.to_string())?;
    let runtime = start.elapsed();
    let (num, den) = r.fraction();
    let code = if r.inconsistencies.is_empty() { exit::OK } else { exit::CHECK_FAILED };
    let doc = DensityDocument {
        schema_version: SCHEMA_VERSION,
        tool: ToolInfo::current(),
        n,
        samples,
        seed,
        effort,
        controllable: r.controllable,
        in_fn: r.in_fn,
        fn_fraction: r.fraction_decimal(),
        fn_fraction_exact: format!("{num}/{den}"),
        fn_indeterminate: r.fn_indeterminate,
        fn_certified: r.fn_certified,
        fn_undecided: r.fn_undecided,
        verdicts: r.verdicts,
        inconsistencies: r.inconsistencies,
        runtime_ms: timings.then_some(runtime.as_millis() as u64),
    };
    Ok((doc, code))
}

impl DensityDocument {
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "G({}, 1/2), {} samples, seed {}\nF_n fraction {} ({})\n",
            self.n, self.samples, self.seed, self.fn_fraction, self.fn_fraction_exact
        );
        out.push_str(&format!(
            "controllable {}  F_n members certified {}  undecided {}  membership undetermined {}\n",
            self.controllable, self.fn_certified, self.fn_undecided, self.fn_indeterminate
        ));
        out.push_str(&format!(
            "{}\n",
            self.verdicts.iter().map(|(k, v)| format!("{k} {v}")).collect::<Vec<_>>().join("  ")
        ));
        for i in &self.inconsistencies {
            out.push_str(&format!("inconsistent: {i}\n"));
        }
        if let Some(ms) = self.runtime_ms {
            out.push_str(&format!("runtime {ms} ms\n"));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_graph_parsing() {
        assert_eq!(parse_single(b">>graph6<<Bw\n", Format::Graph6).unwrap(), Graph::complete(3));
        assert!(parse_single(b"", Format::Graph6).is_err());
        assert!(parse_single(b"A_\n\nA_\n", Format::Graph6).unwrap_err().contains("line 3"));
        assert_eq!(parse_single(b"0 1\n1 0\n", Format::Adjacency).unwrap(), Graph::complete(2));
        assert!(parse_single(&[0xff, 0xfe], Format::Adjacency).is_err());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(verdict_exit_code(Verdict::CertifiedDgs), 0);
        assert_eq!(verdict_exit_code(Verdict::Undecided), 10);
        assert_eq!(verdict_exit_code(Verdict::NotControllable), 11);
    }

    #[test]
    fn batch_keeps_input_order() {
        let out = batch("Bw\n@\nA_\n".as_bytes(), "s", true, 10, false).unwrap();
        let g6: Vec<&str> = out.reports.iter().map(|r| r.input.graph6.as_str()).collect();
        assert_eq!(g6, ["Bw", "@", "A_"]);
        assert_eq!(out.summary.controllable, 1);
        assert_eq!(out.summary.in_fn.member, 1);
    }

    #[test]
    fn oracle_rejects_large_orders() {
        assert!(oracle(8, 10, false).is_err());
        assert!(oracle(0, 10, false).is_err());
    }
}
