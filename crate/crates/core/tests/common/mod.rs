//! Fixture loading shared by the integration tests.
#![allow(dead_code)]

pub mod props;

use std::path::PathBuf;

use dgs_core::graph::parse_adjacency_text;
use dgs_core::oracle::{ingest_graph6_stream, StreamMode};
use dgs_core::qmatrix::parse_q_text;
use dgs_core::{Graph, RationalOrthogonal};

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

pub fn fixture_text(name: &str) -> String {
    std::fs::read_to_string(fixture_path(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn adjacency_fixture(name: &str) -> Graph {
    parse_adjacency_text(&fixture_text(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn g1() -> Graph {
    adjacency_fixture("g1.adj")
}

pub fn g2() -> Graph {
    adjacency_fixture("g2.adj")
}

pub fn counterexample() -> Graph {
    adjacency_fixture("counterexample.adj")
}

pub fn counterexample_q() -> RationalOrthogonal {
    let (scaled, level) = parse_q_text(&fixture_text("counterexample.q")).unwrap();
    RationalOrthogonal::new(scaled, level).unwrap()
}

/// Supports listed in `g1_level2_supports.txt`, sorted.
pub fn g1_level2_supports() -> Vec<[usize; 4]> {
    let mut out: Vec<[usize; 4]> = fixture_text("g1_level2_supports.txt")
        .lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
        .map(|l| {
            let v: Vec<usize> = l.split_whitespace().map(|t| t.parse().unwrap()).collect();
            [v[0], v[1], v[2], v[3]]
        })
        .collect();
    out.sort();
    out
}

/// One representative per isomorphism class on seven vertices.
pub fn graphs7() -> Vec<Graph> {
    let file = std::fs::File::open(fixture_path("graphs7.g6")).unwrap();
    ingest_graph6_stream(std::io::BufReader::new(file), StreamMode::Strict)
        .unwrap()
        .graphs
}
