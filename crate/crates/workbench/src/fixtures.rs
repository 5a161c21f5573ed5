//! The ten 8-node benchmark graphs, embedded at build time.

use anyhow::{anyhow, Result};
use serde::{Deserialize, Serialize};
use sha_core::graph::Graph;

use crate::graph_io::parse_graph;

/// Sidecar metadata of a fixture graph.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FixtureMeta {
    pub id: u32,
    /// Edge probability the graph was drawn with.
    pub p: f64,
    /// Share of valid 4-colorings, in percent.
    pub r_percent: f64,
    /// Number of valid 4-colorings in the binary encoding.
    pub s: u64,
    /// Maximum cut, as published.
    #[serde(rename = "E")]
    pub e: u32,
    /// Seed as published.
    pub seed: u64,
    /// Seed that reproduces the edge list.
    pub generator_seed: u64,
    pub generator: String,
}

#[derive(Clone, Debug)]
pub struct Fixture {
    pub name: &'static str,
    pub meta: FixtureMeta,
    pub graph: Graph,
}

macro_rules! fixture_files {
    ($($name:literal),* $(,)?) => {
        [$((
            $name,
            include_str!(concat!("../fixtures/", $name, ".txt")),
            include_str!(concat!("../fixtures/", $name, ".json")),
        )),*]
    };
}

const FILES: [(&str, &str, &str); 10] = fixture_files!(
    "graph_01", "graph_02", "graph_03", "graph_04", "graph_05", "graph_06", "graph_07", "graph_08",
    "graph_09", "graph_10",
);

pub fn all() -> Vec<Fixture> {
    FILES
        .iter()
        .map(|&(name, txt, json)| Fixture {
            name,
            meta: serde_json::from_str(json).expect("embedded fixture metadata parses"),
            graph: parse_graph(txt).expect("embedded fixture graph parses"),
        })
        .collect()
}

pub fn names() -> Vec<&'static str> {
    FILES.iter().map(|f| f.0).collect()
}

pub fn by_name(name: &str) -> Result<Fixture> {
    all()
        .into_iter()
        .find(|f| f.name == name)
        .ok_or_else(|| anyhow!("unknown fixture {name:?}; known: {}", names().join(", ")))
}
