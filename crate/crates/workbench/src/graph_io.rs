//! Plain-text edge lists: the node count on the first line, then one
//! `u v` pair per line. Blank lines and `#` comments are ignored.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use sha_core::graph::Graph;

pub fn parse_graph(text: &str) -> Result<Graph> {
    let mut lines = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .enumerate()
        .filter(|(_, l)| !l.is_empty());
    let (_, header) = lines.next().context("graph file is empty")?;
    let n: usize = header
        .parse()
        .with_context(|| format!("bad node count {header:?}"))?;
    let mut edges = Vec::new();
    for (no, line) in lines {
        let mut it = line.split_whitespace();
        let (Some(u), Some(v), None) = (it.next(), it.next(), it.next()) else {
            bail!("line {}: expected two node ids, got {line:?}", no + 1);
        };
        let u: usize = u.parse().with_context(|| format!("line {}: bad node id", no + 1))?;
        let v: usize = v.parse().with_context(|| format!("line {}: bad node id", no + 1))?;
        edges.push((u, v));
    }
    Ok(Graph::new(n, edges)?)
}

pub fn format_graph(g: &Graph) -> String {
    let mut out = format!("{}\n", g.n_nodes());
    for (u, v) in g.edges() {
        let _ = writeln!(out, "{u} {v}");
    }
    out
}

pub fn read_graph(path: &Path) -> Result<Graph> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_graph(&text).with_context(|| format!("parsing {}", path.display()))
}
