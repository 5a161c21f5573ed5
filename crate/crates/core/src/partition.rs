//! Partition schedules over Hamiltonian term indices.

use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instances::ProblemInstance;

/// Ordered parts `P_1..P_M` and their running unions `S_k = P_1 u ... u P_k`.
///
/// Parts are non-empty sorted index sets; they may overlap (node-wise
/// schedules share the terms of edges between groups). The final stage
/// always covers every term.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawSchedule")]
pub struct PartitionSchedule {
    n_terms: usize,
    partitions: Vec<Vec<usize>>,
    #[serde(skip_serializing)]
    cumulative: Vec<Vec<usize>>,
}

#[derive(Deserialize)]
struct RawSchedule {
    n_terms: usize,
    partitions: Vec<Vec<usize>>,
}

impl TryFrom<RawSchedule> for PartitionSchedule {
    type Error = Error;

    fn try_from(raw: RawSchedule) -> Result<Self> {
        PartitionSchedule::from_partitions(raw.partitions, raw.n_terms)
    }
}

impl PartitionSchedule {
    pub fn from_partitions(partitions: Vec<Vec<usize>>, n_terms: usize) -> Result<Self> {
        let mut covered = alloc::vec![false; n_terms];
        let mut parts = Vec::with_capacity(partitions.len());
        for mut p in partitions {
            p.sort_unstable();
            p.dedup();
            if p.is_empty() {
                return Err(Error::InvalidSchedule("empty part".into()));
            }
            for &i in &p {
                if i >= n_terms {
                    return Err(Error::TermIndexOutOfRange { index: i, n_terms });
                }
                covered[i] = true;
            }
            parts.push(p);
        }
        if parts.is_empty() && n_terms > 0 {
            return Err(Error::InvalidSchedule("no parts".into()));
        }
        if let Some(i) = covered.iter().position(|c| !c) {
            return Err(Error::InvalidSchedule(alloc::format!(
                "term {i} is not covered by any part"
            )));
        }
        let mut in_stage = alloc::vec![false; n_terms];
        let cumulative = parts
            .iter()
            .map(|p| {
                p.iter().for_each(|&i| in_stage[i] = true);
                (0..n_terms).filter(|&i| in_stage[i]).collect()
            })
            .collect();
        Ok(PartitionSchedule {
            n_terms,
            partitions: parts,
            cumulative,
        })
    }

    /// The one-stage schedule holding every term.
    pub fn single(n_terms: usize) -> Self {
        let all: Vec<usize> = (0..n_terms).collect();
        PartitionSchedule {
            n_terms,
            partitions: if n_terms == 0 { Vec::new() } else { alloc::vec![all.clone()] },
            cumulative: if n_terms == 0 { Vec::new() } else { alloc::vec![all] },
        }
    }

    pub fn n_terms(&self) -> usize {
        self.n_terms
    }

    pub fn n_stages(&self) -> usize {
        self.partitions.len()
    }

    pub fn partitions(&self) -> &[Vec<usize>] {
        &self.partitions
    }

    /// Stage sets `S_1..S_M`.
    pub fn cumulative(&self) -> &[Vec<usize>] {
        &self.cumulative
    }

    pub fn is_disjoint(&self) -> bool {
        self.partitions.iter().map(Vec::len).sum::<usize>() == self.n_terms
    }
}

/// Splits `order` into `m` contiguous blocks; the first `len % m` blocks get
/// one extra element.
fn balanced_blocks(order: &[usize], m: usize) -> Vec<Vec<usize>> {
    let (base, extra) = (order.len() / m, order.len() % m);
    let mut out = Vec::with_capacity(m);
    let mut start = 0;
    for b in 0..m {
        let len = base + usize::from(b < extra);
        out.push(order[start..start + len].to_vec());
        start += len;
    }
    out
}

fn check_count(count: usize, min: usize, max: usize) -> Result<()> {
    if count < min || count > max {
        return Err(Error::PartitionCount { count, min, max });
    }
    Ok(())
}

/// Equal-sized contiguous blocks in the given term order.
pub fn sequential_partition(n_terms: usize, m: usize) -> Result<PartitionSchedule> {
    check_count(m, 1, n_terms)?;
    let order: Vec<usize> = (0..n_terms).collect();
    PartitionSchedule::from_partitions(balanced_blocks(&order, m), n_terms)
}

/// Equal-sized blocks of a seeded uniform shuffle of the term indices.
pub fn random_partition(n_terms: usize, m: usize, seed: u64) -> Result<PartitionSchedule> {
    check_count(m, 1, n_terms)?;
    let mut order: Vec<usize> = (0..n_terms).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    PartitionSchedule::from_partitions(balanced_blocks(&order, m), n_terms)
}

pub const KMEANS_RESTARTS: usize = 10;
pub const KMEANS_MAX_ITER: usize = 300;

/// Clusters nodes by k-means on adjacency rows, then sends each term to the
/// cluster of the lower endpoint of its edge.
///
/// Clusters are numbered by their smallest node, and parts follow that
/// order. Clusters left without terms are dropped with a warning.
pub fn kmeans_partition(instance: &ProblemInstance, m: usize, seed: u64) -> Result<PartitionSchedule> {
    let g = instance.graph();
    check_count(m, 2, g.n_nodes())?;
    let labels = kmeans(&g.adjacency_rows(), m, seed, KMEANS_RESTARTS, KMEANS_MAX_ITER);
    let mut parts: Vec<Vec<usize>> = alloc::vec![Vec::new(); m];
    for t in 0..instance.n_terms() {
        let (u, _) = instance.term_edge(t);
        parts[labels[u]].push(t);
    }
    let before = parts.len();
    parts.retain(|p| !p.is_empty());
    if parts.len() < before {
        log::warn!(
            "k-means schedule: dropped {} empty partition(s), {} stage(s) remain",
            before - parts.len(),
            parts.len()
        );
    }
    PartitionSchedule::from_partitions(parts, instance.n_terms())
}

/// Groups nodes into `j` contiguous chunks of the breadth-first order from
/// node 0; part `g` holds every term whose edge touches group `g`.
pub fn nodewise_partition(instance: &ProblemInstance, j: usize) -> Result<PartitionSchedule> {
    let g = instance.graph();
    check_count(j, 2, g.n_nodes())?;
    let mut parts: Vec<Vec<usize>> = balanced_blocks(&g.bfs_order(), j)
        .iter()
        .map(|group| instance.terms_touching(group))
        .collect();
    let before = parts.len();
    parts.retain(|p| !p.is_empty());
    if parts.len() < before {
        log::warn!(
            "node-wise schedule: dropped {} group(s) without terms",
            before - parts.len()
        );
    }
    PartitionSchedule::from_partitions(parts, instance.n_terms())
}

/// Labels in `0..k`, renumbered by first appearance in point order.
///
/// Seeded k-means++ initialization, Lloyd iterations with squared Euclidean
/// distance, `restarts` runs keeping the lowest inertia. Ties in assignment
/// go to the lowest center; empty clusters keep their previous center.
pub fn kmeans(points: &[Vec<f64>], k: usize, seed: u64, restarts: usize, max_iter: usize) -> Vec<usize> {
    let n = points.len();
    if n == 0 || k == 0 {
        return Vec::new();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<(f64, Vec<usize>)> = None;
    for _ in 0..restarts.max(1) {
        let mut centers = kmeans_pp(points, k, &mut rng);
        let mut labels = assign(points, &centers);
        for _ in 0..max_iter {
            update(points, &labels, &mut centers);
            let next = assign(points, &centers);
            if next == labels {
                break;
            }
            labels = next;
        }
        let inertia: f64 = points
            .iter()
            .zip(&labels)
            .map(|(p, &l)| sq_dist(p, &centers[l]))
            .sum();
        if best.as_ref().map_or(true, |(b, _)| inertia < *b) {
            best = Some((inertia, labels));
        }
    }
    let labels = best.expect("at least one restart").1;
    let mut remap = alloc::vec![usize::MAX; k];
    let mut next = 0;
    labels
        .iter()
        .map(|&l| {
            if remap[l] == usize::MAX {
                remap[l] = next;
                next += 1;
            }
            remap[l]
        })
        .collect()
}

fn kmeans_pp(points: &[Vec<f64>], k: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let n = points.len();
    let mut centers = Vec::with_capacity(k);
    centers.push(points[rng.gen_range(0..n)].clone());
    while centers.len() < k {
        let d2: Vec<f64> = points
            .iter()
            .map(|p| centers.iter().map(|c| sq_dist(p, c)).fold(f64::INFINITY, f64::min))
            .collect();
        let total: f64 = d2.iter().sum();
        let pick = if total > 0.0 {
            let u = rng.gen::<f64>() * total;
            let mut acc = 0.0;
            d2.iter()
                .position(|&w| {
                    acc += w;
                    acc > u
                })
                .unwrap_or(n - 1)
        } else {
            rng.gen_range(0..n)
        };
        centers.push(points[pick].clone());
    }
    centers
}

fn assign(points: &[Vec<f64>], centers: &[Vec<f64>]) -> Vec<usize> {
    points
        .iter()
        .map(|p| {
            let mut best = (0, f64::INFINITY);
            for (i, c) in centers.iter().enumerate() {
                let d = sq_dist(p, c);
                if d < best.1 {
                    best = (i, d);
                }
            }
            best.0
        })
        .collect()
}

fn update(points: &[Vec<f64>], labels: &[usize], centers: &mut [Vec<f64>]) {
    let dim = points[0].len();
    let mut sums = alloc::vec![alloc::vec![0.0; dim]; centers.len()];
    let mut counts = alloc::vec![0usize; centers.len()];
    for (p, &l) in points.iter().zip(labels) {
        counts[l] += 1;
        sums[l].iter_mut().zip(p).for_each(|(s, x)| *s += x);
    }
    for ((c, s), &cnt) in centers.iter_mut().zip(sums).zip(&counts) {
        if cnt > 0 {
            *c = s.into_iter().map(|x| x / cnt as f64).collect();
        }
    }
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Assembly strategy, written `rd:<m>`, `sq:<m>`, `cl:<m>` or `nw:<j>`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Strategy {
    Random(usize),
    Sequential(usize),
    Cluster(usize),
    Nodewise(usize),
}

impl Strategy {
    pub fn schedule(&self, instance: &ProblemInstance, seed: u64) -> Result<PartitionSchedule> {
        match *self {
            Strategy::Random(m) => random_partition(instance.n_terms(), m, seed),
            Strategy::Sequential(m) => sequential_partition(instance.n_terms(), m),
            Strategy::Cluster(m) => kmeans_partition(instance, m, seed),
            Strategy::Nodewise(j) => nodewise_partition(instance, j),
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Strategy::Random(m) => write!(f, "rd:{m}"),
            Strategy::Sequential(m) => write!(f, "sq:{m}"),
            Strategy::Cluster(m) => write!(f, "cl:{m}"),
            Strategy::Nodewise(j) => write!(f, "nw:{j}"),
        }
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (tag, count) = s
            .split_once(':')
            .ok_or_else(|| Error::parse(s, "expected <rd|sq|cl|nw>:<count>"))?;
        let count: usize = count
            .parse()
            .map_err(|_| Error::parse(s, "partition count is not an integer"))?;
        match tag {
            "rd" => Ok(Strategy::Random(count)),
            "sq" => Ok(Strategy::Sequential(count)),
            "cl" => Ok(Strategy::Cluster(count)),
            "nw" => Ok(Strategy::Nodewise(count)),
            _ => Err(Error::parse(s, "unknown strategy tag")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;
    use crate::instances::{coloring_hamiltonian, maxcut_hamiltonian};
    use alloc::string::ToString;
    use alloc::vec;

    #[test]
    fn sequential_blocks() {
        let s = sequential_partition(10, 2).unwrap();
        assert_eq!(s.partitions(), &[vec![0, 1, 2, 3, 4], vec![5, 6, 7, 8, 9]]);
        assert_eq!(sequential_partition(10, 1).unwrap().n_stages(), 1);
        let sizes: Vec<_> = sequential_partition(7, 3)
            .unwrap()
            .partitions()
            .iter()
            .map(Vec::len)
            .collect();
        assert_eq!(sizes, vec![3, 2, 2]);
        assert!(sequential_partition(3, 4).is_err());
        assert!(sequential_partition(3, 0).is_err());
    }

    #[test]
    fn random_singletons_form_a_permutation() {
        let s = random_partition(4, 4, 99).unwrap();
        let mut flat: Vec<usize> = s.partitions().iter().map(|p| {
            assert_eq!(p.len(), 1);
            p[0]
        }).collect();
        flat.sort_unstable();
        assert_eq!(flat, vec![0, 1, 2, 3]);
        assert_eq!(random_partition(20, 3, 5).unwrap(), random_partition(20, 3, 5).unwrap());
    }

    #[test]
    fn kmeans_separates_bridged_triangles() {
        let g = Graph::new(6, [(0, 1), (0, 2), (1, 2), (2, 3), (3, 4), (3, 5), (4, 5)]).unwrap();
        let inst = maxcut_hamiltonian(&g).unwrap();
        let s = kmeans_partition(&inst, 2, 0).unwrap();
        assert_eq!(s.n_stages(), 2);
        let part_of = |t: usize| s.partitions().iter().position(|p| p.contains(&t)).unwrap();
        // edge 0 = (0,1) in the first triangle, edge 6 = (4,5) in the second
        let first = part_of(1);
        let second = part_of(2 * 6 + 1);
        assert_ne!(first, second);
        for e in [0, 1, 2] {
            assert_eq!(part_of(2 * e + 1), first);
        }
        for e in [4, 5, 6] {
            assert_eq!(part_of(2 * e + 1), second);
        }
        assert_eq!(kmeans_partition(&inst, 2, 7).unwrap(), kmeans_partition(&inst, 2, 7).unwrap());
    }

    #[test]
    fn kmeans_with_one_cluster_per_node() {
        let inst = maxcut_hamiltonian(&Graph::complete(3)).unwrap();
        let labels = kmeans(&inst.graph().adjacency_rows(), 3, 1, 10, 300);
        assert_eq!(labels, vec![0, 1, 2]);
        assert!(kmeans_partition(&inst, 4, 0).is_err());
        assert!(kmeans_partition(&inst, 1, 0).is_err());
    }

    #[test]
    fn nodewise_on_triangle() {
        let inst = coloring_hamiltonian(&Graph::complete(3), 2).unwrap();
        let s = nodewise_partition(&inst, 3).unwrap();
        // edges (0,1)=terms 0,1  (0,2)=2,3  (1,2)=4,5
        assert_eq!(
            s.partitions(),
            &[vec![0, 1, 2, 3], vec![0, 1, 4, 5], vec![2, 3, 4, 5]]
        );
        assert_eq!(s.cumulative().last().unwrap(), &(0..6).collect::<Vec<_>>());
    }

    #[test]
    fn nodewise_on_path() {
        let inst = maxcut_hamiltonian(&Graph::path(4)).unwrap();
        let s = nodewise_partition(&inst, 2).unwrap();
        // edges (0,1)=0,1 (1,2)=2,3 (2,3)=4,5
        assert_eq!(s.partitions(), &[vec![0, 1, 2, 3], vec![2, 3, 4, 5]]);
        assert_eq!(s.cumulative()[0], vec![0, 1, 2, 3]);
        assert!(!s.is_disjoint());
    }

    #[test]
    fn strategy_grammar() {
        for s in ["rd:2", "sq:4", "cl:6", "nw:8"] {
            assert_eq!(s.parse::<Strategy>().unwrap().to_string(), s);
        }
        assert!("xx:2".parse::<Strategy>().is_err());
        assert!("nw".parse::<Strategy>().is_err());
        assert!("nw:a".parse::<Strategy>().is_err());
    }

    #[test]
    fn schedule_validation() {
        assert!(PartitionSchedule::from_partitions(vec![vec![0], vec![]], 1).is_err());
        assert!(PartitionSchedule::from_partitions(vec![vec![0]], 2).is_err());
        assert!(PartitionSchedule::from_partitions(vec![vec![0, 2]], 2).is_err());
    }
}
