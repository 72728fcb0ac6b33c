//! Two-phase Louvain modularity maximization.
//!
//! Each level alternates local moving (every node visited in a seeded random
//! order and moved to the neighboring community with the largest modularity
//! gain, until a full sweep moves nothing) with aggregation (communities
//! collapse into single nodes, internal weight becoming a self-loop). The run
//! stops at the first level where local moving changes nothing. Resolution
//! is fixed at 1.
//!
//! Among candidate moves with equal gain the smallest community id wins; a
//! node only leaves its community for a strictly better one.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::RetweetGraph;
use crate::scalar::Scalar;

use super::modularity::modularity_of_labels;
use super::Partition;

/// Full-sweep cap per level; only reachable through floating-point cycling.
const MAX_SWEEPS: usize = 1_000;

/// Louvain result with the modularity of the original graph after each level.
#[derive(Debug, Clone)]
pub struct LouvainRun<F> {
    pub partition: Partition<F>,
    pub level_modularity: Vec<F>,
}

struct LevelGraph<F> {
    offsets: Vec<usize>,
    targets: Vec<usize>,
    weights: Vec<F>,
    /// A_ii: twice the internal weight of a collapsed community
    self_loops: Vec<F>,
    degree: Vec<F>,
    two_m: F,
}

impl<F: Scalar> LevelGraph<F> {
    fn from_graph(g: &RetweetGraph) -> Self {
        let n = g.node_count();
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        let mut targets = Vec::new();
        let mut weights = Vec::new();
        let mut degree = Vec::with_capacity(n);
        for u in 0..n {
            let mut k = F::zero();
            for (v, w) in g.neighbors(u) {
                let w = F::of_u64(w);
                targets.push(v);
                weights.push(w);
                k = k + w;
            }
            degree.push(k);
            offsets.push(targets.len());
        }
        let two_m = degree.iter().copied().sum();
        LevelGraph {
            offsets,
            targets,
            weights,
            self_loops: vec![F::zero(); n],
            degree,
            two_m,
        }
    }

    fn len(&self) -> usize {
        self.degree.len()
    }

    fn row(&self, u: usize) -> impl Iterator<Item = (usize, F)> + '_ {
        let r = self.offsets[u]..self.offsets[u + 1];
        self.targets[r.clone()].iter().copied().zip(self.weights[r].iter().copied())
    }

    /// Local moving; returns dense community labels and whether any node moved.
    fn local_moving(&self, rng: &mut ChaCha8Rng) -> (Vec<usize>, bool) {
        let n = self.len();
        let mut comm: Vec<usize> = (0..n).collect();
        let mut tot: Vec<F> = self.degree.clone();
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(rng);

        let tol = F::epsilon() * self.two_m;
        let mut link = vec![F::zero(); n];
        let mut touched: Vec<usize> = Vec::new();
        let mut any_move = false;

        for _ in 0..MAX_SWEEPS {
            let mut moved = false;
            for &u in &order {
                let own = comm[u];
                let k = self.degree[u];
                for (v, w) in self.row(u) {
                    let c = comm[v];
                    if link[c] == F::zero() {
                        touched.push(c);
                    }
                    link[c] = link[c] + w;
                }
                tot[own] = tot[own] - k;

                let gain = |c: usize, link_c: F| link_c - tot[c] * k / self.two_m;
                let mut best = own;
                let mut best_gain = gain(own, link[own]);
                touched.sort_unstable();
                for &c in &touched {
                    if c == own {
                        continue;
                    }
                    let gc = gain(c, link[c]);
                    if gc > best_gain + tol {
                        best = c;
                        best_gain = gc;
                    }
                }

                tot[best] = tot[best] + k;
                if best != own {
                    comm[u] = best;
                    moved = true;
                }
                for &c in &touched {
                    link[c] = F::zero();
                }
                touched.clear();
            }
            if !moved {
                break;
            }
            any_move = true;
        }

        // dense relabel by first appearance in index order
        let mut remap = vec![usize::MAX; n];
        let mut next = 0;
        for c in comm.iter_mut() {
            if remap[*c] == usize::MAX {
                remap[*c] = next;
                next += 1;
            }
            *c = remap[*c];
        }
        (comm, any_move)
    }

    fn aggregate(&self, comm: &[usize]) -> Self {
        let n_comm = comm.iter().copied().max().map_or(0, |m| m + 1);
        let mut self_loops = vec![F::zero(); n_comm];
        let mut degree = vec![F::zero(); n_comm];
        let mut rows: Vec<Vec<(usize, F)>> = vec![Vec::new(); n_comm];
        for u in 0..self.len() {
            let cu = comm[u];
            degree[cu] = degree[cu] + self.degree[u];
            self_loops[cu] = self_loops[cu] + self.self_loops[u];
            for (v, w) in self.row(u) {
                let cv = comm[v];
                if cu == cv {
                    self_loops[cu] = self_loops[cu] + w;
                } else {
                    rows[cu].push((cv, w));
                }
            }
        }
        let mut offsets = Vec::with_capacity(n_comm + 1);
        offsets.push(0);
        let mut targets = Vec::new();
        let mut weights = Vec::new();
        for mut row in rows {
            row.sort_unstable_by_key(|&(c, _)| c);
            let mut last: Option<usize> = None;
            for (c, w) in row {
                if last == Some(c) {
                    let lw = weights.last_mut().unwrap();
                    *lw = *lw + w;
                } else {
                    targets.push(c);
                    weights.push(w);
                    last = Some(c);
                }
            }
            offsets.push(targets.len());
        }
        LevelGraph {
            offsets,
            targets,
            weights,
            self_loops,
            degree,
            two_m: self.two_m,
        }
    }
}

/// Louvain partition of an undirected graph; deterministic for a given seed.
pub fn louvain<F: Scalar>(g: &RetweetGraph, seed: u64) -> Result<Partition<F>> {
    louvain_with_trace(g, seed).map(|run| run.partition)
}

pub fn louvain_with_trace<F: Scalar>(g: &RetweetGraph, seed: u64) -> Result<LouvainRun<F>> {
    if g.is_directed() {
        return Err(Error::Argument("louvain needs the undirected projection".into()));
    }
    if g.is_empty() {
        return Err(Error::Argument("louvain needs at least one node".into()));
    }
    let n = g.node_count();
    let mut labels: Vec<usize> = (0..n).collect();
    let mut level_modularity = Vec::new();
    let mut level = LevelGraph::<F>::from_graph(g);

    if level.two_m > F::zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        loop {
            let (comm, moved) = level.local_moving(&mut rng);
            if !moved {
                break;
            }
            for l in labels.iter_mut() {
                *l = comm[*l];
            }
            level_modularity.push(modularity_of_labels(g, &labels)?);
            level = level.aggregate(&comm);
            if level.len() == 1 {
                break;
            }
        }
    }

    let q = modularity_of_labels(g, &labels)?;
    Ok(LouvainRun {
        partition: Partition::from_labels(g.node_ids(), &labels, q),
        level_modularity,
    })
}
