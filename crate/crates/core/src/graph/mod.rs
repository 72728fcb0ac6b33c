//! Weighted retweet graph in compressed sparse row form.
//!
//! Nodes are user ids kept in ascending order; a node's index is its rank in
//! that order. A directed graph stores out-edges `u -> v` weighted by the
//! number of plain retweets of `v` by `u`. An undirected graph stores every
//! edge in both endpoints' rows.

mod io;

pub use io::{read_rtg, write_edges_csv, write_rtg, RTG_MAGIC};

use crate::error::{Error, Result};
use crate::ingest::TweetRecord;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RetweetGraph {
    node_ids: Vec<u64>,
    offsets: Vec<usize>,
    neighbors: Vec<u32>,
    weights: Vec<u64>,
    directed: bool,
    edge_count: usize,
}

impl RetweetGraph {
    /// Assembles a graph from per-node sorted rows.
    ///
    /// Rows must be sorted by neighbor index with no duplicates; not validated.
    fn from_rows(node_ids: Vec<u64>, rows: Vec<Vec<(u32, u64)>>, directed: bool) -> Self {
        let mut offsets = Vec::with_capacity(rows.len() + 1);
        offsets.push(0);
        let total: usize = rows.iter().map(Vec::len).sum();
        let mut neighbors = Vec::with_capacity(total);
        let mut weights = Vec::with_capacity(total);
        for row in rows {
            for (n, w) in row {
                neighbors.push(n);
                weights.push(w);
            }
            offsets.push(neighbors.len());
        }
        let edge_count = if directed {
            neighbors.len()
        } else {
            debug_assert!(neighbors.len() % 2 == 0);
            neighbors.len() / 2
        };
        RetweetGraph {
            node_ids,
            offsets,
            neighbors,
            weights,
            directed,
            edge_count,
        }
    }

    pub(crate) fn from_raw_parts(
        node_ids: Vec<u64>,
        offsets: Vec<usize>,
        neighbors: Vec<u32>,
        weights: Vec<u64>,
        directed: bool,
    ) -> Result<Self> {
        let n = node_ids.len();
        if offsets.len() != n + 1 || offsets[0] != 0 || *offsets.last().unwrap() != neighbors.len() {
            return Err(Error::Format("offset array inconsistent with node count".into()));
        }
        if weights.len() != neighbors.len() {
            return Err(Error::Format("weight array length differs from neighbor array".into()));
        }
        if offsets.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::Format("offsets not monotone".into()));
        }
        if node_ids.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Format("node ids not strictly ascending".into()));
        }
        if neighbors.iter().any(|&v| v as usize >= n) || weights.contains(&0) {
            return Err(Error::Format("neighbor index out of range or zero weight".into()));
        }
        let edge_count = if directed { neighbors.len() } else { neighbors.len() / 2 };
        Ok(RetweetGraph {
            node_ids,
            offsets,
            neighbors,
            weights,
            directed,
            edge_count,
        })
    }

    /// Directed graph with an explicit node set and `(source, target, weight)` edges.
    ///
    /// Parallel edges are summed.
    pub fn from_edges(node_ids: impl IntoIterator<Item = u64>, edges: &[(u64, u64, u64)]) -> Result<Self> {
        let mut ids: Vec<u64> = node_ids.into_iter().collect();
        ids.extend(edges.iter().flat_map(|&(u, v, _)| [u, v]));
        ids.sort_unstable();
        ids.dedup();
        let index = |id: u64| ids.binary_search(&id).unwrap() as u32;
        let mut pairs: Vec<(u32, u32, u64)> = Vec::with_capacity(edges.len());
        for &(u, v, w) in edges {
            if w == 0 {
                return Err(Error::Argument(format!("edge ({u}, {v}) has zero weight")));
            }
            pairs.push((index(u), index(v), w));
        }
        Ok(Self::directed_from_pairs(ids, pairs))
    }

    /// Undirected graph from `{u, v, weight}` edges; self-loops rejected, parallel edges summed.
    pub fn undirected_from_edges(
        node_ids: impl IntoIterator<Item = u64>,
        edges: &[(u64, u64, u64)],
    ) -> Result<Self> {
        if let Some(&(u, _, _)) = edges.iter().find(|(u, v, _)| u == v) {
            return Err(Error::Argument(format!("self-loop on {u} in undirected graph")));
        }
        let directed = Self::from_edges(node_ids, edges)?;
        directed.to_undirected()
    }

    fn directed_from_pairs(node_ids: Vec<u64>, mut pairs: Vec<(u32, u32, u64)>) -> Self {
        pairs.sort_unstable_by_key(|&(u, v, _)| (u, v));
        let mut rows: Vec<Vec<(u32, u64)>> = vec![Vec::new(); node_ids.len()];
        for (u, v, w) in pairs {
            let row = &mut rows[u as usize];
            match row.last_mut() {
                Some((last, acc)) if *last == v => *acc += w,
                _ => row.push((v, w)),
            }
        }
        Self::from_rows(node_ids, rows, true)
    }

    pub fn node_count(&self) -> usize {
        self.node_ids.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn is_empty(&self) -> bool {
        self.node_ids.is_empty()
    }

    pub fn node_ids(&self) -> &[u64] {
        &self.node_ids
    }

    pub fn node_id(&self, index: usize) -> u64 {
        self.node_ids[index]
    }

    pub fn index_of(&self, id: u64) -> Option<usize> {
        self.node_ids.binary_search(&id).ok()
    }

    pub(crate) fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    pub(crate) fn neighbor_array(&self) -> &[u32] {
        &self.neighbors
    }

    pub(crate) fn weight_array(&self) -> &[u64] {
        &self.weights
    }

    /// `(neighbor index, weight)` pairs of a node's row, ascending by neighbor.
    pub fn neighbors(&self, index: usize) -> impl ExactSizeIterator<Item = (usize, u64)> + '_ {
        let range = self.offsets[index]..self.offsets[index + 1];
        self.neighbors[range.clone()]
            .iter()
            .zip(&self.weights[range])
            .map(|(&n, &w)| (n as usize, w))
    }

    /// Every stored edge as `(source id, target id, weight)`; undirected edges once with source < target.
    pub fn edges(&self) -> impl Iterator<Item = (u64, u64, u64)> + '_ {
        (0..self.node_count()).flat_map(move |u| {
            self.neighbors(u)
                .filter(move |&(v, _)| self.directed || u < v)
                .map(move |(v, w)| (self.node_ids[u], self.node_ids[v], w))
        })
    }

    pub fn total_weight(&self) -> u64 {
        self.edges().map(|(_, _, w)| w).sum()
    }

    /// Number of distinct neighbors (out-neighbors when directed).
    pub fn degree_at(&self, index: usize) -> usize {
        self.offsets[index + 1] - self.offsets[index]
    }

    pub fn weighted_degree_at(&self, index: usize) -> u64 {
        self.neighbors(index).map(|(_, w)| w).sum()
    }

    pub fn degree(&self, node: u64) -> Result<usize> {
        let i = self.index_of(node).ok_or(Error::UnknownNode(node))?;
        Ok(self.degree_at(i))
    }

    pub fn weighted_degree(&self, node: u64) -> Result<u64> {
        let i = self.index_of(node).ok_or(Error::UnknownNode(node))?;
        Ok(self.weighted_degree_at(i))
    }

    /// Drops self-loops and merges `u -> v` and `v -> u` into `{u, v}` with summed weight.
    pub fn to_undirected(&self) -> Result<RetweetGraph> {
        if !self.directed {
            return Err(Error::Argument("graph is already undirected".into()));
        }
        let mut pairs: Vec<(u32, u32, u64)> = Vec::with_capacity(self.neighbors.len() * 2);
        for u in 0..self.node_count() {
            for (v, w) in self.neighbors(u) {
                if u != v {
                    pairs.push((u as u32, v as u32, w));
                    pairs.push((v as u32, u as u32, w));
                }
            }
        }
        let mut g = Self::directed_from_pairs(self.node_ids.clone(), pairs);
        g.directed = false;
        g.edge_count = g.neighbors.len() / 2;
        Ok(g)
    }

    /// Subgraph induced by the nodes at `keep` indices (ascending order preserved).
    pub fn induced_subgraph(&self, keep: &[bool]) -> RetweetGraph {
        assert_eq!(keep.len(), self.node_count());
        let mut remap = vec![u32::MAX; self.node_count()];
        let mut ids = Vec::new();
        for (i, _) in keep.iter().enumerate().filter(|(_, &k)| k) {
            remap[i] = ids.len() as u32;
            ids.push(self.node_ids[i]);
        }
        let rows = (0..self.node_count())
            .filter(|&i| keep[i])
            .map(|u| {
                self.neighbors(u)
                    .filter(|&(v, _)| keep[v])
                    .map(|(v, w)| (remap[v], w))
                    .collect()
            })
            .collect();
        Self::from_rows(ids, rows, self.directed)
    }
}

/// Directed retweet graph over every user appearing as an author or a retweet source.
pub fn build_retweet_graph(tweets: &[TweetRecord]) -> RetweetGraph {
    let mut ids: Vec<u64> = tweets
        .iter()
        .flat_map(|t| std::iter::once(t.user_id).chain(t.retweeted_user_id))
        .collect();
    ids.sort_unstable();
    ids.dedup();
    let index = |id: u64| ids.binary_search(&id).expect("id collected above") as u32;
    let pairs: Vec<(u32, u32, u64)> = tweets
        .iter()
        .filter_map(|t| t.retweeted_user_id.map(|v| (index(t.user_id), index(v), 1)))
        .collect();
    RetweetGraph::directed_from_pairs(ids, pairs)
}
