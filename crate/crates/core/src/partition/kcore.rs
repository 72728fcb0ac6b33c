//! Core decomposition by bucket peeling (linear in nodes + edges).

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::graph::RetweetGraph;

/// Core number of every node, indexed like the graph's nodes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoreDecomposition {
    node_ids: Vec<u64>,
    core: Vec<usize>,
}

impl CoreDecomposition {
    pub fn node_ids(&self) -> &[u64] {
        &self.node_ids
    }

    pub fn core_numbers(&self) -> &[usize] {
        &self.core
    }

    pub fn core_number(&self, node: u64) -> Option<usize> {
        self.node_ids.binary_search(&node).ok().map(|i| self.core[i])
    }

    pub fn max_core(&self) -> usize {
        self.core.iter().copied().max().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, usize)> + '_ {
        self.node_ids.iter().copied().zip(self.core.iter().copied())
    }

    /// Number of nodes with core number >= k, for each k in 1..=max_core.
    pub fn core_sizes(&self) -> BTreeMap<usize, usize> {
        let max = self.max_core();
        let mut hist = vec![0usize; max + 1];
        for &c in &self.core {
            hist[c] += 1;
        }
        let mut out = BTreeMap::new();
        let mut acc = 0;
        for k in (1..=max).rev() {
            acc += hist[k];
            out.insert(k, acc);
        }
        out
    }
}

fn require_simple_undirected(g: &RetweetGraph) -> Result<()> {
    if g.is_directed() {
        return Err(Error::Argument("core decomposition needs an undirected graph".into()));
    }
    Ok(())
}

/// Unweighted core numbers: neighbor counts, not edge weights, drive the peeling.
pub fn core_decomposition(g: &RetweetGraph) -> Result<CoreDecomposition> {
    require_simple_undirected(g)?;
    let n = g.node_count();
    let mut deg: Vec<usize> = (0..n).map(|i| g.degree_at(i)).collect();
    let max_deg = deg.iter().copied().max().unwrap_or(0);

    // bin[d] = start of the degree-d block in `order`
    let mut bin = vec![0usize; max_deg + 2];
    for &d in &deg {
        bin[d + 1] += 1;
    }
    for d in 1..bin.len() {
        bin[d] += bin[d - 1];
    }
    let mut order = vec![0usize; n];
    let mut pos = vec![0usize; n];
    let mut next = bin.clone();
    for v in 0..n {
        pos[v] = next[deg[v]];
        order[pos[v]] = v;
        next[deg[v]] += 1;
    }

    for i in 0..n {
        let v = order[i];
        for (u, _) in g.neighbors(v) {
            if deg[u] > deg[v] {
                // swap u with the first node of its block, then shrink the block
                let du = deg[u];
                let pu = pos[u];
                let pw = bin[du];
                let w = order[pw];
                if u != w {
                    order.swap(pu, pw);
                    pos[u] = pw;
                    pos[w] = pu;
                }
                bin[du] += 1;
                deg[u] -= 1;
            }
        }
    }

    Ok(CoreDecomposition {
        node_ids: g.node_ids().to_vec(),
        core: deg,
    })
}

/// Maximal induced subgraph where every node keeps at least `k` neighbors.
pub fn kcore(g: &RetweetGraph, k: usize) -> Result<RetweetGraph> {
    if k == 0 {
        return Err(Error::Argument("k must be at least 1".into()));
    }
    let dec = core_decomposition(g)?;
    Ok(kcore_from(g, &dec, k))
}

/// k-core using an already computed decomposition of `g`.
pub fn kcore_from(g: &RetweetGraph, dec: &CoreDecomposition, k: usize) -> RetweetGraph {
    let keep: Vec<bool> = dec.core.iter().map(|&c| c >= k).collect();
    g.induced_subgraph(&keep)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> RetweetGraph {
        RetweetGraph::undirected_from_edges([], &[(1, 2, 1), (2, 3, 1), (1, 3, 1)]).unwrap()
    }

    #[test]
    fn triangle_cores() {
        let g = triangle();
        assert_eq!(kcore(&g, 2).unwrap().node_ids(), &[1, 2, 3]);
        assert!(kcore(&g, 3).unwrap().is_empty());
    }

    #[test]
    fn zero_k_rejected() {
        assert!(matches!(kcore(&triangle(), 0), Err(Error::Argument(_))));
    }

    #[test]
    fn directed_rejected() {
        let g = RetweetGraph::from_edges([], &[(1, 2, 1)]).unwrap();
        assert!(core_decomposition(&g).is_err());
    }

    #[test]
    fn weights_ignored() {
        // heavy pendant edge does not lift the pendant into the 2-core
        let g = RetweetGraph::undirected_from_edges([], &[(1, 2, 1), (2, 3, 1), (1, 3, 1), (3, 4, 50)]).unwrap();
        let dec = core_decomposition(&g).unwrap();
        assert_eq!(dec.core_numbers(), &[2, 2, 2, 1]);
        assert_eq!(dec.core_number(4), Some(1));
        assert_eq!(dec.core_sizes().get(&2), Some(&3));
    }

    #[test]
    fn clique_with_tail() {
        let mut edges = vec![];
        for a in 1..=5u64 {
            for b in a + 1..=5 {
                edges.push((a, b, 1));
            }
        }
        edges.push((5, 6, 1));
        edges.push((6, 7, 1));
        let g = RetweetGraph::undirected_from_edges([8], &edges).unwrap();
        let dec = core_decomposition(&g).unwrap();
        assert_eq!(dec.core_numbers(), &[4, 4, 4, 4, 4, 1, 1, 0]);
        assert_eq!(dec.max_core(), 4);
    }
}
