use crate::error::{Error, Result};
use crate::graph::RetweetGraph;
use crate::scalar::Scalar;

use super::Partition;

/// Newman modularity of a labelling indexed by graph node index.
///
/// `Q = sum_c [ L_c / 2m - (D_c / 2m)^2 ]` where `L_c` sums adjacency weights
/// inside community `c` (each undirected edge counted from both ends), `D_c`
/// sums weighted degrees in `c` and `m` is the total edge weight. An edgeless
/// graph has `Q = 0`.
pub fn modularity_of_labels<F: Scalar>(g: &RetweetGraph, labels: &[usize]) -> Result<F> {
    if g.is_directed() {
        return Err(Error::Argument("modularity is defined on the undirected projection".into()));
    }
    if labels.len() != g.node_count() {
        return Err(Error::Argument(format!(
            "{} labels for {} nodes",
            labels.len(),
            g.node_count()
        )));
    }
    let n_comm = labels.iter().copied().max().map_or(0, |m| m + 1);
    let mut inside = vec![F::zero(); n_comm];
    let mut total = vec![F::zero(); n_comm];
    let mut two_m = F::zero();
    for (u, &c) in labels.iter().enumerate() {
        for (v, w) in g.neighbors(u) {
            let w = F::of_u64(w);
            total[c] = total[c] + w;
            two_m = two_m + w;
            if labels[v] == c {
                inside[c] = inside[c] + w;
            }
        }
    }
    if two_m == F::zero() {
        return Ok(F::zero());
    }
    Ok(inside
        .iter()
        .zip(&total)
        .map(|(&l, &d)| {
            let frac = d / two_m;
            l / two_m - frac * frac
        })
        .sum())
}

/// Modularity of a partition keyed by user id; the partition must cover exactly the graph's nodes.
pub fn modularity<F: Scalar, G: Scalar>(g: &RetweetGraph, partition: &Partition<G>) -> Result<F> {
    if partition.node_count() != g.node_count() {
        if let Some(&extra) = partition.node_ids().iter().find(|&&id| g.index_of(id).is_none()) {
            return Err(Error::Argument(format!("partition node {extra} is not in the graph")));
        }
    }
    let labels = g
        .node_ids()
        .iter()
        .map(|&id| {
            partition
                .community_of(id)
                .ok_or_else(|| Error::Argument(format!("node {id} missing from partition")))
        })
        .collect::<Result<Vec<_>>>()?;
    modularity_of_labels(g, &labels)
}
