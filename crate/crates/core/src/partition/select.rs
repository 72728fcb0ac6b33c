//! Choice of k: the densest core whose Louvain communities all reach a minimum size.

use crate::error::{Error, KDiagnostic, Result};
use crate::graph::RetweetGraph;
use crate::scalar::Scalar;

use super::kcore::{core_decomposition, kcore_from, CoreDecomposition};
use super::louvain::louvain;
use super::Partition;

pub const DEFAULT_MIN_COMMUNITY_SIZE: usize = 10;

#[derive(Debug, Clone)]
pub struct KSelection<F> {
    pub k: usize,
    /// Decomposition of the full input graph.
    pub decomposition: CoreDecomposition,
    /// The chosen k-core.
    pub core: RetweetGraph,
    pub partition: Partition<F>,
    /// Every k tried, from the maximum core number down to the winner.
    pub diagnostics: Vec<KDiagnostic>,
}

/// Largest k >= 1 whose non-empty k-core splits into Louvain communities of at least `min_size` users.
pub fn select_k<F: Scalar>(g: &RetweetGraph, min_size: usize, seed: u64) -> Result<KSelection<F>> {
    let decomposition = core_decomposition(g)?;
    let mut diagnostics = Vec::new();
    for k in (1..=decomposition.max_core()).rev() {
        let core = kcore_from(g, &decomposition, k);
        if core.is_empty() {
            continue;
        }
        let partition: Partition<F> = louvain(&core, seed)?;
        let smallest = partition.community_sizes().into_iter().min().unwrap_or(0);
        log::debug!(
            "k={k}: {} nodes, {} communities, smallest {smallest}",
            core.node_count(),
            partition.community_count()
        );
        diagnostics.push(KDiagnostic {
            k,
            core_nodes: core.node_count(),
            smallest_community: smallest,
        });
        if smallest >= min_size {
            return Ok(KSelection {
                k,
                decomposition,
                core,
                partition,
                diagnostics,
            });
        }
    }
    Err(Error::NoValidK { min_size, diagnostics })
}
