//! Dense-core extraction and community detection.

mod io;
mod kcore;
mod louvain;
mod modularity;
mod select;

pub use io::{read_cores_csv, read_partition_csv, write_cores_csv, write_partition_csv};
pub use kcore::{core_decomposition, kcore, kcore_from, CoreDecomposition};
pub use louvain::{louvain, louvain_with_trace, LouvainRun};
pub use modularity::{modularity, modularity_of_labels};
pub use select::{select_k, KSelection, DEFAULT_MIN_COMMUNITY_SIZE};

use crate::scalar::Scalar;

/// Assignment of every node to exactly one community.
///
/// Community ids are dense from 0 and ordered by descending size, ties broken
/// by the smallest member id. Member lists are ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition<F> {
    node_ids: Vec<u64>,
    community: Vec<usize>,
    communities: Vec<Vec<u64>>,
    modularity: F,
}

impl<F: Scalar> Partition<F> {
    /// Canonicalizes arbitrary labels. `node_ids` need not be sorted but must be unique.
    pub fn from_labels(node_ids: &[u64], labels: &[usize], modularity: F) -> Self {
        assert_eq!(node_ids.len(), labels.len(), "one label per node");
        let n_labels = labels.iter().copied().max().map_or(0, |m| m + 1);
        let mut groups: Vec<Vec<u64>> = vec![Vec::new(); n_labels];
        for (&id, &l) in node_ids.iter().zip(labels) {
            groups[l].push(id);
        }
        groups.retain(|g| !g.is_empty());
        for g in &mut groups {
            g.sort_unstable();
        }
        groups.sort_by(|a, b| b.len().cmp(&a.len()).then(a[0].cmp(&b[0])));

        let mut pairs: Vec<(u64, usize)> = groups
            .iter()
            .enumerate()
            .flat_map(|(c, members)| members.iter().map(move |&id| (id, c)))
            .collect();
        pairs.sort_unstable();
        assert!(pairs.windows(2).all(|w| w[0].0 != w[1].0), "duplicate node id in partition");
        let (node_ids, community) = pairs.into_iter().unzip();
        Partition {
            node_ids,
            community,
            communities: groups,
            modularity,
        }
    }

    /// Partition from explicit `(node, community)` rows, e.g. a partition file.
    pub fn from_assignments(rows: &[(u64, usize)], modularity: F) -> Self {
        let ids: Vec<u64> = rows.iter().map(|r| r.0).collect();
        let labels: Vec<usize> = rows.iter().map(|r| r.1).collect();
        Self::from_labels(&ids, &labels, modularity)
    }

    pub fn node_ids(&self) -> &[u64] {
        &self.node_ids
    }

    pub fn node_count(&self) -> usize {
        self.node_ids.len()
    }

    pub fn community_of(&self, node: u64) -> Option<usize> {
        self.node_ids.binary_search(&node).ok().map(|i| self.community[i])
    }

    pub fn communities(&self) -> &[Vec<u64>] {
        &self.communities
    }

    pub fn community_count(&self) -> usize {
        self.communities.len()
    }

    pub fn community_sizes(&self) -> Vec<usize> {
        self.communities.iter().map(Vec::len).collect()
    }

    pub fn modularity(&self) -> F {
        self.modularity
    }

    pub fn set_modularity(&mut self, q: F) {
        self.modularity = q;
    }

    /// `(node, community)` in ascending node order.
    pub fn assignments(&self) -> impl Iterator<Item = (u64, usize)> + '_ {
        self.node_ids.iter().copied().zip(self.community.iter().copied())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_ids() {
        let p: Partition<f64> = Partition::from_labels(&[9, 1, 5, 2, 7], &[3, 3, 0, 0, 8], 0.1);
        // sizes: {1,9}=2, {2,5}=2, {7}=1; tie broken by smallest member
        assert_eq!(p.communities(), &[vec![1, 9], vec![2, 5], vec![7]]);
        assert_eq!(p.community_of(9), Some(0));
        assert_eq!(p.community_of(5), Some(1));
        assert_eq!(p.community_of(4), None);
        assert_eq!(p.assignments().collect::<Vec<_>>(), vec![(1, 0), (2, 1), (5, 1), (7, 2), (9, 0)]);
    }

    #[test]
    fn empty_partition() {
        let p: Partition<f32> = Partition::from_labels(&[], &[], 0.0);
        assert_eq!(p.community_count(), 0);
    }
}
