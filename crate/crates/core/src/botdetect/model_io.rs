//! `BF01` forest files.
//!
//! Little-endian layout:
//!
//! ```text
//! magic       4 bytes "BF01"
//! version     u32     1
//! n_features  u32     17
//! seed        u64
//! n_trees     u32
//! per tree:
//!   n_nodes   u32
//!   per node: u8 tag
//!     tag 0 (leaf):  f64 bot_fraction
//!     tag 1 (split): u32 feature, f64 threshold, f64 gain, u32 left, u32 right
//! ```
//!
//! Values are stored as f64 whatever the in-memory scalar.

use std::fs;
use std::path::Path;

use super::features::N_FEATURES;
use super::forest::{BotForest, DecisionTree, TreeNode};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub const MODEL_MAGIC: &[u8; 4] = b"BF01";
pub const MODEL_VERSION: u32 = 1;

pub fn encode_forest<F: Scalar>(forest: &BotForest<F>) -> Vec<u8> {
    let mut b = Vec::new();
    b.extend_from_slice(MODEL_MAGIC);
    b.extend_from_slice(&MODEL_VERSION.to_le_bytes());
    b.extend_from_slice(&(N_FEATURES as u32).to_le_bytes());
    b.extend_from_slice(&forest.seed().to_le_bytes());
    b.extend_from_slice(&(forest.n_trees() as u32).to_le_bytes());
    for t in forest.trees() {
        b.extend_from_slice(&(t.nodes().len() as u32).to_le_bytes());
        for n in t.nodes() {
            match *n {
                TreeNode::Leaf { bot_fraction } => {
                    b.push(0);
                    b.extend_from_slice(&bot_fraction.as_f64().to_le_bytes());
                }
                TreeNode::Split {
                    feature,
                    threshold,
                    gain,
                    left,
                    right,
                } => {
                    b.push(1);
                    b.extend_from_slice(&(feature as u32).to_le_bytes());
                    b.extend_from_slice(&threshold.as_f64().to_le_bytes());
                    b.extend_from_slice(&gain.as_f64().to_le_bytes());
                    b.extend_from_slice(&(left as u32).to_le_bytes());
                    b.extend_from_slice(&(right as u32).to_le_bytes());
                }
            }
        }
    }
    b
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take<const N: usize>(&mut self) -> Result<[u8; N]> {
        let s = self
            .bytes
            .get(self.pos..self.pos + N)
            .ok_or_else(|| Error::Format("BF01 file truncated".into()))?;
        self.pos += N;
        Ok(s.try_into().unwrap())
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take::<1>()?[0])
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take()?))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take()?))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take()?))
    }
}

pub fn decode_forest<F: Scalar>(bytes: &[u8]) -> Result<BotForest<F>> {
    let mut r = Reader { bytes, pos: 0 };
    if &r.take::<4>()? != MODEL_MAGIC {
        return Err(Error::Format("bad magic, expected BF01".into()));
    }
    let version = r.u32()?;
    if version != MODEL_VERSION {
        return Err(Error::Format(format!("unsupported BF01 version {version}")));
    }
    let nf = r.u32()? as usize;
    if nf != N_FEATURES {
        return Err(Error::Format(format!("model expects {nf} features, not {N_FEATURES}")));
    }
    let seed = r.u64()?;
    let n_trees = r.u32()? as usize;
    let mut trees = Vec::with_capacity(n_trees.min(1 << 16));
    for _ in 0..n_trees {
        let n_nodes = r.u32()? as usize;
        let mut nodes = Vec::with_capacity(n_nodes.min(1 << 20));
        for _ in 0..n_nodes {
            let node = match r.u8()? {
                0 => TreeNode::Leaf {
                    bot_fraction: F::of_f64(r.f64()?),
                },
                1 => TreeNode::Split {
                    feature: r.u32()? as usize,
                    threshold: F::of_f64(r.f64()?),
                    gain: F::of_f64(r.f64()?),
                    left: r.u32()? as usize,
                    right: r.u32()? as usize,
                },
                tag => return Err(Error::Format(format!("unknown node tag {tag}"))),
            };
            nodes.push(node);
        }
        trees.push(DecisionTree::from_nodes(nodes)?);
    }
    if r.pos != bytes.len() {
        return Err(Error::Format("trailing bytes after BF01 payload".into()));
    }
    BotForest::from_trees(trees, seed)
}

pub fn write_forest<F: Scalar>(forest: &BotForest<F>, path: &Path) -> Result<()> {
    fs::write(path, encode_forest(forest)).map_err(|e| Error::io(path, e))
}

pub fn read_forest<F: Scalar>(path: &Path) -> Result<BotForest<F>> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_forest(&bytes)
}
