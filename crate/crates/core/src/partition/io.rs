use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Deserialize;

use super::{CoreDecomposition, Partition};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

fn create(path: &Path, header_comment: Option<&str>) -> Result<BufWriter<fs::File>> {
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    if let Some(c) = header_comment {
        writeln!(w, "# {c}").map_err(|e| Error::io(path, e))?;
    }
    Ok(w)
}

/// `user_id,community_id` rows in ascending user order.
pub fn write_partition_csv<F: Scalar>(p: &Partition<F>, path: &Path, header_comment: Option<&str>) -> Result<()> {
    let mut w = create(path, header_comment)?;
    let io = |e| Error::io(path, e);
    writeln!(w, "user_id,community_id").map_err(io)?;
    for (id, c) in p.assignments() {
        writeln!(w, "{id},{c}").map_err(io)?;
    }
    w.flush().map_err(io)
}

pub fn write_cores_csv(dec: &CoreDecomposition, path: &Path, header_comment: Option<&str>) -> Result<()> {
    let mut w = create(path, header_comment)?;
    let io = |e| Error::io(path, e);
    writeln!(w, "user_id,core_number").map_err(io)?;
    for (id, c) in dec.iter() {
        writeln!(w, "{id},{c}").map_err(io)?;
    }
    w.flush().map_err(io)
}

fn read_pairs<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Error::Data(format!("{}: {e}", path.display())))?;
    rdr.deserialize()
        .collect::<std::result::Result<Vec<T>, _>>()
        .map_err(|e| Error::Data(format!("{}: {e}", path.display())))
}

#[derive(Deserialize)]
struct PartitionRow {
    user_id: u64,
    community_id: usize,
}

/// Reads a partition file; community ids are re-canonicalized and modularity is left at 0.
pub fn read_partition_csv<F: Scalar>(path: &Path) -> Result<Partition<F>> {
    let rows: Vec<PartitionRow> = read_pairs(path)?;
    let mut pairs: Vec<(u64, usize)> = rows.into_iter().map(|r| (r.user_id, r.community_id)).collect();
    pairs.sort_unstable();
    if let Some(w) = pairs.windows(2).find(|w| w[0].0 == w[1].0) {
        return Err(Error::Data(format!("{}: user {} assigned twice", path.display(), w[0].0)));
    }
    Ok(Partition::from_assignments(&pairs, F::zero()))
}

#[derive(Deserialize)]
struct CoreRow {
    user_id: u64,
    core_number: usize,
}

pub fn read_cores_csv(path: &Path) -> Result<Vec<(u64, usize)>> {
    let rows: Vec<CoreRow> = read_pairs(path)?;
    Ok(rows.into_iter().map(|r| (r.user_id, r.core_number)).collect())
}
