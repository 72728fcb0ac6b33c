//! CSV output with an optional leading `#` provenance line.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};

pub type CsvWriter = csv::Writer<BufWriter<fs::File>>;

pub fn create(path: &Path, header_comment: Option<&str>, columns: &[&str]) -> Result<CsvWriter> {
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    if let Some(c) = header_comment {
        writeln!(w, "# {c}").map_err(|e| Error::io(path, e))?;
    }
    let mut csv = csv::WriterBuilder::new().from_writer(w);
    csv.write_record(columns).map_err(|e| csv_err(path, e))?;
    Ok(csv)
}

pub fn csv_err(path: &Path, e: csv::Error) -> Error {
    Error::Data(format!("{}: {e}", path.display()))
}

pub fn finish(mut w: CsvWriter, path: &Path) -> Result<()> {
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn reader(path: &Path) -> Result<csv::Reader<fs::File>> {
    csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(|e| csv_err(path, e))
}
