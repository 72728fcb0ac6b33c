//! Community table, report file readers and `summary.md`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde_json::Value;
use tweetnet_core::botdetect::{BotReport, BotRow};
use tweetnet_core::offense::{OffenseReport, OffenseRow};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommunityRow {
    pub label: String,
    pub accounts: usize,
    pub top_hashtags: Vec<String>,
}

/// Optional `community_id,name` map. Unknown ids are rejected against `n_communities`.
pub fn load_labels(path: &Path, n_communities: usize) -> Result<BTreeMap<usize, String>> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let mut out = BTreeMap::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let id: usize = rec
            .get(0)
            .and_then(|s| s.trim().parse().ok())
            .ok_or_else(|| CliError::Config(format!("{}: bad community id", path.display())))?;
        if id >= n_communities {
            return Err(CliError::Config(format!(
                "{}: label for unknown community {id} (have {n_communities})",
                path.display()
            )));
        }
        out.insert(id, rec.get(1).unwrap_or("").trim().to_string());
    }
    Ok(out)
}

pub fn community_label(id: usize, labels: &BTreeMap<usize, String>) -> String {
    labels.get(&id).cloned().unwrap_or_else(|| format!("community-{id}"))
}

/// One row per community: label, size and its three most used hashtags.
pub fn emit_community_table(
    sizes: &[usize],
    hashtags: &[Vec<(String, usize)>],
    labels: &BTreeMap<usize, String>,
) -> Vec<CommunityRow> {
    sizes
        .iter()
        .enumerate()
        .map(|(c, &accounts)| CommunityRow {
            label: community_label(c, labels),
            accounts,
            top_hashtags: hashtags
                .get(c)
                .map(|rows| rows.iter().take(3).map(|(t, _)| format!("#{t}")).collect())
                .unwrap_or_default(),
        })
        .collect()
}

/// `community_label,account_count,top_hashtags` with hashtags joined by `;`.
pub fn write_community_table(rows: &[CommunityRow], path: &Path, header: &str) -> Result<()> {
    let mut out = format!("# {header}\n");
    let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
    let csv_err = |e: csv::Error| CliError::Config(e.to_string());
    w.write_record(["community_label", "account_count", "top_hashtags"]).map_err(csv_err)?;
    for r in rows {
        w.write_record([r.label.clone(), r.accounts.to_string(), r.top_hashtags.join(";")])
            .map_err(csv_err)?;
    }
    out.push_str(&String::from_utf8(w.into_inner().expect("in-memory writer")).expect("utf-8 csv"));
    std::fs::write(path, out).map_err(|e| CliError::io(path, e))
}

fn reader(path: &Path) -> Result<csv::Reader<std::fs::File>> {
    csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(|e| CliError::Core(tweetnet_core::Error::Data(format!("{}: {e}", path.display()))))
}

fn data_err(path: &Path, msg: impl std::fmt::Display) -> CliError {
    CliError::Core(tweetnet_core::Error::Data(format!("{}: {msg}", path.display())))
}

fn field<T: std::str::FromStr>(rec: &csv::StringRecord, i: usize, path: &Path) -> Result<T> {
    rec.get(i)
        .and_then(|s| s.trim().parse().ok())
        .ok_or_else(|| data_err(path, format!("bad field {i} in {rec:?}")))
}

pub fn read_hashtags_csv(path: &Path) -> Result<Vec<Vec<(String, usize)>>> {
    let mut out: Vec<Vec<(String, usize)>> = Vec::new();
    for rec in reader(path)?.records() {
        let rec = rec.map_err(|e| data_err(path, e))?;
        let c: usize = field(&rec, 0, path)?;
        if out.len() <= c {
            out.resize(c + 1, Vec::new());
        }
        out[c].push((rec[1].to_string(), field(&rec, 2, path)?));
    }
    Ok(out)
}

pub fn read_offense_csv(path: &Path) -> Result<OffenseReport> {
    let mut communities = Vec::new();
    for rec in reader(path)?.records() {
        let rec = rec.map_err(|e| data_err(path, e))?;
        communities.push(OffenseRow::from_counts(field(&rec, 1, path)?, field(&rec, 2, path)?));
    }
    Ok(OffenseReport { communities })
}

pub fn read_bot_csv(path: &Path) -> Result<BotReport> {
    let mut communities = Vec::new();
    for rec in reader(path)?.records() {
        let rec = rec.map_err(|e| data_err(path, e))?;
        let mut row = BotRow::from_counts(
            field(&rec, 1, path)?,
            field(&rec, 2, path)?,
            field(&rec, 4, path)?,
            field(&rec, 5, path)?,
        );
        row.unclassified = field(&rec, 7, path)?;
        communities.push(row);
    }
    Ok(BotReport { communities })
}

/// Community sizes from a partition file.
pub fn read_partition_sizes(path: &Path) -> Result<Vec<usize>> {
    let p: tweetnet_core::Partition = tweetnet_core::partition::read_partition_csv(path)?;
    Ok(p.community_sizes())
}

fn thousands(n: usize) -> String {
    let s = n.to_string();
    let mut out = String::new();
    for (i, ch) in s.chars().enumerate() {
        if i > 0 && (s.len() - i).is_multiple_of(3) {
            out.push(',');
        }
        out.push(ch);
    }
    out
}

pub struct SummaryInput<'a> {
    pub header: String,
    pub k: Option<usize>,
    pub modularity: Option<f64>,
    pub communities: &'a [CommunityRow],
    pub offense: Option<&'a OffenseReport>,
    pub bots: Option<&'a BotReport>,
    pub extra: Vec<(String, String)>,
}

/// Markdown report with the community, offensive-tweet and bot tables.
pub fn render_summary(s: &SummaryInput<'_>) -> String {
    let mut md = String::new();
    let _ = writeln!(md, "<!-- {} -->\n", s.header);
    let _ = writeln!(md, "# Community report\n");
    if let Some(k) = s.k {
        let _ = writeln!(md, "- k-core: k = {k}");
    }
    if let Some(q) = s.modularity {
        let _ = writeln!(md, "- modularity: {q:.6}");
    }
    let _ = writeln!(md, "- communities: {}", s.communities.len());
    for (k, v) in &s.extra {
        let _ = writeln!(md, "- {k}: {v}");
    }

    let _ = writeln!(md, "\n## Communities\n");
    let _ = writeln!(md, "| Community | # Accounts | Frequent hashtags |");
    let _ = writeln!(md, "|---|---:|---|");
    for r in s.communities {
        let _ = writeln!(md, "| {} | {} | {} |", r.label, thousands(r.accounts), r.top_hashtags.join(", "));
    }

    if let Some(off) = s.offense {
        let _ = writeln!(md, "\n## Offensive tweets\n");
        let _ = writeln!(md, "| Community | # Unique Tweets | # Offensive Tweets | Proportion of Offensive Tweets |");
        let _ = writeln!(md, "|---|---:|---:|---:|");
        for (c, r) in off.communities.iter().enumerate() {
            let label = s.communities.get(c).map_or_else(|| format!("community-{c}"), |r| r.label.clone());
            let flag = if r.empty { " (no tweets)" } else { "" };
            let _ = writeln!(
                md,
                "| {label} | {} | {} | {:.3}{flag} |",
                thousands(r.unique_tweets),
                thousands(r.offensive_tweets),
                r.proportion
            );
        }
    }

    if let Some(bots) = s.bots {
        let _ = writeln!(md, "\n## Bots\n");
        let _ = writeln!(
            md,
            "| Community | # Accounts | # Bots | Proportion of bots | # Tweets | # Automated Tweets | Proportion automated | Unclassified |"
        );
        let _ = writeln!(md, "|---|---:|---:|---:|---:|---:|---:|---:|");
        for (c, r) in bots.communities.iter().enumerate() {
            let label = s.communities.get(c).map_or_else(|| format!("community-{c}"), |r| r.label.clone());
            let _ = writeln!(
                md,
                "| {label} | {} | {} | {:.3} | {} | {} | {:.3} | {} |",
                thousands(r.accounts),
                thousands(r.bots),
                r.bot_proportion,
                thousands(r.tweets),
                thousands(r.automated_tweets),
                r.automated_proportion,
                r.unclassified
            );
        }
    }
    md
}

/// Keeps the GeoJSON provenance in a top-level foreign member.
pub fn stamp_geojson(mut v: Value, header: &str) -> Value {
    if let Some(obj) = v.as_object_mut() {
        obj.insert("tweetnet".into(), Value::String(header.to_string()));
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_labels() {
        let labels = BTreeMap::from([(0, "Mélenchon".to_string())]);
        let rows = emit_community_table(
            &[15_001, 42, 7, 3],
            &[vec![("a".into(), 3), ("b".into(), 2), ("c".into(), 1), ("d".into(), 1)]],
            &labels,
        );
        assert_eq!(rows[0].label, "Mélenchon");
        assert_eq!(rows[0].top_hashtags, vec!["#a", "#b", "#c"]);
        assert_eq!(rows[3].label, "community-3");
        assert!(rows[3].top_hashtags.is_empty());
        assert!(emit_community_table(&[], &[], &labels).is_empty());
    }

    #[test]
    fn unknown_label_id_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("labels.csv");
        std::fs::write(&p, "community_id,name\n0,A\n5,B\n").unwrap();
        assert!(matches!(load_labels(&p, 2), Err(CliError::Config(_))));
        assert_eq!(load_labels(&p, 6).unwrap().len(), 2);
    }

    #[test]
    fn empty_table_is_header_only() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("t.csv");
        write_community_table(&[], &p, "h").unwrap();
        assert_eq!(std::fs::read_to_string(&p).unwrap(), "# h\ncommunity_label,account_count,top_hashtags\n");
    }

    #[test]
    fn digit_grouping() {
        assert_eq!(thousands(756_318), "756,318");
        assert_eq!(thousands(12), "12");
        assert_eq!(thousands(1_000), "1,000");
    }
}
