//! Text formats for dynamic networks and cover timelines.
//!
//! Temporal edge lists are whitespace-separated `t u v` lines (snapshot
//! index, node, node; all 0-based), `#` starts a comment line. Cover
//! timelines are a single JSON document: an array over snapshots, each an
//! array of `{"label": int, "members": [ids ascending]}`; outliers are
//! implicit. Both formats are UTF-8 with LF line endings.

use std::io::{self, BufRead, Read, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{Cover, CoverTimeline, DynamicNetwork, ModelError, Snapshot};

#[derive(Debug, Error)]
pub enum NetIoError {
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("empty input: no temporal edge records found")]
    EmptyInput,
    #[error("invalid cover timeline: {0}")]
    BadTimeline(String),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl From<ModelError> for NetIoError {
    fn from(e: ModelError) -> Self {
        NetIoError::BadTimeline(e.to_string())
    }
}

/// Side facts from loading an edge list.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LoadStats {
    /// Self-loop records dropped (the diagonal is a convention, not data).
    pub self_loops_dropped: usize,
}

fn parse_field(tok: &str, what: &str, line: usize) -> Result<u32, NetIoError> {
    match tok.parse::<i64>() {
        Ok(v) if v < 0 => Err(NetIoError::Parse {
            line,
            message: format!("negative {what} `{tok}`"),
        }),
        Ok(v) if v > u32::MAX as i64 => Err(NetIoError::Parse {
            line,
            message: format!("{what} `{tok}` too large"),
        }),
        Ok(v) => Ok(v as u32),
        Err(_) => Err(NetIoError::Parse {
            line,
            message: format!("malformed {what} `{tok}`"),
        }),
    }
}

/// Reads a temporal edge list. `T` = max snapshot index + 1 (gaps become
/// empty snapshots), `n` = max node id + 1 or `n_hint` if larger. Self-loop
/// records are dropped but still count toward `T` and `n`.
pub fn load_temporal_edgelist(
    reader: impl BufRead,
    n_hint: Option<usize>,
) -> Result<(DynamicNetwork, LoadStats), NetIoError> {
    let mut records: Vec<(u32, u32, u32)> = Vec::new();
    let mut stats = LoadStats::default();
    let mut max_t: Option<u32> = None;
    let mut max_node: Option<u32> = None;

    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut tokens = trimmed.split_whitespace();
        let (a, b, c) = match (tokens.next(), tokens.next(), tokens.next()) {
            (Some(a), Some(b), Some(c)) => (a, b, c),
            _ => {
                return Err(NetIoError::Parse {
                    line: lineno,
                    message: format!("expected `t u v`, got `{trimmed}`"),
                })
            }
        };
        if let Some(extra) = tokens.next() {
            return Err(NetIoError::Parse {
                line: lineno,
                message: format!("trailing field `{extra}`"),
            });
        }
        let t = parse_field(a, "snapshot index", lineno)?;
        let u = parse_field(b, "node id", lineno)?;
        let v = parse_field(c, "node id", lineno)?;

        max_t = Some(max_t.map_or(t, |m| m.max(t)));
        max_node = Some(max_node.map_or(u.max(v), |m| m.max(u).max(v)));
        if u == v {
            stats.self_loops_dropped += 1;
            continue;
        }
        records.push((t, u, v));
    }

    let max_t = max_t.ok_or(NetIoError::EmptyInput)?;
    let t_count = max_t as usize + 1;
    let n = (max_node.unwrap() as usize + 1).max(n_hint.unwrap_or(0));

    let mut per_snapshot: Vec<Vec<(u32, u32)>> = vec![Vec::new(); t_count];
    for (t, u, v) in records {
        per_snapshot[t as usize].push((u, v));
    }
    let snapshots = per_snapshot
        .into_iter()
        .map(|edges| Snapshot::from_edges(n, edges))
        .collect();
    let net = DynamicNetwork::new(snapshots).expect("at least one snapshot");
    Ok((net, stats))
}

/// Writes each stored edge once per snapshot as `t u v` with `u < v`,
/// sorted by `(t, u, v)`. Re-loadable by [`load_temporal_edgelist`].
pub fn write_temporal_edgelist(net: &DynamicNetwork, mut writer: impl Write) -> io::Result<()> {
    for (t, snap) in net.snapshots().iter().enumerate() {
        for (u, v) in snap.edges() {
            writeln!(writer, "{t} {u} {v}")?;
        }
    }
    Ok(())
}

#[derive(Serialize, Deserialize)]
struct CommunityRecord {
    label: u64,
    members: Vec<u32>,
}

/// Serializes a cover timeline as compact JSON plus a trailing newline.
pub fn write_cover_timeline(tl: &CoverTimeline, mut writer: impl Write) -> Result<(), NetIoError> {
    let doc: Vec<Vec<CommunityRecord>> = (0..tl.num_snapshots())
        .map(|t| {
            tl.cover(t)
                .communities()
                .iter()
                .zip(tl.labels(t))
                .map(|(members, &label)| CommunityRecord {
                    label,
                    members: members.clone(),
                })
                .collect()
        })
        .collect();
    serde_json::to_writer(&mut writer, &doc)?;
    writer.write_all(b"\n")?;
    Ok(())
}

/// Reads a cover timeline written by [`write_cover_timeline`]. The node
/// count is max member id + 1 (or `n_hint` if larger) since outliers are
/// implicit in the format.
pub fn load_cover_timeline(
    reader: impl Read,
    n_hint: Option<usize>,
) -> Result<CoverTimeline, NetIoError> {
    let doc: Vec<Vec<CommunityRecord>> = serde_json::from_reader(reader)?;
    if doc.is_empty() {
        return Err(NetIoError::BadTimeline("no snapshots".into()));
    }
    let max_member = doc
        .iter()
        .flatten()
        .flat_map(|c| c.members.iter().copied())
        .max();
    let n = max_member.map_or(0, |m| m as usize + 1).max(n_hint.unwrap_or(0));

    let mut covers = Vec::with_capacity(doc.len());
    let mut labels = Vec::with_capacity(doc.len());
    for snapshot in doc {
        // keep (label, members) pairs aligned through canonicalization
        let mut pairs: Vec<(Vec<u32>, u64)> = snapshot
            .into_iter()
            .map(|c| {
                let mut members = c.members;
                members.sort_unstable();
                members.dedup();
                (members, c.label)
            })
            .collect();
        if pairs.iter().any(|(m, _)| m.is_empty()) {
            return Err(NetIoError::BadTimeline("empty community".into()));
        }
        pairs.sort_by(|(a, _), (b, _)| (a[0], a.len(), a).cmp(&(b[0], b.len(), b)));
        let (members, snapshot_labels): (Vec<_>, Vec<_>) = pairs.into_iter().unzip();
        covers.push(Cover::new(n, members)?);
        labels.push(snapshot_labels);
    }
    Ok(CoverTimeline::new(covers, labels)?)
}

/// Parses an optional `id<TAB>name` mapping file for labelled datasets.
pub fn load_node_names(reader: impl BufRead) -> Result<Vec<(u32, String)>, NetIoError> {
    let mut out = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line?;
        let trimmed = line.trim_end_matches('\n');
        if trimmed.trim().is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let (id, name) = trimmed.split_once('\t').ok_or_else(|| NetIoError::Parse {
            line: lineno,
            message: "expected `id<TAB>name`".into(),
        })?;
        out.push((parse_field(id.trim(), "node id", lineno)?, name.to_string()));
    }
    Ok(out)
}
