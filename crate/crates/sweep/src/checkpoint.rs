//! Append-only checkpoint files.
//!
//! Each line is `<crc32 as 8 hex digits> <json>`, the checksum taken over the
//! JSON bytes. The first line is the header; every following line is one
//! task record. A final line without a newline is an interrupted write and
//! is dropped on reading.

use std::fs::{File, OpenOptions};
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::config::{SweepConfig, CONFIG_VERSION};
use crate::error::{Result, SweepError};
use crate::record::TaskRecord;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckpointHeader {
    pub version: u32,
    pub config_hash: String,
    pub tool_version: String,
    pub config: SweepConfig,
}

impl CheckpointHeader {
    pub fn new(config: &SweepConfig) -> Self {
        Self {
            version: CONFIG_VERSION,
            config_hash: config.hash(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            config: config.clone(),
        }
    }
}

fn encode<T: Serialize>(value: &T) -> Result<String> {
    let json = serde_json::to_string(value)?;
    Ok(format!("{:08x} {json}\n", crc32fast::hash(json.as_bytes())))
}

fn decode<T: for<'de> Deserialize<'de>>(line: &str, number: usize) -> Result<T> {
    let corrupt = |reason: String| SweepError::CorruptCheckpoint { line: number, reason };
    let (crc, json) = line.split_once(' ').ok_or_else(|| corrupt("missing checksum".into()))?;
    let expected = u32::from_str_radix(crc, 16).map_err(|_| corrupt(format!("bad checksum field `{crc}`")))?;
    let actual = crc32fast::hash(json.as_bytes());
    if expected != actual {
        return Err(corrupt(format!("checksum {actual:08x} does not match {expected:08x}")));
    }
    serde_json::from_str(json).map_err(|e| corrupt(e.to_string()))
}

pub struct CheckpointWriter {
    out: BufWriter<File>,
    pending: usize,
    interval: usize,
}

impl CheckpointWriter {
    /// Starts a new checkpoint, replacing any file at `path`.
    pub fn create(path: &Path, header: &CheckpointHeader, interval: usize) -> Result<Self> {
        let mut out = BufWriter::new(File::create(path)?);
        out.write_all(encode(header)?.as_bytes())?;
        out.flush()?;
        Ok(Self { out, pending: 0, interval: interval.max(1) })
    }

    /// Continues an existing checkpoint, first cutting off an interrupted final line.
    pub fn append(path: &Path, interval: usize) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        if !text.is_empty() && !text.ends_with('\n') {
            let keep = text.rfind('\n').map_or(0, |p| p + 1);
            OpenOptions::new().write(true).open(path)?.set_len(keep as u64)?;
        }
        let file = OpenOptions::new().append(true).open(path)?;
        Ok(Self { out: BufWriter::new(file), pending: 0, interval: interval.max(1) })
    }

    pub fn write(&mut self, record: &TaskRecord) -> Result<()> {
        self.out.write_all(encode(record)?.as_bytes())?;
        self.pending += 1;
        if self.pending >= self.interval {
            self.flush()?;
        }
        Ok(())
    }

    pub fn flush(&mut self) -> Result<()> {
        self.out.flush()?;
        self.pending = 0;
        Ok(())
    }
}

impl Drop for CheckpointWriter {
    fn drop(&mut self) {
        let _ = self.out.flush();
    }
}

pub fn read_checkpoint(path: &Path) -> Result<(CheckpointHeader, Vec<TaskRecord>)> {
    let text = std::fs::read_to_string(path)?;
    parse_checkpoint(&text)
}

pub fn parse_checkpoint(text: &str) -> Result<(CheckpointHeader, Vec<TaskRecord>)> {
    let complete = match text.rfind('\n') {
        Some(p) => &text[..p + 1],
        None => "",
    };
    let mut lines = complete.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (n, first) = lines.next().ok_or_else(|| SweepError::CorruptCheckpoint { line: 1, reason: "empty file".into() })?;
    let header: CheckpointHeader = decode(first, n + 1)?;
    if header.version != CONFIG_VERSION {
        return Err(SweepError::CorruptCheckpoint {
            line: 1,
            reason: format!("unsupported checkpoint version {}", header.version),
        });
    }
    let records = lines.map(|(n, l)| decode(l, n + 1)).collect::<Result<Vec<TaskRecord>>>()?;
    Ok((header, records))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::record::{Outcome, TaskKey, TaskKind};

    fn config() -> SweepConfig {
        SweepConfig::from_json(
            r#"{"system": {"geometry": "chain:3", "e_c": 0.25, "e_j": 12.5, "scheme": "a", "bundle": 1},
                "axes": [{"name": "t", "values": [0.001]}], "realizations": 1,
                "diagnostics": ["ipr"], "master_seed": 1}"#,
        )
        .unwrap()
    }

    fn record(r: usize) -> TaskRecord {
        TaskRecord {
            key: TaskKey { kind: TaskKind::Spectral, i: 0, j: 0, r },
            seed: r as u64,
            outcome: Outcome::Failed { error: "x".into(), numerical: true },
        }
    }

    #[test]
    fn write_read_append() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ck.jsonl");
        let header = CheckpointHeader::new(&config());
        let mut w = CheckpointWriter::create(&path, &header, 1).unwrap();
        w.write(&record(0)).unwrap();
        drop(w);
        let mut w = CheckpointWriter::append(&path, 1).unwrap();
        w.write(&record(1)).unwrap();
        drop(w);
        let (h, records) = read_checkpoint(&path).unwrap();
        assert_eq!(h, header);
        assert_eq!(records, vec![record(0), record(1)]);
    }

    #[test]
    fn detects_corruption_and_drops_torn_tail() {
        let header = CheckpointHeader::new(&config());
        let good = format!("{}{}", encode(&header).unwrap(), encode(&record(0)).unwrap());
        let torn = format!("{good}{}", &encode(&record(1)).unwrap()[..20]);
        assert_eq!(parse_checkpoint(&torn).unwrap().1.len(), 1);
        let flipped = good.replacen("\"r\":0", "\"r\":5", 1);
        assert!(matches!(parse_checkpoint(&flipped), Err(SweepError::CorruptCheckpoint { line: 2, .. })));
        assert!(parse_checkpoint("").is_err());
        assert!(parse_checkpoint("zz {}\n").is_err());
    }
}
