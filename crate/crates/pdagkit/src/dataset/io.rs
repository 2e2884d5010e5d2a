//! Line-delimited record files, optionally gzip-compressed.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use flate2::read::GzDecoder;
use flate2::write::GzEncoder;
use flate2::Compression;

use super::{DatasetError, Record, SCHEMA_VERSION};

/// Writes one JSON object per line. Returns the number of records written.
pub fn write_records<'a>(
    path: &Path,
    records: impl IntoIterator<Item = &'a Record>,
    gzip: bool,
) -> Result<usize, DatasetError> {
    let file = BufWriter::new(File::create(path)?);
    if gzip {
        let mut enc = GzEncoder::new(file, Compression::default());
        let n = write_lines(&mut enc, records)?;
        enc.finish()?.flush()?;
        Ok(n)
    } else {
        let mut file = file;
        let n = write_lines(&mut file, records)?;
        file.flush()?;
        Ok(n)
    }
}

fn write_lines<'a, W: Write>(
    w: &mut W,
    records: impl IntoIterator<Item = &'a Record>,
) -> Result<usize, DatasetError> {
    let mut n = 0;
    for r in records {
        serde_json::to_writer(&mut *w, r)?;
        w.write_all(b"\n")?;
        n += 1;
    }
    Ok(n)
}

/// Reads a record file; gzip input is detected from its magic bytes.
pub fn read_records(path: &Path) -> Result<Vec<Record>, DatasetError> {
    let mut file = File::open(path)?;
    let mut magic = [0u8; 2];
    let got = file.read(&mut magic)?;
    let file = File::open(path)?;
    let reader: Box<dyn BufRead> = if got == 2 && magic == [0x1f, 0x8b] {
        Box::new(BufReader::new(GzDecoder::new(file)))
    } else {
        Box::new(BufReader::new(file))
    };
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: Record = serde_json::from_str(&line).map_err(|e| DatasetError::Record {
            line: i + 1,
            message: e.to_string(),
        })?;
        if rec.schema_version != SCHEMA_VERSION {
            return Err(DatasetError::Record {
                line: i + 1,
                message: format!("unsupported schema version {}", rec.schema_version),
            });
        }
        out.push(rec);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{GenerateConfig, Generator};

    #[test]
    fn plain_and_gzip_round_trip() {
        let g = Generator::new(3).unwrap();
        let recs: Vec<Record> = g
            .generate_all(&GenerateConfig::default())
            .unwrap()
            .into_iter()
            .map(|s| s.record)
            .collect();
        let dir = tempfile::tempdir().unwrap();
        for gz in [false, true] {
            let p = dir.path().join(if gz { "d.jsonl.gz" } else { "d.jsonl" });
            assert_eq!(write_records(&p, &recs, gz).unwrap(), recs.len());
            assert_eq!(read_records(&p).unwrap(), recs);
        }
        let text = std::fs::read_to_string(dir.path().join("d.jsonl")).unwrap();
        let first = text.lines().next().unwrap();
        assert!(first.starts_with("{\"id\":\"n3-m000000-direct_cause-A-B\",\"n_vars\":3,\"premise\":"));
        assert!(first.ends_with("\"style\":\"symbolic\",\"schema_version\":1}"));
    }
}
