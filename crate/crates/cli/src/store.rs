//! On-disk formats: the persisted reference set, the index directory, and
//! loaders for stop-word, weight-table, and judgments files.
//!
//! Index directory layout (format `v1`):
//!
//! * `meta` — line 1 `#hybrid-ir-index v1`, line 2 the record count
//! * `terms.tsv` — `term-id<TAB>term`, ascending id
//! * `df.tsv` — `term-id<TAB>document-frequency`, ascending id
//! * `records.jsonl` — one JSON object per record, ascending id
//!
//! All files are UTF-8 with LF line endings and are written
//! deterministically: the same records in the same order produce
//! byte-identical files.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use hybrid_ir_core::color::{ColorHistogram, ReferenceSet};
use hybrid_ir_core::extract::SourceLocation;
use hybrid_ir_core::index::{ImageRecord, Index, RecordId, TermDictionary, TermId};
use hybrid_ir_core::weight::{LocationCounts, LocationWeightTable, WeightTableError};

pub const INDEX_MAGIC: &str = "#hybrid-ir-index v1";
pub const REFSET_MAGIC: &str = "#hybrid-ir-refset v1";

#[derive(Debug, thiserror::Error)]
pub enum StoreError {
    #[error("corrupt {what}: {reason}")]
    Corrupt { what: &'static str, reason: String },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl StoreError {
    fn corrupt(what: &'static str, reason: impl Into<String>) -> Self {
        StoreError::Corrupt {
            what,
            reason: reason.into(),
        }
    }

    fn io(path: &Path, source: std::io::Error) -> Self {
        StoreError::Io {
            path: path.display().to_string(),
            source,
        }
    }
}

fn read(path: &Path) -> Result<String, StoreError> {
    fs::read_to_string(path).map_err(|e| StoreError::io(path, e))
}

fn write(path: &Path, contents: &str) -> Result<(), StoreError> {
    let mut file = fs::File::create(path).map_err(|e| StoreError::io(path, e))?;
    file.write_all(contents.as_bytes())
        .map_err(|e| StoreError::io(path, e))
}

// --- reference set -------------------------------------------------------

/// One line per histogram: `label<TAB>12 space-separated counts`.
pub fn save_reference_set(refs: &ReferenceSet, path: &Path) -> Result<(), StoreError> {
    let mut out = String::from(REFSET_MAGIC);
    out.push('\n');
    for (label, histograms) in refs.classes() {
        for h in histograms {
            out.push_str(label);
            out.push('\t');
            let counts: Vec<String> = h.counts().iter().map(u64::to_string).collect();
            out.push_str(&counts.join(" "));
            out.push('\n');
        }
    }
    write(path, &out)
}

pub fn load_reference_set(path: &Path) -> Result<ReferenceSet, StoreError> {
    let text = read(path)?;
    let mut lines = text.lines();
    if lines.next() != Some(REFSET_MAGIC) {
        return Err(StoreError::corrupt("reference set", "bad magic line"));
    }
    let mut refs = ReferenceSet::new();
    for line in lines {
        if line.trim().is_empty() {
            continue;
        }
        let (label, counts) = line
            .split_once('\t')
            .ok_or_else(|| StoreError::corrupt("reference set", format!("no tab in {line:?}")))?;
        let values: Result<Vec<u64>, _> =
            counts.split_whitespace().map(str::parse::<u64>).collect();
        let values =
            values.map_err(|e| StoreError::corrupt("reference set", format!("{e} in {line:?}")))?;
        let array: [u64; 12] = values.try_into().map_err(|v: Vec<u64>| {
            StoreError::corrupt("reference set", format!("{} counts, want 12", v.len()))
        })?;
        refs.add(label, ColorHistogram::from_counts(array));
    }
    if refs.is_empty() {
        return Err(StoreError::corrupt("reference set", "no histograms"));
    }
    Ok(refs)
}

// --- index directory ------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct RecordRow {
    id: u64,
    document_uri: String,
    image_uri: String,
    filename: String,
    class_label: String,
    histogram: [u64; 12],
    /// term-id -> location name -> count; only positive counts stored.
    profile: BTreeMap<u32, BTreeMap<String, u32>>,
}

impl RecordRow {
    fn from_record(record: &ImageRecord) -> Self {
        let mut profile = BTreeMap::new();
        for (&TermId(term), counts) in &record.profile {
            let by_location: BTreeMap<String, u32> = counts
                .iter()
                .map(|(loc, count)| (loc.as_str().to_string(), count))
                .collect();
            profile.insert(term, by_location);
        }
        RecordRow {
            id: record.id.0,
            document_uri: record.document_uri.clone(),
            image_uri: record.image_uri.clone(),
            filename: record.filename.clone(),
            class_label: record.class_label.clone(),
            histogram: *record.histogram.counts(),
            profile,
        }
    }

    fn into_record(self) -> Result<ImageRecord, StoreError> {
        let mut profile = BTreeMap::new();
        for (term, by_location) in self.profile {
            let mut counts = LocationCounts::new();
            for (name, count) in by_location {
                let location = SourceLocation::parse(&name).ok_or_else(|| {
                    StoreError::corrupt("records.jsonl", format!("unknown location {name:?}"))
                })?;
                counts.add(location, count);
            }
            profile.insert(TermId(term), counts);
        }
        Ok(ImageRecord {
            id: RecordId(self.id),
            document_uri: self.document_uri,
            image_uri: self.image_uri,
            filename: self.filename,
            class_label: self.class_label,
            histogram: ColorHistogram::from_counts(self.histogram),
            profile,
        })
    }
}

/// Write the whole index into `dir` (created if missing).
pub fn save_index(index: &Index, dir: &Path) -> Result<(), StoreError> {
    fs::create_dir_all(dir).map_err(|e| StoreError::io(dir, e))?;

    write(
        &dir.join("meta"),
        &format!("{INDEX_MAGIC}\n{}\n", index.len()),
    )?;

    let mut terms = String::new();
    for (TermId(id), term) in index.dictionary().iter() {
        terms.push_str(&format!("{id}\t{term}\n"));
    }
    write(&dir.join("terms.tsv"), &terms)?;

    let mut df = String::new();
    for (TermId(id), _) in index.dictionary().iter() {
        df.push_str(&format!("{id}\t{}\n", index.df(TermId(id))));
    }
    write(&dir.join("df.tsv"), &df)?;

    let mut records = String::new();
    for record in index.records() {
        let row = RecordRow::from_record(record);
        let json = serde_json::to_string(&row).map_err(|e| {
            StoreError::corrupt("records.jsonl", format!("serialization failed: {e}"))
        })?;
        records.push_str(&json);
        records.push('\n');
    }
    write(&dir.join("records.jsonl"), &records)
}

/// A missing index file means the directory is not (or is no longer) an
/// index; other IO failures stay IO errors.
fn read_index_file(dir: &Path, name: &'static str) -> Result<String, StoreError> {
    let path = dir.join(name);
    fs::read_to_string(&path).map_err(|e| {
        if e.kind() == std::io::ErrorKind::NotFound {
            StoreError::corrupt(name, "file missing; not an index directory")
        } else {
            StoreError::io(&path, e)
        }
    })
}

/// Load an index directory written by [`save_index`].
pub fn load_index(dir: &Path) -> Result<Index, StoreError> {
    let meta = read_index_file(dir, "meta")?;
    let mut lines = meta.lines();
    if lines.next() != Some(INDEX_MAGIC) {
        return Err(StoreError::corrupt("meta", "bad magic line"));
    }
    let n: usize = lines
        .next()
        .and_then(|l| l.trim().parse().ok())
        .ok_or_else(|| StoreError::corrupt("meta", "missing record count"))?;

    let mut rows = Vec::new();
    for line in read_index_file(dir, "terms.tsv")?.lines() {
        let (id, term) = line
            .split_once('\t')
            .ok_or_else(|| StoreError::corrupt("terms.tsv", format!("no tab in {line:?}")))?;
        let id: u32 = id
            .parse()
            .map_err(|_| StoreError::corrupt("terms.tsv", format!("bad id in {line:?}")))?;
        rows.push((id, term.to_string()));
    }
    let dict = TermDictionary::from_rows(rows)
        .map_err(|e| StoreError::corrupt("terms.tsv", e.to_string()))?;

    let mut stored_df = BTreeMap::new();
    for line in read_index_file(dir, "df.tsv")?.lines() {
        let (id, df) = line
            .split_once('\t')
            .ok_or_else(|| StoreError::corrupt("df.tsv", format!("no tab in {line:?}")))?;
        let id: u32 = id
            .parse()
            .map_err(|_| StoreError::corrupt("df.tsv", format!("bad id in {line:?}")))?;
        let df: u64 = df
            .parse()
            .map_err(|_| StoreError::corrupt("df.tsv", format!("bad count in {line:?}")))?;
        if df > 0 {
            stored_df.insert(TermId(id), df);
        }
    }

    let mut records = Vec::new();
    for line in read_index_file(dir, "records.jsonl")?.lines() {
        let row: RecordRow = serde_json::from_str(line)
            .map_err(|e| StoreError::corrupt("records.jsonl", e.to_string()))?;
        records.push(row.into_record()?);
    }
    if records.len() != n {
        return Err(StoreError::corrupt(
            "meta",
            format!("record count {n} but {} records stored", records.len()),
        ));
    }

    Index::from_parts(dict, records, stored_df)
        .map_err(|e| StoreError::corrupt("records.jsonl", e.to_string()))
}

// --- small text inputs ----------------------------------------------------

pub fn load_stopwords(path: &Path) -> Result<hybrid_ir_core::text::StopWords, StoreError> {
    Ok(hybrid_ir_core::text::StopWords::parse(&read(path)?))
}

/// A weight table given as a preset name or a file path.
pub fn resolve_weight_table(spec: &str) -> Result<LocationWeightTable, WeightTableSpecError> {
    if let Some(table) = LocationWeightTable::preset(spec) {
        return Ok(table);
    }
    let text = fs::read_to_string(spec).map_err(|e| WeightTableSpecError::Io {
        path: spec.to_string(),
        source: e,
    })?;
    LocationWeightTable::parse(&text).map_err(WeightTableSpecError::Parse)
}

#[derive(Debug, thiserror::Error)]
pub enum WeightTableSpecError {
    #[error("weight table {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("weight table: {0}")]
    Parse(WeightTableError),
}
