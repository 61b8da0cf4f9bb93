//! The indexing pipeline: fetch a document, parse it, and for every image
//! fetch + decode + histogram + classify + extract metadata, then commit
//! records with ids assigned in input order. Also builds reference sets
//! from a directory tree of labeled PPM images.

use std::fs;
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use hybrid_ir_core::color::{build_histogram, classify, decode_ppm, ColorHistogram, ReferenceSet};
use hybrid_ir_core::extract::{extract_metadata, locate_images, SourceLocation};
use hybrid_ir_core::html::parse_html;
use hybrid_ir_core::index::{ImageRecord, Index, RecordId};
use hybrid_ir_core::text::StopWords;
use hybrid_ir_core::weight::{aggregate_terms, TermProfile};

use crate::fetch::{fetch_document, fetch_image, resolve_reference, FetchConfig};

#[derive(Debug, thiserror::Error)]
pub enum BuildRefError {
    #[error("reference root {0}: {1}")]
    Io(String, std::io::Error),
    #[error("no classes with decodable images under {0}")]
    Empty(String),
}

/// Outcome of scanning a reference directory: the set plus one warning per
/// skipped file.
pub struct BuiltReferenceSet {
    pub set: ReferenceSet,
    pub warnings: Vec<String>,
}

/// Build a reference set from `root`: every subdirectory is a class named
/// after it, every regular file inside is decoded as PPM. Undecodable
/// files are skipped with a warning. Classes and files are visited in
/// name order, so the result is deterministic.
pub fn build_reference_set(root: &Path) -> Result<BuiltReferenceSet, BuildRefError> {
    let mut classes: Vec<std::path::PathBuf> = fs::read_dir(root)
        .map_err(|e| BuildRefError::Io(root.display().to_string(), e))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.is_dir())
        .collect();
    classes.sort();

    let mut set = ReferenceSet::new();
    let mut warnings = Vec::new();
    for class_dir in classes {
        let label = match class_dir.file_name().and_then(|n| n.to_str()) {
            Some(name) => name.to_string(),
            None => continue,
        };
        let mut files: Vec<std::path::PathBuf> = match fs::read_dir(&class_dir) {
            Ok(entries) => entries
                .filter_map(|entry| entry.ok().map(|e| e.path()))
                .filter(|p| p.is_file())
                .collect(),
            Err(e) => {
                warnings.push(format!("{}: {e}", class_dir.display()));
                continue;
            }
        };
        files.sort();
        for file in files {
            match fs::read(&file)
                .map_err(|e| e.to_string())
                .and_then(|bytes| decode_ppm(&bytes).map_err(|e| e.to_string()))
            {
                Ok(pixels) => set.add(&label, build_histogram(&pixels)),
                Err(reason) => warnings.push(format!("{}: {reason}", file.display())),
            }
        }
    }

    if set.is_empty() {
        return Err(BuildRefError::Empty(root.display().to_string()));
    }
    Ok(BuiltReferenceSet { set, warnings })
}

/// The class label as an index term: lowercase alphanumerics only, so it
/// obeys the same shape as every other term.
pub fn class_label_term(label: &str) -> String {
    label
        .chars()
        .filter(char::is_ascii_alphanumeric)
        .map(|c| c.to_ascii_lowercase())
        .collect()
}

#[derive(Debug, Clone)]
pub struct IndexingOptions {
    pub fetch: FetchConfig,
    /// Documents processed concurrently; ids still follow input order.
    pub workers: usize,
}

impl Default for IndexingOptions {
    fn default() -> Self {
        IndexingOptions {
            fetch: FetchConfig::default(),
            workers: 1,
        }
    }
}

/// Everything needed to commit one image, produced during the parallel
/// phase.
struct PendingImage {
    document_uri: String,
    image_uri: String,
    filename: String,
    class_label: String,
    histogram: ColorHistogram,
    profile: TermProfile,
}

#[derive(Default)]
struct DocOutcome {
    images: Vec<PendingImage>,
    failures: Vec<String>,
}

/// Per-image summary for reporting.
pub struct IndexedImage {
    pub id: RecordId,
    pub filename: String,
    pub class_label: String,
}

pub struct IndexingReport {
    pub documents_processed: usize,
    pub indexed: Vec<IndexedImage>,
    pub failures: Vec<String>,
}

/// Index every document in `inputs` into `index`. Documents may be
/// processed by several workers, but records are committed sequentially in
/// input order (documents first, then images within a document), so record
/// ids and the resulting index are independent of scheduling. Ids continue
/// from the current index size.
pub fn index_documents(
    inputs: &[String],
    refs: &ReferenceSet,
    stopwords: &StopWords,
    options: &IndexingOptions,
    index: &mut Index,
) -> IndexingReport {
    let outcomes: Vec<DocOutcome> = if options.workers <= 1 || inputs.len() <= 1 {
        inputs
            .iter()
            .map(|input| process_document(input, refs, stopwords, &options.fetch))
            .collect()
    } else {
        let slots: Vec<Mutex<DocOutcome>> = inputs
            .iter()
            .map(|_| Mutex::new(DocOutcome::default()))
            .collect();
        let cursor = AtomicUsize::new(0);
        std::thread::scope(|scope| {
            for _ in 0..options.workers.min(inputs.len()) {
                scope.spawn(|| loop {
                    let at = cursor.fetch_add(1, Ordering::Relaxed);
                    let Some(input) = inputs.get(at) else { break };
                    let outcome = process_document(input, refs, stopwords, &options.fetch);
                    *slots[at].lock().unwrap() = outcome;
                });
            }
        });
        slots
            .into_iter()
            .map(|slot| slot.into_inner().unwrap())
            .collect()
    };

    let mut report = IndexingReport {
        documents_processed: inputs.len(),
        indexed: Vec::new(),
        failures: Vec::new(),
    };
    let mut next_id = index.len() as u64 + 1;
    for outcome in outcomes {
        report.failures.extend(outcome.failures);
        for pending in outcome.images {
            let id = RecordId(next_id);
            next_id += 1;
            let profile = index.intern_profile(&pending.profile);
            let record = ImageRecord {
                id,
                document_uri: pending.document_uri,
                image_uri: pending.image_uri.clone(),
                filename: pending.filename.clone(),
                class_label: pending.class_label.clone(),
                histogram: pending.histogram,
                profile,
            };
            match index.add_record(record) {
                Ok(()) => report.indexed.push(IndexedImage {
                    id,
                    filename: pending.filename,
                    class_label: pending.class_label,
                }),
                Err(e) => report.failures.push(format!("{}: {e}", pending.image_uri)),
            }
        }
    }
    report
}

fn process_document(
    input: &str,
    refs: &ReferenceSet,
    stopwords: &StopWords,
    fetch: &FetchConfig,
) -> DocOutcome {
    let mut outcome = DocOutcome::default();
    let document = match fetch_document(input, fetch) {
        Ok(doc) => doc,
        Err(e) => {
            outcome.failures.push(format!("{input}: {e}"));
            return outcome;
        }
    };
    let tree = parse_html(&document.bytes);

    for anchor in locate_images(&tree) {
        let image_uri = match resolve_reference(&document.source, &anchor.src) {
            Ok(uri) => uri,
            Err(e) => {
                outcome.failures.push(format!("{}: {e}", document.source));
                continue;
            }
        };
        let image = match fetch_image(&image_uri, fetch) {
            Ok(img) => img,
            Err(e) => {
                outcome.failures.push(format!("{image_uri}: {e}"));
                continue;
            }
        };
        let pixels = match decode_ppm(&image.bytes) {
            Ok(p) => p,
            Err(e) => {
                outcome.failures.push(format!("{image_uri}: {e}"));
                continue;
            }
        };
        let histogram = build_histogram(&pixels);
        let class_label = match classify(&histogram, refs) {
            Ok(result) => result.label,
            Err(e) => {
                outcome.failures.push(format!("{image_uri}: {e}"));
                continue;
            }
        };

        let located = extract_metadata(&tree, &anchor, stopwords);
        let mut profile = aggregate_terms(&located);
        let class_term = class_label_term(&class_label);
        if !class_term.is_empty() {
            profile
                .entry(class_term)
                .or_default()
                .add(SourceLocation::ClassLabel, 1);
        }

        outcome.images.push(PendingImage {
            document_uri: document.source.clone(),
            image_uri,
            filename: image.filename,
            class_label,
            histogram,
            profile,
        });
    }
    outcome
}
