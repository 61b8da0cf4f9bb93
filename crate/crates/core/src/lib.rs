//! Core engine for hybrid text+color retrieval of web images.
//!
//! Images embedded in HTML pages are described along two axes at indexing
//! time: a 12-bin RGB color histogram that is matched against a labeled
//! reference set to yield a class label, and the text surrounding the image
//! in the page (paragraph, headers, `alt` attribute, filename), which is
//! tokenized and tagged with its source location. Per-location term counts
//! are weighted by a location-aware TF-IDF variant and queries are answered
//! by cosine similarity over the resulting sparse vectors.
//!
//! The crate is `no_std` + `alloc`: everything here is pure computation over
//! bytes and strings. Fetching, on-disk formats, and the command-line front
//! end live in the companion `hybrid-ir` crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod color;
pub mod eval;
pub mod extract;
pub mod html;
pub mod index;
pub mod query;
pub mod text;
pub mod weight;

pub use color::{
    build_histogram, classify, decode_ppm, euclidean_distance, ClassificationResult,
    ColorHistogram, PixelBuffer, ReferenceSet,
};
pub use extract::{extract_metadata, locate_images, ImageAnchor, LocatedTerm, SourceLocation};
pub use html::{parse_html, HtmlTree, NodeKind};
pub use index::{CorpusStats, ImageRecord, Index, RecordId, SparseVector, TermDictionary, TermId};
pub use query::{cosine_similarity, search, weight_query, RankedResult, SearchParams};
pub use text::{tokenize, StopWords};
pub use weight::{LocationCounts, LocationWeightTable, WeightScheme};
