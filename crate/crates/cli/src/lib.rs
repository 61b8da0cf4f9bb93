//! IO companion to `hybrid-ir-core`: fetching documents and images from
//! files or http(s), the on-disk index / reference-set formats, and the
//! indexing pipeline driven by the `hybrid-ir` binary.

pub mod fetch;
pub mod pipeline;
pub mod store;

pub use fetch::{fetch_document, fetch_image, resolve_reference, FetchConfig, FetchError};
pub use pipeline::{build_reference_set, class_label_term, index_documents, IndexingOptions};
pub use store::{load_index, load_reference_set, save_index, save_reference_set, StoreError};
