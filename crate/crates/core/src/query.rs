//! Query weighting and cosine-ranked retrieval.
//!
//! Queries are weighted with plain TF-IDF (a query has no tag structure to
//! exploit); documents are materialized under whichever scheme the caller
//! picks and scored by cosine similarity. All weights are non-negative, so
//! scores land in [0, 1].

use alloc::string::String;
use alloc::vec::Vec;

use crate::index::{CorpusStats, Index, RecordId, SparseVector, TermDictionary};
use crate::text::{tokenize, StopWords};
use crate::weight::{tf_idf, LocationWeightTable, WeightScheme};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchError {
    /// The index holds no records; IDF is undefined.
    EmptyCorpus,
}

impl core::fmt::Display for SearchError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            SearchError::EmptyCorpus => write!(f, "cannot search an empty index"),
        }
    }
}

impl core::error::Error for SearchError {}

/// One search hit. `rank` is 1-based.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedResult {
    pub record: RecordId,
    pub score: f64,
    pub rank: usize,
}

/// Knobs for [`search`].
#[derive(Debug, Clone)]
pub struct SearchParams {
    pub scheme: WeightScheme,
    pub table: LocationWeightTable,
    /// Result cutoff.
    pub k: usize,
    /// Keep results whose score is exactly zero (off by default: documents
    /// sharing no terms with the query are noise).
    pub include_zero_scores: bool,
}

impl Default for SearchParams {
    fn default() -> Self {
        SearchParams {
            scheme: WeightScheme::VtfIdf,
            table: LocationWeightTable::paper_multiplicative(),
            k: 10,
            include_zero_scores: false,
        }
    }
}

/// TF-IDF weight the query text against a corpus snapshot. Terms missing
/// from the dictionary (or present in every document) get weight zero and
/// are omitted.
pub fn weight_query(
    text: &str,
    stopwords: &StopWords,
    dict: &TermDictionary,
    stats: &CorpusStats,
) -> Result<SparseVector, SearchError> {
    if stats.is_empty() {
        return Err(SearchError::EmptyCorpus);
    }
    let mut tf: alloc::collections::BTreeMap<String, u64> = alloc::collections::BTreeMap::new();
    for token in tokenize(text, stopwords) {
        *tf.entry(token).or_insert(0) += 1;
    }
    let mut vector = SparseVector::new();
    for (term, count) in tf {
        if let Some(id) = dict.get(&term) {
            vector.insert(id, tf_idf(count, stats.idf(id)));
        }
    }
    Ok(vector)
}

/// `dot(a, b) / (|a| * |b|)`; 0 when either vector is empty or zero.
pub fn cosine_similarity(a: &SparseVector, b: &SparseVector) -> f64 {
    let na = a.norm();
    let nb = b.norm();
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    a.dot(b) / (na * nb)
}

/// Score every record against the query and return the top `k`, ordered by
/// descending score with ties broken by ascending record id.
pub fn search(
    index: &Index,
    query: &str,
    stopwords: &StopWords,
    params: &SearchParams,
) -> Result<Vec<RankedResult>, SearchError> {
    if index.is_empty() {
        return Err(SearchError::EmptyCorpus);
    }
    let stats = index.corpus_snapshot();
    let query_vector = weight_query(query, stopwords, index.dictionary(), &stats)?;

    let mut scored: Vec<(RecordId, f64)> = index
        .records()
        .map(|record| {
            let vector = index.vector_of(record, params.scheme, &params.table);
            (record.id, cosine_similarity(&query_vector, &vector))
        })
        .collect();

    if !params.include_zero_scores {
        scored.retain(|(_, s)| *s > 0.0);
    }
    scored.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    scored.truncate(params.k);

    Ok(scored
        .into_iter()
        .enumerate()
        .map(|(i, (record, score))| RankedResult {
            record,
            score,
            rank: i + 1,
        })
        .collect())
}
