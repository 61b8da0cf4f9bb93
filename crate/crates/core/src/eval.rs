//! Retrieval quality measurement: precision (and recall, for exhaustive
//! judgments) at a fixed cutoff, and side-by-side scheme comparison.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

use crate::index::{Index, RecordId};
use crate::query::{search, SearchError, SearchParams};
use crate::text::StopWords;
use crate::weight::{LocationWeightTable, WeightScheme};

/// Fraction of returned results that are relevant. Empty return counts
/// as 0 by convention.
pub fn precision(returned: &[RecordId], relevant: &BTreeSet<RecordId>) -> f64 {
    if returned.is_empty() {
        return 0.0;
    }
    let hits = returned.iter().filter(|id| relevant.contains(id)).count();
    hits as f64 / returned.len() as f64
}

/// Fraction of relevant results that were returned. Meaningful only when
/// the judgments are exhaustive; 0 when the relevant set is empty.
pub fn recall(returned: &[RecordId], relevant: &BTreeSet<RecordId>) -> f64 {
    if relevant.is_empty() {
        return 0.0;
    }
    let hits = returned.iter().filter(|id| relevant.contains(id)).count();
    hits as f64 / relevant.len() as f64
}

/// Query strings mapped to their relevant record ids, in input order.
#[derive(Debug, Clone, Default)]
pub struct RelevanceJudgments {
    entries: Vec<(String, BTreeSet<RecordId>)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum JudgmentsError {
    MalformedLine(String),
    Empty,
}

impl core::fmt::Display for JudgmentsError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            JudgmentsError::MalformedLine(l) => write!(f, "malformed judgments line {l:?}"),
            JudgmentsError::Empty => write!(f, "judgments file has no entries"),
        }
    }
}

impl core::error::Error for JudgmentsError {}

impl RelevanceJudgments {
    /// Parse the judgments format: one `query<TAB>id,id,...` per line,
    /// `#` comments and blank lines skipped.
    pub fn parse(text: &str) -> Result<Self, JudgmentsError> {
        let mut entries = Vec::new();
        for line in text.lines() {
            let line = line.trim_end();
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            let (query, ids) = line
                .split_once('\t')
                .ok_or_else(|| JudgmentsError::MalformedLine(String::from(line)))?;
            let mut relevant = BTreeSet::new();
            for part in ids.split(',') {
                let part = part.trim();
                if part.is_empty() {
                    continue;
                }
                let id: u64 = part
                    .parse()
                    .map_err(|_| JudgmentsError::MalformedLine(String::from(line)))?;
                relevant.insert(RecordId(id));
            }
            entries.push((String::from(query), relevant));
        }
        if entries.is_empty() {
            return Err(JudgmentsError::Empty);
        }
        Ok(RelevanceJudgments { entries })
    }

    pub fn from_entries(entries: Vec<(String, BTreeSet<RecordId>)>) -> Self {
        RelevanceJudgments { entries }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &BTreeSet<RecordId>)> {
        self.entries.iter().map(|(q, r)| (q.as_str(), r))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Per-query outcome under one scheme.
#[derive(Debug, Clone, PartialEq)]
pub struct QueryOutcome {
    pub query: String,
    pub precision: f64,
    pub recall: f64,
}

/// One scheme's aggregate over the query set.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemeResult {
    pub scheme: WeightScheme,
    pub k: usize,
    pub mean_precision: f64,
    pub mean_recall: f64,
    pub per_query: Vec<QueryOutcome>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum EvalError {
    /// A judged record id does not exist in the index.
    UnknownRecord(RecordId),
    Search(SearchError),
    NoJudgments,
}

impl core::fmt::Display for EvalError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            EvalError::UnknownRecord(id) => {
                write!(f, "judgments reference unknown record id {id}")
            }
            EvalError::Search(e) => write!(f, "{e}"),
            EvalError::NoJudgments => write!(f, "no queries to evaluate"),
        }
    }
}

impl core::error::Error for EvalError {}

impl From<SearchError> for EvalError {
    fn from(e: SearchError) -> Self {
        EvalError::Search(e)
    }
}

/// Run every query under every scheme at cutoff `k` and aggregate the
/// unweighted mean precision/recall per scheme. Query order follows the
/// judgments file; scheme order follows `schemes`.
pub fn run_comparison(
    index: &Index,
    judgments: &RelevanceJudgments,
    schemes: &[WeightScheme],
    table: &LocationWeightTable,
    k: usize,
    stopwords: &StopWords,
) -> Result<Vec<SchemeResult>, EvalError> {
    if judgments.is_empty() {
        return Err(EvalError::NoJudgments);
    }
    for (_, relevant) in judgments.iter() {
        if let Some(&missing) = relevant.iter().find(|id| index.record(**id).is_none()) {
            return Err(EvalError::UnknownRecord(missing));
        }
    }

    let mut results = Vec::with_capacity(schemes.len());
    for &scheme in schemes {
        let params = SearchParams {
            scheme,
            table: *table,
            k,
            include_zero_scores: false,
        };
        let mut per_query = Vec::with_capacity(judgments.len());
        for (query, relevant) in judgments.iter() {
            let hits = search(index, query, stopwords, &params)?;
            let returned: Vec<RecordId> = hits.iter().map(|h| h.record).collect();
            per_query.push(QueryOutcome {
                query: String::from(query),
                precision: precision(&returned, relevant),
                recall: recall(&returned, relevant),
            });
        }
        let count = per_query.len() as f64;
        results.push(SchemeResult {
            scheme,
            k,
            mean_precision: per_query.iter().map(|q| q.precision).sum::<f64>() / count,
            mean_recall: per_query.iter().map(|q| q.recall).sum::<f64>() / count,
            per_query,
        });
    }
    Ok(results)
}
