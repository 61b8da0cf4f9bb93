//! The in-memory image index: records, the term dictionary, document
//! frequencies, and on-demand materialization of weighted sparse vectors.
//!
//! Records store raw per-location counts rather than final weights; IDF
//! depends on the whole corpus, so weights are computed against the
//! current statistics whenever a vector is materialized. The index is a
//! plain value: share `&Index` across readers, take `&mut` to write.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use crate::color::ColorHistogram;
use crate::weight::{idf_value, LocationCounts, LocationWeightTable, TermProfile, WeightScheme};

/// Dense id of an interned term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TermId(pub u32);

/// Unique id of an indexed image.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RecordId(pub u64);

impl core::fmt::Display for RecordId {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Bijection between term strings and dense ids, assigned first-seen.
#[derive(Debug, Clone, Default)]
pub struct TermDictionary {
    terms: Vec<String>,
    ids: BTreeMap<String, TermId>,
}

impl TermDictionary {
    pub fn new() -> Self {
        TermDictionary::default()
    }

    pub fn intern(&mut self, term: &str) -> TermId {
        if let Some(&id) = self.ids.get(term) {
            return id;
        }
        let id = TermId(self.terms.len() as u32);
        self.terms.push(String::from(term));
        self.ids.insert(String::from(term), id);
        id
    }

    pub fn get(&self, term: &str) -> Option<TermId> {
        self.ids.get(term).copied()
    }

    pub fn term(&self, id: TermId) -> Option<&str> {
        self.terms.get(id.0 as usize).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// `(id, term)` pairs in id order.
    pub fn iter(&self) -> impl Iterator<Item = (TermId, &str)> {
        self.terms
            .iter()
            .enumerate()
            .map(|(i, t)| (TermId(i as u32), t.as_str()))
    }

    /// Rebuild from persisted `(id, term)` rows; ids must be exactly
    /// `0..rows.len()` in order and terms must be distinct.
    pub fn from_rows(rows: Vec<(u32, String)>) -> Result<Self, IndexError> {
        let mut dict = TermDictionary::new();
        for (expect, (id, term)) in rows.into_iter().enumerate() {
            if id as usize != expect || dict.ids.contains_key(&term) {
                return Err(IndexError::InvalidDictionary);
            }
            dict.ids.insert(term.clone(), TermId(id));
            dict.terms.push(term);
        }
        Ok(dict)
    }
}

/// One indexed image.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageRecord {
    pub id: RecordId,
    pub document_uri: String,
    pub image_uri: String,
    pub filename: String,
    pub class_label: String,
    pub histogram: ColorHistogram,
    /// Raw per-location counts per term, including the class-label term.
    pub profile: BTreeMap<TermId, LocationCounts>,
}

/// Immutable `(n, df)` snapshot; later writes to the index do not show
/// through.
#[derive(Debug, Clone, Default)]
pub struct CorpusStats {
    n: u64,
    df: BTreeMap<TermId, u64>,
}

impl CorpusStats {
    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn df(&self, term: TermId) -> u64 {
        self.df.get(&term).copied().unwrap_or(0)
    }

    /// Base-10 IDF of a term; 0 for unknown terms.
    pub fn idf(&self, term: TermId) -> f64 {
        idf_value(self.n, self.df(term))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IndexError {
    DuplicateId(RecordId),
    UnknownRecord(RecordId),
    InvalidDictionary,
    /// Persisted statistics disagree with the stored records.
    InconsistentStats,
}

impl core::fmt::Display for IndexError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            IndexError::DuplicateId(id) => write!(f, "record id {id} already indexed"),
            IndexError::UnknownRecord(id) => write!(f, "no record with id {id}"),
            IndexError::InvalidDictionary => {
                write!(f, "term dictionary rows are not a dense bijection")
            }
            IndexError::InconsistentStats => {
                write!(f, "document frequencies disagree with stored records")
            }
        }
    }
}

impl core::error::Error for IndexError {}

/// Term-id -> weight map; zero weights are never stored.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SparseVector {
    entries: BTreeMap<TermId, f64>,
}

impl SparseVector {
    pub fn new() -> Self {
        SparseVector::default()
    }

    /// Insert a weight, dropping zeros.
    pub fn insert(&mut self, term: TermId, weight: f64) {
        if weight != 0.0 {
            self.entries.insert(term, weight);
        }
    }

    pub fn get(&self, term: TermId) -> f64 {
        self.entries.get(&term).copied().unwrap_or(0.0)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (TermId, f64)> + '_ {
        self.entries.iter().map(|(&t, &w)| (t, w))
    }

    pub fn dot(&self, other: &SparseVector) -> f64 {
        // iterate the smaller side
        let (small, large) = if self.len() <= other.len() {
            (self, other)
        } else {
            (other, self)
        };
        small.iter().map(|(t, w)| w * large.get(t)).sum()
    }

    pub fn norm(&self) -> f64 {
        libm::sqrt(self.entries.values().map(|w| w * w).sum())
    }

    /// Scale every entry; useful for invariance checks.
    pub fn scaled(&self, factor: f64) -> SparseVector {
        let mut out = SparseVector::new();
        for (t, w) in self.iter() {
            out.insert(t, w * factor);
        }
        out
    }
}

impl FromIterator<(TermId, f64)> for SparseVector {
    fn from_iter<I: IntoIterator<Item = (TermId, f64)>>(iter: I) -> Self {
        let mut v = SparseVector::new();
        for (t, w) in iter {
            v.insert(t, w);
        }
        v
    }
}

/// The record store plus derived statistics.
#[derive(Debug, Clone, Default)]
pub struct Index {
    dict: TermDictionary,
    records: BTreeMap<RecordId, ImageRecord>,
    df: BTreeMap<TermId, u64>,
}

impl Index {
    pub fn new() -> Self {
        Index::default()
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn dictionary(&self) -> &TermDictionary {
        &self.dict
    }

    /// Intern a string-keyed profile against this index's dictionary.
    /// Entries with zero total count are dropped.
    pub fn intern_profile(&mut self, profile: &TermProfile) -> BTreeMap<TermId, LocationCounts> {
        profile
            .iter()
            .filter(|(_, counts)| !counts.is_empty())
            .map(|(term, counts)| (self.dict.intern(term), *counts))
            .collect()
    }

    /// Store a record. Each distinct term in its profile bumps that term's
    /// document frequency by one, regardless of count or location.
    pub fn add_record(&mut self, record: ImageRecord) -> Result<(), IndexError> {
        if self.records.contains_key(&record.id) {
            return Err(IndexError::DuplicateId(record.id));
        }
        for (&term, counts) in &record.profile {
            debug_assert!(!counts.is_empty());
            *self.df.entry(term).or_insert(0) += 1;
        }
        self.records.insert(record.id, record);
        Ok(())
    }

    pub fn record(&self, id: RecordId) -> Option<&ImageRecord> {
        self.records.get(&id)
    }

    /// Records in id order.
    pub fn records(&self) -> impl Iterator<Item = &ImageRecord> {
        self.records.values()
    }

    pub fn record_ids(&self) -> impl Iterator<Item = RecordId> + '_ {
        self.records.keys().copied()
    }

    /// Immutable copy of the current `(n, df)` statistics.
    pub fn corpus_snapshot(&self) -> CorpusStats {
        CorpusStats {
            n: self.records.len() as u64,
            df: self.df.clone(),
        }
    }

    pub fn df(&self, term: TermId) -> u64 {
        self.df.get(&term).copied().unwrap_or(0)
    }

    /// Weighted sparse vector of one record under the given scheme,
    /// against the current corpus statistics. Zero weights are omitted.
    pub fn materialize_vector(
        &self,
        id: RecordId,
        scheme: WeightScheme,
        table: &LocationWeightTable,
    ) -> Result<SparseVector, IndexError> {
        let record = self.records.get(&id).ok_or(IndexError::UnknownRecord(id))?;
        Ok(self.vector_of(record, scheme, table))
    }

    pub(crate) fn vector_of(
        &self,
        record: &ImageRecord,
        scheme: WeightScheme,
        table: &LocationWeightTable,
    ) -> SparseVector {
        let n = self.records.len() as u64;
        let mut vector = SparseVector::new();
        for (&term, counts) in &record.profile {
            let idf = idf_value(n, self.df(term));
            vector.insert(term, scheme.term_weight(counts, table, idf));
        }
        vector
    }

    /// Rebuild from persisted parts, recomputing document frequencies from
    /// the records and checking them against the stored ones.
    pub fn from_parts(
        dict: TermDictionary,
        records: Vec<ImageRecord>,
        stored_df: BTreeMap<TermId, u64>,
    ) -> Result<Self, IndexError> {
        let mut index = Index {
            dict,
            records: BTreeMap::new(),
            df: BTreeMap::new(),
        };
        for record in records {
            index.add_record(record)?;
        }
        if index.df != stored_df {
            return Err(IndexError::InconsistentStats);
        }
        Ok(index)
    }
}
