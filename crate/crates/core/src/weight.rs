//! Term weighting: the boolean / TF / IDF / TF-IDF baselines and the
//! location-aware variant that multiplies each occurrence count by a
//! per-location weight before the IDF product.
//!
//! IDF uses base-10 logarithms. The base only rescales every weight by the
//! same factor and cosine ranking is invariant under that, so base 10 is
//! chosen to keep hand-checked values simple.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};

use crate::extract::{LocatedTerm, SourceLocation};

/// Occurrence counts of one term broken down by source location.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LocationCounts([u32; 6]);

impl LocationCounts {
    pub fn new() -> Self {
        LocationCounts::default()
    }

    pub fn of(location: SourceLocation, count: u32) -> Self {
        let mut c = LocationCounts::default();
        c.set(location, count);
        c
    }

    pub fn get(&self, location: SourceLocation) -> u32 {
        self.0[location.index()]
    }

    pub fn set(&mut self, location: SourceLocation, count: u32) {
        self.0[location.index()] = count;
    }

    pub fn add(&mut self, location: SourceLocation, count: u32) {
        self.0[location.index()] += count;
    }

    /// Location-blind total, used by the location-free schemes.
    pub fn total(&self) -> u64 {
        self.0.iter().map(|&c| c as u64).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (SourceLocation, u32)> + '_ {
        SourceLocation::ALL
            .into_iter()
            .map(move |l| (l, self.get(l)))
            .filter(|(_, c)| *c > 0)
    }
}

/// Raw per-location counts for every term of one image's metadata.
pub type TermProfile = BTreeMap<String, LocationCounts>;

/// Fold located terms into per-term location counts. Terms with no
/// occurrences never appear in the result.
pub fn aggregate_terms(terms: &[LocatedTerm]) -> TermProfile {
    let mut profile = TermProfile::new();
    for t in terms {
        profile
            .entry(t.term.clone())
            .or_default()
            .add(t.location, 1);
    }
    profile
}

/// Per-location weight multipliers; every location has one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocationWeightTable([f64; 6]);

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WeightTableError {
    UnknownLocation(String),
    BadMultiplier(String),
    DuplicateLocation(String),
    MissingLocation(&'static str),
}

impl core::fmt::Display for WeightTableError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            WeightTableError::UnknownLocation(s) => write!(f, "unknown term location {s:?}"),
            WeightTableError::BadMultiplier(s) => {
                write!(f, "multiplier {s:?} is not a positive number")
            }
            WeightTableError::DuplicateLocation(s) => write!(f, "location {s:?} listed twice"),
            WeightTableError::MissingLocation(s) => write!(f, "no multiplier for location {s}"),
        }
    }
}

impl core::error::Error for WeightTableError {}

impl LocationWeightTable {
    /// The default multipliers: paragraph text is the baseline, headers
    /// and alt are boosted 10x, filename and class label 20x.
    pub fn paper_multiplicative() -> Self {
        LocationWeightTable([1.0, 10.0, 10.0, 10.0, 20.0, 20.0])
    }

    /// Additive reading of the same table: baseline plus the bonus.
    pub fn paper_additive() -> Self {
        LocationWeightTable([1.0, 11.0, 11.0, 11.0, 21.0, 21.0])
    }

    /// All ones; the variable scheme then reduces to plain TF-IDF.
    pub fn flat() -> Self {
        LocationWeightTable([1.0; 6])
    }

    pub fn preset(name: &str) -> Option<Self> {
        match name {
            "paper-multiplicative" => Some(Self::paper_multiplicative()),
            "paper-additive" => Some(Self::paper_additive()),
            "flat" => Some(Self::flat()),
            _ => None,
        }
    }

    /// Parse a custom table: one `location<TAB>multiplier` pair per line,
    /// `#` comments allowed. All six locations must be present and every
    /// multiplier must be a positive finite number.
    pub fn parse(text: &str) -> Result<Self, WeightTableError> {
        let mut values = [None::<f64>; 6];
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (name, mult) = line
                .split_once('\t')
                .or_else(|| line.split_once(' '))
                .ok_or_else(|| WeightTableError::UnknownLocation(String::from(line)))?;
            let name = name.trim();
            let location = SourceLocation::parse(name)
                .ok_or_else(|| WeightTableError::UnknownLocation(String::from(name)))?;
            let mult: f64 = mult
                .trim()
                .parse()
                .map_err(|_| WeightTableError::BadMultiplier(String::from(mult.trim())))?;
            if !(mult.is_finite() && mult > 0.0) {
                return Err(WeightTableError::BadMultiplier(mult.to_string()));
            }
            let slot = &mut values[location.index()];
            if slot.is_some() {
                return Err(WeightTableError::DuplicateLocation(String::from(name)));
            }
            *slot = Some(mult);
        }
        let mut table = [0.0; 6];
        for loc in SourceLocation::ALL {
            table[loc.index()] =
                values[loc.index()].ok_or(WeightTableError::MissingLocation(loc.as_str()))?;
        }
        Ok(LocationWeightTable(table))
    }

    pub fn get(&self, location: SourceLocation) -> f64 {
        self.0[location.index()]
    }
}

impl Default for LocationWeightTable {
    fn default() -> Self {
        Self::paper_multiplicative()
    }
}

/// Binary weight: 1 iff the term occurs at all.
pub fn boolean_weight(tf: u64) -> u64 {
    if tf > 0 {
        1
    } else {
        0
    }
}

/// `log10(n / df)`; 0 when the term is unknown (`df == 0`) so unseen query
/// terms contribute nothing. Callers guarantee `n >= 1`.
pub fn idf_value(n: u64, df: u64) -> f64 {
    debug_assert!(n >= 1, "idf over an empty corpus");
    if df == 0 {
        return 0.0;
    }
    libm::log10(n as f64 / df as f64)
}

/// Classical product weight.
pub fn tf_idf(tf: u64, idf: f64) -> f64 {
    tf as f64 * idf
}

/// Location-weighted variant: occurrence counts are scaled by their
/// location multiplier and summed across locations before the IDF product.
pub fn vtf_idf(counts: &LocationCounts, table: &LocationWeightTable, idf: f64) -> f64 {
    let weighted: f64 = SourceLocation::ALL
        .into_iter()
        .map(|l| counts.get(l) as f64 * table.get(l))
        .sum();
    weighted * idf
}

/// The five selectable weighting schemes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WeightScheme {
    Boolean,
    Tf,
    Idf,
    TfIdf,
    VtfIdf,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownScheme(pub String);

impl core::fmt::Display for UnknownScheme {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(
            f,
            "unknown weighting scheme {:?} (expected one of: boolean, tf, idf, tf-idf, vtf-idf)",
            self.0
        )
    }
}

impl core::error::Error for UnknownScheme {}

impl WeightScheme {
    pub const ALL: [WeightScheme; 5] = [
        WeightScheme::Boolean,
        WeightScheme::Tf,
        WeightScheme::Idf,
        WeightScheme::TfIdf,
        WeightScheme::VtfIdf,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            WeightScheme::Boolean => "boolean",
            WeightScheme::Tf => "tf",
            WeightScheme::Idf => "idf",
            WeightScheme::TfIdf => "tf-idf",
            WeightScheme::VtfIdf => "vtf-idf",
        }
    }

    /// Weight one term of a document under this scheme. Location-blind
    /// schemes sum the counts across locations first.
    pub fn term_weight(
        self,
        counts: &LocationCounts,
        table: &LocationWeightTable,
        idf: f64,
    ) -> f64 {
        let tf = counts.total();
        match self {
            WeightScheme::Boolean => boolean_weight(tf) as f64,
            WeightScheme::Tf => tf as f64,
            WeightScheme::Idf => {
                if tf > 0 {
                    idf
                } else {
                    0.0
                }
            }
            WeightScheme::TfIdf => tf_idf(tf, idf),
            WeightScheme::VtfIdf => vtf_idf(counts, table, idf),
        }
    }
}

impl core::str::FromStr for WeightScheme {
    type Err = UnknownScheme;

    fn from_str(s: &str) -> Result<Self, UnknownScheme> {
        Self::ALL
            .into_iter()
            .find(|w| w.as_str() == s)
            .ok_or_else(|| UnknownScheme(String::from(s)))
    }
}

impl core::fmt::Display for WeightScheme {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.as_str())
    }
}
