//! Locating images in a parsed document and collecting the surrounding
//! metadata terms, each tagged with where it came from.
//!
//! For an image the extractor gathers, in this order: the text of its
//! associated paragraph, the nearest preceding `<h1>`, the nearest
//! preceding `<h2>`, the `alt` attribute, and the filename. The class
//! label assigned during indexing is a sixth source appended later by the
//! indexer, not here.

use alloc::string::String;
use alloc::vec::Vec;

use crate::html::{HtmlTree, NodeId};
use crate::text::{filename_terms, tokenize, StopWords};

/// Where a metadata term was found. Determines its weight multiplier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SourceLocation {
    Paragraph,
    H1,
    H2,
    Alt,
    Filename,
    ClassLabel,
}

impl SourceLocation {
    pub const ALL: [SourceLocation; 6] = [
        SourceLocation::Paragraph,
        SourceLocation::H1,
        SourceLocation::H2,
        SourceLocation::Alt,
        SourceLocation::Filename,
        SourceLocation::ClassLabel,
    ];

    /// Stable name used in files and reports.
    pub fn as_str(self) -> &'static str {
        match self {
            SourceLocation::Paragraph => "P",
            SourceLocation::H1 => "H1",
            SourceLocation::H2 => "H2",
            SourceLocation::Alt => "ALT",
            SourceLocation::Filename => "FILENAME",
            SourceLocation::ClassLabel => "CLASS_LABEL",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|l| l.as_str() == name)
    }

    /// Dense index, 0..6.
    pub fn index(self) -> usize {
        match self {
            SourceLocation::Paragraph => 0,
            SourceLocation::H1 => 1,
            SourceLocation::H2 => 2,
            SourceLocation::Alt => 3,
            SourceLocation::Filename => 4,
            SourceLocation::ClassLabel => 5,
        }
    }
}

impl core::fmt::Display for SourceLocation {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// An `<img>` element worth indexing: non-empty `src`, optional `alt`,
/// and its document position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImageAnchor {
    pub node: NodeId,
    pub src: String,
    pub alt: Option<String>,
}

impl ImageAnchor {
    /// Document position of the `img` element.
    pub fn position(&self) -> usize {
        self.node
    }
}

/// One extracted term and its source location.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocatedTerm {
    pub term: String,
    pub location: SourceLocation,
}

/// All `img` anchors in document order. Images with an empty (or
/// whitespace-only) `src` are dropped.
pub fn locate_images(tree: &HtmlTree) -> Vec<ImageAnchor> {
    tree.elements_by_tag("img")
        .filter_map(|id| {
            let src = tree.attribute(id, "src")?.trim();
            if src.is_empty() {
                return None;
            }
            Some(ImageAnchor {
                node: id,
                src: String::from(src),
                alt: tree.attribute(id, "alt").map(String::from),
            })
        })
        .collect()
}

/// Collect the location-tagged terms for one anchor. Missing sources
/// simply contribute nothing.
pub fn extract_metadata(
    tree: &HtmlTree,
    anchor: &ImageAnchor,
    stopwords: &StopWords,
) -> Vec<LocatedTerm> {
    let mut terms = Vec::new();

    if let Some(p) = associated_paragraph(tree, anchor.node) {
        push_all(
            &mut terms,
            tokenize(&tree.descendant_text(p), stopwords),
            SourceLocation::Paragraph,
        );
    }
    if let Some(h1) = nearest_preceding(tree, "h1", anchor.node) {
        push_all(
            &mut terms,
            tokenize(&tree.descendant_text(h1), stopwords),
            SourceLocation::H1,
        );
    }
    if let Some(h2) = nearest_preceding(tree, "h2", anchor.node) {
        push_all(
            &mut terms,
            tokenize(&tree.descendant_text(h2), stopwords),
            SourceLocation::H2,
        );
    }
    if let Some(alt) = &anchor.alt {
        push_all(&mut terms, tokenize(alt, stopwords), SourceLocation::Alt);
    }
    if let Some(name) = filename_of_src(&anchor.src) {
        push_all(
            &mut terms,
            filename_terms(name, stopwords),
            SourceLocation::Filename,
        );
    }

    terms
}

fn push_all(out: &mut Vec<LocatedTerm>, terms: Vec<String>, location: SourceLocation) {
    out.extend(terms.into_iter().map(|term| LocatedTerm { term, location }));
}

/// The paragraph whose text describes the image, chosen by a fixed
/// cascade: ancestor `<p>`; else nearest following `<p>` sibling under the
/// same parent; else nearest preceding `<p>` anywhere; else none.
fn associated_paragraph(tree: &HtmlTree, img: NodeId) -> Option<NodeId> {
    // 1. innermost ancestor <p>
    let mut cursor = tree.parent(img);
    while let Some(id) = cursor {
        if tree.tag(id) == Some("p") {
            return Some(id);
        }
        cursor = tree.parent(id);
    }
    // 2. nearest following <p> sibling
    if let Some(parent) = tree.parent(img) {
        let siblings = tree.children(parent);
        if let Some(at) = siblings.iter().position(|&id| id == img) {
            for &sib in &siblings[at + 1..] {
                if tree.tag(sib) == Some("p") {
                    return Some(sib);
                }
            }
        }
    }
    // 3. nearest preceding <p> in document order
    (0..img).rev().find(|&id| tree.tag(id) == Some("p"))
}

/// The `tag` element with the greatest document position before `anchor`.
fn nearest_preceding(tree: &HtmlTree, tag: &str, anchor: NodeId) -> Option<NodeId> {
    (0..anchor).rev().find(|&id| tree.tag(id) == Some(tag))
}

/// The last path segment of an image reference, with any query string or
/// fragment stripped. `None` when the reference ends in a separator.
pub fn filename_of_src(src: &str) -> Option<&str> {
    let end = src.find(['?', '#']).unwrap_or(src.len());
    let path = &src[..end];
    let name = match path.rfind('/') {
        Some(slash) => &path[slash + 1..],
        None => path,
    };
    if name.is_empty() {
        None
    } else {
        Some(name)
    }
}
