//! Tolerant HTML parsing into a positional node tree.
//!
//! The parser is total: any byte sequence yields a tree (invalid UTF-8 is
//! replaced, never fatal). It implements the small subset the extractor
//! depends on and recovers from the usual breakage:
//!
//! * tag and attribute names are lowercased; attribute values may be
//!   double-quoted, single-quoted, or unquoted
//! * void elements (`img`, `br`, ...) and `<x/>` never take children
//! * `<script>` and `<style>` bodies and `<!-- comments -->` produce no
//!   extractable text
//! * unclosed elements are auto-closed when their parent closes (or at end
//!   of input); stray close tags are ignored
//!
//! Every node carries a position that strictly increases in document order,
//! which the extractor uses for "nearest preceding" lookups.

use alloc::borrow::Cow;
use alloc::string::String;
use alloc::vec::Vec;

/// Index of a node inside its [`HtmlTree`]; doubles as the document
/// position, since nodes are allocated in document order.
pub type NodeId = usize;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NodeKind {
    /// Synthetic tree root.
    Document,
    Element {
        tag: String,
        /// Attributes in source order; on duplicate names the first wins.
        attributes: Vec<(String, String)>,
    },
    Text(String),
    Comment(String),
}

#[derive(Debug, Clone)]
pub struct HtmlNode {
    pub kind: NodeKind,
    pub parent: Option<NodeId>,
    pub children: Vec<NodeId>,
}

/// Parsed document: an arena of nodes rooted at [`HtmlTree::root`].
#[derive(Debug, Clone)]
pub struct HtmlTree {
    nodes: Vec<HtmlNode>,
}

impl HtmlTree {
    pub fn root(&self) -> NodeId {
        0
    }

    pub fn node(&self, id: NodeId) -> &HtmlNode {
        &self.nodes[id]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn parent(&self, id: NodeId) -> Option<NodeId> {
        self.nodes[id].parent
    }

    pub fn children(&self, id: NodeId) -> &[NodeId] {
        &self.nodes[id].children
    }

    /// Element tag name, `None` for non-elements.
    pub fn tag(&self, id: NodeId) -> Option<&str> {
        match &self.nodes[id].kind {
            NodeKind::Element { tag, .. } => Some(tag),
            _ => None,
        }
    }

    /// First attribute with the given (lowercase) name.
    pub fn attribute(&self, id: NodeId, name: &str) -> Option<&str> {
        match &self.nodes[id].kind {
            NodeKind::Element { attributes, .. } => attributes
                .iter()
                .find(|(n, _)| n == name)
                .map(|(_, v)| v.as_str()),
            _ => None,
        }
    }

    /// All element ids with the given tag, in document order.
    pub fn elements_by_tag<'a>(&'a self, tag: &'a str) -> impl Iterator<Item = NodeId> + 'a {
        (0..self.nodes.len()).filter(move |&id| self.tag(id) == Some(tag))
    }

    /// Concatenated text of all descendant text nodes, in document order.
    /// Comments contribute nothing; script/style bodies are not in the tree.
    pub fn descendant_text(&self, id: NodeId) -> String {
        let mut out = String::new();
        self.collect_text(id, &mut out);
        out
    }

    fn collect_text(&self, id: NodeId, out: &mut String) {
        match &self.nodes[id].kind {
            NodeKind::Text(t) => out.push_str(t),
            NodeKind::Comment(_) => {}
            _ => {
                for &child in &self.nodes[id].children {
                    self.collect_text(child, out);
                }
            }
        }
    }
}

/// Elements that never take children.
const VOID_ELEMENTS: &[&str] = &[
    "area", "base", "br", "col", "embed", "hr", "img", "input", "link", "meta", "param", "source",
    "track", "wbr",
];

/// Parse HTML bytes into a tree. Total: never fails, never panics; worst
/// case is a root holding a single text child.
pub fn parse_html(bytes: &[u8]) -> HtmlTree {
    let text: Cow<'_, str> = String::from_utf8_lossy(bytes);
    Parser::new(&text).run()
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    nodes: Vec<HtmlNode>,
    /// Open element chain; index 0 is the document root.
    stack: Vec<NodeId>,
    text_buf: String,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        Parser {
            src,
            pos: 0,
            nodes: alloc::vec![HtmlNode {
                kind: NodeKind::Document,
                parent: None,
                children: Vec::new(),
            }],
            stack: alloc::vec![0],
            text_buf: String::new(),
        }
    }

    fn bytes(&self) -> &'a [u8] {
        self.src.as_bytes()
    }

    fn run(mut self) -> HtmlTree {
        while self.pos < self.src.len() {
            match self.find(b'<', self.pos) {
                None => {
                    let rest = &self.src[self.pos..];
                    self.text_buf.push_str(rest);
                    self.pos = self.src.len();
                }
                Some(lt) => {
                    if lt > self.pos {
                        let chunk = &self.src[self.pos..lt];
                        self.text_buf.push_str(chunk);
                    }
                    self.pos = lt;
                    self.markup();
                }
            }
        }
        self.flush_text();
        HtmlTree { nodes: self.nodes }
    }

    /// Handle the construct starting at `self.pos` (which is `<`).
    fn markup(&mut self) {
        let bytes = self.bytes();
        let after = self.pos + 1;
        match bytes.get(after) {
            Some(b'!') if bytes[after..].starts_with(b"!--") => {
                self.flush_text();
                self.comment(after + 3);
            }
            Some(b'!') | Some(b'?') => {
                // doctype / processing instruction: skip to '>'
                self.flush_text();
                self.pos = match self.find(b'>', after) {
                    Some(gt) => gt + 1,
                    None => self.src.len(),
                };
            }
            Some(b'/') => {
                self.flush_text();
                self.close_tag(after + 1);
            }
            Some(c) if c.is_ascii_alphabetic() => {
                self.flush_text();
                self.open_tag(after);
            }
            _ => {
                // bare '<' is literal text
                self.text_buf.push('<');
                self.pos = after;
            }
        }
    }

    fn comment(&mut self, body_start: usize) {
        let (body, end) = match find_sub(self.bytes(), b"-->", body_start) {
            Some(i) => (&self.src[body_start..i], i + 3),
            None => (&self.src[body_start..], self.src.len()),
        };
        let node = self.push_node(NodeKind::Comment(String::from(body)));
        let _ = node;
        self.pos = end;
    }

    fn close_tag(&mut self, name_start: usize) {
        let name = self.read_name(name_start);
        let name_end = name_start + name.len();
        self.pos = match self.find(b'>', name_end) {
            Some(gt) => gt + 1,
            None => self.src.len(),
        };
        if name.is_empty() {
            return;
        }
        // close the innermost matching open element, auto-closing anything
        // opened inside it; ignore the tag if nothing matches
        if let Some(depth) = self
            .stack
            .iter()
            .rposition(|&id| self.tag_of(id) == Some(name.as_str()))
        {
            if depth > 0 {
                self.stack.truncate(depth);
            }
        }
    }

    fn open_tag(&mut self, name_start: usize) {
        let name = self.read_name(name_start);
        self.pos = name_start + name.len();
        let (attributes, self_closing) = self.read_attributes();

        let node = self.push_node(NodeKind::Element {
            tag: name.clone(),
            attributes,
        });

        if self_closing || VOID_ELEMENTS.contains(&name.as_str()) {
            return;
        }
        if name == "script" || name == "style" {
            self.skip_raw_text(&name);
            return;
        }
        self.stack.push(node);
    }

    /// Tag names: leading ASCII letter then letters/digits/'-'/':'.
    fn read_name(&self, start: usize) -> String {
        let bytes = self.bytes();
        let mut end = start;
        while end < bytes.len() {
            let b = bytes[end];
            if b.is_ascii_alphanumeric() || b == b'-' || b == b':' {
                end += 1;
            } else {
                break;
            }
        }
        self.src[start..end].to_ascii_lowercase()
    }

    /// Read attributes up to and including the closing `>`. Returns the
    /// attribute list and whether the tag ended in `/>`.
    fn read_attributes(&mut self) -> (Vec<(String, String)>, bool) {
        let bytes = self.bytes();
        let mut attrs: Vec<(String, String)> = Vec::new();
        loop {
            while self.pos < bytes.len() && bytes[self.pos].is_ascii_whitespace() {
                self.pos += 1;
            }
            match bytes.get(self.pos) {
                None => return (attrs, false),
                Some(b'>') => {
                    self.pos += 1;
                    return (attrs, false);
                }
                Some(b'/') if bytes.get(self.pos + 1) == Some(&b'>') => {
                    self.pos += 2;
                    return (attrs, true);
                }
                Some(b'/') => {
                    self.pos += 1;
                    continue;
                }
                _ => {}
            }

            let name_start = self.pos;
            while self.pos < bytes.len() {
                let b = bytes[self.pos];
                if b.is_ascii_whitespace() || b == b'=' || b == b'>' || b == b'/' {
                    break;
                }
                self.pos += 1;
            }
            let name = self.src[name_start..self.pos].to_ascii_lowercase();

            while self.pos < bytes.len() && bytes[self.pos].is_ascii_whitespace() {
                self.pos += 1;
            }
            let value = if bytes.get(self.pos) == Some(&b'=') {
                self.pos += 1;
                while self.pos < bytes.len() && bytes[self.pos].is_ascii_whitespace() {
                    self.pos += 1;
                }
                self.read_attr_value()
            } else {
                String::new()
            };

            if !name.is_empty() && !attrs.iter().any(|(n, _)| *n == name) {
                attrs.push((name, decode_entities(&value)));
            }
        }
    }

    fn read_attr_value(&mut self) -> String {
        let bytes = self.bytes();
        match bytes.get(self.pos) {
            Some(&q) if q == b'"' || q == b'\'' => {
                let start = self.pos + 1;
                match self.find(q, start) {
                    Some(end) => {
                        self.pos = end + 1;
                        String::from(&self.src[start..end])
                    }
                    None => {
                        self.pos = self.src.len();
                        String::from(&self.src[start..])
                    }
                }
            }
            _ => {
                // unquoted: up to whitespace, '>', or a closing "/>"
                let start = self.pos;
                while self.pos < bytes.len() {
                    let b = bytes[self.pos];
                    if b.is_ascii_whitespace() || b == b'>' {
                        break;
                    }
                    if b == b'/' && bytes.get(self.pos + 1) == Some(&b'>') {
                        break;
                    }
                    self.pos += 1;
                }
                String::from(&self.src[start..self.pos])
            }
        }
    }

    /// Discard everything up to the matching `</script>` / `</style>`.
    fn skip_raw_text(&mut self, tag: &str) {
        let bytes = self.bytes();
        let mut search = self.pos;
        loop {
            let Some(lt) = find_close_ci(bytes, tag.as_bytes(), search) else {
                self.pos = self.src.len();
                return;
            };
            // require the name to end at a delimiter so "</scriptx" is skipped
            let name_end = lt + 2 + tag.len();
            match bytes.get(name_end) {
                Some(b) if b.is_ascii_alphanumeric() => {
                    search = name_end;
                    continue;
                }
                _ => {
                    self.pos = match self.find(b'>', name_end) {
                        Some(gt) => gt + 1,
                        None => self.src.len(),
                    };
                    return;
                }
            }
        }
    }

    fn flush_text(&mut self) {
        if self.text_buf.is_empty() {
            return;
        }
        let text = decode_entities(&core::mem::take(&mut self.text_buf));
        self.push_node(NodeKind::Text(text));
    }

    fn push_node(&mut self, kind: NodeKind) -> NodeId {
        let parent = *self.stack.last().unwrap_or(&0);
        let id = self.nodes.len();
        self.nodes.push(HtmlNode {
            kind,
            parent: Some(parent),
            children: Vec::new(),
        });
        self.nodes[parent].children.push(id);
        id
    }

    fn tag_of(&self, id: NodeId) -> Option<&str> {
        match &self.nodes[id].kind {
            NodeKind::Element { tag, .. } => Some(tag),
            _ => None,
        }
    }

    fn find(&self, needle: u8, from: usize) -> Option<usize> {
        self.bytes()[from.min(self.src.len())..]
            .iter()
            .position(|&b| b == needle)
            .map(|i| from + i)
    }
}

fn find_sub(haystack: &[u8], needle: &[u8], from: usize) -> Option<usize> {
    if from >= haystack.len() {
        return None;
    }
    haystack[from..]
        .windows(needle.len())
        .position(|w| w == needle)
        .map(|i| from + i)
}

/// Position of the next `</name` (ASCII case-insensitive) at or after `from`.
fn find_close_ci(haystack: &[u8], name: &[u8], from: usize) -> Option<usize> {
    let mut i = from;
    while i + 2 + name.len() <= haystack.len() {
        if haystack[i] == b'<'
            && haystack[i + 1] == b'/'
            && haystack[i + 2..i + 2 + name.len()].eq_ignore_ascii_case(name)
        {
            return Some(i);
        }
        i += 1;
    }
    None
}

/// Decode the predefined named entities and numeric character references.
/// Anything unrecognized is kept verbatim.
fn decode_entities(text: &str) -> String {
    if !text.contains('&') {
        return String::from(text);
    }
    let mut out = String::with_capacity(text.len());
    let mut rest = text;
    while let Some(amp) = rest.find('&') {
        out.push_str(&rest[..amp]);
        let entity = &rest[amp..];
        let semi = match entity.find(';') {
            // entities are short; a distant ';' means this '&' is literal
            Some(s) if s <= 10 => s,
            _ => {
                out.push('&');
                rest = &entity[1..];
                continue;
            }
        };
        let name = &entity[1..semi];
        let decoded = match name {
            "amp" => Some('&'),
            "lt" => Some('<'),
            "gt" => Some('>'),
            "quot" => Some('"'),
            "apos" => Some('\''),
            "nbsp" => Some(' '),
            _ => parse_numeric_entity(name),
        };
        match decoded {
            Some(c) => {
                out.push(c);
                rest = &entity[semi + 1..];
            }
            None => {
                out.push('&');
                rest = &entity[1..];
            }
        }
    }
    out.push_str(rest);
    out
}

fn parse_numeric_entity(name: &str) -> Option<char> {
    let digits = name.strip_prefix('#')?;
    let code = if let Some(hex) = digits
        .strip_prefix('x')
        .or_else(|| digits.strip_prefix('X'))
    {
        u32::from_str_radix(hex, 16).ok()?
    } else {
        digits.parse::<u32>().ok()?
    };
    char::from_u32(code)
}
