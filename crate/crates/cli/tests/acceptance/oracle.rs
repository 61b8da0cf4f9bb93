//! Brute-force reference implementation used to check the end-to-end
//! pipeline. Everything here is written from scratch against the file
//! formats and the formulas alone; it deliberately shares no code with
//! the crates under test.
//!
//! It handles exactly the constructs the fixture corpus uses: lowercase
//! tags, comments, one script/style block level, quoted/unquoted img
//! attributes, and well-formed or trailing-unclosed paragraphs.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

const LOCATIONS: usize = 6; // P, H1, H2, ALT, FILENAME, CLASS_LABEL
const MULTIPLIERS: [f64; LOCATIONS] = [1.0, 10.0, 10.0, 10.0, 20.0, 20.0];
const P: usize = 0;
const H1: usize = 1;
const H2: usize = 2;
const ALT: usize = 3;
const FILENAME: usize = 4;
const CLASS_LABEL: usize = 5;

pub struct OracleImage {
    pub id: u64,
    pub filename: String,
    pub class_label: String,
    counts: BTreeMap<String, [u32; LOCATIONS]>,
}

pub struct OracleCorpus {
    pub images: Vec<OracleImage>,
    df: BTreeMap<String, u64>,
    stopwords: Vec<String>,
}

// --- text ------------------------------------------------------------------

fn load_stopwords(path: &Path) -> Vec<String> {
    fs::read_to_string(path)
        .expect("stop-word list")
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| l.to_ascii_lowercase())
        .collect()
}

fn decode_entities(text: &str) -> String {
    text.replace("&amp;", "&")
        .replace("&lt;", "<")
        .replace("&gt;", ">")
        .replace("&quot;", "\"")
        .replace("&apos;", "'")
}

fn tokens(text: &str, stopwords: &[String]) -> Vec<String> {
    let mut out = Vec::new();
    let mut current = String::new();
    for c in text.chars() {
        if c.is_ascii_alphanumeric() {
            current.push(c.to_ascii_lowercase());
        } else if !current.is_empty() {
            out.push(std::mem::take(&mut current));
        }
    }
    if !current.is_empty() {
        out.push(current);
    }
    out.retain(|t| !stopwords.iter().any(|s| s == t));
    out
}

fn filename_tokens(filename: &str, stopwords: &[String]) -> Vec<String> {
    let mut toks = tokens(filename, &[]);
    if let Some(last) = toks.last() {
        if ["jpg", "jpeg", "png", "gif", "bmp", "ppm"].contains(&last.as_str()) {
            toks.pop();
        }
    }
    toks.retain(|t| !stopwords.iter().any(|s| s == t));
    toks
}

fn strip_tags(html: &str) -> String {
    let mut out = String::new();
    let mut in_tag = false;
    for c in html.chars() {
        match c {
            '<' => in_tag = true,
            '>' => in_tag = false,
            _ if !in_tag => out.push(c),
            _ => {}
        }
    }
    out
}

/// Remove every span from `open` through `close` (inclusive).
fn remove_spans(html: &str, open: &str, close: &str) -> String {
    let mut out = String::new();
    let mut rest = html;
    while let Some(start) = rest.find(open) {
        out.push_str(&rest[..start]);
        match rest[start..].find(close) {
            Some(offset) => rest = &rest[start + offset + close.len()..],
            None => return out,
        }
    }
    out.push_str(rest);
    out
}

// --- naive HTML scanning ----------------------------------------------------

struct RawImg {
    pos: usize,
    src: String,
    alt: String,
}

struct Span {
    start: usize,
    /// End of the raw content in the source, so containment checks are
    /// exact even though `text` has tags removed.
    end: usize,
    text: String,
}

fn attr_value(tag: &str, name: &str) -> Option<String> {
    let marker = format!("{name}=");
    let at = tag.find(&marker)? + marker.len();
    let rest = &tag[at..];
    let mut chars = rest.chars();
    match chars.next()? {
        q @ ('"' | '\'') => {
            let body = &rest[1..];
            Some(body[..body.find(q)?].to_string())
        }
        _ => {
            let end = rest.find([' ', '\t', '\n', '>']).unwrap_or(rest.len());
            Some(rest[..end].trim_end_matches('/').to_string())
        }
    }
}

fn scan_imgs(html: &str) -> Vec<RawImg> {
    let mut imgs = Vec::new();
    let mut from = 0;
    while let Some(offset) = html[from..].find("<img") {
        let pos = from + offset;
        let end = html[pos..].find('>').map(|i| pos + i).unwrap_or(html.len());
        let tag = &html[pos..end];
        imgs.push(RawImg {
            pos,
            src: attr_value(tag, "src").unwrap_or_default(),
            alt: attr_value(tag, "alt").unwrap_or_default(),
        });
        from = end;
    }
    imgs
}

/// `<p>` spans: content from after the opening tag to the first `</p>`,
/// next `<p`, `</body>`, or end of input.
fn scan_paragraphs(html: &str) -> Vec<Span> {
    let mut spans = Vec::new();
    let mut from = 0;
    while let Some(offset) = html[from..].find("<p>") {
        let start = from + offset + 3;
        let rest = &html[start..];
        let mut end = rest.len();
        for stop in ["</p>", "<p>", "</body>"] {
            if let Some(i) = rest.find(stop) {
                end = end.min(i);
            }
        }
        spans.push(Span {
            start,
            end: start + end,
            text: decode_entities(&strip_tags(&rest[..end])),
        });
        from = start + end;
    }
    spans
}

fn scan_headers(html: &str, tag: &str) -> Vec<Span> {
    let open = format!("<{tag}>");
    let close = format!("</{tag}>");
    let mut spans = Vec::new();
    let mut from = 0;
    while let Some(offset) = html[from..].find(&open) {
        let start = from + offset + open.len();
        let rest = &html[start..];
        let end = rest.find(&close).unwrap_or(rest.len());
        spans.push(Span {
            start,
            end: start + end,
            text: decode_entities(&strip_tags(&rest[..end])),
        });
        from = start + end;
    }
    spans
}

// --- naive PPM + histogram + classification ---------------------------------

fn decode_ppm(bytes: &[u8]) -> (usize, usize, Vec<u8>) {
    // header: P6, width, height, 255, single whitespace, payload
    let mut fields = Vec::new();
    let mut pos = 0;
    while fields.len() < 4 {
        while bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if bytes[pos] == b'#' {
            while bytes[pos] != b'\n' {
                pos += 1;
            }
            continue;
        }
        let start = pos;
        while !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        fields.push(std::str::from_utf8(&bytes[start..pos]).unwrap().to_string());
    }
    assert_eq!(fields[0], "P6");
    assert_eq!(fields[3], "255");
    let (w, h) = (fields[1].parse().unwrap(), fields[2].parse().unwrap());
    (w, h, bytes[pos + 1..pos + 1 + w * h * 3].to_vec())
}

fn bin_of(v: u8) -> usize {
    if v <= 63 {
        0
    } else if v <= 127 {
        1
    } else if v <= 191 {
        2
    } else {
        3
    }
}

fn histogram(payload: &[u8]) -> [f64; 12] {
    let mut h = [0.0; 12];
    for px in payload.chunks(3) {
        h[bin_of(px[0])] += 1.0;
        h[4 + bin_of(px[1])] += 1.0;
        h[8 + bin_of(px[2])] += 1.0;
    }
    h
}

fn distance(a: &[f64; 12], b: &[f64; 12]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

fn classify(h: &[f64; 12], refset_root: &Path) -> String {
    let mut class_dirs: Vec<_> = fs::read_dir(refset_root)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.is_dir())
        .collect();
    class_dirs.sort();

    let mut best: Option<(String, f64)> = None;
    for dir in class_dirs {
        let label = dir.file_name().unwrap().to_string_lossy().into_owned();
        let mut files: Vec<_> = fs::read_dir(&dir)
            .unwrap()
            .map(|e| e.unwrap().path())
            .collect();
        files.sort();
        let mut total = 0.0;
        let mut count = 0usize;
        for file in files {
            let (_, _, payload) = decode_ppm(&fs::read(file).unwrap());
            total += distance(h, &histogram(&payload));
            count += 1;
        }
        let avg = total / count as f64;
        let better = match &best {
            Some((_, b)) => avg < *b,
            None => true,
        };
        if better {
            best = Some((label, avg));
        }
    }
    best.unwrap().0
}

// --- corpus construction -----------------------------------------------------

pub fn build_corpus(docs_dir: &Path, refset_root: &Path, stopword_file: &Path) -> OracleCorpus {
    let stopwords = load_stopwords(stopword_file);

    let mut doc_paths: Vec<_> = fs::read_dir(docs_dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    doc_paths.sort();

    let mut images = Vec::new();
    let mut next_id = 1u64;
    for doc_path in &doc_paths {
        let raw = fs::read_to_string(doc_path).unwrap();
        let cleaned = remove_spans(&raw, "<!--", "-->");
        let cleaned = remove_spans(&cleaned, "<script", "</script>");
        let cleaned = remove_spans(&cleaned, "<style", "</style>");

        let paragraphs = scan_paragraphs(&cleaned);
        let h1s = scan_headers(&cleaned, "h1");
        let h2s = scan_headers(&cleaned, "h2");

        for img in scan_imgs(&cleaned) {
            if img.src.trim().is_empty() {
                continue;
            }
            let mut counts: BTreeMap<String, [u32; LOCATIONS]> = BTreeMap::new();
            let mut bump = |term: String, loc: usize| {
                counts.entry(term).or_insert([0; LOCATIONS])[loc] += 1;
            };

            // paragraph cascade: containing, else next, else previous
            let containing = paragraphs
                .iter()
                .find(|p| img.pos >= p.start && img.pos < p.end);
            let chosen = containing
                .or_else(|| paragraphs.iter().find(|p| p.start > img.pos))
                .or_else(|| paragraphs.iter().rev().find(|p| p.start < img.pos));
            if let Some(p) = chosen {
                for t in tokens(&p.text, &stopwords) {
                    bump(t, P);
                }
            }
            if let Some(h) = h1s.iter().rev().find(|h| h.start < img.pos) {
                for t in tokens(&h.text, &stopwords) {
                    bump(t, H1);
                }
            }
            if let Some(h) = h2s.iter().rev().find(|h| h.start < img.pos) {
                for t in tokens(&h.text, &stopwords) {
                    bump(t, H2);
                }
            }
            for t in tokens(&img.alt, &stopwords) {
                bump(t, ALT);
            }
            let filename = img.src.rsplit('/').next().unwrap().to_string();
            for t in filename_tokens(&filename, &stopwords) {
                bump(t, FILENAME);
            }

            let image_bytes = fs::read(doc_path.parent().unwrap().join(&img.src)).unwrap();
            let (_, _, payload) = decode_ppm(&image_bytes);
            let class_label = classify(&histogram(&payload), refset_root);
            bump(class_label.to_ascii_lowercase(), CLASS_LABEL);

            images.push(OracleImage {
                id: next_id,
                filename,
                class_label,
                counts,
            });
            next_id += 1;
        }
    }

    let mut df = BTreeMap::new();
    for image in &images {
        for term in image.counts.keys() {
            *df.entry(term.clone()).or_insert(0u64) += 1;
        }
    }
    OracleCorpus {
        images,
        df,
        stopwords,
    }
}

// --- weighting + ranking ------------------------------------------------------

impl OracleCorpus {
    fn idf(&self, term: &str) -> f64 {
        match self.df.get(term) {
            None | Some(0) => 0.0,
            Some(&df) => (self.images.len() as f64 / df as f64).log10(),
        }
    }

    fn document_vector(&self, image: &OracleImage) -> BTreeMap<String, f64> {
        let mut vector = BTreeMap::new();
        for (term, counts) in &image.counts {
            let weighted: f64 = counts
                .iter()
                .zip(MULTIPLIERS)
                .map(|(&c, m)| c as f64 * m)
                .sum();
            let w = weighted * self.idf(term);
            if w != 0.0 {
                vector.insert(term.clone(), w);
            }
        }
        vector
    }

    fn query_vector(&self, query: &str) -> BTreeMap<String, f64> {
        let mut tf: BTreeMap<String, u64> = BTreeMap::new();
        for t in tokens(query, &self.stopwords) {
            *tf.entry(t).or_insert(0) += 1;
        }
        let mut vector = BTreeMap::new();
        for (term, count) in tf {
            let w = count as f64 * self.idf(&term);
            if w != 0.0 {
                vector.insert(term, w);
            }
        }
        vector
    }

    /// Ranked `(id, score)` under vtf-idf documents / tf-idf query, zero
    /// scores suppressed, ties by ascending id.
    pub fn rank(&self, query: &str, k: usize) -> Vec<(u64, f64)> {
        let q = self.query_vector(query);
        let qn = q.values().map(|w| w * w).sum::<f64>().sqrt();
        let mut scored: Vec<(u64, f64)> = self
            .images
            .iter()
            .map(|image| {
                let d = self.document_vector(image);
                let dn = d.values().map(|w| w * w).sum::<f64>().sqrt();
                let dot: f64 = q
                    .iter()
                    .filter_map(|(t, w)| d.get(t).map(|dw| w * dw))
                    .sum();
                let score = if qn == 0.0 || dn == 0.0 {
                    0.0
                } else {
                    dot / (qn * dn)
                };
                (image.id, score)
            })
            .filter(|(_, s)| *s > 0.0)
            .collect();
        scored.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
        scored.truncate(k);
        scored
    }
}
