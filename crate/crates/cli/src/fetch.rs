//! Resource acquisition: local files and http(s) URLs behind one
//! interface, plus relative-reference resolution.
//!
//! Fetching never transcodes; callers get the stored/served bytes
//! verbatim, capped at a configurable size (16 MiB by default). HTTP
//! requests send `Accept: */*` and follow up to five redirects.

use std::fs;
use std::io::Read;
use std::path::Path;

/// 16 MiB.
pub const DEFAULT_MAX_BYTES: u64 = 16 * 1024 * 1024;

#[derive(Debug, Clone)]
pub struct FetchConfig {
    pub max_bytes: u64,
}

impl Default for FetchConfig {
    fn default() -> Self {
        FetchConfig {
            max_bytes: DEFAULT_MAX_BYTES,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum FetchError {
    #[error("not found: {0}")]
    NotFound(String),
    #[error("transport failure for {source_uri}: {reason}")]
    Transport { source_uri: String, reason: String },
    #[error("{0} exceeds the size cap of {1} bytes")]
    TooLarge(String, u64),
    #[error("{0} is empty")]
    Empty(String),
    #[error("malformed reference {0:?}")]
    MalformedReference(String),
}

/// A fetched HTML document: absolute source, raw bytes, and the charset
/// the server declared, if any.
#[derive(Debug, Clone)]
pub struct RawDocument {
    pub source: String,
    pub bytes: Vec<u8>,
    pub declared_encoding: Option<String>,
}

/// A fetched image: absolute source, raw bytes, and the last path segment
/// of the source.
#[derive(Debug, Clone)]
pub struct RawImage {
    pub source: String,
    pub bytes: Vec<u8>,
    pub filename: String,
}

pub fn is_url(source: &str) -> bool {
    source.starts_with("http://") || source.starts_with("https://")
}

/// Fetch a document from a file path or http(s) URL.
pub fn fetch_document(source: &str, config: &FetchConfig) -> Result<RawDocument, FetchError> {
    if is_url(source) {
        let (bytes, declared_encoding) = http_get(source, config)?;
        Ok(RawDocument {
            source: source.to_string(),
            bytes,
            declared_encoding,
        })
    } else {
        let (source, bytes) = read_file(source, config)?;
        Ok(RawDocument {
            source,
            bytes,
            declared_encoding: None,
        })
    }
}

/// Fetch an image; same transport rules as [`fetch_document`] plus
/// filename extraction from the source.
pub fn fetch_image(source: &str, config: &FetchConfig) -> Result<RawImage, FetchError> {
    let filename = filename_of(source)?;
    if is_url(source) {
        let (bytes, _) = http_get(source, config)?;
        Ok(RawImage {
            source: source.to_string(),
            bytes,
            filename,
        })
    } else {
        let (source, bytes) = read_file(source, config)?;
        Ok(RawImage {
            source,
            bytes,
            filename,
        })
    }
}

fn read_file(path: &str, config: &FetchConfig) -> Result<(String, Vec<u8>), FetchError> {
    let meta = fs::metadata(path).map_err(|_| FetchError::NotFound(path.to_string()))?;
    if !meta.is_file() {
        return Err(FetchError::NotFound(path.to_string()));
    }
    if meta.len() > config.max_bytes {
        return Err(FetchError::TooLarge(path.to_string(), config.max_bytes));
    }
    let bytes = fs::read(path).map_err(|e| FetchError::Transport {
        source_uri: path.to_string(),
        reason: e.to_string(),
    })?;
    if bytes.is_empty() {
        return Err(FetchError::Empty(path.to_string()));
    }
    let absolute = std::path::absolute(Path::new(path))
        .map_err(|e| FetchError::Transport {
            source_uri: path.to_string(),
            reason: e.to_string(),
        })?
        .to_string_lossy()
        .into_owned();
    Ok((absolute, bytes))
}

fn http_get(url: &str, config: &FetchConfig) -> Result<(Vec<u8>, Option<String>), FetchError> {
    // ureq fails when the limit itself is reached, so 6 follows 5 hops
    let agent = ureq::AgentBuilder::new().redirects(6).build();
    let response = agent
        .get(url)
        .set("Accept", "*/*")
        .call()
        .map_err(|e| match e {
            ureq::Error::Status(404, _) => FetchError::NotFound(url.to_string()),
            ureq::Error::Status(code, _) => FetchError::Transport {
                source_uri: url.to_string(),
                reason: format!("HTTP status {code}"),
            },
            ureq::Error::Transport(t) => FetchError::Transport {
                source_uri: url.to_string(),
                reason: t.to_string(),
            },
        })?;

    let declared_encoding = response
        .header("content-type")
        .and_then(parse_charset)
        .map(str::to_string);

    let mut bytes = Vec::new();
    response
        .into_reader()
        .take(config.max_bytes + 1)
        .read_to_end(&mut bytes)
        .map_err(|e| FetchError::Transport {
            source_uri: url.to_string(),
            reason: e.to_string(),
        })?;
    if bytes.len() as u64 > config.max_bytes {
        return Err(FetchError::TooLarge(url.to_string(), config.max_bytes));
    }
    if bytes.is_empty() {
        return Err(FetchError::Empty(url.to_string()));
    }
    Ok((bytes, declared_encoding))
}

fn parse_charset(content_type: &str) -> Option<&str> {
    content_type.split(';').skip(1).find_map(|param| {
        let (key, value) = param.split_once('=')?;
        if key.trim().eq_ignore_ascii_case("charset") {
            Some(value.trim().trim_matches('"'))
        } else {
            None
        }
    })
}

/// Resolve `src` against an absolute `base` (URL or file path). Absolute
/// references come back unchanged; relative ones are joined to the base's
/// directory with `.`/`..` segments normalized.
pub fn resolve_reference(base: &str, src: &str) -> Result<String, FetchError> {
    if src.is_empty() {
        return Err(FetchError::MalformedReference(src.to_string()));
    }
    if has_scheme(src) {
        return Ok(src.to_string());
    }
    if is_url(base) {
        let (origin, path) = split_url(base);
        if let Some(rest) = src.strip_prefix("//") {
            let scheme = &base[..base.find(':').unwrap_or(4)];
            return Ok(format!("{scheme}://{rest}"));
        }
        if src.starts_with('/') {
            return Ok(format!("{origin}{}", normalize_segments(src)));
        }
        let dir = match path.rfind('/') {
            Some(i) => &path[..=i],
            None => "/",
        };
        Ok(format!(
            "{origin}{}",
            normalize_segments(&format!("{dir}{src}"))
        ))
    } else {
        if src.starts_with('/') {
            return Ok(src.to_string());
        }
        let dir = match base.rfind('/') {
            Some(i) => &base[..=i],
            None => "",
        };
        Ok(normalize_segments(&format!("{dir}{src}")))
    }
}

fn has_scheme(s: &str) -> bool {
    let Some(colon) = s.find("://") else {
        return false;
    };
    let scheme = &s[..colon];
    !scheme.is_empty()
        && scheme
            .chars()
            .next()
            .is_some_and(|c| c.is_ascii_alphabetic())
        && scheme
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '+' | '-' | '.'))
}

/// `("http://host", "/path")` split of an http(s) URL; queries and
/// fragments on the base are dropped before joining.
fn split_url(url: &str) -> (&str, &str) {
    let after_scheme = url.find("://").map(|i| i + 3).unwrap_or(0);
    let end = url[after_scheme..]
        .find(['?', '#'])
        .map(|i| after_scheme + i)
        .unwrap_or(url.len());
    match url[after_scheme..end].find('/') {
        Some(slash) => {
            let at = after_scheme + slash;
            (&url[..at], &url[at..end])
        }
        None => (&url[..end], "/"),
    }
}

/// Lexical `.` / `..` normalization; `..` never climbs past the root of an
/// absolute path.
fn normalize_segments(path: &str) -> String {
    let absolute = path.starts_with('/');
    let trailing_slash = path.ends_with('/');
    let mut stack: Vec<&str> = Vec::new();
    for segment in path.split('/') {
        match segment {
            "" | "." => {}
            ".." => {
                if stack.last().is_some_and(|s| *s != "..") {
                    stack.pop();
                } else if !absolute {
                    stack.push("..");
                }
            }
            s => stack.push(s),
        }
    }
    let mut out = String::new();
    if absolute {
        out.push('/');
    }
    out.push_str(&stack.join("/"));
    if trailing_slash && !out.ends_with('/') {
        out.push('/');
    }
    out
}

/// Last path segment of a reference, ignoring any query or fragment.
pub fn filename_of(source: &str) -> Result<String, FetchError> {
    let end = source.find(['?', '#']).unwrap_or(source.len());
    let path = &source[..end];
    let name = match path.rfind('/') {
        Some(slash) => &path[slash + 1..],
        None => path,
    };
    if name.is_empty() {
        return Err(FetchError::MalformedReference(source.to_string()));
    }
    Ok(name.to_string())
}
