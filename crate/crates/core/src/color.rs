//! Color features: PPM decoding, the 12-bin RGB histogram, Euclidean
//! distance between histograms, and nearest-class labeling against a
//! reference set.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

/// Decoded 24-bit RGB raster.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PixelBuffer {
    width: u32,
    height: u32,
    /// Row-major (r, g, b) triplets; length is `width * height`.
    pixels: Vec<[u8; 3]>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PixelBufferError {
    ZeroDimension,
    LengthMismatch,
}

impl core::fmt::Display for PixelBufferError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            PixelBufferError::ZeroDimension => write!(f, "width and height must be at least 1"),
            PixelBufferError::LengthMismatch => {
                write!(f, "pixel data length does not match width * height")
            }
        }
    }
}

impl core::error::Error for PixelBufferError {}

impl PixelBuffer {
    pub fn new(width: u32, height: u32, pixels: Vec<[u8; 3]>) -> Result<Self, PixelBufferError> {
        if width == 0 || height == 0 {
            return Err(PixelBufferError::ZeroDimension);
        }
        if pixels.len() as u64 != width as u64 * height as u64 {
            return Err(PixelBufferError::LengthMismatch);
        }
        Ok(PixelBuffer {
            width,
            height,
            pixels,
        })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn pixel_count(&self) -> u64 {
        self.width as u64 * self.height as u64
    }

    pub fn pixels(&self) -> &[[u8; 3]] {
        &self.pixels
    }
}

/// Errors from [`decode_ppm`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PpmError {
    /// Not binary PPM ("P6") or maxval is not 255.
    UnsupportedFormat,
    /// Magic is right but the header is not well formed.
    BadHeader,
    /// Fewer payload bytes than `width * height * 3`.
    Truncated,
}

impl core::fmt::Display for PpmError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            PpmError::UnsupportedFormat => write!(
                f,
                "unsupported format: want binary PPM (P6) with maxval 255"
            ),
            PpmError::BadHeader => write!(f, "malformed PPM header"),
            PpmError::Truncated => write!(f, "PPM payload shorter than width * height * 3 bytes"),
        }
    }
}

impl core::error::Error for PpmError {}

/// Decode a binary PPM (magic "P6", maxval 255). Header `#` comments run
/// to end of line and may appear between any header fields.
pub fn decode_ppm(bytes: &[u8]) -> Result<PixelBuffer, PpmError> {
    let mut pos = 0usize;

    let magic = header_token(bytes, &mut pos).ok_or(PpmError::UnsupportedFormat)?;
    if magic != b"P6" {
        return Err(PpmError::UnsupportedFormat);
    }

    let width = header_number(bytes, &mut pos)?;
    let height = header_number(bytes, &mut pos)?;
    let maxval = header_number(bytes, &mut pos)?;
    if maxval != 255 {
        return Err(PpmError::UnsupportedFormat);
    }
    if width == 0 || height == 0 {
        return Err(PpmError::BadHeader);
    }

    // exactly one whitespace byte separates the header from the payload
    match bytes.get(pos) {
        Some(b) if b.is_ascii_whitespace() => pos += 1,
        _ => return Err(PpmError::BadHeader),
    }

    let need = width as u64 * height as u64 * 3;
    let payload = &bytes[pos.min(bytes.len())..];
    if (payload.len() as u64) < need {
        return Err(PpmError::Truncated);
    }
    let pixels = payload[..need as usize]
        .chunks_exact(3)
        .map(|c| [c[0], c[1], c[2]])
        .collect();
    PixelBuffer::new(width, height, pixels).map_err(|_| PpmError::BadHeader)
}

/// Next whitespace/comment-delimited header token.
fn header_token<'a>(bytes: &'a [u8], pos: &mut usize) -> Option<&'a [u8]> {
    loop {
        while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
        if bytes.get(*pos) == Some(&b'#') {
            while *pos < bytes.len() && bytes[*pos] != b'\n' {
                *pos += 1;
            }
            continue;
        }
        break;
    }
    let start = *pos;
    while *pos < bytes.len() && !bytes[*pos].is_ascii_whitespace() && bytes[*pos] != b'#' {
        *pos += 1;
    }
    if *pos > start {
        Some(&bytes[start..*pos])
    } else {
        None
    }
}

fn header_number(bytes: &[u8], pos: &mut usize) -> Result<u32, PpmError> {
    let token = header_token(bytes, pos).ok_or(PpmError::BadHeader)?;
    let mut value: u32 = 0;
    if token.is_empty() {
        return Err(PpmError::BadHeader);
    }
    for &b in token {
        if !b.is_ascii_digit() {
            return Err(PpmError::BadHeader);
        }
        value = value
            .checked_mul(10)
            .and_then(|v| v.checked_add((b - b'0') as u32))
            .ok_or(PpmError::BadHeader)?;
    }
    Ok(value)
}

/// 4-bins-per-channel RGB histogram: 12 counts ordered
/// `[R0..R3, G0..G3, B0..B3]`. Bin 0 covers intensities 0-63, bin 1
/// 64-127, bin 2 128-191, bin 3 192-255.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ColorHistogram {
    counts: [u64; 12],
}

impl ColorHistogram {
    pub fn from_counts(counts: [u64; 12]) -> Self {
        ColorHistogram { counts }
    }

    pub fn counts(&self) -> &[u64; 12] {
        &self.counts
    }

    pub fn red(&self) -> &[u64] {
        &self.counts[0..4]
    }

    pub fn green(&self) -> &[u64] {
        &self.counts[4..8]
    }

    pub fn blue(&self) -> &[u64] {
        &self.counts[8..12]
    }

    /// Per-channel totals `(red, green, blue)`; each equals the pixel
    /// count of the source image for histograms built from one.
    pub fn channel_sums(&self) -> (u64, u64, u64) {
        let sum = |s: &[u64]| s.iter().sum();
        (sum(self.red()), sum(self.green()), sum(self.blue()))
    }
}

/// Intensity bin for one channel value: `value / 64`.
#[inline]
pub fn intensity_bin(value: u8) -> usize {
    (value >> 6) as usize
}

/// Count every pixel's three channel values into their intensity bins.
pub fn build_histogram(img: &PixelBuffer) -> ColorHistogram {
    let mut counts = [0u64; 12];
    for [r, g, b] in img.pixels() {
        counts[intensity_bin(*r)] += 1;
        counts[4 + intensity_bin(*g)] += 1;
        counts[8 + intensity_bin(*b)] += 1;
    }
    ColorHistogram { counts }
}

/// Euclidean distance over the 12 bins: `sqrt(sum (a_i - b_i)^2)`.
pub fn euclidean_distance(a: &ColorHistogram, b: &ColorHistogram) -> f64 {
    let mut sum = 0.0f64;
    for i in 0..12 {
        let d = a.counts[i] as f64 - b.counts[i] as f64;
        sum += d * d;
    }
    libm::sqrt(sum)
}

/// Labeled histogram collection standing in for the preset class database.
#[derive(Debug, Clone, Default)]
pub struct ReferenceSet {
    classes: BTreeMap<String, Vec<ColorHistogram>>,
}

impl ReferenceSet {
    pub fn new() -> Self {
        ReferenceSet::default()
    }

    pub fn add(&mut self, label: &str, histogram: ColorHistogram) {
        self.classes
            .entry(String::from(label))
            .or_default()
            .push(histogram);
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn class_count(&self) -> usize {
        self.classes.len()
    }

    /// Classes in label order.
    pub fn classes(&self) -> impl Iterator<Item = (&str, &[ColorHistogram])> {
        self.classes.iter().map(|(l, h)| (l.as_str(), h.as_slice()))
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.classes.keys().map(String::as_str)
    }

    pub fn contains_label(&self, label: &str) -> bool {
        self.classes.contains_key(label)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EmptyReferenceSet;

impl core::fmt::Display for EmptyReferenceSet {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "reference set has no classes")
    }
}

impl core::error::Error for EmptyReferenceSet {}

/// Outcome of classifying one histogram: the winning label and every
/// class's average distance.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassificationResult {
    pub label: String,
    pub average_distances: BTreeMap<String, f64>,
}

/// Label the histogram with the class whose members have the smallest
/// mean Euclidean distance to it. Ties go to the lexicographically
/// smallest label.
pub fn classify(
    h: &ColorHistogram,
    refs: &ReferenceSet,
) -> Result<ClassificationResult, EmptyReferenceSet> {
    if refs.is_empty() {
        return Err(EmptyReferenceSet);
    }
    let mut averages = BTreeMap::new();
    for (label, members) in refs.classes() {
        debug_assert!(!members.is_empty());
        let total: f64 = members.iter().map(|m| euclidean_distance(h, m)).sum();
        averages.insert(String::from(label), total / members.len() as f64);
    }
    let label = argmin_label(&averages).expect("non-empty by construction");
    Ok(ClassificationResult {
        label: String::from(label),
        average_distances: averages,
    })
}

/// Label with the minimal average; lexicographic tie-break comes free from
/// the sorted map and the strict `<`. Also used for stubbed distance
/// tables.
pub fn argmin_label(averages: &BTreeMap<String, f64>) -> Option<&str> {
    let mut best: Option<(&str, f64)> = None;
    for (label, &avg) in averages {
        match best {
            Some((_, b)) if avg >= b => {}
            _ => best = Some((label, avg)),
        }
    }
    best.map(|(l, _)| l)
}
