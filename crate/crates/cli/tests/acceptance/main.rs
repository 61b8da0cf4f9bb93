//! Acceptance suite: one test per release criterion, each printing a
//! PASS line (visible with `cargo test --test acceptance -- --nocapture`).
//!
//! The end-to-end checks run the shipped fixture corpus through both the
//! library pipeline and the installed binary and compare every ranking
//! against the independent brute-force implementation in `oracle.rs`.

mod oracle;

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use hybrid_ir::pipeline::{build_reference_set, index_documents, IndexingOptions};
use hybrid_ir::store;
use hybrid_ir_core::color::{build_histogram, euclidean_distance, ColorHistogram, PixelBuffer};
use hybrid_ir_core::eval::{precision, run_comparison, RelevanceJudgments};
use hybrid_ir_core::extract::SourceLocation;
use hybrid_ir_core::index::{ImageRecord, Index, RecordId, SparseVector, TermId};
use hybrid_ir_core::query::{cosine_similarity, search, SearchParams};
use hybrid_ir_core::text::StopWords;
use hybrid_ir_core::weight::{
    idf_value, tf_idf, vtf_idf, LocationCounts, LocationWeightTable, TermProfile, WeightScheme,
};

const QUERIES: [&str; 5] = [
    "blue ridge mountains",
    "golden sand",
    "granite summit climbers",
    "the misty peak",
    "tide pool life",
];

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

fn stopword_file() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/data/stopwords_en.txt")
}

fn pass(criterion: &str) {
    println!("[acceptance] {criterion}: PASS");
}

fn random_buffer(rng: &mut StdRng, max_side: u32) -> PixelBuffer {
    let width = rng.gen_range(1..=max_side);
    let height = rng.gen_range(1..=max_side);
    let pixels = (0..width as usize * height as usize)
        .map(|_| [rng.gen(), rng.gen(), rng.gen()])
        .collect();
    PixelBuffer::new(width, height, pixels).unwrap()
}

fn random_histogram(rng: &mut StdRng) -> ColorHistogram {
    let mut counts = [0u64; 12];
    for c in &mut counts {
        *c = rng.gen_range(0..100_000);
    }
    ColorHistogram::from_counts(counts)
}

#[test]
fn c01_histogram_conservation() {
    let mut rng = StdRng::seed_from_u64(0xC01);
    let started = Instant::now();
    for _ in 0..1_000 {
        let buffer = random_buffer(&mut rng, 64);
        let histogram = build_histogram(&buffer);
        let n = buffer.pixel_count();
        assert_eq!(histogram.channel_sums(), (n, n, n));
    }
    let elapsed = started.elapsed();
    assert!(elapsed.as_secs_f64() < 5.0, "took {elapsed:?}, budget 5 s");
    pass("C01 histogram conservation over 1000 random buffers");
}

#[test]
fn c02_histogram_oracle_equivalence() {
    fn naive(buffer: &PixelBuffer) -> [u64; 12] {
        fn bin(v: u8) -> usize {
            match v {
                0..=63 => 0,
                64..=127 => 1,
                128..=191 => 2,
                192..=255 => 3,
            }
        }
        let mut counts = [0u64; 12];
        for px in buffer.pixels() {
            counts[bin(px[0])] += 1;
            counts[4 + bin(px[1])] += 1;
            counts[8 + bin(px[2])] += 1;
        }
        counts
    }

    let mut rng = StdRng::seed_from_u64(0xC02);
    for _ in 0..200 {
        let buffer = random_buffer(&mut rng, 8);
        assert_eq!(build_histogram(&buffer).counts(), &naive(&buffer));
    }
    pass("C02 histogram equals naive per-pixel oracle on 200 images");
}

#[test]
fn c03_bin_boundaries_exact() {
    for (value, bin) in [
        (0u8, 0usize),
        (63, 0),
        (64, 1),
        (127, 1),
        (128, 2),
        (191, 2),
        (192, 3),
        (255, 3),
    ] {
        let buffer = PixelBuffer::new(1, 1, vec![[value, value, value]]).unwrap();
        let h = build_histogram(&buffer);
        let mut want = [0u64; 12];
        want[bin] = 1;
        want[4 + bin] = 1;
        want[8 + bin] = 1;
        assert_eq!(
            h.counts(),
            &want,
            "intensity {value} must land in bin {bin}"
        );
    }
    pass("C03 bin boundaries 63|64 and 191|192 exact");
}

#[test]
fn c04_stub_distance_table_selects_mountains() {
    let output = Command::new(env!("CARGO_BIN_EXE_hybrid-ir"))
        .args([
            "classify",
            "--stub-distances",
            fixtures().join("stub_distances.tsv").to_str().unwrap(),
        ])
        .output()
        .expect("binary runs");
    assert_eq!(output.status.code(), Some(0));
    let stdout = String::from_utf8(output.stdout).unwrap();
    let winner = stdout
        .lines()
        .find_map(|l| l.strip_prefix("class-label\t"))
        .expect("winner line");
    assert_eq!(winner, "Mountains");
    pass("C04 stubbed average-distance table selects Mountains");
}

#[test]
fn c05_euclidean_metric_properties() {
    let mut rng = StdRng::seed_from_u64(0xC05);
    for _ in 0..1_000 {
        let a = random_histogram(&mut rng);
        let b = random_histogram(&mut rng);
        let c = random_histogram(&mut rng);

        assert_eq!(euclidean_distance(&a, &a), 0.0);
        let ab = euclidean_distance(&a, &b);
        let ba = euclidean_distance(&b, &a);
        let rel = |x: f64, y: f64| (x - y).abs() <= 1e-9 * x.abs().max(y.abs()).max(1.0);
        assert!(rel(ab, ba), "symmetry: {ab} vs {ba}");
        let ac = euclidean_distance(&a, &c);
        let cb = euclidean_distance(&c, &b);
        assert!(
            ab <= ac + cb + 1e-9 * (ac + cb).max(1.0),
            "triangle: {ab} > {ac} + {cb}"
        );
    }
    pass("C05 metric identity/symmetry/triangle on 1000 random triples");
}

#[test]
fn c06_flat_table_reduction() {
    let mut rng = StdRng::seed_from_u64(0xC06);
    let flat = LocationWeightTable::flat();
    for _ in 0..1_000 {
        let mut counts = LocationCounts::new();
        for location in SourceLocation::ALL {
            counts.set(location, rng.gen_range(0..40));
        }
        let n = rng.gen_range(1..10_000u64);
        let df = rng.gen_range(0..=n);
        let idf = idf_value(n, df);
        let reduced = vtf_idf(&counts, &flat, idf);
        let plain = tf_idf(counts.total(), idf);
        assert!(
            (reduced - plain).abs() <= 1e-12 * plain.abs().max(1.0),
            "{reduced} vs {plain}"
        );
    }
    pass("C06 flat-table vtf-idf equals tf-idf on 1000 random profiles");
}

#[test]
fn c07_hand_computed_weights() {
    let table = LocationWeightTable::paper_multiplicative();

    let filename_once = LocationCounts::of(SourceLocation::Filename, 1);
    let w = vtf_idf(&filename_once, &table, idf_value(10, 2));
    assert!((w - 13.9794).abs() < 1e-4, "got {w}");

    let mut alt_and_h2 = LocationCounts::new();
    alt_and_h2.add(SourceLocation::Alt, 1);
    alt_and_h2.add(SourceLocation::H2, 1);
    let w = vtf_idf(&alt_and_h2, &table, 1.0);
    assert!((w - 20.0).abs() < 1e-4, "got {w}");

    pass("C07 hand-computed weight values 13.9794 and 20 reproduce");
}

#[test]
fn c08_cosine_endpoints() {
    let mut rng = StdRng::seed_from_u64(0xC08);
    for _ in 0..500 {
        let len = rng.gen_range(1..12usize);
        let v: SparseVector = (0..len)
            .map(|i| (TermId(i as u32), rng.gen_range(0.01f64..50.0)))
            .collect();
        assert!((cosine_similarity(&v, &v) - 1.0).abs() < 1e-9);

        let disjoint: SparseVector = (0..rng.gen_range(1..12usize))
            .map(|i| (TermId(1_000 + i as u32), rng.gen_range(0.01f64..50.0)))
            .collect();
        assert_eq!(cosine_similarity(&v, &disjoint), 0.0);
    }
    pass("C08 cosine self=1 and disjoint=0 on 500 random vectors");
}

#[test]
fn c09_ranking_scale_invariance() {
    let mut rng = StdRng::seed_from_u64(0xC09);
    let mut index = Index::new();
    let vocabulary = ["crag", "dune", "fjord", "mesa", "reef", "scree", "tarn"];
    for id in 1..=20u64 {
        let mut profile = TermProfile::new();
        for term in vocabulary.iter().take(rng.gen_range(2..=vocabulary.len())) {
            let location = SourceLocation::ALL[rng.gen_range(0..6)];
            profile
                .entry(term.to_string())
                .or_default()
                .add(location, rng.gen_range(1..5));
        }
        let profile = index.intern_profile(&profile);
        index
            .add_record(ImageRecord {
                id: RecordId(id),
                document_uri: String::new(),
                image_uri: String::new(),
                filename: String::new(),
                class_label: String::new(),
                histogram: ColorHistogram::from_counts([0; 12]),
                profile,
            })
            .unwrap();
    }

    let stats = index.corpus_snapshot();
    let query = hybrid_ir_core::query::weight_query(
        "crag reef tarn",
        &StopWords::none(),
        index.dictionary(),
        &stats,
    )
    .unwrap();
    let table = LocationWeightTable::paper_multiplicative();
    let vectors: Vec<(RecordId, SparseVector)> = index
        .record_ids()
        .map(|id| {
            (
                id,
                index
                    .materialize_vector(id, WeightScheme::VtfIdf, &table)
                    .unwrap(),
            )
        })
        .collect();

    let argsort = |vs: &[(RecordId, SparseVector)]| -> Vec<RecordId> {
        let mut scored: Vec<(RecordId, f64)> = vs
            .iter()
            .map(|(id, v)| (*id, cosine_similarity(&query, v)))
            .collect();
        scored.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        scored.into_iter().map(|(id, _)| id).collect()
    };

    let baseline = argsort(&vectors);
    for _ in 0..20 {
        let factor = rng.gen_range(1e-6f64..1e6);
        let scaled: Vec<(RecordId, SparseVector)> = vectors
            .iter()
            .map(|(id, v)| (*id, v.scaled(factor)))
            .collect();
        assert_eq!(argsort(&scaled), baseline, "factor {factor}");
    }
    pass("C09 argsort unchanged under uniform document scaling (20 records)");
}

/// Build the fixture index through the library pipeline.
fn pipeline_index() -> Index {
    let refs = build_reference_set(&fixtures().join("refset")).unwrap().set;
    let mut docs: Vec<PathBuf> = fs::read_dir(fixtures().join("corpus/docs"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    docs.sort();
    let inputs: Vec<String> = docs
        .iter()
        .map(|p| p.to_string_lossy().into_owned())
        .collect();

    let mut index = Index::new();
    let report = index_documents(
        &inputs,
        &refs,
        &StopWords::default_english(),
        &IndexingOptions::default(),
        &mut index,
    );
    assert_eq!(report.indexed.len(), 6, "fixture corpus has six images");
    assert!(report.failures.is_empty(), "{:?}", report.failures);
    index
}

fn oracle_corpus() -> oracle::OracleCorpus {
    oracle::build_corpus(
        &fixtures().join("corpus/docs"),
        &fixtures().join("refset"),
        &stopword_file(),
    )
}

#[test]
fn c10_end_to_end_matches_brute_force() {
    let index = pipeline_index();
    let corpus = oracle_corpus();
    let params = SearchParams::default();
    let stopwords = StopWords::default_english();

    for query in QUERIES {
        let hits = search(&index, query, &stopwords, &params).unwrap();
        let expected = corpus.rank(query, params.k);
        assert_eq!(
            hits.len(),
            expected.len(),
            "result count for {query:?}: {hits:?} vs {expected:?}"
        );
        for (hit, (id, score)) in hits.iter().zip(&expected) {
            assert_eq!(hit.record, RecordId(*id), "order for {query:?}");
            assert!(
                (hit.score - score).abs() < 1e-9,
                "score for {query:?}: {} vs {score}",
                hit.score
            );
        }
    }

    // the same rankings must come out of the installed binary
    let dir = tempfile::TempDir::new().unwrap();
    let (index_dir, _) = cli_build_index(dir.path());
    for query in QUERIES {
        let rows = cli_search(&index_dir, query);
        let expected = corpus.rank(query, 10);
        assert_eq!(rows.len(), expected.len(), "CLI count for {query:?}");
        for ((filename, score), (id, want)) in rows.iter().zip(&expected) {
            let image = &corpus.images[*id as usize - 1];
            assert_eq!(filename, &image.filename, "CLI order for {query:?}");
            assert!(
                (score - want).abs() < 5e-7,
                "CLI rounded score for {query:?}"
            );
        }
    }
    pass("C10 fixture rankings identical to brute-force oracle (library + CLI)");
}

/// Run `build-reference` + `index` through the binary; returns
/// (index_dir, refset_path).
fn cli_build_index(dir: &Path) -> (PathBuf, PathBuf) {
    let bin = env!("CARGO_BIN_EXE_hybrid-ir");
    let refset = dir.join("refset.tsv");
    let output = Command::new(bin)
        .args([
            "build-reference",
            fixtures().join("refset").to_str().unwrap(),
            "--out",
            refset.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(output.status.success());

    let mut docs: Vec<PathBuf> = fs::read_dir(fixtures().join("corpus/docs"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    docs.sort();
    let list: String = docs.iter().map(|p| format!("{}\n", p.display())).collect();
    let inputs = dir.join("inputs.txt");
    fs::write(&inputs, list).unwrap();

    let index_dir = dir.join("index");
    let output = Command::new(bin)
        .args([
            "index",
            "--input",
            inputs.to_str().unwrap(),
            "--index-dir",
            index_dir.to_str().unwrap(),
            "--refset",
            refset.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(output.status.success());
    (index_dir, refset)
}

/// `(image filename, score)` rows from the binary's search output.
fn cli_search(index_dir: &Path, query: &str) -> Vec<(String, f64)> {
    let output = Command::new(env!("CARGO_BIN_EXE_hybrid-ir"))
        .args(["search", query, "--index-dir", index_dir.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0));
    String::from_utf8(output.stdout)
        .unwrap()
        .lines()
        .map(|line| {
            let fields: Vec<&str> = line.split('\t').collect();
            let filename = fields[2].rsplit('/').next().unwrap().to_string();
            (filename, fields[1].parse().unwrap())
        })
        .collect()
}

#[test]
fn c11_persistence_round_trip() {
    let dir_a = tempfile::TempDir::new().unwrap();
    let dir_b = tempfile::TempDir::new().unwrap();
    let (index_a, _) = cli_build_index(dir_a.path());
    let (index_b, _) = cli_build_index(dir_b.path());

    // byte-identical files across two runs over the same inputs
    for name in ["meta", "terms.tsv", "df.tsv", "records.jsonl"] {
        let a = fs::read(index_a.join(name)).unwrap();
        let b = fs::read(index_b.join(name)).unwrap();
        assert_eq!(a, b, "{name} not byte-identical across runs");
    }

    // identical search output before and after the disk round trip
    let in_memory = pipeline_index();
    let loaded = store::load_index(&index_a).unwrap();
    let stopwords = StopWords::default_english();
    for scheme in WeightScheme::ALL {
        for query in QUERIES {
            let params = SearchParams {
                scheme,
                ..SearchParams::default()
            };
            let fresh = search(&in_memory, query, &stopwords, &params).unwrap();
            let reloaded = search(&loaded, query, &stopwords, &params).unwrap();
            assert_eq!(fresh.len(), reloaded.len(), "{scheme:?} {query:?}");
            for (x, y) in fresh.iter().zip(&reloaded) {
                assert_eq!(x.record, y.record, "{scheme:?} {query:?}");
                assert!((x.score - y.score).abs() < 1e-12, "{scheme:?} {query:?}");
            }
        }
    }
    pass("C11 persist/load identical for 5 queries x 5 schemes; files byte-stable");
}

#[test]
fn c12_precision_metric() {
    let returned: Vec<RecordId> = (1..=10).map(RecordId).collect();
    let relevant: BTreeSet<RecordId> = (1..=7).map(RecordId).collect();
    assert_eq!(precision(&returned, &relevant), 0.7);
    assert_eq!(precision(&[], &relevant), 0.0);
    pass("C12 precision 7-of-10 = 0.7 exactly; empty return = 0");
}

/// A head-to-head against live commercial engines cannot run inside a
/// test suite. Substitute: the end-to-end oracle (C10) plus the
/// constructed property that location weighting beats plain TF-IDF when
/// filenames carry relevance.
#[test]
fn c13_substitute_location_weighting_beats_plain_tfidf() {
    type TermSpec = (&'static str, SourceLocation, u32);
    let mut index = Index::new();
    // relevant image: query term in the filename, chatter in the text;
    // decoy: query term frequent in text only
    let spec: &[(u64, &[TermSpec])] = &[
        (
            1,
            &[
                ("sand", SourceLocation::Filename, 1),
                ("shore", SourceLocation::Paragraph, 1),
            ],
        ),
        (
            2,
            &[
                ("sand", SourceLocation::Paragraph, 3),
                ("castle", SourceLocation::Paragraph, 1),
            ],
        ),
        (
            3,
            &[
                ("granite", SourceLocation::Filename, 1),
                ("cliff", SourceLocation::Paragraph, 1),
            ],
        ),
        (
            4,
            &[
                ("granite", SourceLocation::Paragraph, 4),
                ("quarry", SourceLocation::Paragraph, 1),
            ],
        ),
        (5, &[("reef", SourceLocation::Paragraph, 1)]),
    ];
    for (id, terms) in spec {
        let mut profile = TermProfile::new();
        for &(term, location, count) in *terms {
            profile
                .entry(term.to_string())
                .or_default()
                .add(location, count);
        }
        let profile = index.intern_profile(&profile);
        index
            .add_record(ImageRecord {
                id: RecordId(*id),
                document_uri: String::new(),
                image_uri: String::new(),
                filename: String::new(),
                class_label: String::new(),
                histogram: ColorHistogram::from_counts([0; 12]),
                profile,
            })
            .unwrap();
    }

    let judgments = RelevanceJudgments::from_entries(vec![
        ("sand".to_string(), [RecordId(1)].into_iter().collect()),
        ("granite".to_string(), [RecordId(3)].into_iter().collect()),
    ]);
    let results = run_comparison(
        &index,
        &judgments,
        &[WeightScheme::VtfIdf, WeightScheme::TfIdf],
        &LocationWeightTable::paper_multiplicative(),
        1,
        &StopWords::none(),
    )
    .unwrap();

    let vtf = results[0].mean_precision;
    let tf = results[1].mean_precision;
    assert!(
        vtf >= tf,
        "location weighting must not lose on a filename-dominant fixture: {vtf} < {tf}"
    );
    assert_eq!(vtf, 1.0);
    assert_eq!(tf, 0.0);
    pass("C13 substitute property: vtf-idf precision >= tf-idf on filename-dominant fixture");
}

/// Sanity companion to C10/C11: the classifier labels the fixture images
/// the way the judgments file assumes.
#[test]
fn fixture_class_labels_match_oracle() {
    let index = pipeline_index();
    let corpus = oracle_corpus();
    let labels: Vec<(u64, String)> = corpus
        .images
        .iter()
        .map(|i| (i.id, i.class_label.clone()))
        .collect();
    for (id, label) in labels {
        let record = index.record(RecordId(id)).unwrap();
        assert_eq!(record.class_label, label, "record {id}");
    }
    let histogram: BTreeMap<&str, usize> = index.records().fold(BTreeMap::new(), |mut acc, r| {
        *acc.entry(r.class_label.as_str()).or_insert(0) += 1;
        acc
    });
    assert_eq!(histogram["mountains"], 3);
    assert_eq!(histogram["beach"], 3);
}
