use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::Serialize;

use super::{
    io_err, png_rel_paths, read_records, tensor_rel_path, DataError, DatasetManifest, Pipeline,
    SampleRecord, Split,
};
use crate::cloud::{cloud_suite_with, splitmix64, CLOUD_COUNT};
use crate::corpus::{cardinality, function_at};
use crate::raster::CHANNELS;
use crate::tokens::{TokenVocab, VocabEntry};

const SELECT_SALT: u64 = 0x7665_7269_6679_0001;

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyOptions {
    /// Share of records whose tensors are re-rendered and byte-compared.
    pub fraction: f64,
    pub workers: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            fraction: 0.1,
            workers: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Failure {
    pub sample_id: Option<u64>,
    pub check: &'static str,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub records: usize,
    pub expected_records: u64,
    pub rederived: usize,
    pub failures: Vec<Failure>,
}

impl VerifyReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }

    /// Distinct sample ids named by failures, ascending.
    pub fn offending_samples(&self) -> Vec<u64> {
        self.failures
            .iter()
            .filter_map(|f| f.sample_id)
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect()
    }
}

fn selected(sample_id: u64, fraction: f64) -> bool {
    let u = (splitmix64(sample_id ^ SELECT_SALT) >> 11) as f64 / (1u64 << 53) as f64;
    u < fraction
}

fn fail(sample_id: Option<u64>, check: &'static str, detail: impl Into<String>) -> Failure {
    Failure {
        sample_id,
        check,
        detail: detail.into(),
    }
}

/// Checks a dataset against the generator: counts against the cardinality
/// formula, record fields against re-derivation, and a share of tensors and
/// PNGs byte for byte.
pub fn verify(dir: &Path, opts: &VerifyOptions) -> Result<VerifyReport, DataError> {
    let manifest = DatasetManifest::load(dir)?;
    let spec = manifest.basis()?;
    let split = manifest.split_rule()?;
    manifest.render.validate()?;
    let records = read_records(dir)?;
    let mut failures = Vec::new();

    // counts
    let size = cardinality(&spec);
    if manifest.corpus_size != size.to_string() {
        failures.push(fail(
            None,
            "count",
            format!("manifest corpus size {} but formula gives {size}", manifest.corpus_size),
        ));
    }
    let [lo, hi] = manifest.index_range;
    let functions = hi.saturating_sub(lo);
    let expected = functions * u64::from(manifest.clouds);
    if manifest.clouds != CLOUD_COUNT {
        failures.push(fail(None, "count", format!("{} clouds, expected {CLOUD_COUNT}", manifest.clouds)));
    }
    if manifest.limit.is_none() && manifest.shard.count == 1 && BigUint::from(functions) != size {
        failures.push(fail(
            None,
            "count",
            format!("unlimited dataset covers {functions} functions, corpus has {size}"),
        ));
    }
    if records.len() as u64 != expected || manifest.counts.records != expected {
        failures.push(fail(
            None,
            "count",
            format!(
                "{} records on disk, manifest says {}, expected {expected}",
                records.len(),
                manifest.counts.records
            ),
        ));
    }
    let (train, test) = records.iter().fold((0u64, 0u64), |(a, b), r| match r.split {
        Split::Train => (a + 1, b),
        Split::Test => (a, b + 1),
    });
    if (train, test) != (manifest.counts.train, manifest.counts.test) {
        failures.push(fail(None, "count", "train/test counts differ from manifest"));
    }

    // vocabulary
    let vocab = TokenVocab::build(&spec);
    let vocab_path = dir.join(&manifest.vocabulary);
    let text = std::fs::read_to_string(&vocab_path).map_err(io_err(&vocab_path))?;
    match serde_json::from_str::<Vec<VocabEntry>>(&text) {
        Ok(entries) if entries == vocab.entries() => {}
        _ => failures.push(fail(None, "vocabulary", "vocabulary file differs from the rebuilt one")),
    }

    let pipeline = Pipeline {
        vocab,
        clouds: cloud_suite_with(manifest.master_seed, manifest.points_per_cloud)?,
        render: manifest.render,
        split,
        master_seed: manifest.master_seed,
    };

    // record fields, grouped by function so each is derived once
    let mut seen = BTreeSet::new();
    let mut by_index: BTreeMap<u64, Vec<&SampleRecord>> = BTreeMap::new();
    for r in &records {
        if !seen.insert((r.corpus_index, r.cloud_id)) {
            failures.push(fail(Some(r.sample_id), "unique", "duplicate (corpus_index, cloud_id)"));
        }
        if r.corpus_index < lo || r.corpus_index >= hi || r.cloud_id >= manifest.clouds {
            failures.push(fail(Some(r.sample_id), "range", "record outside the manifest range"));
            continue;
        }
        by_index.entry(r.corpus_index).or_default().push(r);
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.workers.max(1))
        .build()
        .expect("thread pool");
    let groups: Vec<(u64, Vec<&SampleRecord>)> = by_index.into_iter().collect();
    let checked: Vec<(usize, Vec<Failure>)> = pool.install(|| {
        groups
            .par_iter()
            .map(|(index, recs)| check_function(dir, &pipeline, &spec, *index, recs, opts.fraction, manifest.png))
            .collect()
    });
    let mut rederived = 0;
    for (n, fs) in checked {
        rederived += n;
        failures.extend(fs);
    }

    Ok(VerifyReport {
        records: records.len(),
        expected_records: expected,
        rederived,
        failures,
    })
}

fn check_function(
    dir: &Path,
    pipeline: &Pipeline,
    spec: &crate::corpus::BasisSpec,
    index: u64,
    recs: &[&SampleRecord],
    fraction: f64,
    png: bool,
) -> (usize, Vec<Failure>) {
    let mut failures = Vec::new();
    let ham = match function_at(&BigUint::from(index), spec) {
        Ok(h) => h,
        Err(e) => {
            for r in recs {
                failures.push(fail(Some(r.sample_id), "corpus", e.to_string()));
            }
            return (0, failures);
        }
    };
    let prepared = match pipeline.prepare(index, ham) {
        Ok(p) => p,
        Err(e) => {
            for r in recs {
                failures.push(fail(Some(r.sample_id), "derive", e.to_string()));
            }
            return (0, failures);
        }
    };
    let mut rederived = 0;
    for r in recs {
        let id = Some(r.sample_id);
        let expect = match pipeline.record(&prepared, r.cloud_id, png) {
            Ok(e) => e,
            Err(e) => {
                failures.push(fail(id, "record", e.to_string()));
                continue;
            }
        };
        if r.sample_id != expect.sample_id {
            failures.push(fail(id, "sample_id", format!("expected {}", expect.sample_id)));
        }
        if r.hamiltonian != expect.hamiltonian {
            failures.push(fail(id, "hamiltonian", format!("expected {:?}", expect.hamiltonian)));
        }
        if (&r.field_dx, &r.field_dy) != (&expect.field_dx, &expect.field_dy) {
            failures.push(fail(id, "field", "field strings differ"));
        }
        if r.token_indices != expect.token_indices {
            failures.push(fail(id, "tokens", format!("expected {:?}", expect.token_indices)));
        }
        if r.split != expect.split {
            failures.push(fail(id, "split", format!("expected {:?}", expect.split)));
        }
        if r.tensor_path != expect.tensor_path || r.png_paths != expect.png_paths {
            failures.push(fail(id, "paths", "file paths differ from the layout"));
        }
        if !selected(r.sample_id, fraction) {
            continue;
        }
        rederived += 1;
        let raster = pipeline.raster(&prepared, &pipeline.clouds[r.cloud_id as usize]);
        let tensor = dir.join(tensor_rel_path(index, r.cloud_id));
        match std::fs::read(&tensor) {
            Ok(bytes) if bytes == raster.to_bytes() => {}
            Ok(_) => failures.push(fail(id, "tensor", "tensor bytes differ")),
            Err(e) => failures.push(fail(id, "tensor", format!("{}: {e}", tensor.display()))),
        }
        if png {
            for (c, rel) in png_rel_paths(index, r.cloud_id).iter().enumerate().take(CHANNELS) {
                let want = raster.png_bytes(c).expect("in-memory encoding");
                match std::fs::read(dir.join(rel)) {
                    Ok(bytes) if bytes == want => {}
                    Ok(_) => failures.push(fail(id, "png", format!("{rel} differs"))),
                    Err(e) => failures.push(fail(id, "png", format!("{rel}: {e}"))),
                }
            }
        }
    }
    (rederived, failures)
}
