use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rayon::prelude::*;

use super::{
    io_err, png_rel_base, tensor_rel_path, Counts, DataError, DatasetManifest, Pipeline, SampleRecord,
    ShardInfo, Split, SplitRule, FORMAT_VERSION, MANIFEST_FILE, RECORDS_FILE, TOOL_VERSION, VOCAB_FILE,
};
use crate::cloud::{cloud_suite_with, CLOUD_COUNT, DEFAULT_POINTS};
use crate::corpus::{cardinality, enumerate, BasisSpec};
use crate::raster::RenderConfig;
use crate::rational::{self, ratio, Rational};
use crate::tokens::TokenVocab;

/// Largest number of functions materialized without an explicit limit.
pub const DEFAULT_CAP: u64 = 10_000_000;

/// Functions handed to the worker pool per batch.
const BATCH: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub struct GenerateOptions {
    pub limit: Option<u64>,
    pub shard_index: u32,
    pub shard_count: u32,
    pub render: RenderConfig,
    pub split_fraction: Rational,
    pub workers: usize,
    pub png: bool,
    pub points: usize,
    pub cap: u64,
}

impl Default for GenerateOptions {
    fn default() -> Self {
        GenerateOptions {
            limit: None,
            shard_index: 0,
            shard_count: 1,
            render: RenderConfig::default(),
            split_fraction: ratio(3, 4),
            workers: 1,
            png: true,
            points: DEFAULT_POINTS,
            cap: DEFAULT_CAP,
        }
    }
}

/// Corpus indices covered by a shard of the (possibly limited) corpus.
fn shard_range(spec: &BasisSpec, opts: &GenerateOptions) -> Result<(u64, u64), DataError> {
    if opts.shard_count == 0 || opts.shard_index >= opts.shard_count {
        return Err(DataError::BadShard {
            index: opts.shard_index,
            count: opts.shard_count,
        });
    }
    let size = cardinality(spec);
    let total = match opts.limit {
        Some(limit) => size.min(BigUint::from(limit)),
        None if size > BigUint::from(opts.cap) => {
            return Err(DataError::CapExceeded {
                size: size.to_string(),
                cap: opts.cap,
            })
        }
        None => size,
    };
    let total = total
        .to_u64()
        .ok_or_else(|| DataError::IndexTooLarge(total.to_string()))?;
    let k = u128::from(opts.shard_index);
    let m = u128::from(opts.shard_count);
    let at = |i: u128| (u128::from(total) * i / m) as u64;
    Ok((at(k), at(k + 1)))
}

fn ensure_empty_dir(dir: &Path) -> Result<(), DataError> {
    if dir.exists() {
        let mut entries = fs::read_dir(dir).map_err(io_err(dir))?;
        if entries.next().is_some() {
            return Err(DataError::OutputNotEmpty(dir.to_path_buf()));
        }
    }
    fs::create_dir_all(dir).map_err(io_err(dir))
}

pub fn generate(
    spec: &BasisSpec,
    master_seed: u64,
    out_dir: &Path,
    opts: &GenerateOptions,
) -> Result<DatasetManifest, DataError> {
    opts.render.validate()?;
    if opts.workers == 0 {
        return Err(DataError::BadWorkers);
    }
    let split = SplitRule::new(opts.split_fraction)?;
    let (lo, hi) = shard_range(spec, opts)?;
    let pipeline = Pipeline {
        vocab: TokenVocab::build(spec),
        clouds: cloud_suite_with(master_seed, opts.points)?,
        render: opts.render,
        split,
        master_seed,
    };
    // reject indices whose sample ids would overflow before writing anything
    pipeline.sample_id(hi.saturating_sub(1), CLOUD_COUNT - 1)?;

    ensure_empty_dir(out_dir)?;
    let vocab_path = out_dir.join(VOCAB_FILE);
    fs::write(&vocab_path, pipeline.vocab.to_json()).map_err(io_err(&vocab_path))?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.workers)
        .build()
        .expect("thread pool");

    let records_path = out_dir.join(RECORDS_FILE);
    let mut records_out = BufWriter::new(File::create(&records_path).map_err(io_err(&records_path))?);
    let mut counts = Counts::default();

    let mut functions = enumerate(spec, &BigUint::from(lo), &BigUint::from(hi))?
        .map(|(j, f)| (j.to_u64().expect("index below hi"), f))
        .peekable();
    while functions.peek().is_some() {
        let batch: Vec<_> = functions.by_ref().take(BATCH).collect();
        let results: Vec<Result<Vec<SampleRecord>, DataError>> = pool.install(|| {
            batch
                .into_par_iter()
                .map(|(index, ham)| write_function(&pipeline, out_dir, index, ham, opts.png))
                .collect()
        });
        for records in results {
            let records = records?;
            counts.hamiltonians += 1;
            for r in &records {
                counts.records += 1;
                match r.split {
                    Split::Train => counts.train += 1,
                    Split::Test => counts.test += 1,
                }
                let line = serde_json::to_string(r).expect("record serializes");
                writeln!(records_out, "{line}").map_err(io_err(&records_path))?;
            }
        }
    }
    records_out.flush().map_err(io_err(&records_path))?;

    let manifest = DatasetManifest {
        format_version: FORMAT_VERSION,
        tool_version: TOOL_VERSION.to_string(),
        spec: spec.descriptor(),
        master_seed,
        render: opts.render,
        clouds: CLOUD_COUNT,
        points_per_cloud: opts.points,
        split_fraction: rational::format_pq(&split.fraction()),
        corpus_size: cardinality(spec).to_string(),
        limit: opts.limit,
        shard: ShardInfo {
            index: opts.shard_index,
            count: opts.shard_count,
        },
        index_range: [lo, hi],
        png: opts.png,
        vocabulary: VOCAB_FILE.to_string(),
        records: RECORDS_FILE.to_string(),
        counts,
        created_unix: SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0),
    };
    let manifest_path = out_dir.join(MANIFEST_FILE);
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    fs::write(&manifest_path, text + "\n").map_err(io_err(&manifest_path))?;
    Ok(manifest)
}

fn write_function(
    pipeline: &Pipeline,
    out_dir: &Path,
    index: u64,
    ham: crate::expr::HamFunction,
    png: bool,
) -> Result<Vec<SampleRecord>, DataError> {
    let prepared = pipeline.prepare(index, ham)?;
    let tensor_dir = out_dir.join(format!("tensors/{index}"));
    fs::create_dir_all(&tensor_dir).map_err(io_err(&tensor_dir))?;
    if png {
        let png_dir = out_dir.join(format!("png/{index}"));
        fs::create_dir_all(&png_dir).map_err(io_err(&png_dir))?;
    }
    let mut records = Vec::with_capacity(pipeline.clouds.len());
    for cloud in &pipeline.clouds {
        let raster = pipeline.raster(&prepared, cloud);
        let tensor_path = out_dir.join(tensor_rel_path(index, cloud.id));
        fs::write(&tensor_path, raster.to_bytes()).map_err(io_err(&tensor_path))?;
        if png {
            raster.write_pngs(&out_dir.join(png_rel_base(index, cloud.id)))?;
        }
        records.push(pipeline.record(&prepared, cloud.id, png)?);
    }
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::spec_from_names;

    fn opts() -> GenerateOptions {
        GenerateOptions {
            render: RenderConfig::with_resolution(32).unwrap(),
            png: false,
            ..GenerateOptions::default()
        }
    }

    #[test]
    fn shard_ranges_partition() {
        let spec = spec_from_names("b2", "d3", false).unwrap();
        let mut o = opts();
        o.shard_count = 3;
        let ranges: Vec<_> = (0..3)
            .map(|k| {
                o.shard_index = k;
                shard_range(&spec, &o).unwrap()
            })
            .collect();
        assert_eq!(ranges, [(0, 80), (80, 161), (161, 242)]);
        o.shard_index = 3;
        assert!(shard_range(&spec, &o).is_err());
        o.shard_index = 0;
        o.shard_count = 1;
        o.limit = Some(10);
        assert_eq!(shard_range(&spec, &o).unwrap(), (0, 10));
    }

    #[test]
    fn cap_requires_limit() {
        let spec = spec_from_names("b5", "d9", false).unwrap();
        assert!(matches!(shard_range(&spec, &opts()), Err(DataError::CapExceeded { .. })));
        let mut o = opts();
        o.limit = Some(5);
        assert_eq!(shard_range(&spec, &o).unwrap(), (0, 5));
    }

    #[test]
    fn small_dataset() {
        let dir = tempfile::tempdir().unwrap();
        let spec = spec_from_names("b1", "d3", false).unwrap();
        let m = generate(&spec, 42, dir.path(), &opts()).unwrap();
        assert_eq!(m.counts.records, 400);
        assert_eq!(m.counts.hamiltonians, 8);
        assert_eq!(m.counts.train + m.counts.test, 400);
        let records = super::super::read_records(dir.path()).unwrap();
        assert_eq!(records.len(), 400);
        assert!(records.windows(2).all(|w| w[0].sample_id < w[1].sample_id));
        assert!(dir.path().join("tensors/7/49.symf").exists());
        // refuses to overwrite
        assert!(matches!(
            generate(&spec, 42, dir.path(), &opts()),
            Err(DataError::OutputNotEmpty(_))
        ));
    }
}
