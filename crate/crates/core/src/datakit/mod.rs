//! On-disk datasets: one record per (Hamiltonian, cloud) with a SYMF tensor,
//! optional PNGs, tokens and a deterministic train/test split.
//!
//! ```text
//! <dir>/manifest.json
//! <dir>/records.jsonl
//! <dir>/vocab.json
//! <dir>/tensors/<corpus_index>/<cloud_id>.symf
//! <dir>/png/<corpus_index>/<cloud_id>_{q,s,h}.png
//! ```

mod generate;
mod score;
mod verify;

use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};

use num_integer::Integer;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cloud::{splitmix64, CloudError, PointCloud};
use crate::corpus::{BasisSpec, CorpusError, SpecDescriptor};
use crate::expr::{HamError, HamFunction};
use crate::hamfield::{eval_field, ham_field, CompiledField, FieldExpr};
use crate::raster::{self, Raster, RasterError, RenderConfig};
use crate::rational::{self, Rational};
use crate::tokens::{TokenError, TokenVocab};

pub use generate::{generate, GenerateOptions, DEFAULT_CAP};
pub use score::{score_predictions, Prediction, SampleScore, ScoreReport};
pub use verify::{verify, Failure, VerifyOptions, VerifyReport};

pub const MANIFEST_FILE: &str = "manifest.json";
pub const RECORDS_FILE: &str = "records.jsonl";
pub const VOCAB_FILE: &str = "vocab.json";
pub const FORMAT_VERSION: u32 = 1;
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Error)]
pub enum DataError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}:{line}: {source}")]
    Json {
        path: PathBuf,
        line: usize,
        source: serde_json::Error,
    },
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Cloud(#[from] CloudError),
    #[error(transparent)]
    Raster(#[from] RasterError),
    #[error(transparent)]
    Token(#[from] TokenError),
    #[error(transparent)]
    Ham(#[from] HamError),
    #[error("corpus range holds {size} functions, above the cap of {cap}; pass a limit")]
    CapExceeded { size: String, cap: u64 },
    #[error("invalid shard {index}/{count}")]
    BadShard { index: u32, count: u32 },
    #[error("split fraction must lie in [0, 1], got {0}")]
    BadSplit(String),
    #[error("worker count must be positive")]
    BadWorkers,
    #[error("corpus index {0} too large for 64-bit sample ids")]
    IndexTooLarge(String),
    #[error("output directory {0} is not empty")]
    OutputNotEmpty(PathBuf),
    #[error("invalid manifest: {0}")]
    Manifest(String),
    #[error("unknown sample_id {0}")]
    UnknownSample(u64),
    #[error("sample_id {0} predicted more than once")]
    DuplicatePrediction(u64),
    #[error("predictions file is empty")]
    EmptyPredictions,
}

pub(crate) fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> DataError + '_ {
    move |source| DataError::Io {
        path: path.to_path_buf(),
        source,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Test,
}

/// Train with probability `p/q`: a sample is test iff
/// `splitmix64(seed ^ sample_id) mod q < q - p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SplitRule {
    train: u64,
    den: u64,
}

impl SplitRule {
    pub fn new(fraction: Rational) -> Result<Self, DataError> {
        let bad = || DataError::BadSplit(rational::format_pq(&fraction));
        if *fraction.numer() < 0 || fraction > Rational::from_integer(1) {
            return Err(bad());
        }
        Ok(SplitRule {
            train: u64::try_from(*fraction.numer()).map_err(|_| bad())?,
            den: u64::try_from(*fraction.denom()).map_err(|_| bad())?,
        })
    }

    pub fn fraction(&self) -> Rational {
        Rational::new(self.train as i64, self.den as i64)
    }

    pub fn assign(&self, master_seed: u64, sample_id: u64) -> Split {
        let r = splitmix64(master_seed ^ sample_id).mod_floor(&self.den);
        if r < self.den - self.train {
            Split::Test
        } else {
            Split::Train
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleRecord {
    pub sample_id: u64,
    pub corpus_index: u64,
    pub hamiltonian: String,
    pub field_dx: String,
    pub field_dy: String,
    pub cloud_id: u32,
    pub token_indices: Vec<usize>,
    pub tensor_path: String,
    pub png_paths: Vec<String>,
    pub split: Split,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShardInfo {
    pub index: u32,
    pub count: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Counts {
    pub hamiltonians: u64,
    pub records: u64,
    pub train: u64,
    pub test: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub format_version: u32,
    pub tool_version: String,
    pub spec: SpecDescriptor,
    pub master_seed: u64,
    pub render: RenderConfig,
    pub clouds: u32,
    pub points_per_cloud: usize,
    /// Train fraction as `p/q`.
    pub split_fraction: String,
    pub corpus_size: String,
    pub limit: Option<u64>,
    pub shard: ShardInfo,
    /// Corpus indices covered, `[lo, hi)`.
    pub index_range: [u64; 2],
    pub png: bool,
    pub vocabulary: String,
    pub records: String,
    pub counts: Counts,
    /// Seconds since the Unix epoch; the only field that varies between
    /// identical runs.
    pub created_unix: u64,
}

impl DatasetManifest {
    pub fn load(dir: &Path) -> Result<Self, DataError> {
        let path = dir.join(MANIFEST_FILE);
        let text = std::fs::read_to_string(&path).map_err(io_err(&path))?;
        serde_json::from_str(&text).map_err(|source| DataError::Json {
            path,
            line: 0,
            source,
        })
    }

    pub fn basis(&self) -> Result<BasisSpec, DataError> {
        Ok(self.spec.to_spec()?)
    }

    pub fn split_rule(&self) -> Result<SplitRule, DataError> {
        let f = rational::parse_rational(&self.split_fraction)
            .map_err(|_| DataError::BadSplit(self.split_fraction.clone()))?;
        SplitRule::new(f)
    }
}

pub fn read_records(dir: &Path) -> Result<Vec<SampleRecord>, DataError> {
    read_jsonl(&dir.join(RECORDS_FILE))
}

pub(crate) fn read_jsonl<T: serde::de::DeserializeOwned>(path: &Path) -> Result<Vec<T>, DataError> {
    let f = File::open(path).map_err(io_err(path))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(f).lines().enumerate() {
        let line = line.map_err(io_err(path))?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).map_err(|source| DataError::Json {
            path: path.to_path_buf(),
            line: i + 1,
            source,
        })?);
    }
    Ok(out)
}

pub fn tensor_rel_path(corpus_index: u64, cloud_id: u32) -> String {
    format!("tensors/{corpus_index}/{cloud_id:02}.symf")
}

pub fn png_rel_base(corpus_index: u64, cloud_id: u32) -> String {
    format!("png/{corpus_index}/{cloud_id:02}")
}

pub fn png_rel_paths(corpus_index: u64, cloud_id: u32) -> Vec<String> {
    raster::CHANNEL_SUFFIXES
        .iter()
        .map(|s| format!("{}_{s}.png", png_rel_base(corpus_index, cloud_id)))
        .collect()
}

/// Everything that does not depend on the cloud, computed once per function.
pub(crate) struct Prepared {
    pub index: u64,
    pub ham: HamFunction,
    pub field: FieldExpr,
    pub compiled: CompiledField,
    pub stream: Vec<f32>,
    pub heat: Vec<f32>,
    pub tokens: Vec<usize>,
}

/// Shared, read-only generation context.
pub(crate) struct Pipeline {
    pub vocab: TokenVocab,
    pub clouds: Vec<PointCloud>,
    pub render: RenderConfig,
    pub split: SplitRule,
    pub master_seed: u64,
}

impl Pipeline {
    pub fn sample_id(&self, corpus_index: u64, cloud_id: u32) -> Result<u64, DataError> {
        corpus_index
            .checked_mul(self.clouds.len() as u64)
            .and_then(|v| v.checked_add(u64::from(cloud_id)))
            .ok_or_else(|| DataError::IndexTooLarge(corpus_index.to_string()))
    }

    pub fn prepare(&self, index: u64, ham: HamFunction) -> Result<Prepared, DataError> {
        let field = ham_field(&ham);
        let compiled = field.compile();
        let stream = raster::streamline_channel(&compiled, &self.render);
        let heat = raster::heatmap_channel(&compiled, &self.render);
        let tokens = self.vocab.vectorize(&ham)?.ones().to_vec();
        Ok(Prepared {
            index,
            ham,
            field,
            compiled,
            stream,
            heat,
            tokens,
        })
    }

    pub fn raster(&self, p: &Prepared, cloud: &PointCloud) -> Raster {
        let sample = eval_field(&p.compiled, cloud);
        let quiver = raster::quiver_channel(&sample, &self.render);
        Raster::from_channels(
            self.render.resolution as usize,
            [&quiver, &p.stream, &p.heat],
        )
    }

    pub fn record(&self, p: &Prepared, cloud_id: u32, png: bool) -> Result<SampleRecord, DataError> {
        let sample_id = self.sample_id(p.index, cloud_id)?;
        Ok(SampleRecord {
            sample_id,
            corpus_index: p.index,
            hamiltonian: p.ham.to_string(),
            field_dx: p.field.dx.to_string(),
            field_dy: p.field.dy.to_string(),
            cloud_id,
            token_indices: p.tokens.clone(),
            tensor_path: tensor_rel_path(p.index, cloud_id),
            png_paths: if png {
                png_rel_paths(p.index, cloud_id)
            } else {
                Vec::new()
            },
            split: self.split.assign(self.master_seed, sample_id),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    #[test]
    fn three_quarters_is_mod_four() {
        let rule = SplitRule::new(ratio(3, 4)).unwrap();
        for id in 0..2000u64 {
            let expect = if splitmix64(42 ^ id) % 4 == 0 {
                Split::Test
            } else {
                Split::Train
            };
            assert_eq!(rule.assign(42, id), expect);
        }
    }

    #[test]
    fn split_extremes() {
        let all = SplitRule::new(ratio(1, 1)).unwrap();
        let none = SplitRule::new(ratio(0, 1)).unwrap();
        assert!((0..100).all(|i| all.assign(1, i) == Split::Train));
        assert!((0..100).all(|i| none.assign(1, i) == Split::Test));
        assert!(SplitRule::new(ratio(5, 4)).is_err());
        assert!(SplitRule::new(ratio(-1, 4)).is_err());
    }

    #[test]
    fn relative_paths() {
        assert_eq!(tensor_rel_path(17, 3), "tensors/17/03.symf");
        assert_eq!(png_rel_paths(0, 49)[1], "png/0/49_s.png");
    }
}
