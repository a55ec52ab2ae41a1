//! JSON file schemas and loaders.
//!
//! All rationals travel as strings `"p/q"` (integers may also appear as bare
//! JSON numbers on input) and are re-serialized in canonical reduced form.
//! A space file looks like:
//!
//! ```json
//! {
//!   "points": ["a", "b", "c"],
//!   "K": "2",
//!   "D": [["0", "1/5", "1/2"], ["1/4", "0", "1/4"], ["1/4", "1/5", "0"]],
//!   "asserted": ["left_complete"]
//! }
//! ```
//!
//! Row `i` of `D` holds the distances from `points[i]`. Sequence and problem
//! files reference other files by path, resolved relative to the referencing
//! file's directory.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::admissibility::{AdmissiblePair, SelfMap};
use crate::certifier::Problem;
use crate::error::Error;
use crate::rational::Rat;
use crate::space::{CompletenessFlag, QPSpace};

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}:{column}: {message}")]
    Parse { path: String, line: usize, column: usize, message: String },
    #[error("{path}: {source}")]
    Invalid {
        path: String,
        #[source]
        source: Error,
    },
}

impl LoadError {
    fn invalid(path: &Path, source: Error) -> Self {
        LoadError::Invalid { path: path.display().to_string(), source }
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, LoadError> {
    let text = fs::read_to_string(path)
        .map_err(|source| LoadError::Io { path: path.display().to_string(), source })?;
    serde_json::from_str(&text).map_err(|e| LoadError::Parse {
        path: path.display().to_string(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

/// Resolves `reference` relative to the directory containing `file`.
fn resolve(file: &Path, reference: &str) -> PathBuf {
    let reference = Path::new(reference);
    if reference.is_absolute() {
        reference.to_path_buf()
    } else {
        file.parent().unwrap_or_else(|| Path::new(".")).join(reference)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpaceFile {
    pub points: Vec<String>,
    #[serde(rename = "K")]
    pub k: Rat,
    #[serde(rename = "D")]
    pub d: Vec<Vec<Rat>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub asserted: Vec<String>,
}

impl SpaceFile {
    pub fn into_space(self) -> Result<QPSpace, Error> {
        let mut flags = BTreeSet::new();
        for tag in &self.asserted {
            flags.insert(CompletenessFlag::parse(tag)?);
        }
        QPSpace::new(self.points, self.d, self.k, flags)
    }

    pub fn from_space(space: &QPSpace) -> Self {
        SpaceFile {
            points: space.points().to_vec(),
            k: space.coeff_k().clone(),
            d: space.matrix().to_vec(),
            asserted: space.flags().iter().map(|f| f.as_str().to_string()).collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SequenceFile {
    pub space: String,
    pub entries: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PairFile {
    pub alpha: Vec<Vec<Rat>>,
    pub beta: Vec<Vec<Rat>>,
    #[serde(rename = "C_alpha")]
    pub c_alpha: Rat,
    #[serde(rename = "C_beta")]
    pub c_beta: Rat,
}

impl PairFile {
    pub fn into_pair(self) -> Result<AdmissiblePair, Error> {
        AdmissiblePair::new(self.alpha, self.beta, self.c_alpha, self.c_beta)
    }

    pub fn from_pair(pair: &AdmissiblePair) -> Self {
        PairFile {
            alpha: pair.alpha_matrix().to_vec(),
            beta: pair.beta_matrix().to_vec(),
            c_alpha: pair.c_alpha().clone(),
            c_beta: pair.c_beta().clone(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MapFile {
    pub f: BTreeMap<String, String>,
}

impl MapFile {
    pub fn into_map(self, space: &QPSpace) -> Result<SelfMap, Error> {
        SelfMap::new(space, self.f.iter().map(|(a, b)| (a.as_str(), b.as_str())))
    }

    pub fn from_map(space: &QPSpace, map: &SelfMap) -> Self {
        let f = space
            .points()
            .iter()
            .enumerate()
            .map(|(i, p)| (p.clone(), space.point(map.apply(i)).to_string()))
            .collect();
        MapFile { f }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProblemFile {
    pub space: String,
    pub map: String,
    pub pair: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<String>,
}

pub fn load_space(path: &Path) -> Result<QPSpace, LoadError> {
    let file: SpaceFile = read_json(path)?;
    file.into_space().map_err(|e| LoadError::invalid(path, e))
}

/// Loads a sequence file and the space it references. The entries are
/// returned as names; bind them with [`crate::sequence::SeqPrefix::new`].
pub fn load_sequence(path: &Path) -> Result<(QPSpace, Vec<String>), LoadError> {
    let file: SequenceFile = read_json(path)?;
    let space = load_space(&resolve(path, &file.space))?;
    for entry in &file.entries {
        space
            .index_of(entry)
            .map_err(|e| LoadError::invalid(path, e))?;
    }
    Ok((space, file.entries))
}

pub fn load_pair(path: &Path) -> Result<AdmissiblePair, LoadError> {
    let file: PairFile = read_json(path)?;
    file.into_pair().map_err(|e| LoadError::invalid(path, e))
}

pub fn load_map(path: &Path, space: &QPSpace) -> Result<SelfMap, LoadError> {
    let file: MapFile = read_json(path)?;
    file.into_map(space).map_err(|e| LoadError::invalid(path, e))
}

/// Loads a problem bundle; the profile named in the file (if any) is
/// returned as-is for the caller to interpret.
pub fn load_problem(path: &Path) -> Result<(Problem, Option<String>), LoadError> {
    let file: ProblemFile = read_json(path)?;
    let space = load_space(&resolve(path, &file.space))?;
    let map = load_map(&resolve(path, &file.map), &space)?;
    let pair = load_pair(&resolve(path, &file.pair))?;
    if let Some(seed) = &file.seed {
        space.index_of(seed).map_err(|e| LoadError::invalid(path, e))?;
    }
    let problem = Problem { space, map, pair, seed: file.seed };
    Ok((problem, file.profile))
}

/// Canonical pretty serialization used for every emitted document: fixed key
/// order, two-space indent, trailing newline.
pub fn to_canonical_json<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("serializable");
    text.push('\n');
    text
}
