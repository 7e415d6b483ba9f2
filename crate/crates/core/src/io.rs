//! JSON files for quasi-representations.
//!
//! ```json
//! { "domain": {"kind": "finite", "cayley_file": "g.txt"} | {"kind": "free", "k": 2, "L": 4},
//!   "dim": 2,
//!   "values": { "0": {"rows": 2, "cols": 2, "data": [[1.0, 0.0], ...]}, ... } }
//! ```
//!
//! Finite-domain keys are element indices; free-domain keys are words such
//! as `"aB"`, with `""` for the identity. A Cayley file path is resolved
//! relative to the JSON file.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::FiniteGroup;
use crate::induction::InducedRep;
use crate::linalg::{CMatrix, MatrixRecord, UnitaryMatrix};
use crate::quasirep::{Domain, QuasiRep};
use crate::word::{FreeWord, WordBall};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum DomainRecord {
    Finite { cayley_file: PathBuf },
    Free { k: usize, #[serde(rename = "L")] radius: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuasiRepRecord {
    pub domain: DomainRecord,
    pub dim: usize,
    pub values: BTreeMap<String, MatrixRecord>,
    /// Coset representatives in block order, for induced maps.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub layout: Option<Vec<usize>>,
}

impl QuasiRepRecord {
    pub fn from_quasirep(mu: &QuasiRep, cayley_file: Option<&Path>) -> Result<Self> {
        let (domain, keys): (DomainRecord, Vec<String>) = match mu.domain() {
            Domain::Finite(g) => {
                let file = cayley_file
                    .ok_or_else(|| Error::Usage("a finite domain needs a Cayley file name".into()))?;
                (DomainRecord::Finite { cayley_file: file.to_path_buf() }, g.elements().map(|i| i.to_string()).collect())
            }
            Domain::Free(b) => (
                DomainRecord::Free { k: b.generators(), radius: b.radius() },
                b.words().iter().map(|w| w.to_string()).collect(),
            ),
        };
        let values = keys
            .into_iter()
            .enumerate()
            .map(|(i, k)| (k, MatrixRecord::from(mu.value(i))))
            .collect();
        Ok(Self { domain, dim: mu.dim(), values, layout: None })
    }

    /// Rebuilds the map; `base_dir` resolves a relative Cayley file.
    pub fn to_quasirep(&self, base_dir: &Path) -> Result<QuasiRep> {
        let domain = match &self.domain {
            DomainRecord::Finite { cayley_file } => {
                Domain::Finite(Arc::new(FiniteGroup::read_cayley_file(base_dir.join(cayley_file))?))
            }
            DomainRecord::Free { k, radius } => Domain::Free(Arc::new(WordBall::new(*k, *radius)?)),
        };
        let n = domain.size();
        let mut slots: Vec<Option<UnitaryMatrix>> = vec![None; n];
        for (key, rec) in &self.values {
            let idx = match &domain {
                Domain::Finite(_) => key.parse::<usize>().ok().filter(|&i| i < n),
                Domain::Free(b) => key.parse::<FreeWord>().ok().and_then(|w| b.index_of(&w)),
            }
            .ok_or_else(|| Error::Parse(format!("key {key:?} is not an element of the domain")))?;
            let m = CMatrix::try_from(rec)?;
            if m.shape() != (self.dim, self.dim) {
                return Err(Error::Parse(format!("value at {key:?} is not {0}x{0}", self.dim)));
            }
            slots[idx] = Some(UnitaryMatrix::new(m)?);
        }
        let values = slots
            .into_iter()
            .enumerate()
            .map(|(i, v)| v.ok_or_else(|| Error::Parse(format!("missing value for {}", domain.label(i)))))
            .collect::<Result<Vec<_>>>()?;
        QuasiRep::new(domain, self.dim, values)
    }
}

fn cayley_name(path: &Path) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    PathBuf::from(format!("{stem}.cayley.txt"))
}

fn write_record(path: &Path, mu: &QuasiRep, layout: Option<Vec<usize>>) -> Result<()> {
    let cayley = match mu.domain() {
        Domain::Finite(g) => {
            let name = cayley_name(path);
            let dir = path.parent().unwrap_or_else(|| Path::new(""));
            g.write_cayley_file(dir.join(&name))?;
            Some(name)
        }
        Domain::Free(_) => None,
    };
    let mut rec = QuasiRepRecord::from_quasirep(mu, cayley.as_deref())?;
    rec.layout = layout;
    std::fs::write(path, serde_json::to_string_pretty(&rec)?)?;
    Ok(())
}

/// Writes `μ` as JSON; a finite domain's Cayley table goes next to it as
/// `<stem>.cayley.txt`.
pub fn write_quasirep(path: impl AsRef<Path>, mu: &QuasiRep) -> Result<()> {
    write_record(path.as_ref(), mu, None)
}

pub fn read_quasirep(path: impl AsRef<Path>) -> Result<QuasiRep> {
    let path = path.as_ref();
    let rec: QuasiRepRecord = serde_json::from_str(&std::fs::read_to_string(path)?)?;
    rec.to_quasirep(path.parent().unwrap_or_else(|| Path::new("")))
}

/// Writes the induced map with its block layout.
pub fn write_induced(path: impl AsRef<Path>, induced: &InducedRep) -> Result<()> {
    write_record(path.as_ref(), &induced.total, Some(induced.block_layout().to_vec()))
}

/// Reads an induced map and its block layout.
pub fn read_induced(path: impl AsRef<Path>) -> Result<(QuasiRep, Vec<usize>)> {
    let path = path.as_ref();
    let rec: QuasiRepRecord = serde_json::from_str(&std::fs::read_to_string(path)?)?;
    let layout = rec.layout.clone().ok_or_else(|| Error::Parse("missing block layout".into()))?;
    Ok((rec.to_quasirep(path.parent().unwrap_or_else(|| Path::new("")))?, layout))
}
