//! Named Seifert manifolds: the shipped JSON catalog plus parametric families.

use std::path::Path;

use reeb_core::seifert_rr::{validate, SeifertData, SeifertError};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Environment variable naming a catalog file that replaces the shipped one.
pub const CATALOG_ENV: &str = "REEB_CATALOG";

const SHIPPED: &str = include_str!("../data/catalog.json");

#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("cannot read catalog {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("malformed catalog: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("catalog entry {name:?} is invalid: {source}")]
    Invalid { name: String, source: SeifertError },
    #[error("duplicate catalog entry {0:?}")]
    Duplicate(String),
    #[error("unknown manifold {0:?}")]
    Unknown(String),
    #[error("{name}: {source}")]
    Family { name: String, source: SeifertError },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub name: String,
    pub deg: i64,
    pub genus: i64,
    pub fibers: Vec<[i64; 2]>,
    #[serde(default)]
    pub notes: String,
}

impl CatalogEntry {
    pub fn data(&self) -> SeifertData {
        let pairs: Vec<(i64, i64)> = self.fibers.iter().map(|f| (f[0], f[1])).collect();
        SeifertData::new(self.deg, self.genus, &pairs)
    }

    pub fn from_data(name: &str, data: &SeifertData, notes: &str) -> Self {
        CatalogEntry {
            name: name.to_string(),
            deg: data.deg,
            genus: data.genus,
            fibers: data.fibers.iter().map(|f| [f.a, f.b]).collect(),
            notes: notes.to_string(),
        }
    }
}

/// Seifert invariants given inline, in the catalog's field layout.
#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InlineSeifert {
    pub deg: i64,
    pub genus: i64,
    #[serde(default)]
    pub fibers: Vec<[i64; 2]>,
}

impl InlineSeifert {
    pub fn data(&self) -> SeifertData {
        let pairs: Vec<(i64, i64)> = self.fibers.iter().map(|f| (f[0], f[1])).collect();
        SeifertData::new(self.deg, self.genus, &pairs)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Catalog {
    pub entries: Vec<CatalogEntry>,
}

impl Catalog {
    /// Parses and validates a catalog document.
    pub fn parse(text: &str) -> Result<Self, CatalogError> {
        let entries: Vec<CatalogEntry> = serde_json::from_str(text)?;
        for (i, e) in entries.iter().enumerate() {
            if entries[..i].iter().any(|o| o.name == e.name) {
                return Err(CatalogError::Duplicate(e.name.clone()));
            }
            validate(&e.data()).map_err(|source| CatalogError::Invalid {
                name: e.name.clone(),
                source,
            })?;
        }
        Ok(Catalog { entries })
    }

    pub fn shipped() -> Self {
        Catalog::parse(SHIPPED).expect("shipped catalog is valid")
    }

    pub fn from_file(path: &Path) -> Result<Self, CatalogError> {
        let text = std::fs::read_to_string(path).map_err(|source| CatalogError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Catalog::parse(&text)
    }

    /// The override file if the environment names one, else the shipped catalog.
    pub fn load() -> Result<Self, CatalogError> {
        match std::env::var_os(CATALOG_ENV) {
            Some(path) if !path.is_empty() => Catalog::from_file(Path::new(&path)),
            _ => Ok(Catalog::shipped()),
        }
    }

    /// Catalog entry by name, falling back to the t1_sigma_<g> and lens_<p> families.
    pub fn resolve(&self, name: &str) -> Result<CatalogEntry, CatalogError> {
        if let Some(e) = self.entries.iter().find(|e| e.name == name) {
            return Ok(e.clone());
        }
        let family = |prefix: &str| {
            name.strip_prefix(prefix)
                .and_then(|r| r.parse::<i64>().ok())
        };
        let entry = if let Some(g) = family("t1_sigma_") {
            CatalogEntry {
                name: name.to_string(),
                deg: 2 * (1 - g),
                genus: g,
                fibers: Vec::new(),
                notes: "unit tangent bundle family, fibres of period 2 pi".to_string(),
            }
        } else if let Some(p) = family("lens_") {
            CatalogEntry {
                name: name.to_string(),
                deg: -p,
                genus: 0,
                fibers: Vec::new(),
                notes: format!(
                    "lens space L({p}, 1), 2 pi rescale; standard structure is --deform 1/{p}"
                ),
            }
        } else {
            return Err(CatalogError::Unknown(name.to_string()));
        };
        validate(&entry.data()).map_err(|source| CatalogError::Family {
            name: name.to_string(),
            source,
        })?;
        Ok(entry)
    }
}
