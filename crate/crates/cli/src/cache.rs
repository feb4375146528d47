//! On-disk cache of torsion tables, keyed by curve and level.

use std::fs;
use std::path::{Path, PathBuf};

use modulieis_core::curve::{torsion_table, TorsionTable, WeierstrassCurve};
use modulieis_core::Error;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::{CliError, SCHEMA_VERSION};

pub const CACHE_ENV: &str = "MODULIEIS_CACHE";

/// The environment variable wins over the flag.
pub fn resolve_cache_dir(flag: Option<&Path>) -> Option<PathBuf> {
    match std::env::var_os(CACHE_ENV) {
        Some(v) if !v.is_empty() => Some(PathBuf::from(v)),
        _ => flag.map(Path::to_path_buf),
    }
}

fn cache_path(dir: &Path, curve: &WeierstrassCurve, level: u32) -> PathBuf {
    let c = curve.to_json();
    let key = format!("{}|{}|{}|{}", c["p"], c["a"], c["b"], level);
    let digest = hex::encode(Sha256::digest(key.as_bytes()));
    dir.join(format!("torsion-{}.json", &digest[..16]))
}

fn checksum(table: &Value) -> String {
    let bytes = serde_json::to_vec(table).expect("json value");
    hex::encode(Sha256::digest(&bytes))
}

pub fn cache_torsion(dir: &Path, table: &TorsionTable) -> Result<PathBuf, CliError> {
    fs::create_dir_all(dir)?;
    let body = table.to_json();
    let doc = json!({
        "schema": SCHEMA_VERSION,
        "kind": "torsion-table",
        "checksum": checksum(&body),
        "table": body,
    });
    let path = cache_path(dir, table.curve(), table.level());
    fs::write(&path, serde_json::to_vec_pretty(&doc).expect("json value"))?;
    Ok(path)
}

pub fn load_torsion(path: &Path) -> Result<TorsionTable, CliError> {
    let text = fs::read(path)?;
    let doc: Value = serde_json::from_slice(&text)
        .map_err(|e| Error::SchemaMismatch(format!("unreadable cache file: {e}")))?;
    if doc["schema"].as_u64() != Some(SCHEMA_VERSION as u64) || doc["kind"] != "torsion-table" {
        return Err(Error::SchemaMismatch("cache schema version".into()).into());
    }
    if doc["checksum"].as_str() != Some(checksum(&doc["table"]).as_str()) {
        return Err(Error::SchemaMismatch("cache checksum".into()).into());
    }
    Ok(TorsionTable::from_json(&doc["table"])?)
}

/// Loads the table from `dir` if present, otherwise enumerates and stores it.
pub fn cached_table(
    dir: Option<&Path>,
    curve: &WeierstrassCurve,
    level: u32,
) -> Result<(TorsionTable, bool), CliError> {
    let Some(dir) = dir else {
        return Ok((torsion_table(curve, level)?, false));
    };
    let path = cache_path(dir, curve, level);
    if path.exists() {
        let t = load_torsion(&path)?;
        if t.curve() == curve && t.level() == level {
            return Ok((t, true));
        }
        return Err(Error::SchemaMismatch("cache entry is for another curve".into()).into());
    }
    let t = torsion_table(curve, level)?;
    cache_torsion(dir, &t)?;
    Ok((t, false))
}
