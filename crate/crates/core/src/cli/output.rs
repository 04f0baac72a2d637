//! CSV writers and the run manifest.
//!
//! Floats are written as `{:.16e}` (17 significant digits), which round-trips
//! every `f64` exactly.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::experiments::{HomogenizedPoint, RatioRecord, SemiclassicalPoint};
use crate::landscape::{LandscapeResult, MinimaSet};
use crate::{Error, Result};

pub const RATIOS_HEADER: &str = "seed,L,k,gamma_c,L_max,n,s,lambda_n,W_n,ratio";
pub const LANDSCAPE_HEADER: &str = "x,u,W";
pub const SPECTRUM_HEADER: &str = "n,lambda";
pub const MINIMA_HEADER: &str = "rank,s,W_value,position";
pub const ORACLE_HEADER: &str = "seed,L,k,n,lambda_n,oracle_lambda";
pub const SEMICLASSICAL_HEADER: &str = "seed,k,has_zero_well,L_max,a_min,lambda_1,u_max,ratio,sandwich";
pub const HOMOGENIZED_HEADER: &str =
    "seed,L,k,gamma_c,target_ratio,lambda_scaled,u_scaled,ratio,predicted_ratio,F_norm";

pub fn float(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt<T: ToString>(x: Option<T>) -> String {
    x.map_or_else(String::new, |v| v.to_string())
}

fn table<T>(header: &str, rows: &[T], mut row: impl FnMut(&T) -> String) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(header);
    out.push('\n');
    for r in rows {
        out.push_str(&row(r));
        out.push('\n');
    }
    out
}

pub fn ratios_csv(records: &[RatioRecord]) -> String {
    table(RATIOS_HEADER, records, |r| {
        format!(
            "{},{},{},{},{},{},{},{},{},{}",
            r.seed,
            r.len,
            float(r.k),
            float(r.gamma_c),
            r.l_max,
            r.n,
            r.s,
            float(r.lambda_n),
            float(r.w_n),
            float(r.ratio)
        )
    })
}

/// Rows only for records that carry a continuum eigenvalue.
pub fn oracle_csv(records: &[RatioRecord]) -> String {
    let with: Vec<&RatioRecord> = records
        .iter()
        .filter(|r| r.s == 1 && r.oracle_lambda.is_some())
        .collect();
    table(ORACLE_HEADER, &with, |r| {
        format!(
            "{},{},{},{},{},{}",
            r.seed,
            r.len,
            float(r.k),
            r.n,
            float(r.lambda_n),
            opt(r.oracle_lambda.map(float))
        )
    })
}

pub fn spectrum_csv(eigenvalues: &[f64]) -> String {
    let rows: Vec<(usize, f64)> = eigenvalues.iter().copied().enumerate().collect();
    table(SPECTRUM_HEADER, &rows, |(i, l)| format!("{},{}", i + 1, float(*l)))
}

pub fn landscape_csv(res: &LandscapeResult) -> String {
    let rows: Vec<usize> = (0..res.u.len()).collect();
    table(LANDSCAPE_HEADER, &rows, |&i| {
        format!("{},{},{}", float(res.x[i]), float(res.u[i]), float(res.w[i]))
    })
}

/// Each set's entries ranked from 1, tagged with the set's order.
pub fn minima_csv(sets: &[MinimaSet]) -> String {
    let rows: Vec<(usize, usize, f64, f64)> = sets
        .iter()
        .flat_map(|m| {
            m.values
                .iter()
                .zip(&m.positions)
                .enumerate()
                .map(move |(i, (v, p))| (i + 1, m.order, *v, *p))
        })
        .collect();
    table(MINIMA_HEADER, &rows, |(rank, s, v, p)| {
        format!("{rank},{s},{},{}", float(*v), float(*p))
    })
}

pub fn semiclassical_csv(points: &[SemiclassicalPoint]) -> String {
    table(SEMICLASSICAL_HEADER, points, |p| {
        format!(
            "{},{},{},{},{},{},{},{},{}",
            p.seed,
            float(p.k),
            p.has_zero_well,
            p.l_max,
            float(p.a_min),
            float(p.lambda_1),
            float(p.u_max),
            float(p.ratio),
            opt(p.sandwich)
        )
    })
}

pub fn homogenized_csv(points: &[HomogenizedPoint]) -> String {
    table(HOMOGENIZED_HEADER, points, |p| {
        format!(
            "{},{},{},{},{},{},{},{},{},{}",
            p.seed,
            p.len,
            float(p.k),
            float(p.gamma_c),
            opt(p.target_ratio.map(float)),
            float(p.lambda_scaled),
            float(p.u_scaled),
            float(p.ratio),
            float(p.predicted_ratio),
            float(p.f_norm)
        )
    })
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().fold(String::with_capacity(64), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileEntry {
    pub name: String,
    pub bytes: usize,
    pub sha256: String,
}

/// Output directory that remembers the checksum of everything written.
#[derive(Debug)]
pub struct OutputDir {
    dir: PathBuf,
    files: Vec<FileEntry>,
}

impl OutputDir {
    pub fn create(dir: &Path) -> Result<Self> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            files: Vec::new(),
        })
    }

    pub fn path(&self) -> &Path {
        &self.dir
    }

    pub fn write(&mut self, name: &str, contents: &str) -> Result<()> {
        let path = self.dir.join(name);
        std::fs::write(&path, contents).map_err(|e| Error::io(&path, e))?;
        self.files.push(FileEntry {
            name: name.to_string(),
            bytes: contents.len(),
            sha256: sha256_hex(contents.as_bytes()),
        });
        Ok(())
    }

    pub fn files(&self) -> &[FileEntry] {
        &self.files
    }
}

pub const MANIFEST_NAME: &str = "manifest.json";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config: serde_json::Value,
    pub seeds: Vec<u64>,
    pub started_unix_ms: u128,
    pub wall_clock_seconds: f64,
    pub files: Vec<FileEntry>,
    #[serde(default)]
    pub notes: serde_json::Value,
}

impl RunManifest {
    pub fn write(&self, out: &OutputDir) -> Result<()> {
        let path = out.path().join(MANIFEST_NAME);
        let text = serde_json::to_string_pretty(self).expect("manifest serializes");
        std::fs::write(&path, text + "\n").map_err(|e| Error::io(&path, e))
    }

    pub fn read(dir: &Path) -> Result<Self> {
        let path = dir.join(MANIFEST_NAME);
        let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
    }

    /// Names of listed files whose size or checksum no longer matches.
    pub fn mismatches(&self, dir: &Path) -> Vec<String> {
        self.files
            .iter()
            .filter(|f| match std::fs::read(dir.join(&f.name)) {
                Ok(bytes) => bytes.len() != f.bytes || sha256_hex(&bytes) != f.sha256,
                Err(_) => true,
            })
            .map(|f| f.name.clone())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip() {
        for x in [0.1, 1.0 / 3.0, std::f64::consts::PI, 1e-300, 6.02e23, 0.0] {
            assert_eq!(float(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(float(1.5), "1.5000000000000000e0");
    }

    #[test]
    fn digest_known_value() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }

    #[test]
    fn spectrum_layout() {
        assert_eq!(
            spectrum_csv(&[2.0, 3.0]),
            "n,lambda\n1,2.0000000000000000e0\n2,3.0000000000000000e0\n"
        );
    }

    #[test]
    fn empty_table_is_header() {
        assert_eq!(ratios_csv(&[]), format!("{RATIOS_HEADER}\n"));
    }
}
