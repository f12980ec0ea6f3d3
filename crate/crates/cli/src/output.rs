//! Output directory bookkeeping and the run manifest.

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::args::Command;
use crate::error::{CliError, Result};

/// Fixed float format for every CSV: 17 significant digits, so values
/// round-trip exactly and reruns are byte-identical.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub struct OutDir {
    dir: PathBuf,
    written: Vec<String>,
}

impl OutDir {
    pub fn create(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir).map_err(CliError::io(dir))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            written: Vec::new(),
        })
    }

    pub fn path(&self) -> &Path {
        &self.dir
    }

    /// Opens `name` for writing and records it in the manifest list.
    pub fn file(&mut self, name: &str) -> Result<BufWriter<File>> {
        let path = self.dir.join(name);
        let f = File::create(&path).map_err(CliError::io(&path))?;
        if !self.written.iter().any(|w| w == name) {
            self.written.push(name.to_string());
        }
        Ok(BufWriter::new(f))
    }

    pub fn csv(&mut self, name: &str) -> Result<CsvOut> {
        let path = self.dir.join(name);
        Ok(CsvOut {
            inner: csv::Writer::from_writer(self.file(name)?),
            path,
        })
    }

    pub fn written(&self) -> &[String] {
        &self.written
    }
}

pub struct CsvOut {
    inner: csv::Writer<BufWriter<File>>,
    path: PathBuf,
}

impl CsvOut {
    pub fn row<I, S>(&mut self, fields: I) -> Result<()>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        self.inner.write_record(fields).map_err(|e| self.csv_err(e))
    }

    pub fn finish(mut self) -> Result<()> {
        self.inner.flush().map_err(CliError::io(&self.path))
    }

    fn csv_err(&self, e: csv::Error) -> CliError {
        CliError::Io {
            path: self.path.clone(),
            source: e.into(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Versions {
    pub fracpade: String,
    pub cli: String,
}

impl Versions {
    pub fn current() -> Self {
        Self {
            fracpade: fracpade::VERSION.to_string(),
            cli: env!("CARGO_PKG_VERSION").to_string(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MeshStats {
    pub source: String,
    pub vertices: usize,
    pub triangles: usize,
    pub edges: usize,
    pub boundary_vertices: usize,
    pub euler_characteristic: i64,
    pub dofs: usize,
    pub mode: String,
    pub total_area: f64,
    pub max_edge_length: f64,
}

/// Everything needed to reproduce a run: the resolved configuration
/// (flattened as `subcommand` + `config`), plus what the run produced.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    #[serde(flatten)]
    pub command: Command,
    pub versions: Versions,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub meshes: Vec<MeshStats>,
    #[serde(default)]
    pub results: serde_json::Value,
    /// Wall-clock seconds per phase.
    #[serde(default)]
    pub timing: serde_json::Map<String, serde_json::Value>,
    pub outputs: Vec<String>,
}

pub const MANIFEST_NAME: &str = "manifest.json";

impl RunManifest {
    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(CliError::io(path))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::validation(format!("{}: invalid manifest: {e}", path.display())))
    }

    pub fn write(&self, out: &mut OutDir) -> Result<PathBuf> {
        let path = out.path().join(MANIFEST_NAME);
        let text = serde_json::to_string_pretty(self).expect("manifest serialises");
        fs::write(&path, text + "\n").map_err(CliError::io(&path))?;
        Ok(path)
    }
}
