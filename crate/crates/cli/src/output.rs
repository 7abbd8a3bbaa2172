//! Output directories: every file is written to a temp file in the target
//! directory and renamed into place, and its SHA-256 lands in the manifest.

use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};
use tempfile::NamedTempFile;

pub const MANIFEST: &str = "manifest.json";

struct HashingWriter<W> {
    inner: W,
    hasher: Sha256,
    bytes: u64,
}

impl<W: Write> Write for HashingWriter<W> {
    fn write(&mut self, buf: &[u8]) -> io::Result<usize> {
        let n = self.inner.write(buf)?;
        self.hasher.update(&buf[..n]);
        self.bytes += n as u64;
        Ok(n)
    }

    fn flush(&mut self) -> io::Result<()> {
        self.inner.flush()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct OutputFile {
    pub name: String,
    pub bytes: u64,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct StageTiming {
    pub stage: String,
    pub seconds: f64,
}

#[derive(Debug, Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    inputs: &'a serde_json::Value,
    output_dir: String,
    config: &'a serde_json::Value,
    timings: &'a [StageTiming],
    outputs: &'a [OutputFile],
}

pub struct OutputDir {
    dir: PathBuf,
    files: Vec<OutputFile>,
    timings: Vec<StageTiming>,
    stage_start: Instant,
}

impl OutputDir {
    pub fn create(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            files: Vec::new(),
            timings: Vec::new(),
            stage_start: Instant::now(),
        })
    }

    /// Close the current stage under `name` and start the next one.
    pub fn stage(&mut self, name: &str) {
        let now = Instant::now();
        self.timings.push(StageTiming {
            stage: name.to_string(),
            seconds: now.duration_since(self.stage_start).as_secs_f64(),
        });
        self.stage_start = now;
    }

    pub fn write<F>(&mut self, name: &str, body: F) -> Result<()>
    where
        F: FnOnce(&mut dyn Write) -> Result<()>,
    {
        let entry = write_atomic(&self.dir, name, body)?;
        self.files.retain(|f| f.name != name);
        self.files.push(entry);
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        self.write(name, |w| {
            serde_json::to_writer_pretty(&mut *w, value)?;
            w.write_all(b"\n")?;
            Ok(())
        })
    }

    pub fn write_bytes(&mut self, name: &str, data: &[u8]) -> Result<()> {
        self.write(name, |w| Ok(w.write_all(data)?))
    }

    #[cfg(test)]
    pub fn files(&self) -> &[OutputFile] {
        &self.files
    }

    /// Write `manifest.json` last. It is the only file that records paths and
    /// wall-clock times; everything it lists is reproducible byte for byte.
    pub fn finish(
        mut self,
        command: &str,
        inputs: serde_json::Value,
        config: serde_json::Value,
    ) -> Result<()> {
        self.stage("write");
        self.files.sort_by(|a, b| a.name.cmp(&b.name));
        let manifest = Manifest {
            tool: "dropreef",
            version: env!("CARGO_PKG_VERSION"),
            command,
            inputs: &inputs,
            output_dir: self.dir.display().to_string(),
            config: &config,
            timings: &self.timings,
            outputs: &self.files,
        };
        write_atomic(&self.dir, MANIFEST, |w| {
            serde_json::to_writer_pretty(&mut *w, &manifest)?;
            w.write_all(b"\n")?;
            Ok(())
        })?;
        Ok(())
    }
}

fn write_atomic<F>(dir: &Path, name: &str, body: F) -> Result<OutputFile>
where
    F: FnOnce(&mut dyn Write) -> Result<()>,
{
    let target = dir.join(name);
    let tmp = NamedTempFile::new_in(dir)
        .with_context(|| format!("creating a temporary file in {}", dir.display()))?;
    let mut w = BufWriter::with_capacity(
        1 << 16,
        HashingWriter {
            inner: tmp,
            hasher: Sha256::new(),
            bytes: 0,
        },
    );
    body(&mut w).with_context(|| format!("writing {}", target.display()))?;
    let HashingWriter {
        inner: tmp,
        hasher,
        bytes,
    } = w
        .into_inner()
        .map_err(|e| e.into_error())
        .with_context(|| format!("writing {}", target.display()))?;
    tmp.as_file().sync_all()?;
    tmp.persist(&target)
        .map_err(|e| e.error)
        .with_context(|| format!("renaming into {}", target.display()))?;
    Ok(OutputFile {
        name: name.to_string(),
        bytes,
        sha256: hex::encode(hasher.finalize()),
    })
}
