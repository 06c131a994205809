use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use flate2::read::GzDecoder;
use flate2::write::GzEncoder;
use flate2::Compression;

use super::{NoiseProfile, SyndromeRecord};
use crate::error::{Error, Result};

fn is_gz(path: &Path) -> bool {
    path.extension().is_some_and(|e| e == "gz")
}

/// Writes one `<backend_id>.json` per profile into `dir`.
pub fn write_profiles(dir: &Path, profiles: &[NoiseProfile]) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    profiles
        .iter()
        .map(|p| {
            let path = dir.join(format!("{}.json", p.backend_id));
            let mut text = serde_json::to_string_pretty(p)?;
            text.push('\n');
            fs::write(&path, text)?;
            Ok(path)
        })
        .collect()
}

/// Reads every `*.json` profile in `dir`, sorted by file name.
pub fn read_profiles(dir: &Path) -> Result<Vec<NoiseProfile>> {
    if !dir.is_dir() {
        return Err(Error::MissingArtifact(format!("profile directory {}", dir.display())));
    }
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|e| e == "json"))
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(Error::MissingArtifact(format!("no profiles in {}", dir.display())));
    }
    paths
        .iter()
        .map(|p| {
            let prof: NoiseProfile = serde_json::from_str(&fs::read_to_string(p)?)?;
            prof.validate()?;
            Ok(prof)
        })
        .collect()
}

/// Appends records to a JSON-Lines file, gzip-compressed if the path ends
/// in `.gz`.
pub struct ShotLogWriter {
    out: Box<dyn Write>,
}

impl ShotLogWriter {
    pub fn create(path: &Path) -> Result<Self> {
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
        let file = BufWriter::new(File::create(path)?);
        let out: Box<dyn Write> =
            if is_gz(path) { Box::new(GzEncoder::new(file, Compression::default())) } else { Box::new(file) };
        Ok(ShotLogWriter { out })
    }

    pub fn write(&mut self, records: &[SyndromeRecord]) -> Result<()> {
        for r in records {
            serde_json::to_writer(&mut self.out, r)?;
            self.out.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn finish(mut self) -> Result<()> {
        self.out.flush()?;
        Ok(())
    }
}

pub fn write_shot_log(path: &Path, records: &[SyndromeRecord]) -> Result<()> {
    let mut w = ShotLogWriter::create(path)?;
    w.write(records)?;
    w.finish()
}

pub fn read_shot_log(path: &Path) -> Result<Vec<SyndromeRecord>> {
    if !path.is_file() {
        return Err(Error::MissingArtifact(format!("shot log {}", path.display())));
    }
    let file = File::open(path)?;
    let reader: Box<dyn Read> = if is_gz(path) { Box::new(GzDecoder::new(file)) } else { Box::new(file) };
    let mut out = Vec::new();
    for line in BufReader::new(reader).lines() {
        let line = line?;
        if !line.trim().is_empty() {
            out.push(serde_json::from_str(&line)?);
        }
    }
    Ok(out)
}
