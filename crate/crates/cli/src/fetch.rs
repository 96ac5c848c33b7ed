//! Download, checksum and unpack the UCI-HAR archive.

use std::fs;
use std::io::{Cursor, Read};
use std::path::{Path, PathBuf};

use msle::data::ucihar::{locate, ARCHIVE_DIR};
use msle::data::{load_ucihar, UciHarOptions};
use msle::{Error, Result};
use sha2::{Digest, Sha256};

pub const DEFAULT_URL: &str = "https://archive.ics.uci.edu/static/public/240/human+activity+recognition+using+smartphones.zip";

fn io_error(e: impl std::fmt::Display) -> Error {
    Error::Io(std::io::Error::other(e.to_string()))
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

fn download(url: &str) -> Result<Vec<u8>> {
    let resp = ureq::get(url).call().map_err(io_error)?;
    let mut bytes = Vec::new();
    resp.into_reader().read_to_end(&mut bytes)?;
    Ok(bytes)
}

/// Extracts `bytes` into `dest`. An inner archive named after the dataset
/// directory (the distributed download nests one) is unpacked as well.
fn unpack(bytes: &[u8], dest: &Path) -> Result<()> {
    let mut zip = zip::ZipArchive::new(Cursor::new(bytes)).map_err(io_error)?;
    let mut nested = Vec::new();
    for i in 0..zip.len() {
        let mut entry = zip.by_index(i).map_err(io_error)?;
        let Some(rel) = entry.enclosed_name() else {
            log::warn!("skipping unsafe archive path {}", entry.name());
            continue;
        };
        let target = dest.join(&rel);
        if entry.is_dir() {
            fs::create_dir_all(&target)?;
            continue;
        }
        if let Some(parent) = target.parent() {
            fs::create_dir_all(parent)?;
        }
        let mut data = Vec::with_capacity(entry.size() as usize);
        entry.read_to_end(&mut data)?;
        if rel.file_name().is_some_and(|n| n == format!("{ARCHIVE_DIR}.zip").as_str()) {
            nested.push(data);
        } else {
            fs::write(&target, data)?;
        }
    }
    for inner in nested {
        unpack(&inner, dest)?;
    }
    Ok(())
}

/// Fetches (or reads) the archive, verifies it against `expected_sha256`
/// when given, unpacks it under `dest` and checks the resulting layout.
/// Returns the dataset directory and the archive digest.
pub fn fetch_ucihar(url: &str, archive: Option<&Path>, dest: &Path, expected_sha256: Option<&str>) -> Result<(PathBuf, String)> {
    let bytes = match archive {
        Some(p) => fs::read(p)?,
        None => download(url)?,
    };
    let digest = sha256_hex(&bytes);
    if let Some(want) = expected_sha256 {
        if !want.eq_ignore_ascii_case(&digest) {
            return Err(Error::Malformed {
                path: archive.map_or_else(|| PathBuf::from(url), Path::to_path_buf),
                reason: format!("sha256 {digest} does not match the expected {want}"),
            });
        }
    }
    fs::create_dir_all(dest)?;
    fs::write(dest.join("ucihar.zip.sha256"), format!("{digest}\n"))?;
    unpack(&bytes, dest)?;
    let dir = locate(dest)?;
    load_ucihar(&dir, &UciHarOptions { strict: true })?;
    Ok((dir, digest))
}
