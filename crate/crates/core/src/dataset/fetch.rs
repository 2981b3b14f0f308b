//! Manifest-driven dataset download with a checksum-verified cache.
//!
//! A manifest is a JSON array of entries:
//!
//! ```json
//! [{"name": "emotions", "url": "https://.../emotions.zip",
//!   "sha256": "…", "labels": {"xml": "emotions.xml"}, "arff": "emotions.arff"}]
//! ```
//!
//! `labels` is one of `{"xml": <path>}`, `{"first": n}`, `{"last": n}` or
//! `{"header": null}`. For zip archives `xml` and `arff` name members of the
//! archive; otherwise `xml` is a URL or a path relative to the manifest.
//! URLs may be `http(s)://`, `file://` or plain local paths.
//!
//! Downloads land in `<cache>/<sha256>/<file>` through a temporary file and
//! an atomic rename; a cached file whose checksum matches is used without
//! touching the network.

use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::labels::{parse_label_xml, LabelSpec};
use super::{io_err, parse_arff, DatasetError, MultiLabelDataset};

/// Environment variable overriding the cache directory.
pub const CACHE_ENV: &str = "MLUFS_CACHE_DIR";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ManifestLabels {
    Xml(String),
    First(usize),
    Last(usize),
    Header(Option<()>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub name: String,
    pub url: String,
    pub sha256: String,
    pub labels: ManifestLabels,
    /// ARFF member inside a zip archive.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub arff: Option<String>,
}

pub type Manifest = Vec<ManifestEntry>;

#[derive(Debug, Clone)]
pub struct FetchOptions {
    pub cache_dir: PathBuf,
    /// Use the cache only; never open a network connection.
    pub offline: bool,
}

impl FetchOptions {
    /// Cache directory from `MLUFS_CACHE_DIR`, else `$HOME/.cache/mlufs`.
    pub fn from_env(offline: bool) -> Self {
        let cache_dir = std::env::var_os(CACHE_ENV).map(PathBuf::from).unwrap_or_else(|| {
            std::env::var_os("HOME")
                .map(|h| PathBuf::from(h).join(".cache").join("mlufs"))
                .unwrap_or_else(|| PathBuf::from(".mlufs-cache"))
        });
        Self { cache_dir, offline }
    }
}

/// Result for one manifest entry.
#[derive(Debug)]
pub struct FetchOutcome {
    pub name: String,
    pub result: Result<MultiLabelDataset, DatasetError>,
    /// Whether a network (or file) transfer happened for the main archive.
    pub downloaded: bool,
}

pub fn read_manifest(path: &Path) -> Result<Manifest, DatasetError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    serde_json::from_str(&text).map_err(|e| DatasetError::Manifest(format!("{}: {e}", path.display())))
}

/// Fetches and parses every manifest entry. Failures are reported per entry
/// and do not stop the others; outcomes keep manifest order.
pub fn fetch_manifest(manifest: &Path, opts: &FetchOptions) -> Result<Vec<FetchOutcome>, DatasetError> {
    let entries = read_manifest(manifest)?;
    let base = manifest.parent().map(Path::to_path_buf).unwrap_or_default();
    fs::create_dir_all(&opts.cache_dir).map_err(io_err(&opts.cache_dir))?;
    Ok(entries
        .par_iter()
        .map(|e| {
            let mut downloaded = false;
            let result = fetch_entry(e, &base, opts, &mut downloaded);
            if let Err(err) = &result {
                log::warn!("dataset {}: {err}", e.name);
            }
            FetchOutcome { name: e.name.clone(), result, downloaded }
        })
        .collect())
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn file_name_of(url: &str) -> String {
    let tail = url.rsplit(['/', '\\']).next().unwrap_or("");
    let tail = tail.split(['?', '#']).next().unwrap_or("");
    if tail.is_empty() {
        "download".to_string()
    } else {
        tail.to_string()
    }
}

fn resolve_local(url: &str, base: &Path) -> Option<PathBuf> {
    if let Some(p) = url.strip_prefix("file://") {
        return Some(PathBuf::from(p));
    }
    if url.contains("://") {
        return None;
    }
    let p = Path::new(url);
    Some(if p.is_absolute() { p.to_path_buf() } else { base.join(p) })
}

fn transfer(url: &str, base: &Path) -> Result<Vec<u8>, DatasetError> {
    if let Some(path) = resolve_local(url, base) {
        return fs::read(&path).map_err(io_err(&path));
    }
    let net = |message: String| DatasetError::Network { url: url.to_string(), message };
    let resp = ureq::get(url).call().map_err(|e| net(e.to_string()))?;
    let mut bytes = Vec::new();
    resp.into_reader().read_to_end(&mut bytes).map_err(|e| net(e.to_string()))?;
    Ok(bytes)
}

fn write_atomic(dest: &Path, bytes: &[u8]) -> Result<(), DatasetError> {
    let dir = dest.parent().unwrap_or(Path::new("."));
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err(dir))?;
    tmp.write_all(bytes).map_err(io_err(tmp.path()))?;
    tmp.persist(dest).map_err(|e| DatasetError::Io { path: dest.display().to_string(), source: e.error })?;
    Ok(())
}

/// Returns the verified archive bytes, from cache when possible.
fn cached_or_download(
    e: &ManifestEntry,
    base: &Path,
    opts: &FetchOptions,
    downloaded: &mut bool,
) -> Result<Vec<u8>, DatasetError> {
    let expected = e.sha256.to_ascii_lowercase();
    let path = opts.cache_dir.join(&expected).join(file_name_of(&e.url));
    if let Ok(bytes) = fs::read(&path) {
        if sha256_hex(&bytes) == expected {
            return Ok(bytes);
        }
        log::warn!("cached copy of {} is corrupt; refetching", e.name);
    }
    if opts.offline {
        return Err(DatasetError::NotCached(e.name.clone()));
    }
    let bytes = transfer(&e.url, base)?;
    *downloaded = true;
    let actual = sha256_hex(&bytes);
    if actual != expected {
        return Err(DatasetError::Checksum { name: e.name.clone(), expected, actual });
    }
    write_atomic(&path, &bytes)?;
    Ok(bytes)
}

fn is_zip(bytes: &[u8]) -> bool {
    bytes.starts_with(b"PK\x03\x04")
}

fn zip_member(archive: &[u8], name: &str) -> Result<String, DatasetError> {
    let mut zip = zip::ZipArchive::new(std::io::Cursor::new(archive))
        .map_err(|e| DatasetError::Manifest(format!("bad zip archive: {e}")))?;
    let idx = (0..zip.len())
        .find(|&i| zip.name_for_index(i).is_some_and(|n| n == name || n.ends_with(&format!("/{name}"))))
        .ok_or_else(|| DatasetError::Manifest(format!("archive has no member '{name}'")))?;
    let mut f = zip.by_index(idx).map_err(|e| DatasetError::Manifest(e.to_string()))?;
    let mut s = String::new();
    f.read_to_string(&mut s).map_err(io_err(name))?;
    Ok(s)
}

/// The unique full-dataset `.arff` member (train/test halves are skipped).
fn default_arff_member(archive: &[u8]) -> Result<String, DatasetError> {
    let zip = zip::ZipArchive::new(std::io::Cursor::new(archive))
        .map_err(|e| DatasetError::Manifest(format!("bad zip archive: {e}")))?;
    let names: Vec<String> = zip
        .file_names()
        .filter(|n| {
            let lower = n.to_ascii_lowercase();
            lower.ends_with(".arff")
                && !["-train.arff", "-test.arff", "_train.arff", "_test.arff"].iter().any(|s| lower.ends_with(s))
        })
        .map(str::to_string)
        .collect();
    match names.as_slice() {
        [one] => Ok(one.clone()),
        [] => Err(DatasetError::Manifest("archive contains no .arff file".into())),
        _ => Err(DatasetError::Manifest(format!("archive has several .arff files {names:?}; set \"arff\""))),
    }
}

fn fetch_entry(
    e: &ManifestEntry,
    base: &Path,
    opts: &FetchOptions,
    downloaded: &mut bool,
) -> Result<MultiLabelDataset, DatasetError> {
    let bytes = cached_or_download(e, base, opts, downloaded)?;
    let zipped = is_zip(&bytes);
    let arff_text = if zipped {
        let member = match &e.arff {
            Some(m) => m.clone(),
            None => default_arff_member(&bytes)?,
        };
        zip_member(&bytes, &member)?
    } else {
        std::str::from_utf8(&bytes)
            .map_err(|_| DatasetError::Manifest(format!("{} is not UTF-8 text", e.url)))?
            .to_string()
    };
    let spec = match &e.labels {
        ManifestLabels::First(n) => LabelSpec::First(*n),
        ManifestLabels::Last(n) => LabelSpec::Last(*n),
        ManifestLabels::Header(_) => LabelSpec::Header,
        ManifestLabels::Xml(x) if zipped => parse_label_xml(&zip_member(&bytes, x)?)?,
        ManifestLabels::Xml(x) => {
            if opts.offline && resolve_local(x, base).is_none() {
                return Err(DatasetError::NotCached(format!("label file {x}")));
            }
            let raw = transfer(x, base)?;
            parse_label_xml(&String::from_utf8_lossy(&raw))?
        }
    };
    let mut ds = parse_arff(&arff_text, &spec)?;
    ds.name = e.name.clone();
    Ok(ds)
}

/// Loads a local ARFF file. An `xml` label path is resolved against the
/// file's directory; the dataset is named after the file stem.
pub fn load_arff_file(path: &Path, labels: &ManifestLabels) -> Result<MultiLabelDataset, DatasetError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    let spec = match labels {
        ManifestLabels::First(n) => LabelSpec::First(*n),
        ManifestLabels::Last(n) => LabelSpec::Last(*n),
        ManifestLabels::Header(_) => LabelSpec::Header,
        ManifestLabels::Xml(x) => {
            let xml_path =
                resolve_local(x, &base).ok_or_else(|| DatasetError::Manifest(format!("{x} is not a local path")))?;
            parse_label_xml(&fs::read_to_string(&xml_path).map_err(io_err(&xml_path))?)?
        }
    };
    let mut ds = parse_arff(&text, &spec)?;
    if let Some(stem) = path.file_stem() {
        ds.name = stem.to_string_lossy().into_owned();
    }
    Ok(ds)
}
