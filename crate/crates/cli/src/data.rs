//! Graph lookup, the best-known table, and optional verified downloads.

use std::collections::HashMap;
use std::io::Read;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context};
use sha2::{Digest, Sha256};

const BUNDLED_BEST_KNOWN: &str = include_str!("../data/best_known.csv");

/// The graph's display name: file name with `.gz`, `.txt` and `.gset` stripped.
pub fn graph_name(spec: &str) -> String {
    let mut name = Path::new(spec)
        .file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| spec.to_string());
    for ext in [".gz", ".txt", ".gset"] {
        if let Some(stripped) = name.strip_suffix(ext) {
            name = stripped.to_string();
        }
    }
    name
}

/// Resolves a graph given either as a path or as a bare name inside `dir`
/// (tried as `name`, `name.txt`, `name.gz`).
pub fn resolve_graph(spec: &str, dir: Option<&Path>) -> Option<PathBuf> {
    let direct = PathBuf::from(spec);
    if direct.is_file() {
        return Some(direct);
    }
    let dir = dir?;
    [spec.to_string(), format!("{spec}.txt"), format!("{spec}.gz")]
        .into_iter()
        .map(|f| dir.join(f))
        .find(|p| p.is_file())
}

/// Parses `graph,best_known` rows; `#` lines and a header row are skipped.
pub fn parse_best_known(text: &str) -> anyhow::Result<HashMap<String, f64>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes());
    let mut table = HashMap::new();
    for (i, row) in reader.records().enumerate() {
        let row = row?;
        if row.len() < 2 || row[0].is_empty() {
            continue;
        }
        match row[1].parse::<f64>() {
            Ok(v) => {
                table.insert(row[0].to_string(), v);
            }
            Err(_) if i == 0 => {}
            Err(_) => bail!("best-known row {}: `{}` is not a number", i + 1, &row[1]),
        }
    }
    Ok(table)
}

pub fn load_best_known(path: Option<&Path>) -> anyhow::Result<HashMap<String, f64>> {
    match path {
        Some(p) => {
            let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            parse_best_known(&text)
        }
        None => parse_best_known(BUNDLED_BEST_KNOWN),
    }
}

/// Reads `sha256  name` lines (the `sha256sum` output format).
pub fn parse_checksums(text: &str) -> anyhow::Result<HashMap<String, String>> {
    let mut out = HashMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split_whitespace();
        let (Some(hash), Some(name)) = (parts.next(), parts.next()) else {
            bail!("checksum line {}: expected `<sha256> <name>`", i + 1);
        };
        out.insert(name.trim_start_matches('*').to_string(), hash.to_ascii_lowercase());
    }
    Ok(out)
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Downloads `base_url/name` into `dir/name` after checking its digest.
pub fn fetch_graph(name: &str, base_url: &str, dir: &Path, checksums: &HashMap<String, String>) -> anyhow::Result<PathBuf> {
    let expected = checksums
        .get(name)
        .ok_or_else(|| anyhow!("no checksum listed for {name}; refusing unverified download"))?;
    let url = format!("{}/{name}", base_url.trim_end_matches('/'));
    let mut body = Vec::new();
    ureq::get(&url)
        .call()
        .with_context(|| format!("downloading {url}"))?
        .into_body()
        .into_reader()
        .read_to_end(&mut body)?;
    let got = sha256_hex(&body);
    if &got != expected {
        bail!("checksum mismatch for {name}: expected {expected}, got {got}");
    }
    std::fs::create_dir_all(dir)?;
    let path = dir.join(name);
    std::fs::write(&path, body)?;
    Ok(path)
}
