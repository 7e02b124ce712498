//! On-disk cache for enumerated groups and character tables.
//!
//! Each entry is a text file: a `key=value` header, a `---` separator, the body, and a
//! final `sha256=` line over everything before it. Group bodies hold one matrix per line
//! as row-major element indices; table bodies hold one character per line as `re,im`
//! pairs in shortest round-trip decimal form.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use num_complex::Complex64;
use sha2::{Digest, Sha256};

use crate::character::{CharacterTable, ClassFunction};
use crate::error::{Error, Result};
use crate::field::{Elem, ExtensionContext};
use crate::group::MatrixGroup;
use crate::matrix::EMat;
use crate::spaces::Epsilon;

pub const CODE_VERSION: &str = env!("CARGO_PKG_VERSION");
/// Environment variable naming the cache root.
pub const CACHE_ENV: &str = "UNITARY_PERIODS_CACHE";
const MAGIC: &str = "unitary-periods-cache 1";
const EXTENSION: &str = "upc";

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum EntryKind {
    Group,
    Table,
}

impl EntryKind {
    fn as_str(self) -> &'static str {
        match self {
            EntryKind::Group => "group",
            EntryKind::Table => "table",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        match s {
            "group" => Some(EntryKind::Group),
            "table" => Some(EntryKind::Table),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct CacheKey {
    pub kind: EntryKind,
    pub p: u32,
    pub f: u32,
    pub modulus: String,
    pub epsilon: String,
    pub dim: usize,
    pub subgroup: String,
    pub version: String,
}

impl CacheKey {
    pub fn new(kind: EntryKind, ctx: &ExtensionContext, eps: Epsilon, dim: usize, subgroup: &str) -> Self {
        CacheKey {
            kind,
            p: ctx.p(),
            f: ctx.f(),
            modulus: ctx.modulus_description(),
            epsilon: match eps {
                Epsilon::Hermitian => "hermitian".into(),
                Epsilon::Skew => "skew".into(),
            },
            dim,
            subgroup: subgroup.to_string(),
            version: CODE_VERSION.to_string(),
        }
    }

    fn header(&self) -> Vec<(&'static str, String)> {
        vec![
            ("kind", self.kind.as_str().into()),
            ("p", self.p.to_string()),
            ("f", self.f.to_string()),
            ("modulus", self.modulus.clone()),
            ("epsilon", self.epsilon.clone()),
            ("dim", self.dim.to_string()),
            ("subgroup", self.subgroup.clone()),
            ("code_version", self.version.clone()),
        ]
    }

    fn file_name(&self) -> String {
        let mut h = Sha256::new();
        for (k, v) in self.header() {
            h.update(format!("{k}={v}\n"));
        }
        format!("{}-{}.{EXTENSION}", self.kind.as_str(), &hex(&h.finalize())[..16])
    }
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().fold(String::with_capacity(bytes.len() * 2), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EntryStatus {
    Ok,
    /// Written by a different code version.
    Stale,
    Corrupt(String),
}

#[derive(Clone, Debug)]
pub struct CacheEntry {
    pub file: String,
    pub key: Option<CacheKey>,
    pub rows: usize,
    pub status: EntryStatus,
}

pub struct Cache {
    root: PathBuf,
}

struct Parsed {
    key: CacheKey,
    body: Vec<String>,
}

impl Cache {
    pub fn open(root: impl AsRef<Path>) -> Result<Self> {
        let root = root.as_ref().to_path_buf();
        fs::create_dir_all(&root)?;
        Ok(Cache { root })
    }

    /// Root from [`CACHE_ENV`], if set.
    pub fn from_env() -> Result<Option<Self>> {
        match std::env::var_os(CACHE_ENV) {
            Some(dir) if !dir.is_empty() => Cache::open(PathBuf::from(dir)).map(Some),
            _ => Ok(None),
        }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn write(&self, key: &CacheKey, body: &[String]) -> Result<PathBuf> {
        let mut text = String::new();
        text.push_str(MAGIC);
        text.push('\n');
        for (k, v) in key.header() {
            let _ = writeln!(text, "{k}={v}");
        }
        let _ = writeln!(text, "rows={}", body.len());
        text.push_str("---\n");
        for line in body {
            text.push_str(line);
            text.push('\n');
        }
        let digest = hex(&Sha256::digest(text.as_bytes()));
        let _ = writeln!(text, "sha256={digest}");
        let path = self.root.join(key.file_name());
        let tmp = path.with_extension("tmp");
        fs::write(&tmp, text)?;
        fs::rename(&tmp, &path)?;
        Ok(path)
    }

    fn parse(text: &str) -> std::result::Result<Parsed, String> {
        let (content, last) = text
            .trim_end_matches('\n')
            .rsplit_once('\n')
            .ok_or("truncated file")?;
        let digest = last.strip_prefix("sha256=").ok_or("missing checksum line")?;
        let mut content = content.to_string();
        content.push('\n');
        if hex(&Sha256::digest(content.as_bytes())) != digest {
            return Err("checksum mismatch".into());
        }
        let mut lines = content.lines();
        if lines.next() != Some(MAGIC) {
            return Err("unknown format".into());
        }
        let mut fields = std::collections::BTreeMap::new();
        for line in lines.by_ref() {
            if line == "---" {
                break;
            }
            let (k, v) = line.split_once('=').ok_or("malformed header line")?;
            fields.insert(k.to_string(), v.to_string());
        }
        let get = |k: &str| fields.get(k).cloned().ok_or(format!("missing header field `{k}`"));
        let num = |k: &str| -> std::result::Result<usize, String> {
            get(k)?.parse().map_err(|_| format!("bad header field `{k}`"))
        };
        let key = CacheKey {
            kind: EntryKind::parse(&get("kind")?).ok_or("unknown entry kind")?,
            p: num("p")? as u32,
            f: num("f")? as u32,
            modulus: get("modulus")?,
            epsilon: get("epsilon")?,
            dim: num("dim")?,
            subgroup: get("subgroup")?,
            version: get("code_version")?,
        };
        let body: Vec<String> = lines.map(str::to_string).collect();
        if body.len() != num("rows")? {
            return Err("row count mismatch".into());
        }
        Ok(Parsed { key, body })
    }

    fn read(&self, key: &CacheKey) -> Result<Option<Vec<String>>> {
        let path = self.root.join(key.file_name());
        let Ok(text) = fs::read_to_string(&path) else {
            return Ok(None);
        };
        match Cache::parse(&text) {
            Ok(p) if p.key == *key => Ok(Some(p.body)),
            Ok(_) => Ok(None),
            Err(reason) => {
                fs::remove_file(&path)?;
                Err(Error::Cache(format!("corrupt entry {} evicted: {reason}", path.display())))
            }
        }
    }

    pub fn store_group(&self, key: &CacheKey, group: &MatrixGroup) -> Result<PathBuf> {
        let body: Vec<String> = group
            .elements()
            .iter()
            .map(|m| m.data().iter().map(|e| e.0.to_string()).collect::<Vec<_>>().join(" "))
            .collect();
        self.write(key, &body)
    }

    pub fn load_group(&self, key: &CacheKey, ctx: &Arc<ExtensionContext>) -> Result<Option<MatrixGroup>> {
        let Some(body) = self.read(key)? else {
            return Ok(None);
        };
        let d = key.dim;
        let mut elements = Vec::with_capacity(body.len());
        for line in &body {
            let data: Vec<Elem> = line
                .split_whitespace()
                .map(|t| t.parse::<u32>().map(Elem))
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| Error::Cache("bad matrix entry".into()))?;
            if data.len() != d * d || data.iter().any(|e| e.0 as u64 >= ctx.order() as u64) {
                return Err(Error::Cache("matrix has the wrong shape".into()));
            }
            elements.push(EMat::from_vec(d, d, data));
        }
        MatrixGroup::from_elements(ctx, d, elements).map(Some)
    }

    pub fn store_table(&self, key: &CacheKey, table: &CharacterTable) -> Result<PathBuf> {
        let mut body = vec![format!(
            "residual={} attempts={}",
            table.orthogonality_residual, table.attempts
        )];
        for (chi, d) in table.characters.iter().zip(&table.degrees) {
            let vals: Vec<String> = chi.values.iter().map(|v| format!("{},{}", v.re, v.im)).collect();
            body.push(format!("{d} {}", vals.join(" ")));
        }
        self.write(key, &body)
    }

    pub fn load_table(&self, key: &CacheKey) -> Result<Option<CharacterTable>> {
        let Some(body) = self.read(key)? else {
            return Ok(None);
        };
        let bad = || Error::Cache("malformed table body".into());
        let (first, rest) = body.split_first().ok_or_else(bad)?;
        let mut residual = None;
        let mut attempts = None;
        for tok in first.split_whitespace() {
            match tok.split_once('=') {
                Some(("residual", v)) => residual = v.parse::<f64>().ok(),
                Some(("attempts", v)) => attempts = v.parse::<usize>().ok(),
                _ => return Err(bad()),
            }
        }
        let mut characters = Vec::new();
        let mut degrees = Vec::new();
        for line in rest {
            let mut it = line.split_whitespace();
            degrees.push(it.next().and_then(|d| d.parse::<u64>().ok()).ok_or_else(bad)?);
            let vals = it
                .map(|pair| {
                    let (re, im) = pair.split_once(',')?;
                    Some(Complex64::new(re.parse().ok()?, im.parse().ok()?))
                })
                .collect::<Option<Vec<_>>>()
                .ok_or_else(bad)?;
            characters.push(ClassFunction::new(vals));
        }
        Ok(Some(CharacterTable {
            characters,
            degrees,
            orthogonality_residual: residual.ok_or_else(bad)?,
            attempts: attempts.ok_or_else(bad)?,
        }))
    }

    fn files(&self) -> Result<Vec<PathBuf>> {
        let mut out: Vec<PathBuf> = fs::read_dir(&self.root)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == EXTENSION))
            .collect();
        out.sort();
        Ok(out)
    }

    fn inspect(path: &Path) -> CacheEntry {
        let file = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
        match fs::read_to_string(path).map_err(|e| e.to_string()).and_then(|t| Cache::parse(&t)) {
            Ok(p) => {
                let status = if p.key.version == CODE_VERSION { EntryStatus::Ok } else { EntryStatus::Stale };
                CacheEntry { file, rows: p.body.len(), key: Some(p.key), status }
            }
            Err(reason) => CacheEntry { file, key: None, rows: 0, status: EntryStatus::Corrupt(reason) },
        }
    }

    pub fn list(&self) -> Result<Vec<CacheEntry>> {
        Ok(self.files()?.iter().map(|p| Cache::inspect(p)).collect())
    }

    /// Checks every entry, evicting corrupt and stale ones.
    pub fn validate(&self) -> Result<Vec<CacheEntry>> {
        let mut out = Vec::new();
        for path in self.files()? {
            let entry = Cache::inspect(&path);
            if entry.status != EntryStatus::Ok {
                fs::remove_file(&path)?;
            }
            out.push(entry);
        }
        Ok(out)
    }

    /// Removes entries whose file name contains `pattern` (all entries when `None`).
    pub fn evict(&self, pattern: Option<&str>) -> Result<usize> {
        let mut n = 0;
        for path in self.files()? {
            let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
            if pattern.map_or(true, |p| name.contains(p)) {
                fs::remove_file(&path)?;
                n += 1;
            }
        }
        Ok(n)
    }
}
