//! On-disk matrix cache in the `LIEM` format: magic `LIEM`, a version byte,
//! `p`, `e`, `n` as little-endian `u32`, `rows`, `cols` as little-endian
//! `u64`, then `rows * cols` entries of one byte each, row-major. The matrices
//! of one representation are stacked vertically, so `rows = count * dim`.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use super::module::{LieRepresentation, Provenance};
use crate::error::{CacheError, Error, Result};
use crate::linalg::{DenseMatrix, FieldContext};
use crate::perm::{factorial, Permutation};

pub const MAGIC: &[u8; 4] = b"LIEM";
pub const VERSION: u8 = 1;
pub const HEADER_LEN: usize = 4 + 1 + 3 * 4 + 2 * 8;

/// Parsed contents of one cache file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiemFile {
    pub p: u32,
    pub e: u32,
    pub n: u32,
    pub rows: u64,
    pub cols: u64,
    pub entries: Vec<u8>,
}

impl LiemFile {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(HEADER_LEN + self.entries.len());
        out.extend_from_slice(MAGIC);
        out.push(VERSION);
        for x in [self.p, self.e, self.n] {
            out.extend_from_slice(&x.to_le_bytes());
        }
        for x in [self.rows, self.cols] {
            out.extend_from_slice(&x.to_le_bytes());
        }
        out.extend_from_slice(&self.entries);
        out
    }

    pub fn parse(bytes: &[u8], path: &Path) -> Result<Self, CacheError> {
        let truncated = |expected: u64| CacheError::Truncated {
            path: path.to_path_buf(),
            expected,
            found: bytes.len() as u64,
        };
        if bytes.len() < 4 || &bytes[..4] != MAGIC {
            return Err(CacheError::BadMagic {
                path: path.to_path_buf(),
            });
        }
        if bytes.len() < 5 {
            return Err(truncated(HEADER_LEN as u64));
        }
        if bytes[4] != VERSION {
            return Err(CacheError::Version {
                found: bytes[4],
                expected: VERSION,
            });
        }
        if bytes.len() < HEADER_LEN {
            return Err(truncated(HEADER_LEN as u64));
        }
        let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().expect("4 bytes"));
        let u64_at = |o: usize| u64::from_le_bytes(bytes[o..o + 8].try_into().expect("8 bytes"));
        let (p, e, n) = (u32_at(5), u32_at(9), u32_at(13));
        let (rows, cols) = (u64_at(17), u64_at(25));
        if e != 1 {
            return Err(CacheError::ExtensionField(e));
        }
        let expected = rows
            .checked_mul(cols)
            .and_then(|x| x.checked_add(HEADER_LEN as u64))
            .ok_or_else(|| CacheError::HeaderMismatch(format!("{rows}x{cols} overflows")))?;
        if (bytes.len() as u64) < expected {
            return Err(truncated(expected));
        }
        if bytes.len() as u64 > expected {
            return Err(CacheError::HeaderMismatch(format!(
                "{} trailing bytes after a {rows}x{cols} payload",
                bytes.len() as u64 - expected
            )));
        }
        Ok(LiemFile {
            p,
            e,
            n,
            rows,
            cols,
            entries: bytes[HEADER_LEN..].to_vec(),
        })
    }
}

pub fn read_liem(path: &Path) -> Result<LiemFile> {
    let bytes = fs::read(path).map_err(|source| CacheError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(LiemFile::parse(&bytes, path)?)
}

/// Writes to a temporary file in the same directory, then renames it into place.
pub fn write_liem(path: &Path, file: &LiemFile) -> Result<()> {
    let io = |source| CacheError::Io {
        path: path.to_path_buf(),
        source,
    };
    let dir = path.parent().unwrap_or(Path::new("."));
    fs::create_dir_all(dir).map_err(io)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(&file.to_bytes()).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

/// File name keyed by `(n, p)` and a digest of the generator list.
pub fn cache_path(dir: &Path, n: usize, p: u32, generators: &[Permutation]) -> PathBuf {
    let mut h = Sha256::new();
    for g in generators {
        h.update(g.to_string().as_bytes());
        h.update(b";");
    }
    let digest = h.finalize();
    let tag: String = digest[..8].iter().map(|b| format!("{b:02x}")).collect();
    dir.join(format!("lie-n{n}-p{p}-{tag}.liem"))
}

pub fn cache_store(rep: &LieRepresentation, dir: &Path) -> Result<PathBuf> {
    let dim = rep.dim();
    let mut entries = Vec::with_capacity(rep.matrices().len() * dim * dim);
    for m in rep.matrices() {
        entries.extend(m.to_bytes().ok_or(CacheError::ExtensionField(m.field().degree()))?);
    }
    let file = LiemFile {
        p: rep.prime(),
        e: 1,
        n: rep.degree() as u32,
        rows: (rep.matrices().len() * dim) as u64,
        cols: dim as u64,
        entries,
    };
    let path = cache_path(dir, rep.degree(), rep.prime(), rep.generators());
    write_liem(&path, &file)?;
    Ok(path)
}

/// Loads the cached representation, `Ok(None)` when no file exists.
pub fn cache_load(dir: &Path, n: usize, p: u32, generators: &[Permutation]) -> Result<Option<LieRepresentation>> {
    let path = cache_path(dir, n, p, generators);
    if !path.exists() {
        return Ok(None);
    }
    let file = read_liem(&path)?;
    let dim = factorial(n.saturating_sub(1)).ok_or_else(|| Error::invalid("n too large"))?;
    let mismatch = |what: String| Error::from(CacheError::HeaderMismatch(what));
    if file.p != p || file.n != n as u32 {
        return Err(mismatch(format!(
            "{} holds n = {}, p = {}; expected n = {n}, p = {p}",
            path.display(),
            file.n,
            file.p
        )));
    }
    if file.cols != dim as u64 || file.rows != (generators.len() * dim) as u64 {
        return Err(mismatch(format!(
            "{} is {}x{}; expected {}x{dim}",
            path.display(),
            file.rows,
            file.cols,
            generators.len() * dim
        )));
    }
    if file.entries.iter().any(|&x| x as u32 >= p) {
        return Err(mismatch(format!("{} has entries outside GF({p})", path.display())));
    }
    let field = FieldContext::get(p, 1)?;
    let matrices = file
        .entries
        .chunks_exact(dim * dim)
        .map(|c| DenseMatrix::from_vec(field.clone(), dim, dim, c.iter().map(|&x| x as u16).collect()))
        .collect::<Result<_>>()?;
    Ok(Some(LieRepresentation::from_parts(
        n,
        p,
        generators.to_vec(),
        matrices,
        Provenance::CacheHit,
    )))
}
