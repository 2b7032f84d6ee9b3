//! Binary cache of precomputed stacked systems.
//!
//! Layout (little-endian): magic `FCTC`, format version `u32`, generator id
//! `u32`, seed `u64`, `D u32`, `d u32`, norm tag `u32`, index-set hash `u64`,
//! `L u32`, condition estimate `f64` (NaN when unknown), then per grid `D`
//! `u32` counts, `nnz u64` and `nnz` triples `(col u64, row u64, value f64)`,
//! and finally a CRC32 of everything before it.

use std::hash::Hasher;
use std::path::{Path, PathBuf};

use fct_core::aliasing::AliasingMatrix;
use fct_core::lgrid::LGridSpec;
use fct_core::rng::RNG_ALGORITHM_ID;
use fct_core::{GridSpec, IndexSet, Norm, StackedSystem};

use crate::error::{CacheError, Error, Result};

pub const MAGIC: &[u8; 4] = b"FCTC";
pub const FORMAT_VERSION: u32 = 1;

pub fn norm_tag(norm: Norm) -> u32 {
    match norm {
        Norm::One => 1,
        Norm::Two => 2,
        Norm::Max => 255,
    }
}

/// FNV-1a over the little-endian exponents of every member, in order.
pub fn index_set_hash(set: &IndexSet) -> u64 {
    let mut h = fnv::FnvHasher::default();
    for &v in set.as_flat() {
        h.write(&v.to_le_bytes());
    }
    h.finish()
}

/// How the L-grid is chosen, part of the cache key.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KeyMode {
    Fixed(usize),
    Adaptive { kappa_max: f64, min_blocks: usize },
}

/// File name for a system built from `set` with `seed`.
pub fn cache_file_name(set: &IndexSet, seed: u64, mode: KeyMode) -> String {
    let mode = match mode {
        KeyMode::Fixed(l) => format!("L{l}"),
        KeyMode::Adaptive {
            kappa_max,
            min_blocks,
        } => format!("adaptive-k{kappa_max:e}-m{min_blocks}"),
    };
    format!(
        "fct-D{}-d{}-s{}-{:016x}-seed{}-{}.bin",
        set.dim(),
        set.degree(),
        set.norm(),
        index_set_hash(set),
        seed,
        mode
    )
}

pub fn encode(sys: &StackedSystem, set: &IndexSet) -> Vec<u8> {
    let lg = sys.lgrid();
    let mut out = Vec::with_capacity(64 + sys.nnz() * 24);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    out.extend_from_slice(&RNG_ALGORITHM_ID.to_le_bytes());
    out.extend_from_slice(&lg.seed.to_le_bytes());
    out.extend_from_slice(&(set.dim() as u32).to_le_bytes());
    out.extend_from_slice(&set.degree().to_le_bytes());
    out.extend_from_slice(&norm_tag(set.norm()).to_le_bytes());
    out.extend_from_slice(&index_set_hash(set).to_le_bytes());
    out.extend_from_slice(&(sys.num_blocks() as u32).to_le_bytes());
    out.extend_from_slice(&sys.kappa().unwrap_or(f64::NAN).to_le_bytes());
    for (grid, block) in lg.grids.iter().zip(sys.blocks()) {
        for &p in grid.counts() {
            out.extend_from_slice(&(p as u32).to_le_bytes());
        }
        out.extend_from_slice(&(block.nnz() as u64).to_le_bytes());
        for (c, r, v) in block.entries() {
            out.extend_from_slice(&(c as u64).to_le_bytes());
            out.extend_from_slice(&(r as u64).to_le_bytes());
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    let crc = crc32fast::hash(&out);
    out.extend_from_slice(&crc.to_le_bytes());
    out
}

struct Reader<'a> {
    data: &'a [u8],
    pos: usize,
}

impl Reader<'_> {
    fn take<const N: usize>(&mut self) -> Result<[u8; N], CacheError> {
        let end = self.pos.checked_add(N).ok_or(CacheError::Truncated)?;
        let bytes = self.data.get(self.pos..end).ok_or(CacheError::Truncated)?;
        self.pos = end;
        Ok(bytes.try_into().unwrap())
    }
    fn u32(&mut self) -> Result<u32, CacheError> {
        self.take().map(u32::from_le_bytes)
    }
    fn u64(&mut self) -> Result<u64, CacheError> {
        self.take().map(u64::from_le_bytes)
    }
    fn f64(&mut self) -> Result<f64, CacheError> {
        self.take().map(f64::from_le_bytes)
    }
}

/// Decodes a cache file, checking it belongs to `set` and `seed`.
pub fn decode(data: &[u8], set: &IndexSet, seed: u64) -> Result<StackedSystem> {
    if data.len() < 4 + 4 {
        return Err(CacheError::Truncated.into());
    }
    if &data[..4] != MAGIC {
        return Err(CacheError::BadMagic.into());
    }
    let (body, tail) = data.split_at(data.len() - 4);
    let stored = u32::from_le_bytes(tail.try_into().unwrap());
    let computed = crc32fast::hash(body);
    if stored != computed {
        return Err(CacheError::Checksum { stored, computed }.into());
    }
    let mut r = Reader { data: body, pos: 4 };
    let version = r.u32()?;
    if version != FORMAT_VERSION {
        return Err(CacheError::Version {
            found: version,
            expected: FORMAT_VERSION,
        }
        .into());
    }
    let rng = r.u32()?;
    if rng != RNG_ALGORITHM_ID {
        return Err(CacheError::Rng {
            found: rng,
            expected: RNG_ALGORITHM_ID,
        }
        .into());
    }
    if r.u64()? != seed {
        return Err(CacheError::KeyMismatch("seed").into());
    }
    let dim = r.u32()? as usize;
    if dim != set.dim() {
        return Err(CacheError::KeyMismatch("dimension").into());
    }
    if r.u32()? != set.degree() {
        return Err(CacheError::KeyMismatch("degree").into());
    }
    if r.u32()? != norm_tag(set.norm()) {
        return Err(CacheError::KeyMismatch("norm").into());
    }
    if r.u64()? != index_set_hash(set) {
        return Err(CacheError::KeyMismatch("index-set hash").into());
    }
    let blocks = r.u32()? as usize;
    let kappa = r.f64()?;
    let n = set.len();
    let mut grids = Vec::with_capacity(blocks);
    let mut mats = Vec::with_capacity(blocks);
    for _ in 0..blocks {
        let counts = (0..dim)
            .map(|_| r.u32().map(|p| p as usize))
            .collect::<Result<Vec<_>, _>>()?;
        let grid = GridSpec::new(counts).map_err(|e| CacheError::Invalid(e.to_string()))?;
        let nnz = r.u64()? as usize;
        if nnz > n {
            return Err(CacheError::Invalid("more entries than columns".into()).into());
        }
        let mut entries = Vec::with_capacity(nnz);
        for _ in 0..nnz {
            let c = r.u64()? as usize;
            let row = r.u64()? as usize;
            let v = r.f64()?;
            entries.push((c, row, v));
        }
        let m = AliasingMatrix::from_entries(grid.total_points(), n, entries)
            .map_err(|e| CacheError::Invalid(e.to_string()))?;
        grids.push(grid);
        mats.push(m);
    }
    if r.pos != body.len() {
        return Err(CacheError::Invalid("trailing bytes".into()).into());
    }
    let lgrid = LGridSpec {
        grids,
        seed,
        target_n: n,
        degree_cap: set.degree(),
    };
    let kappa = if kappa.is_nan() { None } else { Some(kappa) };
    StackedSystem::from_parts(lgrid, mats, n, kappa)
        .map_err(|e| CacheError::Invalid(e.to_string()).into())
}

pub fn store(dir: &Path, name: &str, sys: &StackedSystem, set: &IndexSet) -> Result<PathBuf> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let path = dir.join(name);
    crate::atomic_write(&path, &encode(sys, set))?;
    Ok(path)
}

pub fn load(path: &Path, set: &IndexSet, seed: u64) -> Result<StackedSystem> {
    let data = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode(&data, set, seed)
}
