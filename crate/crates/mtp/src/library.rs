//! The multiple-use basic-key library: generation, lookup, linear
//! independence reporting, and the on-disk format.
//!
//! Two kinds of library exist. Method 1 stores `k` independently
//! generated basic keys of `s` bits, serial-numbered `1..=k`. Method 2
//! stores a single master string of `l` bits; basic key `q` is the
//! `s`-bit window starting at position `q` (1-based), wrapping from the
//! end of the master string back to its start.

use std::fmt;
use std::fs;
use std::io;
use std::path::Path;

use thiserror::Error;

use crate::bitstring::BitString;
use crate::crc32::crc32;
use crate::entropy::{EntropyError, EntropySource};
use crate::gf2::{rank_with_dependents, BitRow};

const MAGIC: &[u8; 4] = b"MTPL";
const VERSION: u8 = 0x01;
const METHOD_INDEPENDENT: u8 = 0x01;
const METHOD_MASTER: u8 = 0x02;
/// High bit of the method byte marks a library built from a seeded test
/// source rather than external entropy.
const SEEDED_FLAG: u8 = 0x80;

#[derive(Debug, Error)]
pub enum LibraryError {
    #[error("invalid library config: {0}")]
    BadConfig(String),
    #[error(transparent)]
    Entropy(#[from] EntropyError),
    #[error("basic key id {id} out of range 1..={max}")]
    IdOutOfRange { id: u64, max: u64 },
    #[error("basic key length {requested} does not fit this library ({reason})")]
    BadKeyLength { requested: u64, reason: String },
    #[error("rank check applies to independent-key libraries only")]
    RankUnsupported,
    #[error("bad magic: not a library file")]
    BadMagic,
    #[error("unsupported library format version {0:#04x}")]
    BadVersion(u8),
    #[error("unknown library method byte {0:#04x}")]
    BadMethod(u8),
    #[error("library file truncated or length fields inconsistent")]
    Truncated,
    #[error("library file CRC mismatch")]
    CrcMismatch,
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
}

/// Where a library's bits came from. Recorded in the file so test
/// libraries cannot silently masquerade as real ones.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeneratorTag {
    ExternalEntropy,
    SeededTest,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LibraryConfig {
    /// Method 1: `k` basic keys of `s` bits each.
    IndependentKeys { k: u32, s: u64 },
    /// Method 2: one master string of `l` bits; key length is chosen
    /// per session, up to `l`.
    MasterString { l: u64 },
}

impl LibraryConfig {
    pub fn validate(&self) -> Result<(), LibraryError> {
        match *self {
            LibraryConfig::IndependentKeys { k, s } => {
                if k < 1 {
                    return Err(LibraryError::BadConfig("k must be at least 1".into()));
                }
                if s < 1 {
                    return Err(LibraryError::BadConfig("s must be at least 1".into()));
                }
            }
            LibraryConfig::MasterString { l } => {
                if l < 1 {
                    return Err(LibraryError::BadConfig("l must be at least 1".into()));
                }
            }
        }
        Ok(())
    }

    /// Number of distinct basic keys this library offers.
    pub fn key_count(&self) -> u64 {
        match *self {
            LibraryConfig::IndependentKeys { k, .. } => k as u64,
            LibraryConfig::MasterString { l } => l,
        }
    }
}

enum Material {
    Keys(Vec<BitString>),
    Master(BitString),
}

/// Immutable after generation; any number of sessions may share one.
pub struct Library {
    config: LibraryConfig,
    tag: GeneratorTag,
    material: Material,
}

impl Library {
    /// Fills a library from an entropy source. Method 1 keys are drawn
    /// individually and independently, in serial order.
    pub fn generate(
        config: LibraryConfig,
        tag: GeneratorTag,
        entropy: &mut dyn EntropySource,
    ) -> Result<Library, LibraryError> {
        config.validate()?;
        let material = match config {
            LibraryConfig::IndependentKeys { k, s } => {
                let mut keys = Vec::with_capacity(k as usize);
                for _ in 0..k {
                    keys.push(entropy.bits(s as usize)?);
                }
                Material::Keys(keys)
            }
            LibraryConfig::MasterString { l } => Material::Master(entropy.bits(l as usize)?),
        };
        Ok(Library {
            config,
            tag,
            material,
        })
    }

    pub fn config(&self) -> LibraryConfig {
        self.config
    }

    pub fn generator_tag(&self) -> GeneratorTag {
        self.tag
    }

    /// Basic-key length for Method 1 libraries.
    pub fn fixed_key_len(&self) -> Option<u64> {
        match self.config {
            LibraryConfig::IndependentKeys { s, .. } => Some(s),
            LibraryConfig::MasterString { .. } => None,
        }
    }

    /// Looks up basic key `id` (1-based serial or pointer) of length `s`.
    pub fn basic_key(&self, id: u64, s: u64) -> Result<BitString, LibraryError> {
        match (&self.material, self.config) {
            (Material::Keys(keys), LibraryConfig::IndependentKeys { k, s: key_len }) => {
                if id < 1 || id > k as u64 {
                    return Err(LibraryError::IdOutOfRange { id, max: k as u64 });
                }
                if s != key_len {
                    return Err(LibraryError::BadKeyLength {
                        requested: s,
                        reason: format!("independent keys are exactly {key_len} bits"),
                    });
                }
                Ok(keys[(id - 1) as usize].clone())
            }
            (Material::Master(master), LibraryConfig::MasterString { l }) => {
                if id < 1 || id > l {
                    return Err(LibraryError::IdOutOfRange { id, max: l });
                }
                if s < 1 || s > l {
                    return Err(LibraryError::BadKeyLength {
                        requested: s,
                        reason: format!("master-string keys must be 1..={l} bits"),
                    });
                }
                let start = (id - 1) as usize;
                let s = s as usize;
                let l = l as usize;
                let tail = l - start;
                if s <= tail {
                    Ok(master.slice(start, s))
                } else {
                    // Looped string: wrap past the end back to position 1.
                    Ok(master.slice(start, tail).concat(&master.slice(0, s - tail)))
                }
            }
            _ => unreachable!("material always matches config"),
        }
    }

    /// GF(2) rank of the k x s matrix whose rows are the basic keys.
    /// Serial numbers in the report are 1-based; a serial is listed as
    /// dependent when its key is an XOR combination of lower serials.
    pub fn rank_gf2(&self) -> Result<RankReport, LibraryError> {
        let Material::Keys(keys) = &self.material else {
            return Err(LibraryError::RankUnsupported);
        };
        let s = keys.first().map_or(0, BitString::len);
        let rows: Vec<BitRow> = keys
            .iter()
            .map(|key| {
                let mut row = BitRow::zero(s);
                for (c, bit) in key.iter_bits().enumerate() {
                    if bit {
                        row.set(c, true);
                    }
                }
                row
            })
            .collect();
        let (rank, deps) = rank_with_dependents(&rows);
        Ok(RankReport {
            key_count: keys.len(),
            rank,
            dependent_serials: deps.iter().map(|&i| (i + 1) as u32).collect(),
        })
    }

    // ---- file format -------------------------------------------------

    /// Serializes to the bit-exact library file layout.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(MAGIC);
        out.push(VERSION);
        let mut method_byte = match self.config {
            LibraryConfig::IndependentKeys { .. } => METHOD_INDEPENDENT,
            LibraryConfig::MasterString { .. } => METHOD_MASTER,
        };
        if self.tag == GeneratorTag::SeededTest {
            method_byte |= SEEDED_FLAG;
        }
        out.push(method_byte);
        match (&self.material, self.config) {
            (Material::Keys(keys), LibraryConfig::IndependentKeys { k, s }) => {
                out.extend_from_slice(&k.to_be_bytes());
                out.extend_from_slice(&s.to_be_bytes());
                for key in keys {
                    out.extend_from_slice(key.as_bytes());
                }
            }
            (Material::Master(master), LibraryConfig::MasterString { l }) => {
                out.extend_from_slice(&l.to_be_bytes());
                out.extend_from_slice(master.as_bytes());
            }
            _ => unreachable!("material always matches config"),
        }
        let crc = crc32(&out);
        out.extend_from_slice(&crc.to_be_bytes());
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Library, LibraryError> {
        if bytes.len() < 4 {
            return Err(LibraryError::Truncated);
        }
        if &bytes[..4] != MAGIC {
            return Err(LibraryError::BadMagic);
        }
        if bytes.len() < 6 + 4 {
            return Err(LibraryError::Truncated);
        }
        if bytes[4] != VERSION {
            return Err(LibraryError::BadVersion(bytes[4]));
        }
        let method_byte = bytes[5];
        let tag = if method_byte & SEEDED_FLAG != 0 {
            GeneratorTag::SeededTest
        } else {
            GeneratorTag::ExternalEntropy
        };
        let method = method_byte & !SEEDED_FLAG;

        let body_end = bytes.len() - 4;
        let (config, material_off, material_bytes) = match method {
            METHOD_INDEPENDENT => {
                if body_end < 6 + 12 {
                    return Err(LibraryError::Truncated);
                }
                let k = u32::from_be_bytes(bytes[6..10].try_into().unwrap());
                let s = u64::from_be_bytes(bytes[10..18].try_into().unwrap());
                let per_key = (s as usize).div_ceil(8);
                let need = (k as usize)
                    .checked_mul(per_key)
                    .ok_or(LibraryError::Truncated)?;
                (LibraryConfig::IndependentKeys { k, s }, 18usize, need)
            }
            METHOD_MASTER => {
                if body_end < 6 + 8 {
                    return Err(LibraryError::Truncated);
                }
                let l = u64::from_be_bytes(bytes[6..14].try_into().unwrap());
                (
                    (LibraryConfig::MasterString { l }),
                    14usize,
                    (l as usize).div_ceil(8),
                )
            }
            other => return Err(LibraryError::BadMethod(other)),
        };
        if body_end != material_off + material_bytes {
            return Err(LibraryError::Truncated);
        }
        let stored_crc = u32::from_be_bytes(bytes[body_end..].try_into().unwrap());
        if crc32(&bytes[..body_end]) != stored_crc {
            return Err(LibraryError::CrcMismatch);
        }
        config.validate()?;

        let material = match config {
            LibraryConfig::IndependentKeys { k, s } => {
                let per_key = (s as usize).div_ceil(8);
                let mut keys = Vec::with_capacity(k as usize);
                for i in 0..k as usize {
                    let start = material_off + i * per_key;
                    keys.push(
                        BitString::from_bytes(&bytes[start..start + per_key], s as usize)
                            .expect("sized above"),
                    );
                }
                Material::Keys(keys)
            }
            LibraryConfig::MasterString { l } => Material::Master(
                BitString::from_bytes(&bytes[material_off..body_end], l as usize)
                    .expect("sized above"),
            ),
        };
        Ok(Library {
            config,
            tag,
            material,
        })
    }

    pub fn write_to_file(&self, path: &Path) -> Result<(), LibraryError> {
        fs::write(path, self.to_bytes())?;
        Ok(())
    }

    pub fn read_from_file(path: &Path) -> Result<Library, LibraryError> {
        Library::from_bytes(&fs::read(path)?)
    }

    /// 8-byte identifier derived by CRC extension over the file bytes:
    /// `crc32(file) || crc32(file || crc32(file))`, big-endian.
    pub fn fingerprint(&self) -> [u8; 8] {
        let bytes = self.to_bytes();
        let first = crc32(&bytes);
        let mut extended = bytes;
        extended.extend_from_slice(&first.to_be_bytes());
        let second = crc32(&extended);
        let mut fp = [0u8; 8];
        fp[..4].copy_from_slice(&first.to_be_bytes());
        fp[4..].copy_from_slice(&second.to_be_bytes());
        fp
    }
}

impl fmt::Debug for Library {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Library")
            .field("config", &self.config)
            .field("tag", &self.tag)
            .finish_non_exhaustive()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankReport {
    pub key_count: usize,
    pub rank: usize,
    /// 1-based serials of keys that are XOR combinations of lower serials.
    pub dependent_serials: Vec<u32>,
}

impl RankReport {
    pub fn fully_independent(&self) -> bool {
        self.rank == self.key_count
    }
}
