//! # mtp
//!
//! A multiple-time pad (MTP) hybrid cipher: per-message one-time pads
//! are XOR-folded out of a reusable public library of random basic keys,
//! and only a short keyword saying *which* keys were folded travels over
//! the secure channel. Two fresh random keys, one transmitted under its
//! own pad and one recomputed from a transposition rule, harden the
//! scheme against known-plaintext attacks; the bare design without them
//! is included, along with the Gaussian-elimination attack that breaks
//! it.
//!
//! ## Quick example
//!
//! ```
//! use mtp::bitstring::BitString;
//! use mtp::cipher::{self, SessionConfig, SessionKeys, TruncationPolicy, Variant};
//! use mtp::entropy::SeededEntropy;
//! use mtp::keys::{GBounds, RuleId};
//! use mtp::library::{GeneratorTag, Library, LibraryConfig};
//!
//! # fn main() -> Result<(), Box<dyn std::error::Error>> {
//! let mut entropy = SeededEntropy::new(7);
//! let lib = Library::generate(
//!     LibraryConfig::IndependentKeys { k: 64, s: 1024 },
//!     GeneratorTag::SeededTest,
//!     &mut entropy,
//! )?;
//!
//! let cfg = SessionConfig::new(
//!     Variant::Main,
//!     RuleId::RuleB,
//!     GBounds::new(1, 16)?,
//!     1024,
//!     TruncationPolicy::ZeroPad,
//! )?;
//! let keys = SessionKeys::generate(&cfg, &lib, &mut entropy)?;
//! let plaintext = BitString::from_bytes(b"short keys, long pads...", 192)?;
//! let sealed = cipher::encrypt(&cfg, &keys, &plaintext)?;
//!
//! // the receiver reproduces the keys from the keywords alone
//! let receiver = SessionKeys::from_keywords(&cfg, &lib, keys.kw_p().clone(), keys.kw_r().cloned())?;
//! let recovered = cipher::decrypt(&cfg, &receiver, &sealed)?.expect_plaintext();
//! assert_eq!(recovered.truncate(192), plaintext);
//! # Ok(())
//! # }
//! ```
//!
//! ## Module map
//!
//! - [`bitstring`] — fixed-length bit strings and the XOR algebra.
//! - [`entropy`] — pluggable random-bit sources (system, seeded, fixed).
//! - [`library`] — basic-key libraries, both generation methods, file format.
//! - [`keys`] — keywords, private-key derivation, the computation rules.
//! - [`cipher`] — the augmented cipher and all published variations.
//! - [`stream`] — chunked encryption and continuous decryption.
//! - [`framing`] — the multiplexed wire format and keyword transports.
//! - [`cryptanalysis`] — the attacks, key-space arithmetic, statistics.
//! - [`cli`] — the command-line workflows over files and pipes.
//!
//! Runnable walkthroughs for each capability live in `examples/`.

pub mod bitstring;
pub mod cipher;
pub mod cli;
pub mod cryptanalysis;
pub mod entropy;
pub mod framing;
pub mod keys;
pub mod library;
pub mod stream;

mod combinatorics;
mod crc32;
mod gf2;

pub use bitstring::BitString;
pub use cipher::{Recovered, SessionConfig, SessionKeys, TruncationPolicy, Variant};
pub use entropy::{EntropySource, FixedEntropy, SeededEntropy, SystemEntropy};
pub use keys::{GBounds, Keyword, RuleId};
pub use library::{GeneratorTag, Library, LibraryConfig};
