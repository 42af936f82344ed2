//! The wire format: keyword ciphertexts first, then the two payload
//! ciphertexts interleaved bit by bit, all inside one checksummed frame.
//!
//! Interleaving puts corresponding bits of C_P and C_R next to each
//! other so a receiver can decrypt while the stream is still arriving.
//! The keyword transport stands in for the asymmetric cipher that the
//! hybrid scheme assumes; the stub implementations here are an identity
//! channel for tests and a preshared one-time-pad channel.

use thiserror::Error;

use crate::bitstring::BitString;
use crate::cipher::{CipherOutput, SessionConfig, SessionKeys, TruncationPolicy, Variant};
use crate::crc32::crc32;
use crate::keys::{decode_keyword, encode_keyword, pointer_width, GBounds, KeyError, RuleId};
use crate::library::{Library, LibraryConfig};

const MAGIC: &[u8; 4] = b"MTPF";
const VERSION: u8 = 0x01;
/// Bytes before the A-section in every frame.
pub const FIXED_HEADER_LEN: usize = 32;

/// Payload is bare C_P (no interleave); set exactly for the basic design.
const FLAG_UNINTERLEAVED: u8 = 0x01;
/// The A-section holds one sealed blob containing W_P followed by W_R.
const FLAG_COMBINED_KEYWORD: u8 = 0x02;

/// Sealed keyword ciphertexts must fit one asymmetric-cipher message;
/// 117 bytes is the usable payload of RSA-1024 with padding.
pub const MAX_SEALED_BYTES: usize = 117;

#[derive(Debug, Error)]
pub enum TransportError {
    #[error("sealed keyword would be {len} bytes, exceeding the {max}-byte transport bound")]
    SizeBound { len: usize, max: usize },
    #[error("preshared pad exhausted: need {need} bytes, {left} left")]
    PadExhausted { need: usize, left: usize },
}

#[derive(Debug, Error)]
pub enum FrameError {
    #[error("the two ciphertexts differ in length: {left} vs {right} bits")]
    MuxLengthMismatch { left: usize, right: usize },
    #[error("interleaved payload has odd bit length {0}")]
    OddPayload(usize),
    #[error("bad magic: not a frame")]
    BadMagic,
    #[error("unsupported frame version {0:#04x}")]
    BadVersion(u8),
    #[error("unknown variant id {0:#04x}")]
    BadVariant(u8),
    #[error("unknown rule id {0:#04x}")]
    BadRule(u8),
    #[error("flags {0:#04x} inconsistent with the variant")]
    BadFlags(u8),
    #[error("frame truncated or length fields inconsistent")]
    Truncated,
    #[error("frame CRC mismatch")]
    CrcMismatch,
    #[error("frame was built for a different library (fingerprint mismatch)")]
    FingerprintMismatch,
    #[error("selection size {0} does not fit the frame's 16-bit g field")]
    GTooLarge(usize),
    #[error("payload of {payload} bits exceeds the declared block length {s}")]
    PayloadTooLong { payload: usize, s: u64 },
    #[error(transparent)]
    Transport(#[from] TransportError),
    #[error(transparent)]
    Keys(#[from] KeyError),
    #[error("cipher output shape does not match the variant")]
    BadOutputShape,
}

// ---- multiplexing ------------------------------------------------------

/// Interleaves two equal-length ciphertexts: bits of `c_p` take the
/// odd-numbered positions (1-indexed), bits of `c_r` the even-numbered.
pub fn mux(c_p: &BitString, c_r: &BitString) -> Result<BitString, FrameError> {
    if c_p.len() != c_r.len() {
        return Err(FrameError::MuxLengthMismatch {
            left: c_p.len(),
            right: c_r.len(),
        });
    }
    let mut bits = Vec::with_capacity(c_p.len() * 2);
    for (p, r) in c_p.iter_bits().zip(c_r.iter_bits()) {
        bits.push(p);
        bits.push(r);
    }
    Ok(BitString::from_bits(&bits))
}

/// Inverse of [`mux`].
pub fn demux(c: &BitString) -> Result<(BitString, BitString), FrameError> {
    if !c.len().is_multiple_of(2) {
        return Err(FrameError::OddPayload(c.len()));
    }
    let half = c.len() / 2;
    let mut p = Vec::with_capacity(half);
    let mut r = Vec::with_capacity(half);
    for (i, bit) in c.iter_bits().enumerate() {
        if i % 2 == 0 {
            p.push(bit);
        } else {
            r.push(bit);
        }
    }
    Ok((BitString::from_bits(&p), BitString::from_bits(&r)))
}

/// Splits an interleaved stream arriving in arbitrary chunks, buffering
/// the dangling bit of a split pair.
#[derive(Debug, Default)]
pub struct Demuxer {
    pending: Option<bool>,
}

impl Demuxer {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, chunk: &BitString) -> (BitString, BitString) {
        let mut p = Vec::new();
        let mut r = Vec::new();
        for bit in chunk.iter_bits() {
            match self.pending.take() {
                None => self.pending = Some(bit),
                Some(first) => {
                    p.push(first);
                    r.push(bit);
                }
            }
        }
        (BitString::from_bits(&p), BitString::from_bits(&r))
    }

    /// A complete stream leaves nothing pending.
    pub fn is_balanced(&self) -> bool {
        self.pending.is_none()
    }
}

// ---- keyword transport -------------------------------------------------

/// The secure channel that carries keywords. Any sufficiently secure
/// cipher can take this role; implementations here are stand-ins with
/// the same size discipline as an RSA-1024 message.
pub trait KeywordTransport {
    /// Encrypts a keyword for `recipient`.
    fn seal(&mut self, keyword: &[u8], recipient: &str) -> Result<Vec<u8>, TransportError>;
    /// Decrypts a keyword ciphertext addressed to `identity`.
    fn open(&mut self, sealed: &[u8], identity: &str) -> Result<Vec<u8>, TransportError>;
    /// Sealed size for a given plaintext size; both stubs preserve length.
    fn sealed_len(&self, plain_len: usize) -> usize {
        plain_len
    }
}

fn check_bound(len: usize) -> Result<(), TransportError> {
    if len > MAX_SEALED_BYTES {
        return Err(TransportError::SizeBound {
            len,
            max: MAX_SEALED_BYTES,
        });
    }
    Ok(())
}

/// Identity channel for tests and loopback runs.
#[derive(Debug, Default)]
pub struct NullTransport;

impl KeywordTransport for NullTransport {
    fn seal(&mut self, keyword: &[u8], _recipient: &str) -> Result<Vec<u8>, TransportError> {
        check_bound(keyword.len())?;
        Ok(keyword.to_vec())
    }

    fn open(&mut self, sealed: &[u8], _identity: &str) -> Result<Vec<u8>, TransportError> {
        check_bound(sealed.len())?;
        Ok(sealed.to_vec())
    }
}

/// XORs keywords with a preshared pad, consuming pad material
/// monotonically. Sender and receiver run mirrored instances over the
/// same pad.
#[derive(Debug)]
pub struct PresharedPadTransport {
    pad: Vec<u8>,
    offset: usize,
}

impl PresharedPadTransport {
    pub fn new(pad: Vec<u8>) -> Self {
        PresharedPadTransport { pad, offset: 0 }
    }

    pub fn remaining(&self) -> usize {
        self.pad.len() - self.offset
    }

    fn xor_segment(&mut self, data: &[u8]) -> Result<Vec<u8>, TransportError> {
        check_bound(data.len())?;
        if self.remaining() < data.len() {
            return Err(TransportError::PadExhausted {
                need: data.len(),
                left: self.remaining(),
            });
        }
        let out = data
            .iter()
            .zip(&self.pad[self.offset..])
            .map(|(d, p)| d ^ p)
            .collect();
        self.offset += data.len();
        Ok(out)
    }
}

impl KeywordTransport for PresharedPadTransport {
    fn seal(&mut self, keyword: &[u8], _recipient: &str) -> Result<Vec<u8>, TransportError> {
        self.xor_segment(keyword)
    }

    fn open(&mut self, sealed: &[u8], _identity: &str) -> Result<Vec<u8>, TransportError> {
        self.xor_segment(sealed)
    }
}

// ---- frame layout ------------------------------------------------------

fn variant_id(v: Variant) -> u8 {
    match v {
        Variant::Main => 0x01,
        Variant::VarA => 0x02,
        Variant::VarB => 0x03,
        Variant::VarC => 0x04,
        Variant::VarD => 0x05,
        Variant::VarE => 0x06,
        Variant::BasicF => 0x07,
    }
}

fn variant_from_id(id: u8) -> Result<Variant, FrameError> {
    Ok(match id {
        0x01 => Variant::Main,
        0x02 => Variant::VarA,
        0x03 => Variant::VarB,
        0x04 => Variant::VarC,
        0x05 => Variant::VarD,
        0x06 => Variant::VarE,
        0x07 => Variant::BasicF,
        other => return Err(FrameError::BadVariant(other)),
    })
}

fn rule_id(r: RuleId) -> u8 {
    match r {
        RuleId::RuleA => 0x01,
        RuleId::RuleB => 0x02,
    }
}

fn rule_from_id(id: u8) -> Result<RuleId, FrameError> {
    Ok(match id {
        0x01 => RuleId::RuleA,
        0x02 => RuleId::RuleB,
        other => return Err(FrameError::BadRule(other)),
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrameHeader {
    pub variant: Variant,
    pub rule: RuleId,
    pub combined_keyword: bool,
    pub fingerprint: [u8; 8],
    /// Block length in bits.
    pub s: u64,
    pub g_p: u16,
    /// Zero for single-keyword variants.
    pub g_r: u16,
}

impl FrameHeader {
    pub fn verify_fingerprint(&self, lib: &Library) -> Result<(), FrameError> {
        if self.fingerprint != lib.fingerprint() {
            return Err(FrameError::FingerprintMismatch);
        }
        Ok(())
    }

    /// Receiver-side session configuration. The truncation policy never
    /// affects decryption (the payload length is authoritative) and the
    /// g bounds only constrain sampling, so permissive values are used.
    pub fn session_config(&self) -> SessionConfig {
        SessionConfig {
            variant: self.variant,
            rule: self.rule,
            bounds: GBounds::new(1, (self.g_p.max(self.g_r).max(1)) as u64)
                .expect("bounds from header are structurally valid"),
            s: self.s,
            policy: TruncationPolicy::ZeroPad,
        }
    }
}

/// A parsed frame: header, sealed keyword bytes, payload bits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    pub header: FrameHeader,
    pub a_section: Vec<u8>,
    pub c_section: BitString,
}

impl Frame {
    /// Serializes to the frame byte layout; `parse` is its inverse.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(MAGIC);
        out.push(VERSION);
        out.push(variant_id(self.header.variant));
        out.push(rule_id(self.header.rule));
        let mut flags = 0u8;
        if self.header.variant == Variant::BasicF {
            flags |= FLAG_UNINTERLEAVED;
        }
        if self.header.combined_keyword {
            flags |= FLAG_COMBINED_KEYWORD;
        }
        out.push(flags);
        out.extend_from_slice(&self.header.fingerprint);
        out.extend_from_slice(&self.header.s.to_be_bytes());
        out.extend_from_slice(&self.header.g_p.to_be_bytes());
        out.extend_from_slice(&self.header.g_r.to_be_bytes());
        out.extend_from_slice(&(self.a_section.len() as u32).to_be_bytes());
        out.extend_from_slice(&self.a_section);
        out.extend_from_slice(&(self.c_section.len() as u64).to_be_bytes());
        out.extend_from_slice(self.c_section.as_bytes());
        let crc = crc32(&out);
        out.extend_from_slice(&crc.to_be_bytes());
        out
    }

    /// Decodes the 32 fixed header bytes: magic(4) version(1) variant(1)
    /// rule(1) flags(1) fingerprint(8) s(8) g_p(2) g_r(2) len_a(4).
    /// Returns the header and the A-section byte length.
    pub fn parse_fixed_header(
        bytes: &[u8; FIXED_HEADER_LEN],
    ) -> Result<(FrameHeader, usize), FrameError> {
        if &bytes[..4] != MAGIC {
            return Err(FrameError::BadMagic);
        }
        if bytes[4] != VERSION {
            return Err(FrameError::BadVersion(bytes[4]));
        }
        let variant = variant_from_id(bytes[5])?;
        let rule = rule_from_id(bytes[6])?;
        let flags = bytes[7];
        if flags & !(FLAG_UNINTERLEAVED | FLAG_COMBINED_KEYWORD) != 0 {
            return Err(FrameError::BadFlags(flags));
        }
        let uninterleaved = flags & FLAG_UNINTERLEAVED != 0;
        if uninterleaved != (variant == Variant::BasicF) {
            return Err(FrameError::BadFlags(flags));
        }
        let mut fingerprint = [0u8; 8];
        fingerprint.copy_from_slice(&bytes[8..16]);
        let s = u64::from_be_bytes(bytes[16..24].try_into().unwrap());
        let g_p = u16::from_be_bytes(bytes[24..26].try_into().unwrap());
        let g_r = u16::from_be_bytes(bytes[26..28].try_into().unwrap());
        let len_a = u32::from_be_bytes(bytes[28..32].try_into().unwrap()) as usize;
        Ok((
            FrameHeader {
                variant,
                rule,
                combined_keyword: flags & FLAG_COMBINED_KEYWORD != 0,
                fingerprint,
                s,
                g_p,
                g_r,
            },
            len_a,
        ))
    }

    pub fn parse(bytes: &[u8]) -> Result<Frame, FrameError> {
        if bytes.len() < 4 {
            return Err(FrameError::Truncated);
        }
        if &bytes[..4] != MAGIC {
            return Err(FrameError::BadMagic);
        }
        if bytes.len() < FIXED_HEADER_LEN + 8 + 4 {
            return Err(FrameError::Truncated);
        }
        let fixed: &[u8; FIXED_HEADER_LEN] = bytes[..FIXED_HEADER_LEN].try_into().unwrap();
        let (header, len_a) = Frame::parse_fixed_header(fixed)?;

        let a_start = FIXED_HEADER_LEN;
        let c_len_off = a_start.checked_add(len_a).ok_or(FrameError::Truncated)?;
        if bytes.len() < c_len_off + 8 + 4 {
            return Err(FrameError::Truncated);
        }
        let c_bits = u64::from_be_bytes(bytes[c_len_off..c_len_off + 8].try_into().unwrap());
        let c_bytes = (c_bits as usize).div_ceil(8);
        let c_start = c_len_off + 8;
        let crc_off = c_start.checked_add(c_bytes).ok_or(FrameError::Truncated)?;
        if bytes.len() != crc_off + 4 {
            return Err(FrameError::Truncated);
        }
        let stored_crc = u32::from_be_bytes(bytes[crc_off..].try_into().unwrap());
        if crc32(&bytes[..crc_off]) != stored_crc {
            return Err(FrameError::CrcMismatch);
        }
        let c_section = BitString::from_bytes(&bytes[c_start..crc_off], c_bits as usize)
            .map_err(|_| FrameError::Truncated)?;
        // Padding bits past the declared length must be zero.
        if bytes[c_start..crc_off] != *c_section.as_bytes() {
            return Err(FrameError::Truncated);
        }
        Ok(Frame {
            header,
            a_section: bytes[a_start..c_len_off].to_vec(),
            c_section,
        })
    }
}

/// Bit length of one encoded keyword with selection size `g`.
fn keyword_bits(lib: &Library, g: usize) -> Result<usize, FrameError> {
    Ok(match lib.config() {
        LibraryConfig::IndependentKeys { k, .. } => k as usize,
        LibraryConfig::MasterString { l } => g * pointer_width(l)? as usize,
    })
}

/// Assembles a complete frame around an encrypted block: seals the
/// keywords (separately, or appended into one blob when `combined`),
/// interleaves the payload, and checksums the result.
pub fn build_frame(
    cfg: &SessionConfig,
    lib: &Library,
    keys: &SessionKeys,
    out: &CipherOutput,
    transport: &mut dyn KeywordTransport,
    recipient: &str,
    combined: bool,
) -> Result<Vec<u8>, FrameError> {
    let w_p = encode_keyword(keys.kw_p(), lib)?;
    let g_p = keys.kw_p().g();
    let (w_r, g_r) = match keys.kw_r() {
        Some(kw) => (Some(encode_keyword(kw, lib)?), kw.g()),
        None => (None, 0),
    };
    if g_p > u16::MAX as usize || g_r > u16::MAX as usize {
        return Err(FrameError::GTooLarge(g_p.max(g_r)));
    }

    let a_section = match (&w_r, combined) {
        (Some(w_r), true) => transport.seal(w_p.concat(w_r).as_bytes(), recipient)?,
        (Some(w_r), false) => {
            let mut a = transport.seal(w_p.as_bytes(), recipient)?;
            a.extend(transport.seal(w_r.as_bytes(), recipient)?);
            a
        }
        (None, _) => transport.seal(w_p.as_bytes(), recipient)?,
    };

    let c_section = match (&out.c_r, cfg.variant.has_second_ciphertext()) {
        (Some(c_r), true) => mux(&out.c_p, c_r)?,
        (None, false) => out.c_p.clone(),
        _ => return Err(FrameError::BadOutputShape),
    };

    let frame = Frame {
        header: FrameHeader {
            variant: cfg.variant,
            rule: cfg.rule,
            combined_keyword: combined && w_r.is_some(),
            fingerprint: lib.fingerprint(),
            s: cfg.s,
            g_p: g_p as u16,
            g_r: g_r as u16,
        },
        a_section,
        c_section,
    };
    Ok(frame.to_bytes())
}

/// Everything a receiver needs to decrypt a parsed frame.
#[derive(Debug)]
pub struct OpenedFrame {
    pub cfg: SessionConfig,
    pub keys: SessionKeys,
    pub output: CipherOutput,
}

/// Unseals and decodes the keywords of a parsed header + A-section.
pub fn unseal_keywords(
    header: &FrameHeader,
    a_section: &[u8],
    lib: &Library,
    transport: &mut dyn KeywordTransport,
    identity: &str,
) -> Result<(crate::keys::Keyword, Option<crate::keys::Keyword>), FrameError> {
    let w_p_bits = keyword_bits(lib, header.g_p as usize)?;
    let two_keywords = header.variant.keyword_count() == 2;
    let w_r_bits = if two_keywords {
        keyword_bits(lib, header.g_r as usize)?
    } else {
        0
    };

    let (w_p, w_r) = if header.combined_keyword && two_keywords {
        let opened = transport.open(a_section, identity)?;
        if opened.len() != (w_p_bits + w_r_bits).div_ceil(8) {
            return Err(FrameError::Truncated);
        }
        let combined = BitString::from_bytes(&opened, w_p_bits + w_r_bits)
            .map_err(|_| FrameError::Truncated)?;
        (
            combined.slice(0, w_p_bits),
            Some(combined.slice(w_p_bits, w_r_bits)),
        )
    } else {
        let sealed_p_len = transport.sealed_len(w_p_bits.div_ceil(8));
        if a_section.len() < sealed_p_len {
            return Err(FrameError::Truncated);
        }
        let (a_p, a_r) = a_section.split_at(sealed_p_len);
        let opened_p = transport.open(a_p, identity)?;
        if opened_p.len() != w_p_bits.div_ceil(8) {
            return Err(FrameError::Truncated);
        }
        let w_p = BitString::from_bytes(&opened_p, w_p_bits).map_err(|_| FrameError::Truncated)?;
        let w_r = if two_keywords {
            let opened_r = transport.open(a_r, identity)?;
            if opened_r.len() != w_r_bits.div_ceil(8) {
                return Err(FrameError::Truncated);
            }
            Some(BitString::from_bytes(&opened_r, w_r_bits).map_err(|_| FrameError::Truncated)?)
        } else {
            if !a_r.is_empty() {
                return Err(FrameError::Truncated);
            }
            None
        };
        (w_p, w_r)
    };

    let kw_p = decode_keyword(&w_p, lib, Some(header.g_p as u64))?;
    let kw_r = w_r
        .as_ref()
        .map(|w| decode_keyword(w, lib, Some(header.g_r as u64)))
        .transpose()?;
    Ok((kw_p, kw_r))
}

/// Parses a frame, checks it against the library, unseals the keywords,
/// and splits the payload. The result feeds straight into decryption.
pub fn open_frame(
    bytes: &[u8],
    lib: &Library,
    transport: &mut dyn KeywordTransport,
    identity: &str,
) -> Result<OpenedFrame, FrameError> {
    let frame = Frame::parse(bytes)?;
    frame.header.verify_fingerprint(lib)?;
    let header = &frame.header;
    let (kw_p, kw_r) = unseal_keywords(header, &frame.a_section, lib, transport, identity)?;

    let output = if header.variant == Variant::BasicF {
        CipherOutput {
            c_p: frame.c_section.clone(),
            c_r: None,
        }
    } else {
        let (c_p, c_r) = demux(&frame.c_section)?;
        CipherOutput {
            c_p,
            c_r: Some(c_r),
        }
    };
    if output.c_p.len() as u64 > header.s {
        return Err(FrameError::PayloadTooLong {
            payload: output.c_p.len(),
            s: header.s,
        });
    }

    let cfg = header.session_config();
    let keys = SessionKeys::from_keywords(&cfg, lib, kw_p, kw_r)
        .map_err(|_| FrameError::BadOutputShape)?;
    Ok(OpenedFrame { cfg, keys, output })
}
