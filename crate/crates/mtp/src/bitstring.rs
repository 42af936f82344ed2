//! Fixed-length binary strings and the XOR algebra the cipher is built on.
//!
//! Bits are packed MSB-first: bit index `b` lives in byte `b / 8` at bit
//! position `7 - b % 8`, so hex dumps read left to right in bit order.
//! A string's length is fixed at construction; all binary operations
//! require equal lengths. Padding bits in the last byte are kept zero so
//! equal values are always byte-equal.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BitStringError {
    #[error("length mismatch: left operand is {left} bits, right operand is {right} bits")]
    LengthMismatch { left: usize, right: usize },
    #[error("invalid bit/hex text: {0}")]
    BadText(String),
    #[error("byte buffer holds {have} bits, need {need}")]
    ShortBuffer { have: usize, need: usize },
}

/// An immutable sequence of bits of fixed length.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitString {
    bytes: Vec<u8>,
    len: usize,
}

impl BitString {
    /// All-zero string of `len` bits.
    pub fn zeros(len: usize) -> Self {
        BitString {
            bytes: vec![0u8; len.div_ceil(8)],
            len,
        }
    }

    /// All-one string of `len` bits.
    pub fn ones(len: usize) -> Self {
        let mut s = BitString {
            bytes: vec![0xffu8; len.div_ceil(8)],
            len,
        };
        s.clear_padding();
        s
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let mut s = BitString::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            s.set(i, b);
        }
        s
    }

    /// Parses a string of `0`/`1` characters; whitespace is ignored.
    pub fn from_bin(text: &str) -> Result<Self, BitStringError> {
        let mut bits = Vec::with_capacity(text.len());
        for c in text.chars() {
            match c {
                '0' => bits.push(false),
                '1' => bits.push(true),
                c if c.is_whitespace() => {}
                c => {
                    return Err(BitStringError::BadText(format!(
                        "unexpected character {c:?}"
                    )))
                }
            }
        }
        Ok(BitString::from_bits(&bits))
    }

    /// Takes the first `len` bits out of `bytes` (MSB-first).
    pub fn from_bytes(bytes: &[u8], len: usize) -> Result<Self, BitStringError> {
        if bytes.len() * 8 < len {
            return Err(BitStringError::ShortBuffer {
                have: bytes.len() * 8,
                need: len,
            });
        }
        let mut s = BitString {
            bytes: bytes[..len.div_ceil(8)].to_vec(),
            len,
        };
        s.clear_padding();
        Ok(s)
    }

    /// Parses hex digits; `len` is carried externally and may trim the
    /// low-order bits of the final nibble.
    pub fn from_hex(hex: &str, len: usize) -> Result<Self, BitStringError> {
        let compact: String = hex.chars().filter(|c| !c.is_whitespace()).collect();
        if !compact.len().is_multiple_of(2) {
            return Err(BitStringError::BadText("odd number of hex digits".into()));
        }
        let mut bytes = Vec::with_capacity(compact.len() / 2);
        for pair in compact.as_bytes().chunks(2) {
            let s = std::str::from_utf8(pair).expect("hex input is ascii");
            let byte = u8::from_str_radix(s, 16)
                .map_err(|_| BitStringError::BadText(format!("bad hex pair {s:?}")))?;
            bytes.push(byte);
        }
        BitString::from_bytes(&bytes, len)
    }

    pub fn to_hex(&self) -> String {
        self.bytes.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Packed bytes, MSB-first, padding bits zero.
    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes
    }

    pub fn bit(&self, index: usize) -> bool {
        assert!(
            index < self.len,
            "bit index {index} out of range {}",
            self.len
        );
        (self.bytes[index / 8] >> (7 - index % 8)) & 1 == 1
    }

    pub(crate) fn set(&mut self, index: usize, value: bool) {
        assert!(
            index < self.len,
            "bit index {index} out of range {}",
            self.len
        );
        let mask = 1u8 << (7 - index % 8);
        if value {
            self.bytes[index / 8] |= mask;
        } else {
            self.bytes[index / 8] &= !mask;
        }
    }

    pub fn iter_bits(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(|i| self.bit(i))
    }

    fn clear_padding(&mut self) {
        let spare = self.bytes.len() * 8 - self.len;
        if spare > 0 {
            let last = self.bytes.len() - 1;
            self.bytes[last] &= 0xffu8 << spare;
        }
    }

    fn check_len(&self, other: &BitString) -> Result<(), BitStringError> {
        if self.len != other.len {
            return Err(BitStringError::LengthMismatch {
                left: self.len,
                right: other.len,
            });
        }
        Ok(())
    }

    /// Bitwise XOR of two equal-length strings.
    pub fn xor(&self, other: &BitString) -> Result<BitString, BitStringError> {
        self.check_len(other)?;
        let mut out = self.clone();
        out.xor_in_place(other).expect("lengths already checked");
        Ok(out)
    }

    /// XOR-accumulate `other` into `self`.
    pub fn xor_in_place(&mut self, other: &BitString) -> Result<(), BitStringError> {
        self.check_len(other)?;
        for (a, b) in self.bytes.iter_mut().zip(&other.bytes) {
            *a ^= b;
        }
        Ok(())
    }

    /// Rotates left by one bit: `result[i] = self[(i + 1) mod len]`.
    pub fn rotl1(&self) -> BitString {
        if self.len <= 1 {
            return self.clone();
        }
        let nb = self.bytes.len();
        let mut out = Vec::with_capacity(nb);
        for j in 0..nb {
            let hi = self.bytes[j] << 1;
            let lo = if j + 1 < nb {
                self.bytes[j + 1] >> 7
            } else {
                0
            };
            out.push(hi | lo);
        }
        let mut r = BitString {
            bytes: out,
            len: self.len,
        };
        r.clear_padding();
        r.set(self.len - 1, self.bit(0));
        r
    }

    /// Rotates left by `n` bits.
    pub fn rotl(&self, n: usize) -> BitString {
        if self.len == 0 {
            return self.clone();
        }
        let n = n % self.len;
        let mut out = BitString::zeros(self.len);
        for i in 0..self.len {
            out.set(i, self.bit((i + n) % self.len));
        }
        out
    }

    /// XOR of all bits.
    pub fn parity(&self) -> bool {
        self.count_ones() % 2 == 1
    }

    pub fn count_ones(&self) -> usize {
        self.bytes.iter().map(|b| b.count_ones() as usize).sum()
    }

    /// Flips every bit.
    pub fn complement(&self) -> BitString {
        let mut out = BitString {
            bytes: self.bytes.iter().map(|b| !b).collect(),
            len: self.len,
        };
        out.clear_padding();
        out
    }

    /// All bits equal (vacuously true for the empty string).
    pub fn is_constant(&self) -> bool {
        let ones = self.count_ones();
        ones == 0 || ones == self.len
    }

    /// `self` followed by `other`.
    pub fn concat(&self, other: &BitString) -> BitString {
        let mut out = BitString::zeros(self.len + other.len);
        out.bytes[..self.bytes.len()].copy_from_slice(&self.bytes);
        if self.len.is_multiple_of(8) {
            out.bytes[self.bytes.len()..].copy_from_slice(&other.bytes);
        } else {
            for i in 0..other.len {
                out.set(self.len + i, other.bit(i));
            }
        }
        out
    }

    /// Bits `start..start + len` of `self`.
    pub fn slice(&self, start: usize, len: usize) -> BitString {
        assert!(
            start + len <= self.len,
            "slice {start}..{} out of range {}",
            start + len,
            self.len
        );
        if start.is_multiple_of(8) {
            let first = start / 8;
            return BitString::from_bytes(&self.bytes[first..first + len.div_ceil(8)], len)
                .expect("enough bytes by construction");
        }
        let mut out = BitString::zeros(len);
        for i in 0..len {
            out.set(i, self.bit(start + i));
        }
        out
    }

    /// First `len` bits.
    pub fn truncate(&self, len: usize) -> BitString {
        self.slice(0, len)
    }

    /// Per-bit choice: where `mask` is 0 take `if_zero`, where 1 take `if_one`.
    pub(crate) fn select(
        mask: &BitString,
        if_zero: &BitString,
        if_one: &BitString,
    ) -> Result<BitString, BitStringError> {
        mask.check_len(if_zero)?;
        mask.check_len(if_one)?;
        let mut out = BitString::zeros(mask.len);
        for i in 0..out.bytes.len() {
            out.bytes[i] = (if_zero.bytes[i] & !mask.bytes[i]) | (if_one.bytes[i] & mask.bytes[i]);
        }
        out.clear_padding();
        Ok(out)
    }
}

/// Growable bit buffer; the streaming sessions and the CLI build
/// bit-granular output through it.
#[derive(Debug, Default)]
pub(crate) struct BitBuf {
    bytes: Vec<u8>,
    len: usize,
}

impl BitBuf {
    pub(crate) fn new() -> Self {
        BitBuf::default()
    }

    pub(crate) fn len(&self) -> usize {
        self.len
    }

    pub(crate) fn bit(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.bytes[i / 8] >> (7 - i % 8)) & 1 == 1
    }

    pub(crate) fn push_bit(&mut self, b: bool) {
        if self.len.is_multiple_of(8) {
            self.bytes.push(0);
        }
        if b {
            self.bytes[self.len / 8] |= 1 << (7 - self.len % 8);
        }
        self.len += 1;
    }

    pub(crate) fn extend(&mut self, s: &BitString) {
        if self.len.is_multiple_of(8) {
            self.bytes.extend_from_slice(s.as_bytes());
            self.len += s.len();
        } else {
            for b in s.iter_bits() {
                self.push_bit(b);
            }
        }
    }

    pub(crate) fn slice(&self, start: usize, len: usize) -> BitString {
        debug_assert!(start + len <= self.len);
        BitString::from_bits(
            &(start..start + len)
                .map(|i| self.bit(i))
                .collect::<Vec<_>>(),
        )
    }

    pub(crate) fn freeze(&self) -> BitString {
        BitString::from_bytes(&self.bytes, self.len).expect("buffer holds its own length")
    }
}

impl fmt::Display for BitString {
    /// Writes the bits as `0`/`1` characters.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter_bits() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.len <= 64 {
            write!(f, "BitString({}, \"{}\")", self.len, self)
        } else {
            write!(f, "BitString({}, 0x{}…)", self.len, &self.to_hex()[..16])
        }
    }
}
