//! Streaming sessions: push chunks through an open session and receive
//! output incrementally, without waiting for the whole block.
//!
//! Encryption emits a pair of ciphertext segments per push. Decryption
//! consumes aligned (C_P, C_R) segments and emits every plaintext bit
//! whose dependencies have arrived. Bit `t` of the plaintext needs the
//! second random key at `t`, which is a bit of R1 at most two positions
//! ahead, so decryption trails the input by at most two bits until the
//! block completes.
//!
//! The two-candidate ambiguity of variation (a) has no incremental
//! resolution, so that variant cannot be stream-decrypted.

use crate::bitstring::{BitBuf, BitString};
use crate::cipher::{CipherError, SessionConfig, SessionKeys, TruncationPolicy, Variant};
use crate::keys::RuleId;

/// Which strings XOR into C_P for a variant: (K_P, R1, R2).
fn cp_components(variant: Variant) -> (bool, bool, bool) {
    match variant {
        Variant::Main | Variant::VarE => (true, true, true),
        Variant::VarA => (true, true, false),
        Variant::VarB => (false, true, true),
        Variant::VarC => (false, false, true),
        Variant::VarD => (true, false, true),
        Variant::BasicF => (true, false, false),
    }
}

/// Index of the R1 bit that rule `rule` reads for position `t`, before
/// any wrap: `t + 1` for rule A, `t + 1 + KP[t]` for rule B.
fn rule_source_nowrap(rule: RuleId, kp: &BitString, t: usize) -> usize {
    match rule {
        RuleId::RuleA => t + 1,
        RuleId::RuleB => t + 1 + kp.bit(t) as usize,
    }
}

/// One emitted segment of ciphertext.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StreamChunk {
    pub c_p: BitString,
    pub c_r: Option<BitString>,
}

impl StreamChunk {
    pub fn is_empty(&self) -> bool {
        self.c_p.is_empty()
    }
}

/// Sender-side streaming session.
pub struct EncryptStream {
    cfg: SessionConfig,
    k_p: BitString,
    mask_p: BitString,
    mask_r: Option<BitString>,
    r1: Option<BitString>,
    k_r: Option<BitString>,
    plain: BitBuf,
    emitted: usize,
    complete: bool,
}

impl EncryptStream {
    /// Opens a session over sender keys (random keys included).
    pub fn open(cfg: &SessionConfig, keys: &SessionKeys) -> Result<Self, CipherError> {
        if cfg.variant.uses_random_keys() && keys.r1().is_none() {
            return Err(CipherError::MissingRandomKeys);
        }
        let k_r = keys.k_r_for(cfg.variant).cloned();
        if cfg.variant.keyword_count() == 2 && k_r.is_none() {
            return Err(CipherError::MissingSecondKeyword);
        }
        let s = cfg.s as usize;
        let (use_kp, use_r1, use_r2) = cp_components(cfg.variant);
        let mut mask_p = BitString::zeros(s);
        if use_kp {
            mask_p.xor_in_place(keys.k_p())?;
        }
        if use_r1 {
            mask_p.xor_in_place(keys.r1().unwrap())?;
        }
        if use_r2 {
            mask_p.xor_in_place(keys.r2().unwrap())?;
        }
        let mask_r = if cfg.variant.has_second_ciphertext() {
            let mut m = keys.r1().unwrap().clone();
            m.xor_in_place(k_r.as_ref().unwrap())?;
            if cfg.variant == Variant::VarA {
                m.xor_in_place(keys.r2().unwrap())?;
            }
            Some(m)
        } else {
            None
        };
        Ok(EncryptStream {
            cfg: *cfg,
            k_p: keys.k_p().clone(),
            mask_p,
            mask_r,
            r1: keys.r1().cloned(),
            k_r,
            plain: BitBuf::new(),
            emitted: 0,
            complete: false,
        })
    }

    /// How many output bits are final given `total` pushed bits.
    fn frontier(&self, total: usize) -> usize {
        if !self.cfg.variant.uses_random_keys()
            || self.cfg.policy == TruncationPolicy::ZeroPad
            || total == self.cfg.s as usize
        {
            return total;
        }
        // Truncated blocks wrap the rule at the still-unknown final
        // length; a bit is final once its rule source is behind `total`.
        let mut f = self.emitted;
        while f < total && rule_source_nowrap(self.cfg.rule, &self.k_p, f) < total {
            f += 1;
        }
        f
    }

    fn emit(
        &mut self,
        upto: usize,
        tail_masks: Option<(&BitString, Option<&BitString>)>,
    ) -> StreamChunk {
        let (mask_p, mask_r) = match tail_masks {
            Some((p, r)) => (p, r),
            None => (&self.mask_p, self.mask_r.as_ref()),
        };
        let len = upto - self.emitted;
        let mut c_p = self.plain.slice(self.emitted, len);
        c_p.xor_in_place(&mask_p.slice(self.emitted, len))
            .expect("equal lengths");
        let c_r = mask_r.map(|m| m.slice(self.emitted, len));
        self.emitted = upto;
        StreamChunk { c_p, c_r }
    }

    /// Pushes plaintext bits; returns the ciphertext segment that became
    /// final. An empty chunk is a no-op.
    pub fn push(&mut self, chunk: &BitString) -> Result<StreamChunk, CipherError> {
        if self.complete {
            return Err(CipherError::StreamOverflow {
                pushed: (self.plain.len() + chunk.len()) as u64,
                s: self.cfg.s,
            });
        }
        let total = self.plain.len() + chunk.len();
        if total as u64 > self.cfg.s {
            return Err(CipherError::StreamOverflow {
                pushed: total as u64,
                s: self.cfg.s,
            });
        }
        self.plain.extend(chunk);
        let f = self.frontier(total);
        Ok(self.emit(f, None))
    }

    /// Ends the block: flushes held-back bits, and under zero padding
    /// extends the plaintext with zeros to the full block length.
    pub fn finish(mut self) -> Result<StreamChunk, CipherError> {
        if self.complete {
            return Ok(StreamChunk {
                c_p: BitString::zeros(0),
                c_r: self.mask_r.as_ref().map(|_| BitString::zeros(0)),
            });
        }
        self.complete = true;
        match self.cfg.policy {
            TruncationPolicy::ZeroPad => {
                let s = self.cfg.s as usize;
                while self.plain.len() < s {
                    self.plain.push_bit(false);
                }
                Ok(self.emit(s, None))
            }
            TruncationPolicy::TruncateKeys => {
                let m = self.plain.len();
                if m == self.emitted {
                    return Ok(StreamChunk {
                        c_p: BitString::zeros(0),
                        c_r: self.mask_r.as_ref().map(|_| BitString::zeros(0)),
                    });
                }
                // Rebuild the masks at the now-known final length; only
                // the wrapped tail differs from the full-length masks.
                let cfg = self.cfg;
                let keys_m =
                    truncated_masks(&cfg, &self.k_p, self.k_r.as_ref(), self.r1.as_ref(), m)?;
                Ok(self.emit(m, Some((&keys_m.0, keys_m.1.as_ref()))))
            }
        }
    }
}

/// Masks for a block truncated to `m` bits.
fn truncated_masks(
    cfg: &SessionConfig,
    k_p: &BitString,
    k_r: Option<&BitString>,
    r1: Option<&BitString>,
    m: usize,
) -> Result<(BitString, Option<BitString>), CipherError> {
    let k_p = k_p.truncate(m);
    let k_r = k_r.map(|k| k.truncate(m));
    let (use_kp, use_r1, use_r2) = cp_components(cfg.variant);
    let mut mask_p = BitString::zeros(m);
    let mut mask_r = None;
    if use_kp {
        mask_p.xor_in_place(&k_p)?;
    }
    if cfg.variant.uses_random_keys() {
        let r1 = r1.ok_or(CipherError::MissingRandomKeys)?.truncate(m);
        let r2 = crate::keys::apply_rule(cfg.rule, &r1, &k_p)?;
        if use_r1 {
            mask_p.xor_in_place(&r1)?;
        }
        if use_r2 {
            mask_p.xor_in_place(&r2)?;
        }
        if cfg.variant.has_second_ciphertext() {
            let mut mr = r1.clone();
            mr.xor_in_place(k_r.as_ref().ok_or(CipherError::MissingSecondKeyword)?)?;
            if cfg.variant == Variant::VarA {
                mr.xor_in_place(&r2)?;
            }
            mask_r = Some(mr);
        }
    }
    Ok((mask_p, mask_r))
}

/// Receiver-side streaming session. Holds only keyword-derived keys;
/// the random keys are reconstructed from the arriving ciphertext.
pub struct DecryptStream {
    cfg: SessionConfig,
    k_p: BitString,
    c_p: BitBuf,
    r1: BitBuf,
    emitted: usize,
    complete: bool,
    k_r: Option<BitString>,
}

impl DecryptStream {
    pub fn open(cfg: &SessionConfig, keys: &SessionKeys) -> Result<Self, CipherError> {
        if cfg.variant == Variant::VarA {
            return Err(CipherError::StreamingVarA);
        }
        let k_r = keys.k_r_for(cfg.variant).cloned();
        if cfg.variant.keyword_count() == 2 && k_r.is_none() {
            return Err(CipherError::MissingSecondKeyword);
        }
        Ok(DecryptStream {
            cfg: *cfg,
            k_p: keys.k_p().clone(),
            c_p: BitBuf::new(),
            r1: BitBuf::new(),
            emitted: 0,
            complete: false,
            k_r,
        })
    }

    /// Plaintext bit `t`, with the rule wrapped at block length `m`
    /// (`m == pairs received` once the block is complete).
    fn plain_bit(&self, t: usize, m: usize) -> bool {
        let (use_kp, use_r1, use_r2) = cp_components(self.cfg.variant);
        let mut bit = self.c_p.bit(t);
        if use_kp {
            bit ^= self.k_p.bit(t);
        }
        if use_r1 {
            bit ^= self.r1.bit(t);
        }
        if use_r2 {
            let src = rule_source_nowrap(self.cfg.rule, &self.k_p, t) % m;
            bit ^= self.r1.bit(src);
        }
        bit
    }

    fn drain(&mut self, assume_complete: bool) -> BitString {
        let n = if self.cfg.variant.has_second_ciphertext() {
            self.r1.len()
        } else {
            self.c_p.len()
        };
        let mut out = Vec::new();
        if self.cfg.variant.has_second_ciphertext() {
            let (_, _, use_r2) = cp_components(self.cfg.variant);
            while self.emitted < n {
                let t = self.emitted;
                if use_r2
                    && !assume_complete
                    && rule_source_nowrap(self.cfg.rule, &self.k_p, t) >= n
                {
                    break;
                }
                out.push(self.plain_bit(t, n));
                self.emitted += 1;
            }
        } else {
            while self.emitted < n {
                out.push(self.plain_bit(self.emitted, n));
                self.emitted += 1;
            }
        }
        BitString::from_bits(&out)
    }

    /// Pushes aligned ciphertext segments. Returns every plaintext bit
    /// whose dependencies have now arrived.
    pub fn push(
        &mut self,
        c_p: &BitString,
        c_r: Option<&BitString>,
    ) -> Result<BitString, CipherError> {
        if self.complete {
            return Err(CipherError::StreamOverflow {
                pushed: (self.c_p.len() + c_p.len()) as u64,
                s: self.cfg.s,
            });
        }
        match (c_r, self.cfg.variant.has_second_ciphertext()) {
            (None, true) => return Err(CipherError::MissingSecondCiphertext),
            (Some(_), false) => return Err(CipherError::UnexpectedSecondCiphertext),
            (Some(c_r), true) if c_r.len() != c_p.len() => {
                return Err(CipherError::CiphertextLengthMismatch {
                    c_p: c_p.len(),
                    c_r: c_r.len(),
                })
            }
            _ => {}
        }
        let total = self.c_p.len() + c_p.len();
        if total as u64 > self.cfg.s {
            return Err(CipherError::StreamOverflow {
                pushed: total as u64,
                s: self.cfg.s,
            });
        }
        let offset = self.c_p.len();
        self.c_p.extend(c_p);
        if let Some(c_r) = c_r {
            let k_r = self.k_r.as_ref().expect("checked at open");
            for (i, bit) in c_r.iter_bits().enumerate() {
                self.r1.push_bit(bit ^ k_r.bit(offset + i));
            }
        }
        // Reaching the block length resolves the wrap: the block cannot
        // grow further, so every remaining bit is determined.
        let at_cap = total == self.cfg.s as usize;
        if at_cap {
            self.complete = true;
        }
        Ok(self.drain(at_cap))
    }

    /// Declares the block complete at its current length and flushes the
    /// held-back tail.
    pub fn finish(mut self) -> Result<BitString, CipherError> {
        if self.complete {
            return Ok(BitString::zeros(0));
        }
        self.complete = true;
        Ok(self.drain(true))
    }
}
