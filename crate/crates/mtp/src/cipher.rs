//! The augmented cipher and its published variations.
//!
//! Every variant XORs the plaintext with some subset of {private key,
//! first random key, second random key} and transports the first random
//! key inside a second ciphertext under its own private key:
//!
//! | variant  | C_P                   | C_R                |
//! |----------|-----------------------|--------------------|
//! | `Main`   | P + K_P + R1 + R2     | R1 + K_R           |
//! | `VarA`   | P + K_P + R1          | R1 + R2 + K_R      |
//! | `VarB`   | P + R1 + R2           | R1 + K_R           |
//! | `VarC`   | P + R2                | R1 + K_R           |
//! | `VarD`   | P + K_P + R2          | R1 + K_R           |
//! | `VarE`   | P + K + R1 + R2       | R1 + K             |
//! | `BasicF` | P + K_P               | (none)             |
//!
//! `VarE` uses a single private key for both roles; `BasicF` is the bare
//! design that the known-plaintext attack breaks.

use std::collections::HashSet;

use thiserror::Error;

use crate::bitstring::{BitString, BitStringError};
use crate::entropy::EntropySource;
use crate::keys::{
    apply_rule, derive_private_key, encode_keyword, generate_r1, recover_r1_from_sum_rule_a,
    sample_keyword, GBounds, KeyError, Keyword, RuleId,
};
use crate::library::Library;

#[derive(Debug, Error)]
pub enum CipherError {
    #[error("message of {len} bits exceeds the session block length {s}")]
    MessageTooLong { len: usize, s: u64 },
    #[error("variant requires a second keyword")]
    MissingSecondKeyword,
    #[error("variant carries a single keyword; second keyword must be absent")]
    UnexpectedSecondKeyword,
    #[error("session keys lack random keys; they were derived for the receiving side")]
    MissingRandomKeys,
    #[error("variant requires a second ciphertext")]
    MissingSecondCiphertext,
    #[error("variant has no second ciphertext")]
    UnexpectedSecondCiphertext,
    #[error("ciphertext halves differ in length: {c_p} vs {c_r} bits")]
    CiphertextLengthMismatch { c_p: usize, c_r: usize },
    #[error("variation (a) decryption is only defined for rule A")]
    VarARequiresRuleA,
    #[error("corrupt input: ciphertext is not a valid rule-A combination")]
    CorruptInput,
    #[error("stream overflow: {pushed} bits pushed into a block of {s}")]
    StreamOverflow { pushed: u64, s: u64 },
    #[error("streaming decryption of variation (a) is not supported: candidates stay ambiguous")]
    StreamingVarA,
    #[error(transparent)]
    Keys(#[from] KeyError),
    #[error(transparent)]
    BitString(#[from] BitStringError),
}

/// Equation-family selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    Main,
    VarA,
    VarB,
    VarC,
    VarD,
    VarE,
    BasicF,
}

impl Variant {
    pub const ALL: [Variant; 7] = [
        Variant::Main,
        Variant::VarA,
        Variant::VarB,
        Variant::VarC,
        Variant::VarD,
        Variant::VarE,
        Variant::BasicF,
    ];

    /// Does this variant transmit a random-key ciphertext?
    pub fn has_second_ciphertext(&self) -> bool {
        !matches!(self, Variant::BasicF)
    }

    /// One keyword (single private key) or two?
    pub fn keyword_count(&self) -> usize {
        match self {
            Variant::BasicF | Variant::VarE => 1,
            _ => 2,
        }
    }

    /// Does the variant use random keys at all?
    pub fn uses_random_keys(&self) -> bool {
        !matches!(self, Variant::BasicF)
    }
}

/// What happens when the message is shorter than the block length `s`:
/// pad the plaintext with zeros to `s`, or truncate every key to fit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TruncationPolicy {
    #[default]
    ZeroPad,
    TruncateKeys,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SessionConfig {
    pub variant: Variant,
    pub rule: RuleId,
    pub bounds: GBounds,
    /// Message-block length in bits.
    pub s: u64,
    pub policy: TruncationPolicy,
}

impl SessionConfig {
    pub fn new(
        variant: Variant,
        rule: RuleId,
        bounds: GBounds,
        s: u64,
        policy: TruncationPolicy,
    ) -> Result<Self, CipherError> {
        // Recovering R1 from R1 + R2 is only worked out for rule A; a
        // rule-B session would produce frames nobody can decode.
        if variant == Variant::VarA && rule != RuleId::RuleA {
            return Err(CipherError::VarARequiresRuleA);
        }
        Ok(SessionConfig {
            variant,
            rule,
            bounds,
            s,
            policy,
        })
    }
}

/// Key material for one session.
///
/// Senders hold the full set including the random keys. Receivers build
/// the same structure from the transmitted keywords; their copy has no
/// R1/R2 until a ciphertext supplies them.
#[derive(Debug, Clone)]
pub struct SessionKeys {
    kw_p: Keyword,
    kw_r: Option<Keyword>,
    k_p: BitString,
    k_r: Option<BitString>,
    r1: Option<BitString>,
    r2: Option<BitString>,
}

impl SessionKeys {
    /// Sender side: samples fresh keywords and random keys.
    pub fn generate(
        cfg: &SessionConfig,
        lib: &Library,
        entropy: &mut dyn EntropySource,
    ) -> Result<SessionKeys, CipherError> {
        let kw_p = sample_keyword(lib, &cfg.bounds, entropy)?;
        let k_p = derive_private_key(lib, &kw_p, cfg.s)?;
        let (kw_r, k_r) = match cfg.variant.keyword_count() {
            1 => (None, None),
            _ => {
                // The selection size g is drawn independently for each key.
                let kw_r = sample_keyword(lib, &cfg.bounds, entropy)?;
                let k_r = derive_private_key(lib, &kw_r, cfg.s)?;
                (Some(kw_r), Some(k_r))
            }
        };
        let (r1, r2) = if cfg.variant.uses_random_keys() {
            let r1 = generate_r1(cfg.s as usize, entropy)?;
            let r2 = apply_rule(cfg.rule, &r1, &k_p)?;
            (Some(r1), Some(r2))
        } else {
            (None, None)
        };
        Ok(SessionKeys {
            kw_p,
            kw_r,
            k_p,
            k_r,
            r1,
            r2,
        })
    }

    /// Receiver side: rebuilds the private keys from transmitted
    /// keywords. Random keys stay empty; decryption recovers them.
    pub fn from_keywords(
        cfg: &SessionConfig,
        lib: &Library,
        kw_p: Keyword,
        kw_r: Option<Keyword>,
    ) -> Result<SessionKeys, CipherError> {
        match (cfg.variant.keyword_count(), &kw_r) {
            (1, Some(_)) => return Err(CipherError::UnexpectedSecondKeyword),
            (2, None) => return Err(CipherError::MissingSecondKeyword),
            _ => {}
        }
        let k_p = derive_private_key(lib, &kw_p, cfg.s)?;
        let k_r = kw_r
            .as_ref()
            .map(|kw| derive_private_key(lib, kw, cfg.s))
            .transpose()?;
        Ok(SessionKeys {
            kw_p,
            kw_r,
            k_p,
            k_r,
            r1: None,
            r2: None,
        })
    }

    #[cfg(test)]
    pub(crate) fn from_parts(
        kw_p: Keyword,
        kw_r: Option<Keyword>,
        k_p: BitString,
        k_r: Option<BitString>,
        r1: Option<BitString>,
        r2: Option<BitString>,
    ) -> SessionKeys {
        SessionKeys {
            kw_p,
            kw_r,
            k_p,
            k_r,
            r1,
            r2,
        }
    }

    pub fn kw_p(&self) -> &Keyword {
        &self.kw_p
    }

    pub fn kw_r(&self) -> Option<&Keyword> {
        self.kw_r.as_ref()
    }

    pub fn k_p(&self) -> &BitString {
        &self.k_p
    }

    /// The key that encrypts the random-key ciphertext. For the
    /// single-key variation this is the one private key.
    pub fn k_r_for(&self, variant: Variant) -> Option<&BitString> {
        match variant {
            Variant::VarE => Some(&self.k_p),
            _ => self.k_r.as_ref(),
        }
    }

    pub fn r1(&self) -> Option<&BitString> {
        self.r1.as_ref()
    }

    pub fn r2(&self) -> Option<&BitString> {
        self.r2.as_ref()
    }
}

/// The transmitted ciphertexts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CipherOutput {
    pub c_p: BitString,
    pub c_r: Option<BitString>,
}

/// Decryption result. Variation (a) without outside help cannot tell R1
/// from its complement, so it may surface both plaintext candidates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Recovered {
    Plaintext(BitString),
    Ambiguous(Box<[BitString; 2]>),
}

impl Recovered {
    pub fn plaintext(&self) -> Option<&BitString> {
        match self {
            Recovered::Plaintext(p) => Some(p),
            Recovered::Ambiguous(_) => None,
        }
    }

    pub fn candidates(&self) -> Vec<&BitString> {
        match self {
            Recovered::Plaintext(p) => vec![p],
            Recovered::Ambiguous(pair) => vec![&pair[0], &pair[1]],
        }
    }

    /// Panics on ambiguity; intended for variants that cannot be ambiguous.
    pub fn expect_plaintext(self) -> BitString {
        match self {
            Recovered::Plaintext(p) => p,
            Recovered::Ambiguous(_) => panic!("decryption was ambiguous"),
        }
    }
}

/// Keys truncated (or not) to the effective message length `m`, with the
/// second random key recomputed over the truncated strings so sender and
/// receiver agree on the wrapped tail bits.
struct EffectiveKeys {
    k_p: BitString,
    k_r: Option<BitString>,
    r1: Option<BitString>,
    r2: Option<BitString>,
}

fn effective_sender_keys(
    cfg: &SessionConfig,
    keys: &SessionKeys,
    m: usize,
) -> Result<EffectiveKeys, CipherError> {
    let full = cfg.s as usize;
    let k_r = keys.k_r_for(cfg.variant);
    if m == full {
        return Ok(EffectiveKeys {
            k_p: keys.k_p.clone(),
            k_r: k_r.cloned(),
            r1: keys.r1.clone(),
            r2: keys.r2.clone(),
        });
    }
    let k_p = keys.k_p.truncate(m);
    let k_r = k_r.map(|k| k.truncate(m));
    let (r1, r2) = if cfg.variant.uses_random_keys() {
        let r1 = keys
            .r1
            .as_ref()
            .ok_or(CipherError::MissingRandomKeys)?
            .truncate(m);
        let r2 = apply_rule(cfg.rule, &r1, &k_p)?;
        (Some(r1), Some(r2))
    } else {
        (None, None)
    };
    Ok(EffectiveKeys { k_p, k_r, r1, r2 })
}

/// Applies the variant's equations. The plaintext may be shorter than
/// the block length; the configured policy pads it or truncates the keys.
pub fn encrypt(
    cfg: &SessionConfig,
    keys: &SessionKeys,
    p: &BitString,
) -> Result<CipherOutput, CipherError> {
    if p.len() as u64 > cfg.s {
        return Err(CipherError::MessageTooLong {
            len: p.len(),
            s: cfg.s,
        });
    }
    let (p, m) = match cfg.policy {
        TruncationPolicy::ZeroPad => {
            let s = cfg.s as usize;
            let padded = if p.len() < s {
                p.concat(&BitString::zeros(s - p.len()))
            } else {
                p.clone()
            };
            (padded, s)
        }
        TruncationPolicy::TruncateKeys => (p.clone(), p.len()),
    };
    if cfg.variant.uses_random_keys() && keys.r1.is_none() {
        return Err(CipherError::MissingRandomKeys);
    }
    if cfg.variant.keyword_count() == 2 && keys.k_r_for(cfg.variant).is_none() {
        return Err(CipherError::MissingSecondKeyword);
    }
    let eff = effective_sender_keys(cfg, keys, m)?;

    let mut c_p = p;
    let mut xor_cp = |part: &BitString| c_p.xor_in_place(part);
    match cfg.variant {
        Variant::Main | Variant::VarE => {
            xor_cp(&eff.k_p)?;
            xor_cp(eff.r1.as_ref().unwrap())?;
            xor_cp(eff.r2.as_ref().unwrap())?;
        }
        Variant::VarA => {
            xor_cp(&eff.k_p)?;
            xor_cp(eff.r1.as_ref().unwrap())?;
        }
        Variant::VarB => {
            xor_cp(eff.r1.as_ref().unwrap())?;
            xor_cp(eff.r2.as_ref().unwrap())?;
        }
        Variant::VarC => {
            xor_cp(eff.r2.as_ref().unwrap())?;
        }
        Variant::VarD => {
            xor_cp(&eff.k_p)?;
            xor_cp(eff.r2.as_ref().unwrap())?;
        }
        Variant::BasicF => {
            xor_cp(&eff.k_p)?;
        }
    }

    let c_r = if cfg.variant.has_second_ciphertext() {
        let k_r = eff.k_r.as_ref().expect("checked above");
        let mut c_r = eff.r1.clone().expect("random keys checked above");
        c_r.xor_in_place(k_r)?;
        if cfg.variant == Variant::VarA {
            c_r.xor_in_place(eff.r2.as_ref().unwrap())?;
        }
        Some(c_r)
    } else {
        None
    };

    Ok(CipherOutput { c_p, c_r })
}

/// Recovers the plaintext from the receiver's view: private keys derived
/// from keywords, random keys re-derived from the ciphertexts.
///
/// The effective length is taken from the ciphertext itself, so frames
/// produced under either truncation policy decrypt without knowing which
/// policy the sender used.
pub fn decrypt(
    cfg: &SessionConfig,
    keys: &SessionKeys,
    out: &CipherOutput,
) -> Result<Recovered, CipherError> {
    decrypt_inner(cfg, keys, out, None)
}

/// Like [`decrypt`], with a plaintext-validity predicate to resolve the
/// two-candidate ambiguity of variation (a). If exactly one candidate
/// satisfies the predicate it is returned; otherwise both are surfaced.
pub fn decrypt_with_validator(
    cfg: &SessionConfig,
    keys: &SessionKeys,
    out: &CipherOutput,
    validator: &dyn Fn(&BitString) -> bool,
) -> Result<Recovered, CipherError> {
    decrypt_inner(cfg, keys, out, Some(validator))
}

fn decrypt_inner(
    cfg: &SessionConfig,
    keys: &SessionKeys,
    out: &CipherOutput,
    validator: Option<&dyn Fn(&BitString) -> bool>,
) -> Result<Recovered, CipherError> {
    let m = out.c_p.len();
    if m as u64 > cfg.s {
        return Err(CipherError::MessageTooLong { len: m, s: cfg.s });
    }
    match (&out.c_r, cfg.variant.has_second_ciphertext()) {
        (None, true) => return Err(CipherError::MissingSecondCiphertext),
        (Some(_), false) => return Err(CipherError::UnexpectedSecondCiphertext),
        (Some(c_r), true) if c_r.len() != m => {
            return Err(CipherError::CiphertextLengthMismatch {
                c_p: m,
                c_r: c_r.len(),
            })
        }
        _ => {}
    }

    let k_p = if m == cfg.s as usize {
        keys.k_p.clone()
    } else {
        keys.k_p.truncate(m)
    };
    let k_r = keys.k_r_for(cfg.variant).map(|k| {
        if k.len() == m {
            k.clone()
        } else {
            k.truncate(m)
        }
    });

    if cfg.variant == Variant::BasicF {
        return Ok(Recovered::Plaintext(out.c_p.xor(&k_p)?));
    }
    let c_r = out.c_r.as_ref().expect("checked above");
    let k_r = k_r.ok_or(CipherError::MissingSecondKeyword)?;

    if cfg.variant == Variant::VarA {
        // C_R + K_R leaves R1 + R2; rule A admits exactly two preimages.
        let sum = c_r.xor(&k_r)?;
        let candidates = match recover_r1_from_sum_rule_a(&sum) {
            Ok(pair) => pair,
            Err(KeyError::InconsistentRuleASum) => return Err(CipherError::CorruptInput),
            Err(e) => return Err(e.into()),
        };
        let base = out.c_p.xor(&k_p)?;
        let p0 = base.xor(&candidates[0])?;
        let p1 = base.xor(&candidates[1])?;
        if let Some(valid) = validator {
            match (valid(&p0), valid(&p1)) {
                (true, false) => return Ok(Recovered::Plaintext(p0)),
                (false, true) => return Ok(Recovered::Plaintext(p1)),
                _ => {}
            }
        }
        return Ok(Recovered::Ambiguous(Box::new([p0, p1])));
    }

    let r1 = c_r.xor(&k_r)?;
    let r2 = apply_rule(cfg.rule, &r1, &k_p)?;
    let mut p = out.c_p.clone();
    match cfg.variant {
        Variant::Main | Variant::VarE => {
            p.xor_in_place(&k_p)?;
            p.xor_in_place(&r1)?;
            p.xor_in_place(&r2)?;
        }
        Variant::VarB => {
            p.xor_in_place(&r1)?;
            p.xor_in_place(&r2)?;
        }
        Variant::VarC => {
            p.xor_in_place(&r2)?;
        }
        Variant::VarD => {
            p.xor_in_place(&k_p)?;
            p.xor_in_place(&r2)?;
        }
        Variant::VarA | Variant::BasicF => unreachable!("handled above"),
    }
    Ok(Recovered::Plaintext(p))
}

/// Tracks encoded keywords seen within a scope and warns on reuse.
/// Reuse is a security smell, not a hard failure: probability is meant
/// to keep selections fresh, and this registry makes violations visible.
#[derive(Debug, Default)]
pub struct KeywordRegistry {
    seen: HashSet<Vec<u8>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReuseWarning {
    pub role: &'static str,
    pub keyword: Keyword,
}

impl KeywordRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Records the session's keywords; returns a warning per keyword
    /// that was already seen.
    pub fn observe(&mut self, lib: &Library, keys: &SessionKeys) -> Vec<ReuseWarning> {
        let mut warnings = Vec::new();
        let mut note = |role: &'static str, kw: &Keyword| {
            if let Ok(encoded) = encode_keyword(kw, lib) {
                if !self.seen.insert(encoded.as_bytes().to_vec()) {
                    warnings.push(ReuseWarning {
                        role,
                        keyword: kw.clone(),
                    });
                }
            }
        };
        note("plaintext key", &keys.kw_p);
        if let Some(kw_r) = &keys.kw_r {
            note("random key", kw_r);
        }
        warnings
    }
}
