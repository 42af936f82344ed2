//! The security arguments, executable: known-plaintext attacks on the
//! basic design and the weak variations, a brute-force oracle, exact
//! key-space arithmetic, and a monobit randomness check.
//!
//! An attacker who knows `r` plaintext bits of a basic-design block can
//! XOR them with the ciphertext to expose `r` private-key bits, each a
//! linear combination (over GF(2)) of the library's basic keys. With
//! enough independent positions the keyword falls out of Gaussian
//! elimination and the rest of the plaintext follows. The augmented
//! design buries the private key under `R1 + R2`, which is exactly what
//! the same pipeline run against it demonstrates.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::One;
use thiserror::Error;

use crate::bitstring::BitString;
use crate::cipher::Variant;
use crate::combinatorics::{binomial, log2_biguint};
use crate::gf2::{self, BitRow};
use crate::keys::{derive_private_key, rule_a, GBounds, KeyError, Keyword, RuleId};
use crate::library::{Library, LibraryConfig, LibraryError};

#[derive(Debug, Error)]
pub enum AttackError {
    #[error("attack requires an independent-key (method 1) library")]
    UnsupportedLibrary,
    #[error("attack applies to variant {expected:?}, input is {got:?}")]
    WrongVariant {
        expected: &'static str,
        got: Variant,
    },
    #[error("known-bit position {pos} outside message of {len} bits")]
    PositionOutOfRange { pos: usize, len: usize },
    #[error("known-bit position {0} listed twice")]
    DuplicatePosition(usize),
    #[error("attack needs the random-key ciphertext")]
    MissingSecondCiphertext,
    #[error("equation count mismatch: {0}")]
    BadSystem(String),
    #[error("brute force over {count} keywords refused (bound {bound})")]
    BruteForceInfeasible { count: BigUint, bound: u64 },
    #[error("input of {len} bits is too short for the test (minimum {min})")]
    TooShort { len: usize, min: usize },
    #[error("keys in use must be 1 or 2, got {0}")]
    BadKeyCount(u8),
    #[error(transparent)]
    Keys(#[from] KeyError),
    #[error(transparent)]
    Library(#[from] LibraryError),
}

// ---- linear systems ------------------------------------------------------

/// A system of GF(2) equations over keyword indicator variables: one row
/// per known plaintext position, one column per basic key.
pub struct Gf2System {
    ncols: usize,
    rows: Vec<BitRow>,
    rhs: Vec<bool>,
}

/// Classification of a solved system.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Gf2Solution {
    Unique(BitString),
    /// Affine solution space: `particular` plus any XOR combination of
    /// the `nullspace` basis vectors.
    Space {
        particular: BitString,
        nullspace: Vec<BitString>,
    },
    Inconsistent,
}

pub struct Gf2Outcome {
    pub rank: usize,
    pub solution: Gf2Solution,
}

impl Gf2System {
    pub fn new(ncols: usize) -> Self {
        Gf2System {
            ncols,
            rows: Vec::new(),
            rhs: Vec::new(),
        }
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn push_equation(&mut self, coeffs: &BitString, rhs: bool) -> Result<(), AttackError> {
        if coeffs.len() != self.ncols {
            return Err(AttackError::BadSystem(format!(
                "equation has {} coefficients, system has {} columns",
                coeffs.len(),
                self.ncols
            )));
        }
        let mut row = BitRow::zero(self.ncols);
        for (c, bit) in coeffs.iter_bits().enumerate() {
            if bit {
                row.set(c, true);
            }
        }
        self.rows.push(row);
        self.rhs.push(rhs);
        Ok(())
    }

    /// Row-reduces over GF(2) and classifies the solution set exactly.
    pub fn solve(&self) -> Gf2Outcome {
        let (rank, solution) = gf2::solve(self.ncols, &self.rows, &self.rhs);
        let to_bits = |v: Vec<bool>| BitString::from_bits(&v);
        let solution = match solution {
            gf2::Solution::Unique(v) => Gf2Solution::Unique(to_bits(v)),
            gf2::Solution::Space {
                particular,
                nullspace,
            } => Gf2Solution::Space {
                particular: to_bits(particular),
                nullspace: nullspace.into_iter().map(to_bits).collect(),
            },
            gf2::Solution::Inconsistent => Gf2Solution::Inconsistent,
        };
        Gf2Outcome { rank, solution }
    }
}

// ---- attacker's view ------------------------------------------------------

/// What the attacker holds: the ciphertexts, the public library, some
/// plaintext bits (0-indexed positions), and the model assumption.
pub struct AttackInput<'a> {
    pub lib: &'a Library,
    pub c_p: BitString,
    pub c_r: Option<BitString>,
    pub known: Vec<(usize, bool)>,
    pub variant: Variant,
    pub rule: RuleId,
}

impl AttackInput<'_> {
    fn validate(&self) -> Result<(), AttackError> {
        let len = self.c_p.len();
        let mut seen = vec![false; len];
        for &(pos, _) in &self.known {
            if pos >= len {
                return Err(AttackError::PositionOutOfRange { pos, len });
            }
            if seen[pos] {
                return Err(AttackError::DuplicatePosition(pos));
            }
            seen[pos] = true;
        }
        Ok(())
    }

    fn method1_keys(&self) -> Result<(u32, u64, Vec<BitString>), AttackError> {
        let LibraryConfig::IndependentKeys { k, s } = self.lib.config() else {
            return Err(AttackError::UnsupportedLibrary);
        };
        let keys = (1..=k as u64)
            .map(|id| self.lib.basic_key(id, s))
            .collect::<Result<Vec<_>, _>>()?;
        Ok((k, s, keys))
    }
}

/// Outcome of a keyword-recovery attack.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AttackOutcome {
    /// Keyword pinned down; everything decrypted.
    Recovered {
        keyword: Keyword,
        plaintext: BitString,
        rank: usize,
    },
    /// The known positions leave free dimensions (or an impractical
    /// candidate count); nothing is claimed.
    Underdetermined { rank: usize, reason: String },
    /// No keyword is consistent: the data did not come from the assumed
    /// model.
    WrongModel { rank: usize },
}

impl AttackOutcome {
    pub fn plaintext(&self) -> Option<&BitString> {
        match self {
            AttackOutcome::Recovered { plaintext, .. } => Some(plaintext),
            _ => None,
        }
    }
}

/// How many candidate keywords the solver will enumerate before calling
/// a rank-deficient system underdetermined.
const ENUMERATION_BOUND: usize = 1 << 16;

/// Known-plaintext attack on the basic design: `P[p] xor C_P[p]` exposes
/// private-key bits, each a linear function of the keyword.
pub fn known_plaintext_attack_basic(input: &AttackInput) -> Result<AttackOutcome, AttackError> {
    if input.variant != Variant::BasicF {
        return Err(AttackError::WrongVariant {
            expected: "BasicF",
            got: input.variant,
        });
    }
    input.validate()?;
    let (k, s, keys) = input.method1_keys()?;

    let mut sys = Gf2System::new(k as usize);
    for &(pos, bit) in &input.known {
        let coeffs = BitString::from_bits(&keys.iter().map(|key| key.bit(pos)).collect::<Vec<_>>());
        sys.push_equation(&coeffs, bit ^ input.c_p.bit(pos))?;
    }
    let outcome = sys.solve();

    let decrypt_with = |w: &BitString| -> Result<(Keyword, BitString), AttackError> {
        let keyword = keyword_from_indicator(w);
        let k_p = derive_private_key(input.lib, &keyword, s)?;
        let k_p = if input.c_p.len() < s as usize {
            k_p.truncate(input.c_p.len())
        } else {
            k_p
        };
        let plaintext = input.c_p.xor(&k_p).expect("equal lengths");
        Ok((keyword, plaintext))
    };

    match outcome.solution {
        Gf2Solution::Inconsistent => Ok(AttackOutcome::WrongModel { rank: outcome.rank }),
        Gf2Solution::Unique(w) => {
            let (keyword, plaintext) = decrypt_with(&w)?;
            debug_assert!(input.known.iter().all(|&(p, b)| plaintext.bit(p) == b));
            Ok(AttackOutcome::Recovered {
                keyword,
                plaintext,
                rank: outcome.rank,
            })
        }
        Gf2Solution::Space {
            particular,
            nullspace,
        } => {
            let dim = nullspace.len();
            if dim >= usize::BITS as usize || (1usize << dim) > ENUMERATION_BOUND {
                return Ok(AttackOutcome::Underdetermined {
                    rank: outcome.rank,
                    reason: format!("solution space has dimension {dim}"),
                });
            }
            // Distinct keywords may share one private key when the
            // library is rank-deficient; success is measured on the
            // plaintext, so enumerate and check for agreement.
            let mut first: Option<(Keyword, BitString)> = None;
            for mask in 0u64..(1u64 << dim) {
                let mut w = particular.clone();
                for (j, basis) in nullspace.iter().enumerate() {
                    if (mask >> j) & 1 == 1 {
                        w.xor_in_place(basis).expect("equal lengths");
                    }
                }
                let (keyword, plaintext) = decrypt_with(&w)?;
                match &first {
                    None => first = Some((keyword, plaintext)),
                    Some((_, p0)) if *p0 == plaintext => {}
                    Some(_) => {
                        return Ok(AttackOutcome::Underdetermined {
                            rank: outcome.rank,
                            reason: format!(
                                "{} candidate keywords disagree on the plaintext",
                                1u64 << dim
                            ),
                        })
                    }
                }
            }
            let (keyword, plaintext) = first.expect("space is never empty");
            Ok(AttackOutcome::Recovered {
                keyword,
                plaintext,
                rank: outcome.rank,
            })
        }
    }
}

fn keyword_from_indicator(w: &BitString) -> Keyword {
    Keyword::Serials(
        w.iter_bits()
            .enumerate()
            .filter(|&(_, b)| b)
            .map(|(i, _)| (i + 1) as u32)
            .collect(),
    )
}

/// Exhaustive keyword scan for the basic design. Returns every keyword
/// consistent with the known bits, and refuses key spaces beyond
/// `max_keywords` — quoting the count, since demonstrating infeasibility
/// is the point.
pub fn brute_force_attack(
    input: &AttackInput,
    max_keywords: u64,
) -> Result<Vec<Keyword>, AttackError> {
    if input.variant != Variant::BasicF {
        return Err(AttackError::WrongVariant {
            expected: "BasicF",
            got: input.variant,
        });
    }
    input.validate()?;
    let (k, _, keys) = input.method1_keys()?;
    let count = BigUint::one() << k;
    if k >= 64 || (1u64 << k) > max_keywords {
        return Err(AttackError::BruteForceInfeasible {
            count,
            bound: max_keywords,
        });
    }

    // Only the known positions matter; project each basic key onto them.
    let positions: Vec<usize> = input.known.iter().map(|&(p, _)| p).collect();
    let nwords = positions.len().div_ceil(64).max(1);
    let project = |key: &BitString| -> Vec<u64> {
        let mut words = vec![0u64; nwords];
        for (i, &p) in positions.iter().enumerate() {
            if key.bit(p) {
                words[i / 64] |= 1 << (i % 64);
            }
        }
        words
    };
    let key_proj: Vec<Vec<u64>> = keys.iter().map(project).collect();
    let mut target = vec![0u64; nwords];
    for (i, &(p, b)) in input.known.iter().enumerate() {
        if b ^ input.c_p.bit(p) {
            target[i / 64] |= 1 << (i % 64);
        }
    }

    // Gray-code walk: each step toggles exactly one key in the fold.
    let mut current = vec![0u64; nwords];
    let mut consistent = Vec::new();
    let total = 1u64 << k;
    for step in 0..total {
        let gray = step ^ (step >> 1);
        if step > 0 {
            let toggled = (step.trailing_zeros()) as usize;
            for (c, kp) in current.iter_mut().zip(&key_proj[toggled]) {
                *c ^= kp;
            }
        }
        if current == target {
            let serials = (0..k).filter(|&i| (gray >> i) & 1 == 1).map(|i| i + 1);
            consistent.push(Keyword::Serials(serials.collect()));
        }
    }
    Ok(consistent)
}

/// Outcome of the rule-A attack on the weak variations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VariationAttackOutcome {
    Recovered {
        keyword: Keyword,
        plaintext: BitString,
        rank: usize,
    },
    Underdetermined {
        rank: usize,
        reason: String,
    },
}

impl VariationAttackOutcome {
    pub fn plaintext(&self) -> Option<&BitString> {
        match self {
            VariationAttackOutcome::Recovered { plaintext, .. } => Some(plaintext),
            _ => None,
        }
    }
}

/// Known-plaintext attack on the variations whose ciphertext pair leaks
/// the second random key under rule A.
///
/// For variation (e), `C_P + C_R = P + R2`, so every known plaintext bit
/// at `p` yields `R2[p]`, hence `R1[(p+1) mod m]` (rule A inverted), and
/// with `K[q] = C_R[q] + R1[q]` one keyword equation. Variation (c) is
/// the same with `C_P + P = R2` directly. Variation (b) leaks only
/// `R1 + R2`, so runs of consecutive known bits are chained from an
/// anchor bit, and both anchor values are tried.
///
/// Under rule B the transposition offsets depend on the private key the
/// attacker is solving for; the attack reports itself underdetermined.
pub fn attack_variation_rule_a(input: &AttackInput) -> Result<VariationAttackOutcome, AttackError> {
    if !matches!(input.variant, Variant::VarB | Variant::VarC | Variant::VarE) {
        return Err(AttackError::WrongVariant {
            expected: "VarB, VarC or VarE",
            got: input.variant,
        });
    }
    input.validate()?;
    if input.rule == RuleId::RuleB {
        return Ok(VariationAttackOutcome::Underdetermined {
            rank: 0,
            reason: "rule B transposition offsets depend on the private key".into(),
        });
    }
    let (k, s, keys) = input.method1_keys()?;
    let c_r = input
        .c_r
        .as_ref()
        .ok_or(AttackError::MissingSecondCiphertext)?;
    let m = input.c_p.len();
    if c_r.len() != m {
        return Err(AttackError::BadSystem(format!(
            "ciphertext halves differ: {} vs {} bits",
            m,
            c_r.len()
        )));
    }
    if input.known.is_empty() || m == 0 {
        return Ok(VariationAttackOutcome::Underdetermined {
            rank: 0,
            reason: "no known plaintext bits".into(),
        });
    }

    let coeffs_at = |q: usize| -> BitString {
        BitString::from_bits(&keys.iter().map(|key| key.bit(q)).collect::<Vec<_>>())
    };
    let finish = |w: &BitString, rank: usize| -> Result<VariationAttackOutcome, AttackError> {
        let keyword = keyword_from_indicator(w);
        let key = {
            let full = derive_private_key(input.lib, &keyword, s)?;
            if m < s as usize {
                full.truncate(m)
            } else {
                full
            }
        };
        let r1 = c_r.xor(&key).expect("equal lengths");
        let r2 = rule_a(&r1);
        let plaintext = match input.variant {
            // P = C_P + K + R1 + R2
            Variant::VarE => input
                .c_p
                .xor(&key)
                .and_then(|x| x.xor(&r1))
                .and_then(|x| x.xor(&r2))
                .expect("equal lengths"),
            // P = C_P + R2
            Variant::VarC => input.c_p.xor(&r2).expect("equal lengths"),
            // P = C_P + R1 + R2
            Variant::VarB => input
                .c_p
                .xor(&r1)
                .and_then(|x| x.xor(&r2))
                .expect("equal lengths"),
            _ => unreachable!(),
        };
        if input.known.iter().any(|&(p, b)| plaintext.bit(p) != b) {
            return Ok(VariationAttackOutcome::Underdetermined {
                rank,
                reason: "recovered keyword contradicts known bits".into(),
            });
        }
        Ok(VariationAttackOutcome::Recovered {
            keyword,
            plaintext,
            rank,
        })
    };

    match input.variant {
        Variant::VarE | Variant::VarC => {
            // R2[p] directly, one equation per known bit at q = p + 1.
            let mut sys = Gf2System::new(k as usize);
            for &(p, bit) in &input.known {
                let r2_p = match input.variant {
                    Variant::VarE => bit ^ input.c_p.bit(p) ^ c_r.bit(p),
                    _ => bit ^ input.c_p.bit(p),
                };
                let q = (p + 1) % m;
                // K[q] = C_R[q] + R1[q], and R1[q] = R2[p]
                sys.push_equation(&coeffs_at(q), c_r.bit(q) ^ r2_p)?;
            }
            let outcome = sys.solve();
            match outcome.solution {
                Gf2Solution::Unique(w) => finish(&w, outcome.rank),
                Gf2Solution::Inconsistent => Ok(VariationAttackOutcome::Underdetermined {
                    rank: outcome.rank,
                    reason: "equations inconsistent with the assumed model".into(),
                }),
                Gf2Solution::Space { .. } => Ok(VariationAttackOutcome::Underdetermined {
                    rank: outcome.rank,
                    reason: format!("rank {} of {k} leaves the keyword free", outcome.rank),
                }),
            }
        }
        Variant::VarB => {
            // Only R1 + R2 is exposed; chain along the longest run of
            // consecutive known bits from an anchor guess.
            let mut known_sorted = input.known.clone();
            known_sorted.sort_unstable();
            let mut best: (usize, usize) = (known_sorted[0].0, 1); // (start, len)
            let mut run_start = known_sorted[0].0;
            let mut run_len = 1;
            for w in known_sorted.windows(2) {
                if w[1].0 == w[0].0 + 1 {
                    run_len += 1;
                } else {
                    run_start = w[1].0;
                    run_len = 1;
                }
                if run_len > best.1 {
                    best = (run_start, run_len);
                }
            }
            let (start, len) = best;
            let d_bit = |t: usize| -> bool {
                let b = known_sorted
                    .binary_search_by_key(&t, |&(p, _)| p)
                    .expect("t is a known position");
                known_sorted[b].1 ^ input.c_p.bit(t)
            };

            let mut last_rank = 0;
            for anchor in [false, true] {
                // R1 over the run: chain R1[t+1] = R1[t] + d[t].
                let mut sys = Gf2System::new(k as usize);
                let mut r1_bit = anchor;
                sys.push_equation(&coeffs_at(start), c_r.bit(start) ^ r1_bit)?;
                for t in start..start + len {
                    r1_bit ^= d_bit(t);
                    let q = (t + 1) % m;
                    sys.push_equation(&coeffs_at(q), c_r.bit(q) ^ r1_bit)?;
                }
                let outcome = sys.solve();
                last_rank = outcome.rank;
                if let Gf2Solution::Unique(w) = outcome.solution {
                    if let ok @ VariationAttackOutcome::Recovered { .. } = finish(&w, outcome.rank)?
                    {
                        return Ok(ok);
                    }
                }
            }
            Ok(VariationAttackOutcome::Underdetermined {
                rank: last_rank,
                reason: "no anchor guess produced a consistent keyword".into(),
            })
        }
        _ => unreachable!(),
    }
}

// ---- key-space arithmetic --------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KeySpaceParams {
    /// Method 1 with `k` basic keys; `bounds` restricts the selection
    /// size, `None` allows every subset.
    IndependentKeys { k: u64, bounds: Option<GBounds> },
    /// Method 2 with master-string length `l` and fixed selection size.
    MasterString { l: u64, g: u64 },
}

/// Exact key-space size; no floating point enters the count itself.
#[derive(Debug, Clone, PartialEq)]
pub struct KeySpaceReport {
    pub params: KeySpaceParams,
    pub keys_in_use: u8,
    pub count: BigUint,
    pub log2: f64,
}

impl fmt::Display for KeySpaceReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "keys={} count={} log2={:.4}",
            self.keys_in_use, self.count, self.log2
        )
    }
}

pub fn key_space_size(
    params: KeySpaceParams,
    keys_in_use: u8,
) -> Result<KeySpaceReport, AttackError> {
    if !(1..=2).contains(&keys_in_use) {
        return Err(AttackError::BadKeyCount(keys_in_use));
    }
    let single: BigUint = match params {
        KeySpaceParams::IndependentKeys { k, bounds: None } => BigUint::one() << k,
        KeySpaceParams::IndependentKeys { k, bounds: Some(b) } => {
            (b.g_min..=b.g_max.min(k)).map(|g| binomial(k, g)).sum()
        }
        KeySpaceParams::MasterString { l, g } => BigUint::from(l)
            .pow(u32::try_from(g).map_err(|_| AttackError::BadSystem("g too large".into()))?),
    };
    let count = if keys_in_use == 2 {
        &single * &single
    } else {
        single
    };
    let log2 = log2_biguint(&count);
    Ok(KeySpaceReport {
        params,
        keys_in_use,
        count,
        log2,
    })
}

// ---- statistics -------------------------------------------------------------

pub const MONOBIT_MIN_BITS: usize = 1024;
/// Two-sided 1% critical value of the standard normal distribution.
pub const MONOBIT_CRITICAL: f64 = 2.576;

#[derive(Debug, Clone, PartialEq)]
pub struct MonobitReport {
    pub bits: usize,
    pub ones: usize,
    pub z: f64,
    pub pass: bool,
}

impl fmt::Display for MonobitReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "n={} ones={} z={:+.4} {}",
            self.bits,
            self.ones,
            self.z,
            if self.pass { "pass" } else { "FAIL" }
        )
    }
}

/// Frequency (monobit) test at the 1% significance level.
pub fn monobit_test(data: &BitString) -> Result<MonobitReport, AttackError> {
    let n = data.len();
    if n < MONOBIT_MIN_BITS {
        return Err(AttackError::TooShort {
            len: n,
            min: MONOBIT_MIN_BITS,
        });
    }
    let ones = data.count_ones();
    let z = (2.0 * ones as f64 - n as f64) / (n as f64).sqrt();
    Ok(MonobitReport {
        bits: n,
        ones,
        z,
        pass: z.abs() < MONOBIT_CRITICAL,
    })
}

// ---- trial records -----------------------------------------------------------

/// One Monte-Carlo attack trial in the line-oriented report format.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub trial: usize,
    pub rank: usize,
    pub success: bool,
    /// Fraction of unknown plaintext bits the attack got right.
    pub bit_match: f64,
}

impl fmt::Display for TrialRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "trial={} rank={} success={} match={:.6}",
            self.trial, self.rank, self.success, self.bit_match
        )
    }
}

impl FromStr for TrialRecord {
    type Err = String;

    fn from_str(line: &str) -> Result<Self, Self::Err> {
        let mut trial = None;
        let mut rank = None;
        let mut success = None;
        let mut bit_match = None;
        for field in line.split_whitespace() {
            let (key, value) = field
                .split_once('=')
                .ok_or_else(|| format!("malformed field {field:?}"))?;
            match key {
                "trial" => trial = Some(value.parse().map_err(|e| format!("trial: {e}"))?),
                "rank" => rank = Some(value.parse().map_err(|e| format!("rank: {e}"))?),
                "success" => success = Some(value.parse().map_err(|e| format!("success: {e}"))?),
                "match" => bit_match = Some(value.parse().map_err(|e| format!("match: {e}"))?),
                other => return Err(format!("unknown field {other:?}")),
            }
        }
        Ok(TrialRecord {
            trial: trial.ok_or("missing trial")?,
            rank: rank.ok_or("missing rank")?,
            success: success.ok_or("missing success")?,
            bit_match: bit_match.ok_or("missing match")?,
        })
    }
}
