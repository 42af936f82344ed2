//! Keyword sampling and encoding, private-key derivation, and the two
//! computation rules that turn the first random key into the second.
//!
//! A keyword records which basic keys a sender picked: a set of serials
//! for independent-key libraries, an ordered pointer list for
//! master-string libraries. The private key is the XOR fold of the
//! selected basic keys.

use std::collections::BTreeSet;

use num_bigint::BigUint;
use num_traits::Zero;
use thiserror::Error;

use crate::bitstring::{BitString, BitStringError};
use crate::combinatorics::binomial;
use crate::entropy::{EntropyError, EntropySource};
use crate::library::{Library, LibraryConfig, LibraryError};

#[derive(Debug, Error)]
pub enum KeyError {
    #[error("invalid g bounds: {0}")]
    BadBounds(String),
    #[error("keyword does not match the library method")]
    MethodMismatch,
    #[error("keyword length is {got} bits, expected {expected}")]
    WrongKeywordLength { expected: usize, got: usize },
    #[error("selection id {id} out of range 1..={max}")]
    IdOutOfRange { id: u64, max: u64 },
    #[error("master-string length {l} is not a power of two; pointer encoding undefined")]
    NotPowerOfTwo { l: u64 },
    #[error("decoding a master-string keyword requires the selection size g")]
    MissingSelectionSize,
    #[error("entropy source kept producing constant strings")]
    DegenerateEntropy,
    #[error("sum has odd parity: not a valid rule-A combination")]
    InconsistentRuleASum,
    #[error(transparent)]
    Entropy(#[from] EntropyError),
    #[error(transparent)]
    Library(#[from] LibraryError),
    #[error(transparent)]
    BitString(#[from] BitStringError),
}

/// Which computation rule derives the second random key.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RuleId {
    /// Plain transposition: every bit of R1 shifts one position up and
    /// the first bit moves to the end.
    RuleA,
    /// Key-dependent transposition: bit `i` of R2 is bit `i + 1` or
    /// `i + 2` of R1 (cyclically), selected by bit `i` of the private key.
    RuleB,
}

/// Bounds on the selection size g.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GBounds {
    pub g_min: u64,
    pub g_max: u64,
}

impl GBounds {
    pub fn new(g_min: u64, g_max: u64) -> Result<Self, KeyError> {
        if g_min < 1 {
            return Err(KeyError::BadBounds("g_min must be at least 1".into()));
        }
        if g_min > g_max {
            return Err(KeyError::BadBounds(format!(
                "g_min {g_min} exceeds g_max {g_max}"
            )));
        }
        Ok(GBounds { g_min, g_max })
    }

    /// Fixed selection size.
    pub fn exactly(g: u64) -> Result<Self, KeyError> {
        GBounds::new(g, g)
    }

    pub fn validate_for(&self, lib: &Library) -> Result<(), KeyError> {
        if self.g_min < 1 || self.g_min > self.g_max {
            return Err(KeyError::BadBounds(format!(
                "need 1 <= g_min <= g_max, got [{}, {}]",
                self.g_min, self.g_max
            )));
        }
        // Serial selections are sets, so g cannot exceed k. Pointer
        // selections allow repeats and are not capped by l.
        if let LibraryConfig::IndependentKeys { k, .. } = lib.config() {
            if self.g_max > k as u64 {
                return Err(KeyError::BadBounds(format!(
                    "g_max {} exceeds key count {k}",
                    self.g_max
                )));
            }
        }
        Ok(())
    }
}

/// A basic-key selection.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Keyword {
    /// Method 1: distinct serials in `1..=k`.
    Serials(BTreeSet<u32>),
    /// Method 2: pointers in `1..=l`, order kept, repeats allowed.
    /// Repeated pointers XOR-cancel in pairs and weaken the key; they
    /// are accepted, not rejected.
    Pointers(Vec<u64>),
}

impl Keyword {
    /// Selection size g.
    pub fn g(&self) -> usize {
        match self {
            Keyword::Serials(set) => set.len(),
            Keyword::Pointers(list) => list.len(),
        }
    }

    pub fn ids(&self) -> Vec<u64> {
        match self {
            Keyword::Serials(set) => set.iter().map(|&s| s as u64).collect(),
            Keyword::Pointers(list) => list.clone(),
        }
    }
}

/// Draws a keyword so that every feasible selection is equally likely.
///
/// For independent-key libraries that means choosing g with probability
/// proportional to `binomial(k, g)` and then a uniform g-subset; a
/// uniform g would skew toward selections with rare sizes. Master-string
/// selections draw g uniformly and each pointer uniformly in `1..=l`.
pub fn sample_keyword(
    lib: &Library,
    bounds: &GBounds,
    entropy: &mut dyn EntropySource,
) -> Result<Keyword, KeyError> {
    bounds.validate_for(lib)?;
    match lib.config() {
        LibraryConfig::IndependentKeys { k, .. } => {
            let k = k as u64;
            let weights: Vec<BigUint> = (bounds.g_min..=bounds.g_max)
                .map(|g| binomial(k, g))
                .collect();
            let total: BigUint = weights.iter().sum();
            if total.is_zero() {
                return Err(KeyError::BadBounds("no feasible selection".into()));
            }
            let mut draw = entropy.uniform_big(&total)?;
            let mut g = bounds.g_max;
            for (i, w) in weights.iter().enumerate() {
                if &draw < w {
                    g = bounds.g_min + i as u64;
                    break;
                }
                draw -= w;
            }
            // Floyd's algorithm: uniform g-subset of 1..=k.
            let mut chosen: BTreeSet<u32> = BTreeSet::new();
            for j in (k - g + 1)..=k {
                let t = entropy.uniform(j)? + 1;
                if !chosen.insert(t as u32) {
                    chosen.insert(j as u32);
                }
            }
            Ok(Keyword::Serials(chosen))
        }
        LibraryConfig::MasterString { l } => {
            let g = bounds.g_min + entropy.uniform(bounds.g_max - bounds.g_min + 1)?;
            let mut pointers = Vec::with_capacity(g as usize);
            for _ in 0..g {
                pointers.push(entropy.uniform(l)? + 1);
            }
            Ok(Keyword::Pointers(pointers))
        }
    }
}

/// Bit width of one pointer for a master string of length `l`.
pub fn pointer_width(l: u64) -> Result<u32, KeyError> {
    if !l.is_power_of_two() {
        return Err(KeyError::NotPowerOfTwo { l });
    }
    Ok(l.trailing_zeros())
}

/// Encodes a keyword for transport.
///
/// Serial selections become a k-bit string with bit `serial - 1` set.
/// Pointer selections become `g` fixed-width big-endian fields of
/// `log2(l)` bits each holding `pointer - 1`.
pub fn encode_keyword(kw: &Keyword, lib: &Library) -> Result<BitString, KeyError> {
    match (kw, lib.config()) {
        (Keyword::Serials(set), LibraryConfig::IndependentKeys { k, .. }) => {
            let mut w = BitString::zeros(k as usize);
            for &serial in set {
                if serial < 1 || serial > k {
                    return Err(KeyError::IdOutOfRange {
                        id: serial as u64,
                        max: k as u64,
                    });
                }
                w.set((serial - 1) as usize, true);
            }
            Ok(w)
        }
        (Keyword::Pointers(list), LibraryConfig::MasterString { l }) => {
            let a = pointer_width(l)? as usize;
            let mut bits = Vec::with_capacity(list.len() * a);
            for &p in list {
                if p < 1 || p > l {
                    return Err(KeyError::IdOutOfRange { id: p, max: l });
                }
                let v = p - 1;
                for bit in (0..a).rev() {
                    bits.push((v >> bit) & 1 == 1);
                }
            }
            Ok(BitString::from_bits(&bits))
        }
        _ => Err(KeyError::MethodMismatch),
    }
}

/// Inverse of [`encode_keyword`]. Master-string keywords carry no length
/// of their own, so the selection size `g` must be supplied (the frame
/// header carries it).
pub fn decode_keyword(w: &BitString, lib: &Library, g: Option<u64>) -> Result<Keyword, KeyError> {
    match lib.config() {
        LibraryConfig::IndependentKeys { k, .. } => {
            if w.len() != k as usize {
                return Err(KeyError::WrongKeywordLength {
                    expected: k as usize,
                    got: w.len(),
                });
            }
            let set = w
                .iter_bits()
                .enumerate()
                .filter(|&(_, b)| b)
                .map(|(i, _)| (i + 1) as u32)
                .collect();
            Ok(Keyword::Serials(set))
        }
        LibraryConfig::MasterString { l } => {
            let a = pointer_width(l)? as usize;
            let g = g.ok_or(KeyError::MissingSelectionSize)? as usize;
            if w.len() != g * a {
                return Err(KeyError::WrongKeywordLength {
                    expected: g * a,
                    got: w.len(),
                });
            }
            let mut pointers = Vec::with_capacity(g);
            for chunk in 0..g {
                let mut v = 0u64;
                for i in 0..a {
                    v = (v << 1) | w.bit(chunk * a + i) as u64;
                }
                pointers.push(v + 1);
            }
            Ok(Keyword::Pointers(pointers))
        }
    }
}

/// XOR fold of the selected basic keys; order never matters.
pub fn derive_private_key(lib: &Library, kw: &Keyword, s: u64) -> Result<BitString, KeyError> {
    match (kw, lib.config()) {
        (Keyword::Serials(_), LibraryConfig::MasterString { .. })
        | (Keyword::Pointers(_), LibraryConfig::IndependentKeys { .. }) => {
            return Err(KeyError::MethodMismatch)
        }
        _ => {}
    }
    let mut acc = BitString::zeros(s as usize);
    for id in kw.ids() {
        acc.xor_in_place(&lib.basic_key(id, s)?)?;
    }
    Ok(acc)
}

/// Fresh first random key. Constant strings make `R1 xor R2` collapse to
/// zero under rule A, so they are redrawn (possible only for s >= 2).
pub fn generate_r1(s: usize, entropy: &mut dyn EntropySource) -> Result<BitString, KeyError> {
    const MAX_REDRAWS: usize = 128;
    for _ in 0..MAX_REDRAWS {
        let r1 = entropy.bits(s)?;
        if s < 2 || !r1.is_constant() {
            return Ok(r1);
        }
    }
    Err(KeyError::DegenerateEntropy)
}

/// Rule A: `R2[i] = R1[(i + 1) mod s]`.
pub fn rule_a(r1: &BitString) -> BitString {
    r1.rotl1()
}

/// Rule B: `R2[i] = R1[(i + 1 + KP[i]) mod s]`.
pub fn rule_b(r1: &BitString, kp: &BitString) -> Result<BitString, KeyError> {
    let by_one = r1.rotl1();
    let by_two = by_one.rotl1();
    Ok(BitString::select(kp, &by_one, &by_two)?)
}

/// Applies the configured rule.
pub fn apply_rule(rule: RuleId, r1: &BitString, kp: &BitString) -> Result<BitString, KeyError> {
    match rule {
        RuleId::RuleA => Ok(rule_a(r1)),
        RuleId::RuleB => rule_b(r1, kp),
    }
}

/// Inverts `d = R1 xor rule_a(R1)`.
///
/// Fixing the first bit to zero and chaining `R1[i+1] = R1[i] xor d[i]`
/// yields one candidate; the other is its complement. Exactly one of the
/// two is the true R1, and nothing in `d` distinguishes them. A valid
/// rule-A sum always has even parity; odd parity is rejected.
pub fn recover_r1_from_sum_rule_a(d: &BitString) -> Result<[BitString; 2], KeyError> {
    if d.parity() {
        return Err(KeyError::InconsistentRuleASum);
    }
    let n = d.len();
    let mut candidate = BitString::zeros(n);
    let mut bit = false;
    for i in 1..n {
        bit ^= d.bit(i - 1);
        candidate.set(i, bit);
    }
    let complement = candidate.complement();
    Ok([candidate, complement])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropy::{FixedEntropy, SeededEntropy, SystemEntropy};
    use crate::library::GeneratorTag;

    fn bs(text: &str) -> BitString {
        BitString::from_bin(text).unwrap()
    }

    fn method1_lib(k: u32, s: u64, seed: u64) -> Library {
        let mut src = SeededEntropy::new(seed);
        Library::generate(
            LibraryConfig::IndependentKeys { k, s },
            GeneratorTag::SeededTest,
            &mut src,
        )
        .unwrap()
    }

    fn method2_lib(l: u64, seed: u64) -> Library {
        let mut src = SeededEntropy::new(seed);
        Library::generate(
            LibraryConfig::MasterString { l },
            GeneratorTag::SeededTest,
            &mut src,
        )
        .unwrap()
    }

    #[test]
    fn encode_serials_is_positional() {
        let lib = method1_lib(8, 4, 1);
        let kw = Keyword::Serials([1u32, 3].into_iter().collect());
        assert_eq!(encode_keyword(&kw, &lib).unwrap(), bs("10100000"));
        assert_eq!(decode_keyword(&bs("10100000"), &lib, None).unwrap(), kw);
    }

    #[test]
    fn encode_pointers_is_fixed_width_zero_based() {
        let lib = method2_lib(16, 2);
        let kw = Keyword::Pointers(vec![1, 16]);
        let w = encode_keyword(&kw, &lib).unwrap();
        assert_eq!(w, bs("00001111"));
        assert_eq!(decode_keyword(&w, &lib, Some(2)).unwrap(), kw);
    }

    #[test]
    fn keyword_for_k256_is_32_bytes() {
        let lib = method1_lib(256, 8, 3);
        let kw = Keyword::Serials([1u32, 100, 256].into_iter().collect());
        let w = encode_keyword(&kw, &lib).unwrap();
        assert_eq!(w.len(), 256);
        assert_eq!(w.as_bytes().len(), 32);
    }

    #[test]
    fn pointer_encoding_requires_power_of_two() {
        let lib = method2_lib(12, 4);
        let kw = Keyword::Pointers(vec![1]);
        assert!(matches!(
            encode_keyword(&kw, &lib),
            Err(KeyError::NotPowerOfTwo { l: 12 })
        ));
    }

    #[test]
    fn decode_pointer_keyword_needs_g() {
        let lib = method2_lib(16, 5);
        assert!(matches!(
            decode_keyword(&bs("0000"), &lib, None),
            Err(KeyError::MissingSelectionSize)
        ));
    }

    #[test]
    fn encode_decode_round_trip_randomized() {
        let lib1 = method1_lib(24, 8, 6);
        let lib2 = method2_lib(64, 7);
        let mut src = SeededEntropy::new(8);
        let bounds = GBounds::new(1, 10).unwrap();
        for _ in 0..200 {
            let kw = sample_keyword(&lib1, &bounds, &mut src).unwrap();
            let w = encode_keyword(&kw, &lib1).unwrap();
            assert_eq!(decode_keyword(&w, &lib1, None).unwrap(), kw);

            let kw = sample_keyword(&lib2, &bounds, &mut src).unwrap();
            let w = encode_keyword(&kw, &lib2).unwrap();
            assert_eq!(decode_keyword(&w, &lib2, Some(kw.g() as u64)).unwrap(), kw);
        }
    }

    #[test]
    fn derive_single_selection_is_the_basic_key() {
        let lib = method1_lib(4, 16, 9);
        let kw = Keyword::Serials([3u32].into_iter().collect());
        assert_eq!(
            derive_private_key(&lib, &kw, 16).unwrap(),
            lib.basic_key(3, 16).unwrap()
        );
    }

    #[test]
    fn derive_folds_selected_keys() {
        // keys 01 and 10: selecting both gives 11
        let mut src = FixedEntropy::new(bs("0110"));
        let lib = Library::generate(
            LibraryConfig::IndependentKeys { k: 2, s: 2 },
            GeneratorTag::SeededTest,
            &mut src,
        )
        .unwrap();
        let kw = Keyword::Serials([1u32, 2].into_iter().collect());
        assert_eq!(derive_private_key(&lib, &kw, 2).unwrap(), bs("11"));
    }

    #[test]
    fn derive_is_order_independent() {
        let lib = method2_lib(32, 10);
        let fwd = Keyword::Pointers(vec![3, 17, 9]);
        let rev = Keyword::Pointers(vec![9, 3, 17]);
        assert_eq!(
            derive_private_key(&lib, &fwd, 12).unwrap(),
            derive_private_key(&lib, &rev, 12).unwrap()
        );
    }

    #[test]
    fn rule_a_examples() {
        assert_eq!(rule_a(&bs("1000")), bs("0001"));
        let constant = bs("1111");
        assert_eq!(rule_a(&constant), constant);
        assert_eq!(constant.xor(&rule_a(&constant)).unwrap(), bs("0000"));
        // applying the rule s times is the identity
        let mut r = bs("10010110");
        for _ in 0..8 {
            r = rule_a(&r);
        }
        assert_eq!(r, bs("10010110"));
    }

    #[test]
    fn rule_b_examples() {
        // all-zero key degenerates to rule A
        let r1 = bs("10010110");
        assert_eq!(rule_b(&r1, &BitString::zeros(8)).unwrap(), rule_a(&r1));
        // all-one key shifts by two everywhere
        assert_eq!(rule_b(&bs("1000"), &bs("1111")).unwrap(), bs("0010"));
        // mixed key, traced index by index
        assert_eq!(rule_b(&bs("0110"), &bs("1010")).unwrap(), bs("1100"));
    }

    #[test]
    fn rule_b_matches_index_definition() {
        let mut src = SeededEntropy::new(11);
        for _ in 0..50 {
            let r1 = src.bits(67).unwrap();
            let kp = src.bits(67).unwrap();
            let r2 = rule_b(&r1, &kp).unwrap();
            for i in 0..67 {
                let offset = 1 + kp.bit(i) as usize;
                assert_eq!(r2.bit(i), r1.bit((i + offset) % 67));
            }
        }
    }

    #[test]
    fn rule_a_preserves_popcount() {
        let mut src = SeededEntropy::new(12);
        for _ in 0..100 {
            let r1 = src.bits(129).unwrap();
            assert_eq!(rule_a(&r1).count_ones(), r1.count_ones());
        }
    }

    #[test]
    fn rule_a_sum_has_even_parity() {
        let mut src = SeededEntropy::new(13);
        for _ in 0..100 {
            let r1 = src.bits(75).unwrap();
            assert!(!r1.xor(&rule_a(&r1)).unwrap().parity());
        }
    }

    #[test]
    fn recover_rule_a_sum_examples() {
        let [a, b] = recover_r1_from_sum_rule_a(&bs("0000")).unwrap();
        assert_eq!([a, b], [bs("0000"), bs("1111")]);

        let r1 = bs("0110");
        let d = r1.xor(&rule_a(&r1)).unwrap();
        assert_eq!(d, bs("1010"));
        let pair = recover_r1_from_sum_rule_a(&d).unwrap();
        assert!(pair.contains(&r1));
        assert!(pair.contains(&r1.complement()));

        assert!(matches!(
            recover_r1_from_sum_rule_a(&bs("1000")),
            Err(KeyError::InconsistentRuleASum)
        ));
    }

    #[test]
    fn recover_contains_truth_randomized() {
        let mut src = SeededEntropy::new(14);
        for _ in 0..500 {
            let r1 = generate_r1(33, &mut src).unwrap();
            let d = r1.xor(&rule_a(&r1)).unwrap();
            let pair = recover_r1_from_sum_rule_a(&d).unwrap();
            assert!(pair.contains(&r1));
        }
    }

    #[test]
    fn r1_rejects_constant_strings() {
        // A pool of zeros can never produce a valid R1.
        let mut zeros = FixedEntropy::zeros(64 * 200);
        assert!(matches!(
            generate_r1(64, &mut zeros),
            Err(KeyError::DegenerateEntropy)
        ));
        // An all-zero window followed by usable bits gets redrawn.
        let mut mixed = FixedEntropy::new(BitString::zeros(8).concat(&bs("10110001")));
        assert_eq!(generate_r1(8, &mut mixed).unwrap(), bs("10110001"));
    }

    #[test]
    fn r1_seeded_is_reproducible_and_fresh_draws_differ() {
        let mut a = SeededEntropy::new(15);
        let mut b = SeededEntropy::new(15);
        assert_eq!(
            generate_r1(256, &mut a).unwrap(),
            generate_r1(256, &mut b).unwrap()
        );

        let mut sys = SystemEntropy;
        let x = generate_r1(64, &mut sys).unwrap();
        let y = generate_r1(64, &mut sys).unwrap();
        assert_ne!(x, y);
    }

    #[test]
    fn r1_monobit_within_three_sigma() {
        let mut src = SeededEntropy::new(16);
        let n = 1usize << 20;
        let r1 = generate_r1(n, &mut src).unwrap();
        let ones = r1.count_ones() as f64;
        let z = (2.0 * ones - n as f64) / (n as f64).sqrt();
        assert!(z.abs() < 3.0, "monobit z = {z}");
    }

    #[test]
    fn sampling_rejects_empty_bounds() {
        assert!(GBounds::new(0, 0).is_err());
        let lib = method1_lib(4, 8, 17);
        let bounds = GBounds { g_min: 0, g_max: 0 };
        assert!(matches!(
            sample_keyword(&lib, &bounds, &mut SeededEntropy::new(0)),
            Err(KeyError::BadBounds(_))
        ));
        let too_big = GBounds { g_min: 1, g_max: 5 };
        assert!(matches!(
            sample_keyword(&lib, &too_big, &mut SeededEntropy::new(0)),
            Err(KeyError::BadBounds(_))
        ));
    }

    #[test]
    fn full_range_bounds_force_full_set() {
        let lib = method1_lib(6, 8, 18);
        let bounds = GBounds::exactly(6).unwrap();
        let mut src = SeededEntropy::new(19);
        let kw = sample_keyword(&lib, &bounds, &mut src).unwrap();
        assert_eq!(kw.g(), 6);
        assert_eq!(kw.ids(), vec![1, 2, 3, 4, 5, 6]);
    }

    /// k = 2 with g in [1, 2] has three feasible selections, each with
    /// probability 1/3. Chi-squared with 2 degrees of freedom at the 1%
    /// level rejects above 9.21.
    #[test]
    fn subset_sampling_is_uniform_over_selections() {
        let lib = method1_lib(2, 8, 20);
        let bounds = GBounds::new(1, 2).unwrap();
        let mut src = SeededEntropy::new(21);
        let mut counts = [0usize; 3];
        let trials = 30_000;
        for _ in 0..trials {
            let kw = sample_keyword(&lib, &bounds, &mut src).unwrap();
            match kw.ids().as_slice() {
                [1] => counts[0] += 1,
                [2] => counts[1] += 1,
                [1, 2] => counts[2] += 1,
                other => panic!("impossible selection {other:?}"),
            }
        }
        let expected = trials as f64 / 3.0;
        let chi2: f64 = counts
            .iter()
            .map(|&c| {
                let d = c as f64 - expected;
                d * d / expected
            })
            .sum();
        assert!(chi2 < 9.21, "chi2 = {chi2}, counts {counts:?}");
    }

    #[test]
    fn master_string_sampling_stays_in_range() {
        let lib = method2_lib(32, 22);
        let bounds = GBounds::new(2, 5).unwrap();
        let mut src = SeededEntropy::new(23);
        for _ in 0..500 {
            let kw = sample_keyword(&lib, &bounds, &mut src).unwrap();
            let g = kw.g() as u64;
            assert!((2..=5).contains(&g));
            for id in kw.ids() {
                assert!((1..=32).contains(&id));
            }
        }
    }
}
