//! Every published variation of the cipher round-tripping side by side,
//! plus the ciphertext-pair XOR identities that drive their security
//! differences.
//!
//! ```bash
//! cargo run -p mtp --example variants
//! ```

use mtp::bitstring::BitString;
use mtp::cipher::{
    decrypt, decrypt_with_validator, encrypt, Recovered, SessionConfig, SessionKeys,
    TruncationPolicy, Variant,
};
use mtp::entropy::{EntropySource, SystemEntropy};
use mtp::keys::{GBounds, RuleId};
use mtp::library::{GeneratorTag, Library, LibraryConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut entropy = SystemEntropy;
    let lib = Library::generate(
        LibraryConfig::IndependentKeys { k: 32, s: 512 },
        GeneratorTag::ExternalEntropy,
        &mut entropy,
    )?;

    for variant in Variant::ALL {
        // variation (a) is only decodable under rule A
        let rule = if variant == Variant::VarA {
            RuleId::RuleA
        } else {
            RuleId::RuleB
        };
        let cfg = SessionConfig::new(
            variant,
            rule,
            GBounds::new(1, 8)?,
            512,
            TruncationPolicy::ZeroPad,
        )?;
        let keys = SessionKeys::generate(&cfg, &lib, &mut entropy)?;

        // messages starting with a zero byte give variation (a) a way to
        // pick between its two candidates
        let p = BitString::zeros(8).concat(&entropy.bits(504)?);
        let out = encrypt(&cfg, &keys, &p)?;
        let receiver =
            SessionKeys::from_keywords(&cfg, &lib, keys.kw_p().clone(), keys.kw_r().cloned())?;

        let recovered = if variant == Variant::VarA {
            let starts_with_zero_byte = |q: &BitString| (0..8).all(|i| !q.bit(i));
            decrypt_with_validator(&cfg, &receiver, &out, &starts_with_zero_byte)?
        } else {
            decrypt(&cfg, &receiver, &out)?
        };
        let Recovered::Plaintext(q) = recovered else {
            panic!("{variant:?}: still ambiguous");
        };
        assert_eq!(q, p);
        println!(
            "{variant:?}: round trip ok ({} keyword{}, {})",
            variant.keyword_count(),
            if variant.keyword_count() == 1 {
                ""
            } else {
                "s"
            },
            if variant.has_second_ciphertext() {
                "two ciphertexts"
            } else {
                "one ciphertext"
            },
        );
    }

    // What an eavesdropper gets from XORing the two ciphertexts:
    println!();
    for variant in [Variant::Main, Variant::VarD, Variant::VarE] {
        let cfg = SessionConfig::new(
            variant,
            RuleId::RuleA,
            GBounds::new(1, 8)?,
            512,
            TruncationPolicy::ZeroPad,
        )?;
        let keys = SessionKeys::generate(&cfg, &lib, &mut entropy)?;
        let p = entropy.bits(512)?;
        let out = encrypt(&cfg, &keys, &p)?;
        let sum = out.c_p.xor(out.c_r.as_ref().unwrap())?;
        let (formula, expect) = match variant {
            Variant::Main => (
                "P + K_P + K_R + R2",
                p.xor(keys.k_p())?
                    .xor(keys.k_r_for(variant).unwrap())?
                    .xor(keys.r2().unwrap())?,
            ),
            Variant::VarD => (
                "P + K_P + K_R + R1 + R2",
                p.xor(keys.k_p())?
                    .xor(keys.k_r_for(variant).unwrap())?
                    .xor(keys.r1().unwrap())?
                    .xor(keys.r2().unwrap())?,
            ),
            Variant::VarE => (
                "P + R2            (the private key cancels!)",
                p.xor(keys.r2().unwrap())?,
            ),
            _ => unreachable!(),
        };
        assert_eq!(sum, expect);
        println!("{variant:?}: C_P + C_R = {formula}");
    }
    println!("\nthe second random key R2 is what keeps the private keys buried in all three");
    Ok(())
}
