//! The break that motivates the augmented design: with the bare cipher
//! (C_P = P + K_P), an attacker holding a modest amount of known
//! plaintext solves for the keyword by Gaussian elimination over GF(2)
//! and reads everything. The same pipeline pointed at the augmented
//! cipher collapses, because the random keys decouple the equations.
//!
//! ```bash
//! cargo run -p mtp --example known_plaintext_attack
//! ```

use mtp::cipher::{encrypt, SessionConfig, SessionKeys, TruncationPolicy, Variant};
use mtp::cryptanalysis::{known_plaintext_attack_basic, AttackInput, AttackOutcome};
use mtp::entropy::{EntropySource, SystemEntropy};
use mtp::keys::{GBounds, RuleId};
use mtp::library::{GeneratorTag, Library, LibraryConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut entropy = SystemEntropy;
    let lib = Library::generate(
        LibraryConfig::IndependentKeys { k: 32, s: 4096 },
        GeneratorTag::ExternalEntropy,
        &mut entropy,
    )?;
    let bounds = GBounds::new(1, 8)?;

    // A "file header" of zero bytes is classic known plaintext.
    let mut message = entropy.bits(4096)?;
    message = mtp::bitstring::BitString::zeros(64).concat(&message.slice(64, 4096 - 64));

    // --- the basic design falls ------------------------------------
    let cfg = SessionConfig::new(
        Variant::BasicF,
        RuleId::RuleA,
        bounds,
        4096,
        TruncationPolicy::ZeroPad,
    )?;
    let keys = SessionKeys::generate(&cfg, &lib, &mut entropy)?;
    let out = encrypt(&cfg, &keys, &message)?;

    // the attacker knows the 64 header bits and the ciphertext
    let known: Vec<(usize, bool)> = (0..64).map(|i| (i, false)).collect();
    let input = AttackInput {
        lib: &lib,
        c_p: out.c_p.clone(),
        c_r: None,
        known: known.clone(),
        variant: Variant::BasicF,
        rule: RuleId::RuleA,
    };
    match known_plaintext_attack_basic(&input)? {
        AttackOutcome::Recovered {
            keyword,
            plaintext,
            rank,
        } => {
            println!(
                "basic design: rank {rank} system -> keyword {:?}",
                keyword.ids()
            );
            assert_eq!(plaintext, message);
            assert_eq!(&keyword, keys.kw_p());
            println!(
                "basic design: 64 known header bits recovered ALL {} bits",
                plaintext.len()
            );
        }
        other => println!("(unusual: {other:?} — rank-deficient positions, rerun)"),
    }

    // --- the augmented design stands -------------------------------
    let cfg = SessionConfig::new(
        Variant::Main,
        RuleId::RuleB,
        bounds,
        4096,
        TruncationPolicy::ZeroPad,
    )?;
    let keys = SessionKeys::generate(&cfg, &lib, &mut entropy)?;
    let out = encrypt(&cfg, &keys, &message)?;
    let input = AttackInput {
        lib: &lib,
        c_p: out.c_p,
        c_r: None,
        known,
        variant: Variant::BasicF, // attacker assumes the old model
        rule: RuleId::RuleB,
    };
    match known_plaintext_attack_basic(&input)? {
        AttackOutcome::WrongModel { rank } => println!(
            "augmented design: the same {rank}-rank system is inconsistent — the random keys \
             randomized every equation"
        ),
        AttackOutcome::Underdetermined { reason, .. } => {
            println!("augmented design: attack stuck ({reason})")
        }
        AttackOutcome::Recovered { plaintext, .. } => {
            // a fluke solution can exist; it cannot beat chance level
            let matches = plaintext
                .iter_bits()
                .zip(message.iter_bits())
                .filter(|(a, b)| a == b)
                .count();
            println!(
                "augmented design: fluke solution matched {matches}/{} bits (chance level)",
                plaintext.len()
            );
            assert!((matches as f64) < 0.55 * plaintext.len() as f64);
        }
    }
    Ok(())
}
