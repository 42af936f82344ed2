//! Why the computation rule matters. Variation (e) reuses one private
//! key for both ciphertexts, so XORing them leaves `P + R2`. Under the
//! plain transposition (rule A) an attacker who knows a run of plaintext
//! unwinds R2 into R1, then into key bits, then into everything. Under
//! the key-dependent transposition (rule B) the unwinding step needs the
//! very key being attacked, and the pipeline reports itself stuck.
//!
//! ```bash
//! cargo run -p mtp --example attack_variation_e
//! ```

use mtp::cipher::{encrypt, SessionConfig, SessionKeys, TruncationPolicy, Variant};
use mtp::cryptanalysis::{attack_variation_rule_a, AttackInput, VariationAttackOutcome};
use mtp::entropy::{EntropySource, SystemEntropy};
use mtp::keys::{GBounds, RuleId};
use mtp::library::{GeneratorTag, Library, LibraryConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut entropy = SystemEntropy;
    let lib = Library::generate(
        LibraryConfig::IndependentKeys { k: 32, s: 2048 },
        GeneratorTag::ExternalEntropy,
        &mut entropy,
    )?;
    let bounds = GBounds::new(1, 8)?;
    let message = entropy.bits(2048)?;
    // the attacker will know this 64-bit stretch (position 500 onward)
    let known: Vec<(usize, bool)> = (500..564).map(|i| (i, message.bit(i))).collect();

    for rule in [RuleId::RuleA, RuleId::RuleB] {
        let cfg = SessionConfig::new(Variant::VarE, rule, bounds, 2048, TruncationPolicy::ZeroPad)?;
        let keys = SessionKeys::generate(&cfg, &lib, &mut entropy)?;
        let out = encrypt(&cfg, &keys, &message)?;
        let input = AttackInput {
            lib: &lib,
            c_p: out.c_p,
            c_r: out.c_r,
            known: known.clone(),
            variant: Variant::VarE,
            rule,
        };
        match attack_variation_rule_a(&input)? {
            VariationAttackOutcome::Recovered {
                keyword,
                plaintext,
                rank,
            } => {
                assert_eq!(plaintext, message);
                println!(
                    "{rule:?}: 64 known bits -> rank {rank} -> keyword {:?} -> full plaintext",
                    keyword.ids()
                );
            }
            VariationAttackOutcome::Underdetermined { reason, .. } => {
                println!("{rule:?}: attack aborts — {reason}");
            }
        }
    }

    // variation (b) leaks only R1 + R2, so the attack chains a run of
    // consecutive known bits from an anchor guess; same rule dependence
    let cfg = SessionConfig::new(
        Variant::VarB,
        RuleId::RuleA,
        bounds,
        2048,
        TruncationPolicy::ZeroPad,
    )?;
    let keys = SessionKeys::generate(&cfg, &lib, &mut entropy)?;
    let out = encrypt(&cfg, &keys, &message)?;
    let input = AttackInput {
        lib: &lib,
        c_p: out.c_p,
        c_r: out.c_r,
        known,
        variant: Variant::VarB,
        rule: RuleId::RuleA,
    };
    if let VariationAttackOutcome::Recovered { plaintext, .. } = attack_variation_rule_a(&input)? {
        assert_eq!(plaintext, message);
        println!("VarB/RuleA: run-chained attack also recovers the plaintext");
    }
    Ok(())
}
