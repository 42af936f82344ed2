//! A complete sender-to-receiver exchange: sample keywords, derive the
//! private keys, encrypt, pack everything into one frame, and decrypt on
//! the other side from the keywords alone.
//!
//! ```bash
//! cargo run -p mtp --example encrypt_decrypt
//! ```

use mtp::bitstring::BitString;
use mtp::cipher::{self, KeywordRegistry, SessionConfig, SessionKeys, TruncationPolicy, Variant};
use mtp::entropy::SystemEntropy;
use mtp::framing::{build_frame, open_frame, NullTransport};
use mtp::keys::{GBounds, RuleId};
use mtp::library::{GeneratorTag, Library, LibraryConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut entropy = SystemEntropy;

    // The library is the long-lived, reusable part: both parties hold it.
    let lib = Library::generate(
        LibraryConfig::IndependentKeys { k: 256, s: 8192 },
        GeneratorTag::ExternalEntropy,
        &mut entropy,
    )?;

    let cfg = SessionConfig::new(
        Variant::Main,
        RuleId::RuleB,
        GBounds::new(1, 16)?,
        8192,
        TruncationPolicy::TruncateKeys,
    )?;

    // Sender: fresh keywords and random keys for this one message.
    let keys = SessionKeys::generate(&cfg, &lib, &mut entropy)?;
    println!(
        "sender picked {} + {} basic keys (of {})",
        keys.kw_p().g(),
        keys.kw_r().map_or(0, |kw| kw.g()),
        lib.config().key_count()
    );
    let mut registry = KeywordRegistry::new();
    assert!(registry.observe(&lib, &keys).is_empty(), "fresh keywords");

    let message = b"attack at dawn; bring 4096 bits of coffee";
    let plaintext = BitString::from_bytes(message, message.len() * 8)?;
    let output = cipher::encrypt(&cfg, &keys, &plaintext)?;
    println!(
        "C_P and C_R are each {} bits; the message never travels in the clear",
        output.c_p.len()
    );

    // One wire blob: sealed keywords first, interleaved payload after.
    let mut transport = NullTransport; // stand-in for the asymmetric channel
    let frame = build_frame(
        &cfg,
        &lib,
        &keys,
        &output,
        &mut transport,
        "receiver",
        false,
    )?;
    println!("frame: {} bytes on the wire", frame.len());

    // Receiver: everything needed is the frame plus the shared library.
    let opened = open_frame(&frame, &lib, &mut NullTransport, "receiver")?;
    let recovered = cipher::decrypt(&opened.cfg, &opened.keys, &opened.output)?.expect_plaintext();
    assert_eq!(recovered.as_bytes(), message);
    println!(
        "receiver read: {}",
        String::from_utf8_lossy(recovered.as_bytes())
    );
    Ok(())
}
