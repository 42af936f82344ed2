//! Continuous operation: the sender encrypts as data arrives, the
//! receiver decrypts while the stream is still incomplete. The receiver
//! trails the wire by at most two bits — the reach of the transposition
//! rule — until the block ends.
//!
//! ```bash
//! cargo run -p mtp --example streaming
//! ```

use mtp::cipher::{encrypt, SessionConfig, SessionKeys, TruncationPolicy, Variant};
use mtp::entropy::{EntropySource, SystemEntropy};
use mtp::framing::{mux, Demuxer};
use mtp::keys::{GBounds, RuleId};
use mtp::library::{GeneratorTag, Library, LibraryConfig};
use mtp::stream::{DecryptStream, EncryptStream};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut entropy = SystemEntropy;
    let lib = Library::generate(
        LibraryConfig::IndependentKeys { k: 32, s: 1 << 16 },
        GeneratorTag::ExternalEntropy,
        &mut entropy,
    )?;
    let cfg = SessionConfig::new(
        Variant::Main,
        RuleId::RuleB,
        GBounds::new(1, 8)?,
        1 << 16,
        TruncationPolicy::TruncateKeys,
    )?;
    let keys = SessionKeys::generate(&cfg, &lib, &mut entropy)?;
    let message = entropy.bits(40_000)?;

    // Sender side: push irregular chunks, emit interleaved wire bits.
    let mut enc = EncryptStream::open(&cfg, &keys)?;
    let mut wire = Vec::new(); // segments of the interleaved payload
    let mut pos = 0;
    let chunk_sizes = [1usize, 7, 100, 4096, 9999, 64, 25_733];
    for (i, &take) in chunk_sizes.iter().cycle().enumerate() {
        if pos >= message.len() {
            break;
        }
        let take = take.min(message.len() - pos);
        let seg = enc.push(&message.slice(pos, take))?;
        if !seg.is_empty() {
            wire.push(mux(&seg.c_p, seg.c_r.as_ref().unwrap())?);
        }
        pos += take;
        if i == 0 {
            println!("first plaintext chunk of {take} bit(s) pushed; wire already has output");
        }
    }
    let tail = enc.finish()?;
    if !tail.is_empty() {
        wire.push(mux(&tail.c_p, tail.c_r.as_ref().unwrap())?);
    }
    let total_wire: usize = wire.iter().map(|w| w.len()).sum();
    println!(
        "sender emitted {total_wire} payload bits for a {}-bit message",
        message.len()
    );

    // the stream equals the one-shot ciphertext bit for bit
    let one_shot = encrypt(&cfg, &keys, &message)?;
    let full_wire = mux(&one_shot.c_p, one_shot.c_r.as_ref().unwrap())?;
    let mut flattened = wire[0].clone();
    for seg in &wire[1..] {
        flattened = flattened.concat(seg);
    }
    assert_eq!(flattened, full_wire);

    // Receiver side: keys from the keywords only, R1 re-assembled from
    // the arriving C_R bits. The wire arrives in 1000-bit pieces here.
    let receiver =
        SessionKeys::from_keywords(&cfg, &lib, keys.kw_p().clone(), keys.kw_r().cloned())?;
    let mut dec = DecryptStream::open(&cfg, &receiver)?;
    let mut demuxer = Demuxer::new();
    let mut recovered = Vec::new();
    let mut consumed = 0usize;
    let mut reported = false;
    while consumed < full_wire.len() {
        let take = 1000.min(full_wire.len() - consumed);
        let (c_p, c_r) = demuxer.push(&full_wire.slice(consumed, take));
        if !c_p.is_empty() {
            recovered.push(dec.push(&c_p, Some(&c_r))?);
        }
        consumed += take;
        if !reported && consumed >= total_wire / 2 {
            let got: usize = recovered.iter().map(|r| r.len()).sum();
            println!(
                "after {consumed} of {total_wire} wire bits ({} pairs), {got} plaintext bits are already out",
                consumed / 2
            );
            reported = true;
        }
    }
    recovered.push(dec.finish()?);

    let mut flat = recovered[0].clone();
    for seg in &recovered[1..] {
        flat = flat.concat(seg);
    }
    assert_eq!(flat, message);
    println!("incremental decryption matches the original message exactly");
    Ok(())
}
