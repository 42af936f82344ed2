//! The frame on the wire: header, sealed keywords first, bit-interleaved
//! payload, trailing checksum. Shows the multiplexing rule, the preshared
//! pad transport, and how each corruption class is rejected.
//!
//! ```bash
//! cargo run -p mtp --example wire_format
//! ```

use mtp::bitstring::BitString;
use mtp::cipher::{decrypt, encrypt, SessionConfig, SessionKeys, TruncationPolicy, Variant};
use mtp::entropy::{EntropySource, SeededEntropy};
use mtp::framing::{
    build_frame, demux, mux, open_frame, Frame, FrameError, NullTransport, PresharedPadTransport,
};
use mtp::keys::{GBounds, RuleId};
use mtp::library::{GeneratorTag, Library, LibraryConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // interleaving puts C_P on the odd wire positions, C_R on the even
    let c_p = BitString::from_bin("1111")?;
    let c_r = BitString::from_bin("0000")?;
    let combined = mux(&c_p, &c_r)?;
    println!("mux(1111, 0000) = {combined}");
    assert_eq!(combined, BitString::from_bin("10101010")?);
    assert_eq!(demux(&combined)?, (c_p, c_r));

    // a deterministic session so the hexdump below is reproducible
    let mut entropy = SeededEntropy::new(0xD00D);
    let lib = Library::generate(
        LibraryConfig::IndependentKeys { k: 16, s: 96 },
        GeneratorTag::SeededTest,
        &mut entropy,
    )?;
    let cfg = SessionConfig::new(
        Variant::Main,
        RuleId::RuleA,
        GBounds::new(1, 4)?,
        96,
        TruncationPolicy::ZeroPad,
    )?;
    let keys = SessionKeys::generate(&cfg, &lib, &mut entropy)?;
    let message = entropy.bits(96)?;
    let out = encrypt(&cfg, &keys, &message)?;

    // the keywords travel under a preshared pad here; sender and
    // receiver hold mirrored transports over the same pad bytes
    let pad: Vec<u8> = (0..64u8)
        .map(|i| i.wrapping_mul(73).wrapping_add(19))
        .collect();
    let mut sender_transport = PresharedPadTransport::new(pad.clone());
    let bytes = build_frame(
        &cfg,
        &lib,
        &keys,
        &out,
        &mut sender_transport,
        "receiver",
        false,
    )?;

    println!("\nframe ({} bytes):", bytes.len());
    for (i, chunk) in bytes.chunks(16).enumerate() {
        let hex: Vec<String> = chunk.iter().map(|b| format!("{b:02x}")).collect();
        println!("  {:04x}  {}", i * 16, hex.join(" "));
    }
    let frame = Frame::parse(&bytes)?;
    println!(
        "\nheader: variant {:?}, rule {:?}, s = {} bits, g = ({}, {}), A-section {} bytes, payload {} bits",
        frame.header.variant,
        frame.header.rule,
        frame.header.s,
        frame.header.g_p,
        frame.header.g_r,
        frame.a_section.len(),
        frame.c_section.len(),
    );
    assert_eq!(frame.to_bytes(), bytes, "parse/assemble is byte-exact");

    // the receiver's mirrored pad opens it
    let mut receiver_transport = PresharedPadTransport::new(pad);
    let opened = open_frame(&bytes, &lib, &mut receiver_transport, "receiver")?;
    assert_eq!(
        decrypt(&opened.cfg, &opened.keys, &opened.output)?.expect_plaintext(),
        message
    );
    println!("receiver decrypted the frame through its own pad transport");

    // every corruption class is caught by a distinct error
    println!();
    let mut bad = bytes.clone();
    bad[0] = b'X';
    println!("flip magic      -> {:?}", Frame::parse(&bad).unwrap_err());
    assert!(matches!(Frame::parse(&bad), Err(FrameError::BadMagic)));

    let mut bad = bytes.clone();
    bad[4] = 0x09;
    println!("flip version    -> {:?}", Frame::parse(&bad).unwrap_err());

    let mut bad = bytes.clone();
    let n = bad.len();
    bad[n - 10] ^= 0x20; // inside the payload section
    println!("flip payload    -> {:?}", Frame::parse(&bad).unwrap_err());
    assert!(matches!(Frame::parse(&bad), Err(FrameError::CrcMismatch)));

    println!(
        "truncate        -> {:?}",
        Frame::parse(&bytes[..bytes.len() - 7]).unwrap_err()
    );

    let mut other_entropy = SeededEntropy::new(0xFEED);
    let other_lib = Library::generate(
        LibraryConfig::IndependentKeys { k: 16, s: 96 },
        GeneratorTag::SeededTest,
        &mut other_entropy,
    )?;
    println!(
        "wrong library   -> {:?}",
        open_frame(&bytes, &other_lib, &mut NullTransport, "receiver").unwrap_err()
    );
    Ok(())
}
