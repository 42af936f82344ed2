//! The bit-string algebra everything else is built on: XOR and its
//! self-inverse property, rotation, parity, complement.
//!
//! ```bash
//! cargo run -p mtp --example xor_algebra
//! ```

use mtp::bitstring::BitString;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let b = BitString::from_bin("10110010")?;
    let c = BitString::from_bin("01100110")?;

    // XOR combines; applying the same operand again restores the input.
    let a = b.xor(&c)?;
    println!("B         = {b}");
    println!("C         = {c}");
    println!("A = B+C   = {a}");
    println!("A+C       = {}   (back to B)", a.xor(&c)?);
    assert_eq!(a.xor(&c)?, b);

    // a string XORed with itself is the zero string
    println!("C+C       = {}", c.xor(&c)?);
    assert_eq!(c.xor(&c)?, BitString::zeros(8));

    // rotation: every bit moves one position up, the first wraps to the end
    println!("rotl1(B)  = {}", b.rotl1());
    let mut r = b.clone();
    for _ in 0..8 {
        r = r.rotl1();
    }
    assert_eq!(r, b, "eight rotations of an 8-bit string are the identity");

    // parity folds every bit together with XOR
    println!("parity(B) = {}", b.parity() as u8);
    println!("parity(C) = {}", c.parity() as u8);
    println!(
        "parity(A) = {} (= parity(B) xor parity(C))",
        a.parity() as u8
    );
    assert_eq!(a.parity(), b.parity() ^ c.parity());

    // complement flips every bit
    println!("not B     = {}", b.complement());
    assert_eq!(b.complement().complement(), b);

    // hex view uses MSB-first packing: bit 0 is the top bit of byte 0
    println!("B as hex  = {}", b.to_hex());
    assert_eq!(b.to_hex(), "b2");
    Ok(())
}
