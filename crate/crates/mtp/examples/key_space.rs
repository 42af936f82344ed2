//! Parameter arithmetic: how big the private-key space is for the
//! published parameter points, as exact integers, and what the keyword
//! that selects a key costs on the wire.
//!
//! ```bash
//! cargo run -p mtp --example key_space
//! ```

use mtp::cryptanalysis::{key_space_size, KeySpaceParams};
use mtp::keys::{pointer_width, GBounds};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // Method 1, k = 256, free selection size: every subset is a key.
    let free = key_space_size(
        KeySpaceParams::IndependentKeys {
            k: 256,
            bounds: None,
        },
        1,
    )?;
    println!("k=256, free g:        2^{:.0} keys", free.log2);

    // Fixing g = 16 trims the space to one binomial coefficient and cuts
    // the XOR work per key by 16x. Exact value, no rounding:
    let fixed = key_space_size(
        KeySpaceParams::IndependentKeys {
            k: 256,
            bounds: Some(GBounds::exactly(16)?),
        },
        1,
    )?;
    println!("k=256, g=16 exactly:  {} keys", fixed.count);
    println!(
        "                      = 2^{:.4} = {:.4} * 2^83",
        fixed.log2,
        (fixed.log2 - 83.0).exp2()
    );

    // Bounded ranges sum binomials.
    let ranged = key_space_size(
        KeySpaceParams::IndependentKeys {
            k: 256,
            bounds: Some(GBounds::new(1, 16)?),
        },
        1,
    )?;
    println!("k=256, g in [1,16]:   2^{:.4} keys", ranged.log2);

    // Method 2: an l-bit master string with g pointers gives l^g keys.
    let master = key_space_size(KeySpaceParams::MasterString { l: 1 << 32, g: 4 }, 1)?;
    println!(
        "l=2^32, g=4:          2^{:.0} keys from a 512 MB master string",
        master.log2
    );

    // The augmented design makes an attacker find two keys at once.
    let two = key_space_size(
        KeySpaceParams::IndependentKeys {
            k: 256,
            bounds: None,
        },
        2,
    )?;
    println!("two keys, k=256:      2^{:.0} combined", two.log2);
    let two_master = key_space_size(KeySpaceParams::MasterString { l: 1 << 32, g: 2 }, 2)?;
    println!("two keys, l=2^32,g=2: 2^{:.0} combined", two_master.log2);

    // What the receiver needs to reproduce a key: just the keyword.
    println!();
    println!("keyword sizes (must fit one 117-byte sealed message):");
    println!(
        "  k=256 positional:   {} bytes, {} for both keywords",
        256 / 8,
        2 * 256 / 8
    );
    let a = pointer_width(1 << 32)?;
    println!(
        "  l=2^32, g=2:        {} bytes, {} for both keywords",
        (2 * a as usize).div_ceil(8),
        2 * (2 * a as usize).div_ceil(8)
    );
    Ok(())
}
