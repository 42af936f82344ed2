//! Basic-key libraries, both ways: independently generated keys and a
//! master string with looped-substring lookup. Shows the linear
//! independence report and the bit-exact file round trip.
//!
//! ```bash
//! cargo run -p mtp --example generate_library
//! ```

use mtp::entropy::{SeededEntropy, SystemEntropy};
use mtp::library::{GeneratorTag, Library, LibraryConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // Method 1: k independent basic keys of s bits, serials 1..=k.
    let mut entropy = SystemEntropy;
    let lib = Library::generate(
        LibraryConfig::IndependentKeys { k: 64, s: 4096 },
        GeneratorTag::ExternalEntropy,
        &mut entropy,
    )?;
    let report = lib.rank_gf2()?;
    println!(
        "method 1: {} keys of 4096 bits, GF(2) rank {} ({})",
        report.key_count,
        report.rank,
        if report.fully_independent() {
            "fully independent"
        } else {
            "has dependent keys"
        }
    );
    // 64 random 4096-bit strings are dependent with probability ~2^-4032
    assert!(report.fully_independent());

    // A deliberately dependent library: the report names the culprits.
    let mut seeded = SeededEntropy::new(1);
    let small = Library::generate(
        LibraryConfig::IndependentKeys { k: 12, s: 6 },
        GeneratorTag::SeededTest,
        &mut seeded,
    )?;
    let report = small.rank_gf2()?;
    println!(
        "cramped library: rank {} of {}, dependent serials {:?}",
        report.rank, report.key_count, report.dependent_serials
    );

    // Method 2: one master string; every position starts a basic key,
    // wrapping past the end like a looped tape.
    let master = Library::generate(
        LibraryConfig::MasterString { l: 1 << 16 },
        GeneratorTag::ExternalEntropy,
        &mut entropy,
    )?;
    let near_end = master.basic_key((1 << 16) - 3, 64)?;
    println!(
        "method 2: key at pointer l-3 wraps around: first 16 bits {}",
        near_end.slice(0, 16)
    );

    // Libraries serialize bit-exactly; the fingerprint pins a file.
    let dir = std::env::temp_dir().join("mtp-example-library");
    std::fs::create_dir_all(&dir)?;
    let path = dir.join("demo.mtpl");
    lib.write_to_file(&path)?;
    let reloaded = Library::read_from_file(&path)?;
    assert_eq!(reloaded.to_bytes(), lib.to_bytes());
    assert_eq!(reloaded.fingerprint(), lib.fingerprint());
    println!(
        "saved {} ({} bytes, fingerprint {})",
        path.display(),
        lib.to_bytes().len(),
        lib.fingerprint().map(|b| format!("{b:02x}")).concat()
    );
    std::fs::remove_dir_all(&dir)?;
    Ok(())
}
