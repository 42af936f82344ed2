//! Command-line workflows: library generation, file and stream
//! encryption, the attack harness, key-space reports, and randomness
//! checks. The `mtp` binary is a thin wrapper over [`run`].
//!
//! Exit codes: 0 success, 2 usage error, 3 I/O failure, 4 malformed
//! input data (bad library file, bad frame, bad known-bits file),
//! 5 configuration mismatch (wrong library, variant constraints,
//! transport limits), 6 attack or statistical test did not succeed,
//! 7 decryption ambiguous (variation `a` without a validity predicate).

use std::ffi::OsString;
use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::bitstring::{BitBuf, BitString};
use crate::cipher::{
    self, CipherOutput, Recovered, SessionConfig, SessionKeys, TruncationPolicy, Variant,
};
use crate::crc32::Crc32;
use crate::cryptanalysis::{
    attack_variation_rule_a, brute_force_attack, key_space_size, known_plaintext_attack_basic,
    monobit_test, AttackError, AttackInput, AttackOutcome, KeySpaceParams, TrialRecord,
    VariationAttackOutcome,
};
use crate::entropy::{EntropySource, SeededEntropy, SystemEntropy};
use crate::framing::{
    self, build_frame, demux, open_frame, Demuxer, Frame, FrameError, KeywordTransport,
    NullTransport, PresharedPadTransport, FIXED_HEADER_LEN,
};
use crate::keys::{GBounds, RuleId};
use crate::library::{GeneratorTag, Library, LibraryConfig, LibraryError};
use crate::stream::{DecryptStream, EncryptStream, StreamChunk};

const EXIT_CODES: &str = "Exit codes:
  0  success
  2  usage error
  3  I/O failure
  4  malformed input data
  5  configuration mismatch
  6  attack or statistical test unsuccessful
  7  ambiguous decryption (variation a)";

#[derive(Parser)]
#[command(
    name = "mtp",
    version,
    about = "Multiple-time pad cipher: key libraries, encryption, attacks",
    after_help = EXIT_CODES
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a basic-key library file
    KeygenLibrary(KeygenArgs),
    /// Encrypt a message file into a frame
    Encrypt(EncryptArgs),
    /// Decrypt a frame back into the message
    Decrypt(DecryptArgs),
    /// Run the known-plaintext and brute-force attacks on a frame
    #[command(subcommand)]
    Attack(AttackCommand),
    /// Compute exact key-space sizes
    Keyspace(KeyspaceArgs),
    /// Run the monobit randomness test over a file's bits
    Stats(StatsArgs),
    /// Encrypt from a stream, processing input in chunks
    StreamEncrypt(EncryptArgs),
    /// Decrypt a frame from a stream, emitting plaintext as it resolves
    StreamDecrypt(DecryptArgs),
}

#[derive(Args)]
struct KeygenArgs {
    /// Generation method: 1 = independent keys, 2 = master string
    #[arg(long, value_parser = ["1", "2"])]
    method: String,
    /// Number of basic keys (method 1)
    #[arg(short = 'k', long = "keys")]
    k: Option<u32>,
    /// Basic-key length in bits (method 1); accepts 2^N
    #[arg(short = 's', long = "key-bits", value_parser = parse_scaled_u64)]
    s: Option<u64>,
    /// Master-string length in bits (method 2); accepts 2^N
    #[arg(short = 'l', long = "master-bits", value_parser = parse_scaled_u64)]
    l: Option<u64>,
    /// Output library path
    #[arg(short = 'o', long = "out")]
    out: PathBuf,
    /// Deterministic test-mode seed (the file is tagged as a test library)
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct EncryptArgs {
    /// Library file (defaults to $MTP_LIBRARY)
    #[arg(long = "lib", env = "MTP_LIBRARY")]
    library: PathBuf,
    #[arg(long, value_enum, default_value_t = VariantArg::Main)]
    variant: VariantArg,
    #[arg(long, value_enum, default_value_t = RuleArg::A)]
    rule: RuleArg,
    /// Smallest selection size g
    #[arg(long, default_value_t = 1)]
    g_min: u64,
    /// Largest selection size g (default: 16, capped at the key count)
    #[arg(long)]
    g_max: Option<u64>,
    /// Input file (stdin when omitted)
    #[arg(long = "in")]
    input: Option<PathBuf>,
    /// Output file (stdout when omitted)
    #[arg(long = "out")]
    output: Option<PathBuf>,
    /// Block length in bits; method 1 libraries fix it to the key length
    #[arg(long, value_parser = parse_scaled_u64)]
    block_bits: Option<u64>,
    /// Zero-pad the message to the full block instead of truncating keys
    /// (the padding then survives decryption)
    #[arg(long)]
    pad_to_block: bool,
    #[arg(long, value_enum, default_value_t = TransportArg::Null)]
    transport: TransportArg,
    /// Pad material for --transport pad
    #[arg(long)]
    pad_file: Option<PathBuf>,
    /// Recipient identity handed to the keyword transport
    #[arg(long, default_value = "receiver")]
    recipient: String,
    /// Seal both keywords as a single combined ciphertext
    #[arg(long)]
    combined_keyword: bool,
    /// Deterministic test-mode seed for keyword and random-key sampling
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct DecryptArgs {
    /// Library file (defaults to $MTP_LIBRARY)
    #[arg(long = "lib", env = "MTP_LIBRARY")]
    library: PathBuf,
    /// Input frame (stdin when omitted)
    #[arg(long = "in")]
    input: Option<PathBuf>,
    /// Output file (stdout when omitted)
    #[arg(long = "out")]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = TransportArg::Null)]
    transport: TransportArg,
    /// Pad material for --transport pad
    #[arg(long)]
    pad_file: Option<PathBuf>,
    /// Own identity handed to the keyword transport
    #[arg(long, default_value = "receiver")]
    identity: String,
}

#[derive(Subcommand)]
enum AttackCommand {
    /// Gaussian-elimination known-plaintext attack on basic-design frames
    KnownPlaintext(AttackArgs),
    /// Exhaustive keyword search (refuses infeasible key spaces)
    BruteForce(BruteForceArgs),
    /// Rule-A attack on the weak variations (b, c, e)
    Variation(AttackArgs),
}

#[derive(Args)]
struct AttackArgs {
    /// Library file (defaults to $MTP_LIBRARY)
    #[arg(long = "lib", env = "MTP_LIBRARY")]
    library: PathBuf,
    /// Known plaintext bits: text lines "position bit", 1-indexed
    #[arg(long)]
    known: PathBuf,
    /// Assume this variant instead of the frame header's
    #[arg(long, value_enum)]
    variant: Option<VariantArg>,
    /// Write recovered plaintext bytes here (hex to stdout otherwise)
    #[arg(long = "out")]
    output: Option<PathBuf>,
    /// Frame to attack
    frame: PathBuf,
}

#[derive(Args)]
struct BruteForceArgs {
    #[command(flatten)]
    base: AttackArgs,
    /// Refuse key spaces larger than this many keywords
    #[arg(long, default_value_t = 1 << 20)]
    max_keywords: u64,
}

#[derive(Args)]
struct KeyspaceArgs {
    /// 1 = independent keys, 2 = master string
    #[arg(long, value_parser = ["1", "2"])]
    method: String,
    /// Number of basic keys (method 1)
    #[arg(short = 'k', long = "keys")]
    k: Option<u64>,
    /// Master-string length in bits (method 2); accepts 2^N
    #[arg(short = 'l', long = "master-bits", value_parser = parse_scaled_u64)]
    l: Option<u64>,
    /// Smallest selection size (method 1; omit both bounds for free g)
    #[arg(long)]
    g_min: Option<u64>,
    /// Largest selection size
    #[arg(long)]
    g_max: Option<u64>,
    /// Fixed selection size (shorthand for --g-min N --g-max N; required
    /// for method 2)
    #[arg(short = 'g', long)]
    g: Option<u64>,
    /// How many private keys the attacker must find (1 or 2)
    #[arg(long, default_value_t = 1)]
    keys_in_use: u8,
}

#[derive(Args)]
struct StatsArgs {
    /// Input file (stdin when omitted); every bit is tested
    #[arg(long = "in")]
    input: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum VariantArg {
    Main,
    A,
    B,
    C,
    D,
    E,
    BasicF,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Variant {
        match v {
            VariantArg::Main => Variant::Main,
            VariantArg::A => Variant::VarA,
            VariantArg::B => Variant::VarB,
            VariantArg::C => Variant::VarC,
            VariantArg::D => Variant::VarD,
            VariantArg::E => Variant::VarE,
            VariantArg::BasicF => Variant::BasicF,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum RuleArg {
    A,
    B,
}

impl From<RuleArg> for RuleId {
    fn from(r: RuleArg) -> RuleId {
        match r {
            RuleArg::A => RuleId::RuleA,
            RuleArg::B => RuleId::RuleB,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TransportArg {
    /// Identity channel (loopback and tests)
    Null,
    /// XOR with a preshared pad file
    Pad,
}

/// Accepts plain integers and `2^N`.
fn parse_scaled_u64(text: &str) -> Result<u64, String> {
    if let Some(exp) = text.strip_prefix("2^") {
        let exp: u32 = exp.parse().map_err(|e| format!("bad exponent: {e}"))?;
        return 1u64
            .checked_shl(exp)
            .ok_or_else(|| format!("2^{exp} overflows 64 bits"));
    }
    text.parse().map_err(|e| format!("{e}"))
}

// ---- error-to-exit-code mapping -----------------------------------------

#[derive(Debug)]
struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    fn new(code: u8, message: impl Into<String>) -> Self {
        CliError {
            code,
            message: message.into(),
        }
    }

    fn usage(message: impl Into<String>) -> Self {
        CliError::new(2, message)
    }

    fn io(message: impl Into<String>) -> Self {
        CliError::new(3, message)
    }

    fn data(message: impl Into<String>) -> Self {
        CliError::new(4, message)
    }

    fn config(message: impl Into<String>) -> Self {
        CliError::new(5, message)
    }

    fn unsuccessful(message: impl Into<String>) -> Self {
        CliError::new(6, message)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::io(e.to_string())
    }
}

impl From<LibraryError> for CliError {
    fn from(e: LibraryError) -> Self {
        let code = match &e {
            LibraryError::Io(_) => 3,
            LibraryError::BadMagic
            | LibraryError::BadVersion(_)
            | LibraryError::BadMethod(_)
            | LibraryError::Truncated
            | LibraryError::CrcMismatch => 4,
            _ => 5,
        };
        CliError::new(code, e.to_string())
    }
}

impl From<FrameError> for CliError {
    fn from(e: FrameError) -> Self {
        let code = match &e {
            FrameError::BadMagic
            | FrameError::BadVersion(_)
            | FrameError::BadVariant(_)
            | FrameError::BadRule(_)
            | FrameError::BadFlags(_)
            | FrameError::Truncated
            | FrameError::CrcMismatch
            | FrameError::OddPayload(_) => 4,
            _ => 5,
        };
        CliError::new(code, e.to_string())
    }
}

impl From<cipher::CipherError> for CliError {
    fn from(e: cipher::CipherError) -> Self {
        CliError::config(e.to_string())
    }
}

impl From<crate::keys::KeyError> for CliError {
    fn from(e: crate::keys::KeyError) -> Self {
        CliError::config(e.to_string())
    }
}

impl From<AttackError> for CliError {
    fn from(e: AttackError) -> Self {
        match &e {
            AttackError::BruteForceInfeasible { .. } => CliError::unsuccessful(e.to_string()),
            _ => CliError::config(e.to_string()),
        }
    }
}

/// Parses arguments and runs a command; the binary forwards the result.
pub fn run<I, T>(argv: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            // clap prints help/usage itself: exit 0 for --help/--version,
            // 2 for unknown or malformed flags
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("mtp: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::KeygenLibrary(args) => keygen_library(args),
        Command::Encrypt(args) => encrypt_frame(args),
        Command::Decrypt(args) => decrypt_frame(args),
        Command::Attack(cmd) => attack(cmd),
        Command::Keyspace(args) => keyspace(args),
        Command::Stats(args) => stats(args),
        Command::StreamEncrypt(args) => stream_encrypt(args),
        Command::StreamDecrypt(args) => stream_decrypt(args),
    }
}

// ---- helpers --------------------------------------------------------------

fn read_input(path: &Option<PathBuf>) -> Result<Vec<u8>, CliError> {
    match path {
        Some(p) => fs::read(p).map_err(|e| CliError::io(format!("{}: {e}", p.display()))),
        None => {
            let mut buf = Vec::new();
            io::stdin().lock().read_to_end(&mut buf)?;
            Ok(buf)
        }
    }
}

fn write_output(path: &Option<PathBuf>, data: &[u8]) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, data).map_err(|e| CliError::io(format!("{}: {e}", p.display()))),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(data)?;
            out.flush()?;
            Ok(())
        }
    }
}

fn load_library(path: &Path) -> Result<Library, CliError> {
    Ok(Library::read_from_file(path)?)
}

fn make_entropy(seed: Option<u64>) -> Box<dyn EntropySource> {
    match seed {
        Some(seed) => Box::new(SeededEntropy::new(seed)),
        None => Box::new(SystemEntropy),
    }
}

fn make_transport(
    kind: TransportArg,
    pad_file: &Option<PathBuf>,
) -> Result<Box<dyn KeywordTransport>, CliError> {
    match kind {
        TransportArg::Null => Ok(Box::new(NullTransport)),
        TransportArg::Pad => {
            let path = pad_file
                .as_ref()
                .ok_or_else(|| CliError::usage("--transport pad requires --pad-file"))?;
            let pad =
                fs::read(path).map_err(|e| CliError::io(format!("{}: {e}", path.display())))?;
            Ok(Box::new(PresharedPadTransport::new(pad)))
        }
    }
}

/// Session block length: the library's fixed key length when it has one,
/// otherwise an explicit flag or the message length itself.
fn resolve_block_bits(
    lib: &Library,
    block_bits: Option<u64>,
    msg_bits: Option<u64>,
) -> Result<u64, CliError> {
    match (lib.fixed_key_len(), block_bits, msg_bits) {
        (Some(s), None, _) => Ok(s),
        (Some(s), Some(requested), _) if requested == s => Ok(s),
        (Some(s), Some(requested), _) => Err(CliError::config(format!(
            "this library fixes the block length to {s} bits, not {requested}"
        ))),
        (None, Some(requested), _) => Ok(requested),
        (None, None, Some(bits)) => Ok(bits.max(1)),
        (None, None, None) => Err(CliError::usage(
            "stream-encrypt over a master-string library requires --block-bits",
        )),
    }
}

fn build_session_config(
    args: &EncryptArgs,
    lib: &Library,
    msg_bits: Option<u64>,
) -> Result<SessionConfig, CliError> {
    let s = resolve_block_bits(lib, args.block_bits, msg_bits)?;
    if let Some(bits) = msg_bits {
        if bits > s {
            return Err(CliError::config(format!(
                "message of {bits} bits exceeds the block length {s}"
            )));
        }
    }
    let policy = if args.pad_to_block {
        TruncationPolicy::ZeroPad
    } else {
        TruncationPolicy::TruncateKeys
    };
    Ok(SessionConfig::new(
        args.variant.into(),
        args.rule.into(),
        GBounds::new(args.g_min, resolve_g_max(args, lib))?,
        s,
        policy,
    )?)
}

fn resolve_g_max(args: &EncryptArgs, lib: &Library) -> u64 {
    args.g_max
        .unwrap_or_else(|| 16.min(lib.config().key_count()).max(args.g_min))
}

/// Known-plaintext file: whitespace-separated `position bit` per line,
/// positions 1-indexed, `#` starts a comment.
fn parse_known_file(path: &Path) -> Result<Vec<(usize, bool)>, CliError> {
    let text =
        fs::read_to_string(path).map_err(|e| CliError::io(format!("{}: {e}", path.display())))?;
    let mut known = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut fields = line.split_whitespace();
        let (Some(pos), Some(bit), None) = (fields.next(), fields.next(), fields.next()) else {
            return Err(CliError::data(format!(
                "{}:{}: expected \"position bit\"",
                path.display(),
                lineno + 1
            )));
        };
        let pos: usize = pos.parse().map_err(|e| {
            CliError::data(format!(
                "{}:{}: bad position: {e}",
                path.display(),
                lineno + 1
            ))
        })?;
        if pos == 0 {
            return Err(CliError::data(format!(
                "{}:{}: positions are 1-indexed",
                path.display(),
                lineno + 1
            )));
        }
        let bit = match bit {
            "0" => false,
            "1" => true,
            other => {
                return Err(CliError::data(format!(
                    "{}:{}: bad bit {other:?}",
                    path.display(),
                    lineno + 1
                )))
            }
        };
        known.push((pos - 1, bit));
    }
    Ok(known)
}

// ---- commands ---------------------------------------------------------------

fn keygen_library(args: KeygenArgs) -> Result<(), CliError> {
    let config = match args.method.as_str() {
        "1" => {
            let k = args
                .k
                .ok_or_else(|| CliError::usage("method 1 requires -k"))?;
            let s = args
                .s
                .ok_or_else(|| CliError::usage("method 1 requires -s"))?;
            LibraryConfig::IndependentKeys { k, s }
        }
        "2" => {
            let l = args
                .l
                .ok_or_else(|| CliError::usage("method 2 requires -l"))?;
            LibraryConfig::MasterString { l }
        }
        _ => unreachable!("clap validates the method"),
    };
    let tag = if args.seed.is_some() {
        GeneratorTag::SeededTest
    } else {
        GeneratorTag::ExternalEntropy
    };
    let mut entropy = make_entropy(args.seed);
    let lib = Library::generate(config, tag, entropy.as_mut())?;
    lib.write_to_file(&args.out)?;
    eprintln!(
        "wrote {} ({} basic keys, fingerprint {})",
        args.out.display(),
        lib.config().key_count(),
        hex8(&lib.fingerprint())
    );
    Ok(())
}

fn hex8(fp: &[u8; 8]) -> String {
    fp.iter().map(|b| format!("{b:02x}")).collect()
}

fn encrypt_frame(args: EncryptArgs) -> Result<(), CliError> {
    let lib = load_library(&args.library)?;
    let message = read_input(&args.input)?;
    let msg_bits = message.len() as u64 * 8;
    let cfg = build_session_config(&args, &lib, Some(msg_bits))?;
    let mut entropy = make_entropy(args.seed);
    let keys = SessionKeys::generate(&cfg, &lib, entropy.as_mut())?;
    let plaintext =
        BitString::from_bytes(&message, msg_bits as usize).expect("buffer holds its own bits");
    let out = cipher::encrypt(&cfg, &keys, &plaintext)?;
    let mut transport = make_transport(args.transport, &args.pad_file)?;
    let frame = build_frame(
        &cfg,
        &lib,
        &keys,
        &out,
        transport.as_mut(),
        &args.recipient,
        args.combined_keyword,
    )?;
    write_output(&args.output, &frame)
}

fn decrypt_frame(args: DecryptArgs) -> Result<(), CliError> {
    let lib = load_library(&args.library)?;
    let frame = read_input(&args.input)?;
    let mut transport = make_transport(args.transport, &args.pad_file)?;
    let opened = open_frame(&frame, &lib, transport.as_mut(), &args.identity)?;
    match cipher::decrypt(&opened.cfg, &opened.keys, &opened.output)? {
        Recovered::Plaintext(p) => write_output(&args.output, p.as_bytes()),
        Recovered::Ambiguous(pair) => {
            // nothing in the frame can tell R1 from its complement, so
            // both candidates are surfaced
            match &args.output {
                Some(path) => {
                    fs::write(path, pair[0].as_bytes())?;
                    let alt = path.with_extension("alt");
                    fs::write(&alt, pair[1].as_bytes())?;
                    eprintln!(
                        "mtp: variation-a decryption is ambiguous; wrote both candidates ({} and {})",
                        path.display(),
                        alt.display()
                    );
                }
                None => {
                    println!("candidate0 {}", pair[0].to_hex());
                    println!("candidate1 {}", pair[1].to_hex());
                    eprintln!("mtp: variation-a decryption is ambiguous; printed both candidates");
                }
            }
            Err(CliError::new(7, "ambiguous decryption"))
        }
    }
}

/// The attacker's view of a frame: public header and ciphertexts only.
/// Keyword ciphertexts stay sealed.
fn attacker_view(frame_path: &Path, lib: &Library) -> Result<(Frame, CipherOutput), CliError> {
    let bytes =
        fs::read(frame_path).map_err(|e| CliError::io(format!("{}: {e}", frame_path.display())))?;
    let frame = Frame::parse(&bytes)?;
    frame.header.verify_fingerprint(lib)?;
    let output = if frame.header.variant == Variant::BasicF {
        CipherOutput {
            c_p: frame.c_section.clone(),
            c_r: None,
        }
    } else {
        let (c_p, c_r) = demux(&frame.c_section)?;
        CipherOutput {
            c_p,
            c_r: Some(c_r),
        }
    };
    Ok((frame, output))
}

fn emit_recovered(
    output: &Option<PathBuf>,
    record: &TrialRecord,
    plaintext: &BitString,
) -> Result<(), CliError> {
    println!("{record}");
    match output {
        Some(path) => fs::write(path, plaintext.as_bytes())
            .map_err(|e| CliError::io(format!("{}: {e}", path.display())))?,
        None => println!("plaintext {}", plaintext.to_hex()),
    }
    Ok(())
}

fn failure_record(rank: usize) -> TrialRecord {
    TrialRecord {
        trial: 0,
        rank,
        success: false,
        bit_match: 0.0,
    }
}

fn attack(cmd: AttackCommand) -> Result<(), CliError> {
    match cmd {
        AttackCommand::KnownPlaintext(args) => {
            let lib = load_library(&args.library)?;
            let (frame, output) = attacker_view(&args.frame, &lib)?;
            let input = AttackInput {
                lib: &lib,
                c_p: output.c_p,
                c_r: output.c_r,
                known: parse_known_file(&args.known)?,
                variant: args.variant.map_or(frame.header.variant, Into::into),
                rule: frame.header.rule,
            };
            match known_plaintext_attack_basic(&input)? {
                AttackOutcome::Recovered {
                    plaintext, rank, ..
                } => emit_recovered(
                    &args.output,
                    &TrialRecord {
                        trial: 0,
                        rank,
                        success: true,
                        bit_match: 1.0,
                    },
                    &plaintext,
                ),
                AttackOutcome::Underdetermined { rank, reason } => {
                    println!("{}", failure_record(rank));
                    Err(CliError::unsuccessful(format!("underdetermined: {reason}")))
                }
                AttackOutcome::WrongModel { rank } => {
                    println!("{}", failure_record(rank));
                    Err(CliError::unsuccessful(
                        "equations inconsistent: ciphertext was not produced by the basic design",
                    ))
                }
            }
        }
        AttackCommand::Variation(args) => {
            let lib = load_library(&args.library)?;
            let (frame, output) = attacker_view(&args.frame, &lib)?;
            let input = AttackInput {
                lib: &lib,
                c_p: output.c_p,
                c_r: output.c_r,
                known: parse_known_file(&args.known)?,
                variant: args.variant.map_or(frame.header.variant, Into::into),
                rule: frame.header.rule,
            };
            match attack_variation_rule_a(&input)? {
                VariationAttackOutcome::Recovered {
                    plaintext, rank, ..
                } => emit_recovered(
                    &args.output,
                    &TrialRecord {
                        trial: 0,
                        rank,
                        success: true,
                        bit_match: 1.0,
                    },
                    &plaintext,
                ),
                VariationAttackOutcome::Underdetermined { rank, reason } => {
                    println!("{}", failure_record(rank));
                    Err(CliError::unsuccessful(format!("underdetermined: {reason}")))
                }
            }
        }
        AttackCommand::BruteForce(args) => {
            let lib = load_library(&args.base.library)?;
            let (frame, output) = attacker_view(&args.base.frame, &lib)?;
            let input = AttackInput {
                lib: &lib,
                c_p: output.c_p,
                c_r: output.c_r,
                known: parse_known_file(&args.base.known)?,
                variant: args.base.variant.map_or(frame.header.variant, Into::into),
                rule: frame.header.rule,
            };
            let consistent = brute_force_attack(&input, args.max_keywords)?;
            println!("consistent-keywords {}", consistent.len());
            for kw in consistent.iter().take(32) {
                println!("keyword {:?}", kw.ids());
            }
            if consistent.len() > 32 {
                println!("... ({} more)", consistent.len() - 32);
            }
            Ok(())
        }
    }
}

fn keyspace(args: KeyspaceArgs) -> Result<(), CliError> {
    let params = match args.method.as_str() {
        "1" => {
            let k = args
                .k
                .ok_or_else(|| CliError::usage("method 1 requires -k"))?;
            let bounds = match (args.g, args.g_min, args.g_max) {
                (Some(g), None, None) => Some(GBounds::exactly(g)?),
                (None, Some(lo), Some(hi)) => Some(GBounds::new(lo, hi)?),
                (None, None, None) => None,
                _ => {
                    return Err(CliError::usage(
                        "give either -g, or --g-min with --g-max, or neither",
                    ))
                }
            };
            KeySpaceParams::IndependentKeys { k, bounds }
        }
        "2" => {
            let l = args
                .l
                .ok_or_else(|| CliError::usage("method 2 requires -l"))?;
            let g = args
                .g
                .ok_or_else(|| CliError::usage("method 2 requires -g"))?;
            KeySpaceParams::MasterString { l, g }
        }
        _ => unreachable!("clap validates the method"),
    };
    let report = key_space_size(params, args.keys_in_use)?;
    println!("{report}");
    Ok(())
}

fn stats(args: StatsArgs) -> Result<(), CliError> {
    let data = read_input(&args.input)?;
    let bits = BitString::from_bytes(&data, data.len() * 8).expect("buffer holds its own bits");
    let report = monobit_test(&bits)?;
    println!("{report}");
    if report.pass {
        Ok(())
    } else {
        Err(CliError::unsuccessful("monobit test failed"))
    }
}

// ---- streaming --------------------------------------------------------------

const STREAM_CHUNK_BYTES: usize = 4096;

fn open_reader(path: &Option<PathBuf>) -> Result<Box<dyn Read>, CliError> {
    match path {
        Some(p) => {
            Ok(Box::new(fs::File::open(p).map_err(|e| {
                CliError::io(format!("{}: {e}", p.display()))
            })?))
        }
        None => Ok(Box::new(io::stdin().lock())),
    }
}

fn open_writer(path: &Option<PathBuf>) -> Result<Box<dyn Write>, CliError> {
    match path {
        Some(p) => {
            Ok(Box::new(fs::File::create(p).map_err(|e| {
                CliError::io(format!("{}: {e}", p.display()))
            })?))
        }
        None => Ok(Box::new(io::stdout().lock())),
    }
}

/// Reads the input in chunks and runs the cipher incrementally. The
/// frame layout carries section lengths ahead of the payload, so the
/// assembled frame is written once the total is known.
fn stream_encrypt(args: EncryptArgs) -> Result<(), CliError> {
    let lib = load_library(&args.library)?;
    let mut reader = open_reader(&args.input)?;
    let cfg = build_session_config(&args, &lib, None)?;
    let mut entropy = make_entropy(args.seed);
    let keys = SessionKeys::generate(&cfg, &lib, entropy.as_mut())?;

    let mut session = EncryptStream::open(&cfg, &keys)?;
    let mut payload = BitBuf::new();
    let append = |chunk: StreamChunk, payload: &mut BitBuf| -> Result<(), CliError> {
        match &chunk.c_r {
            Some(c_r) => payload.extend(&framing::mux(&chunk.c_p, c_r)?),
            None => payload.extend(&chunk.c_p),
        }
        Ok(())
    };

    let mut buf = vec![0u8; STREAM_CHUNK_BYTES];
    loop {
        let n = reader.read(&mut buf)?;
        if n == 0 {
            break;
        }
        let bits = BitString::from_bytes(&buf[..n], n * 8).expect("buffer holds its own bits");
        append(session.push(&bits)?, &mut payload)?;
    }
    append(session.finish()?, &mut payload)?;

    let mut transport = make_transport(args.transport, &args.pad_file)?;
    let out = if cfg.variant.has_second_ciphertext() {
        let (c_p, c_r) = demux(&payload.freeze())?;
        CipherOutput {
            c_p,
            c_r: Some(c_r),
        }
    } else {
        CipherOutput {
            c_p: payload.freeze(),
            c_r: None,
        }
    };
    let frame = build_frame(
        &cfg,
        &lib,
        &keys,
        &out,
        transport.as_mut(),
        &args.recipient,
        args.combined_keyword,
    )?;
    let mut writer = open_writer(&args.output)?;
    writer.write_all(&frame)?;
    writer.flush()?;
    Ok(())
}

fn read_exact_or_truncated(reader: &mut dyn Read, buf: &mut [u8]) -> Result<(), CliError> {
    reader
        .read_exact(buf)
        .map_err(|_| CliError::from(FrameError::Truncated))
}

/// Starts emitting plaintext as soon as the header and A-section have
/// arrived; payload bits are decrypted as they stream in. The trailing
/// checksum is verified last, so a corruption report can follow output
/// that was already written.
fn stream_decrypt(args: DecryptArgs) -> Result<(), CliError> {
    let lib = load_library(&args.library)?;
    let mut reader = open_reader(&args.input)?;
    let mut writer = open_writer(&args.output)?;
    let mut crc = Crc32::new();

    let mut fixed = [0u8; FIXED_HEADER_LEN];
    read_exact_or_truncated(reader.as_mut(), &mut fixed)?;
    crc.update(&fixed);
    let (header, len_a) = Frame::parse_fixed_header(&fixed)?;
    header.verify_fingerprint(&lib)?;

    let mut a_section = vec![0u8; len_a];
    read_exact_or_truncated(reader.as_mut(), &mut a_section)?;
    crc.update(&a_section);
    let mut transport = make_transport(args.transport, &args.pad_file)?;
    let (kw_p, kw_r) = framing::unseal_keywords(
        &header,
        &a_section,
        &lib,
        transport.as_mut(),
        &args.identity,
    )?;

    let cfg = header.session_config();
    let keys = SessionKeys::from_keywords(&cfg, &lib, kw_p, kw_r)?;
    let mut session = DecryptStream::open(&cfg, &keys)?;

    let mut c_len = [0u8; 8];
    read_exact_or_truncated(reader.as_mut(), &mut c_len)?;
    crc.update(&c_len);
    let c_bits = u64::from_be_bytes(c_len) as usize;
    let c_bytes = c_bits.div_ceil(8);

    let interleaved = header.variant.has_second_ciphertext();
    let mut demuxer = Demuxer::new();
    let mut emitted = BitBuf::new();
    let mut written_bytes = 0usize;
    let emit = |bits: &BitString,
                emitted: &mut BitBuf,
                written_bytes: &mut usize,
                writer: &mut dyn Write|
     -> Result<(), CliError> {
        emitted.extend(bits);
        let whole = emitted.len() / 8;
        if whole > *written_bytes {
            let seg = emitted.slice(*written_bytes * 8, (whole - *written_bytes) * 8);
            writer.write_all(seg.as_bytes())?;
            *written_bytes = whole;
        }
        Ok(())
    };

    let mut remaining = c_bytes;
    let mut consumed_bits = 0usize;
    let mut buf = vec![0u8; STREAM_CHUNK_BYTES];
    while remaining > 0 {
        let take = remaining.min(STREAM_CHUNK_BYTES);
        read_exact_or_truncated(reader.as_mut(), &mut buf[..take])?;
        crc.update(&buf[..take]);
        remaining -= take;
        let bits_here = (take * 8).min(c_bits - consumed_bits);
        let chunk =
            BitString::from_bytes(&buf[..take], bits_here).expect("buffer holds its own bits");
        consumed_bits += bits_here;
        let out = if interleaved {
            let (c_p, c_r) = demuxer.push(&chunk);
            if c_p.is_empty() {
                continue;
            }
            session.push(&c_p, Some(&c_r))?
        } else {
            session.push(&chunk, None)?
        };
        emit(&out, &mut emitted, &mut written_bytes, writer.as_mut())?;
    }
    if interleaved && !demuxer.is_balanced() {
        return Err(FrameError::OddPayload(c_bits).into());
    }
    let tail = session.finish()?;
    emit(&tail, &mut emitted, &mut written_bytes, writer.as_mut())?;
    // flush a sub-byte remainder as a final padded byte
    if emitted.len() > written_bytes * 8 {
        let seg = emitted.slice(written_bytes * 8, emitted.len() - written_bytes * 8);
        writer.write_all(seg.as_bytes())?;
    }
    writer.flush()?;

    let mut stored = [0u8; 4];
    read_exact_or_truncated(reader.as_mut(), &mut stored)?;
    if crc.finalize() != u32::from_be_bytes(stored) {
        return Err(FrameError::CrcMismatch.into());
    }
    let mut extra = [0u8; 1];
    if reader.read(&mut extra)? != 0 {
        return Err(FrameError::Truncated.into());
    }
    Ok(())
}
