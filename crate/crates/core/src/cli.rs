//! Command-line front end. The `cghw` binary is a thin wrapper over [`run`].

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use crate::analysis::{MetricsReport, DEFAULT_PAIRS, DEFAULT_SEED};
use crate::chaos::{orbit, ChaoticParams};
use crate::cipher::{decrypt, encrypt, Mode};
use crate::envelope::{read_envelope, write_envelope, MAGIC};
use crate::error::{Error, Result};
use crate::image::{read_pgm, write_atomic, write_pgm, GrayImage};
use crate::keyfile::{read_key_file, write_key_file};
use crate::keys::{derive_all_with, ControlScaling, PermutationSource};

#[derive(Debug, Parser)]
#[command(name = "cghw", version, about = "Chaotic gradient Haar wavelet image cipher")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ModeArg {
    Lossless16,
    Paper8,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Lossless16 => Mode::Lossless16,
            ModeArg::Paper8 => Mode::Paper8,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Encrypt a binary PGM; writes the ciphertext and the derived key file.
    Encrypt {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        keyout: PathBuf,
        #[arg(long, value_enum, default_value = "lossless16")]
        mode: ModeArg,
        /// Use the unscaled control parameter formula.
        #[arg(long)]
        strict_eq14: bool,
        /// Sort sub-bands by row/column means; the result cannot be decrypted.
        #[arg(long)]
        data_sort: bool,
    },
    /// Decrypt a ciphertext with its key file.
    Decrypt {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        key: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Security metrics for a PGM or ciphertext file.
    Analyze {
        #[arg(long = "in")]
        input: PathBuf,
        /// Second image for NPCR/UACI.
        #[arg(long = "ref")]
        reference: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_PAIRS)]
        pairs: usize,
        #[arg(long)]
        out: PathBuf,
        /// Also write the report as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Print orbit values of the degree-2 map.
    Keystream {
        #[arg(long)]
        x0: f64,
        #[arg(long)]
        a: f64,
        #[arg(long, default_value_t = 16)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        burn_in: usize,
        /// Decimal places per value.
        #[arg(long, default_value_t = 6)]
        digits: usize,
    },
}

/// Reads a PGM, or the 8-bit view of a ciphertext container.
fn read_image_any(path: &PathBuf) -> Result<GrayImage> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    if bytes.starts_with(&MAGIC) {
        Ok(crate::cipher::CipherEnvelope::from_bytes(&bytes)?.to_gray())
    } else {
        GrayImage::from_pgm_bytes(&bytes)
    }
}

pub fn execute(cli: Cli, stdout: &mut impl Write) -> Result<()> {
    match cli.command {
        Command::Encrypt {
            input,
            out,
            keyout,
            mode,
            strict_eq14,
            data_sort,
        } => {
            let img = read_pgm(&input)?;
            let control = if strict_eq14 {
                ControlScaling::Unscaled
            } else {
                ControlScaling::Halved
            };
            let mut keys = derive_all_with(&img, control)?;
            if data_sort {
                keys = keys.with_permutation(PermutationSource::DataSorted);
            }
            let env = encrypt(&img, &keys, mode.into())?;
            write_key_file(&keys, &keyout)?;
            write_envelope(&env, &out)
        }
        Command::Decrypt { input, key, out } => {
            let keys = read_key_file(&key)?;
            let env = read_envelope(&input)?;
            write_pgm(&decrypt(&env, &keys)?, &out)
        }
        Command::Analyze {
            input,
            reference,
            seed,
            pairs,
            out,
            json,
        } => {
            let img = read_image_any(&input)?;
            let reference = reference.as_ref().map(read_image_any).transpose()?;
            let report = MetricsReport::compute(&img, reference.as_ref(), pairs, seed)?;
            write_atomic(&out, report.to_text().as_bytes())?;
            if let Some(path) = json {
                write_atomic(&path, report.to_json().as_bytes())?;
            }
            Ok(())
        }
        Command::Keystream {
            x0,
            a,
            n,
            burn_in,
            digits,
        } => {
            let params = ChaoticParams::new(x0, a, 2)?;
            let stream = orbit(&params, n, burn_in)?;
            let mut text = String::with_capacity(n * (digits + 4));
            for v in stream.values() {
                text += &format!("{v:.digits$}\n");
            }
            stdout.write_all(text.as_bytes()).map_err(|e| Error::io("<stdout>", e))
        }
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut impl Write) -> std::result::Result<(), CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(CliError::Usage)?;
    execute(cli, stdout).map_err(CliError::Failed)
}

#[derive(Debug)]
pub enum CliError {
    Usage(clap::Error),
    Failed(Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(e) => e.exit_code(),
            CliError::Failed(e) => e.class().exit_code(),
        }
    }
}
